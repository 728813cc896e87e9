#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pseudointel/core.hpp"
#include "pseudointel/errors.hpp"
#include "pseudointel/evaluator_zoo.hpp"
#include "pseudointel/suite_io.hpp"

using namespace pseudointel;
using fixtures::pair;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::io_error;
}

}  // namespace

TEST_CASE("payload codecs round-trip their text form") {
  CHECK(bits("0101") == std::string("\x00\x01\x00\x01", 4));
  CHECK(payload_to_text(Codec::bitvector, bits("0110")) == "0110");
  CHECK(payload_from_text(Codec::tokens, "") == "");
  CHECK(payload_from_text(Codec::symbol, "cat") == "cat");
  CHECK(code_of([] { payload_from_text(Codec::bitvector, "012"); }) == Errc::bad_payload);
  CHECK(code_of([] { payload_from_text(Codec::symbol, ""); }) == Errc::bad_payload);
  CHECK_FALSE(payload_valid(Codec::bitvector, "\x02"));
  CHECK(codec_from_string("tokens") == Codec::tokens);
  CHECK(codec_zero_value(Codec::symbol) == "0");
  CHECK(codec_zero_value(Codec::bitvector) == bits("0"));
  CHECK(codec_zero_value(Codec::tokens).empty());
}

TEST_CASE("payload order is unsigned lexicographic") {
  CHECK(Query("a") < Query("b"));
  CHECK(Query("a") < Query("ab"));
  CHECK(Query("\x7f") < Query("\x80"));
}

TEST_CASE("keyed streams are reproducible and separated") {
  const RandomSource root(42);
  CHECK(root.child("trial").child(3).key() == "trial/3");
  Rng a = root.child("x").stream();
  Rng b = root.child("x").stream();
  Rng c = root.child("y").stream();
  Rng d = root.child_stream("x");
  for (int i = 0; i < 8; ++i) {
    const auto va = a();
    CHECK(va == b());
    CHECK(va == d());
    CHECK(va != c());
  }
  CHECK(RandomSource(1).child("x").stream()() != RandomSource(2).child("x").stream()());
  CHECK(root.child(1).stream()() != root.child("1").stream()());
}

TEST_CASE("uniform_index stays in range and is roughly uniform") {
  Rng rng(7);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) {
    const auto k = rng.uniform_index(5);
    REQUIRE(k < 5);
    ++counts[k];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("pick follows its weights") {
  Rng rng(9);
  const std::vector<double> w{0.1, 0.0, 0.6, 0.3};
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 40000; ++i) ++counts[rng.pick(w)];
  CHECK(counts[1] == 0);
  CHECK(std::abs(counts[2] / 40000.0 - 0.6) < 0.02);
}

TEST_CASE("static evaluator on a single pair queries its x") {
  const StaticDatasetEvaluator e({pair("x", "y")});
  const auto mu = fixtures::labeled({{"x", 1.0, "y"}});
  const auto box = capability_as_blackbox(mu);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto run = run_interaction(e, *box, RandomSource(s));
    REQUIRE(run.transcript.size() == 1);
    CHECK(run.transcript[0].query == Query("x"));
    CHECK(run.verdict.accept);
  }
}

TEST_CASE("static evaluator against a constant box accepts half the time") {
  // Stored {(a,0),(b,1)} against g == 0: accepts exactly when it draws (a,0).
  const auto stored = fixtures::pairs({{"a", "0"}, {"b", "1"}});
  const StaticDatasetEvaluator e(stored);
  const auto g = fixtures::constant("0");
  CHECK(oracle::static_accept_model(stored, *g) == 0.5);
  int accepted = 0;
  std::set<std::string> seen;
  for (std::uint64_t s = 0; s < 4000; ++s) {
    const auto run = run_interaction(e, *g, RandomSource(s));
    accepted += run.verdict.accept;
    seen.insert(run.transcript[0].query.bytes());
    CHECK(run.verdict.accept == (run.transcript[0].query == Query("a")));
  }
  CHECK(seen == std::set<std::string>{"a", "b"});
  CHECK(std::abs(accepted / 4000.0 - 0.5) < 0.04);
}

TEST_CASE("capability box answers with its conditional") {
  const auto box = capability_as_blackbox(builtin_capability("bernoulli"));
  Rng rng(11);
  double ones = 0.0;
  for (int i = 0; i < 10000; ++i) ones += box->respond(Query("x"), rng) == Response("1");
  CHECK(std::abs(ones / 10000.0 - 0.5) <= 0.02);
  CHECK(code_of([&] { box->respond(Query("nope"), rng); }) == Errc::unsupported_query);
}

TEST_CASE("capability box frequencies match the enumerated conditional") {
  const auto mu = builtin_capability("noisy-label");
  const auto box = capability_as_blackbox(mu);
  Rng rng(5);
  for (const char* x : {"a", "b", "d"}) {
    const int draws = 20000;
    double ones = 0.0;
    for (int i = 0; i < draws; ++i) ones += box->respond(Query(x), rng) == Response("1");
    const double p = oracle::conditional(*mu, Query(x), Response("1"));
    const double sd = std::sqrt(p * (1 - p) / draws);
    CHECK(std::abs(ones / draws - p) < 5 * sd);
  }
}

TEST_CASE("adaptive evaluator sees the transcript") {
  const fixtures::AdaptiveEvaluator e;
  const auto says_one = fixtures::table_model({{"a", "1"}, {"b", "1"}, {"c", "0"}});
  const auto says_zero = fixtures::table_model({{"a", "0"}, {"b", "1"}, {"c", "0"}});
  const auto one = run_interaction(e, *says_one, RandomSource(1));
  REQUIRE(one.transcript.size() == 2);
  CHECK(one.transcript[1].query == Query("b"));
  CHECK(one.verdict.accept);
  const auto zero = run_interaction(e, *says_zero, RandomSource(1));
  CHECK(zero.transcript[1].query == Query("c"));
  CHECK_FALSE(zero.verdict.accept);
}

TEST_CASE("asking beyond the declared rounds is a session overrun") {
  const fixtures::AdaptiveEvaluator e(1, 2);
  const auto g = fixtures::constant("1");
  CHECK(code_of([&] { run_interaction(e, *g, RandomSource(0)); }) == Errc::session_overrun);
}

TEST_CASE("ledger counts one model query per transcript entry") {
  const fixtures::AdaptiveEvaluator e;
  const auto g = fixtures::constant("1");
  ResourceLedger ledger;
  std::size_t total = 0;
  for (std::uint64_t s = 0; s < 10; ++s) total += run_interaction(e, *g, RandomSource(s), &ledger).transcript.size();
  CHECK(ledger.model_queries == total);
  CHECK(total == 20);
}

TEST_CASE("replaying a seed reproduces the transcript") {
  const auto mu = builtin_capability("kgram-ab");
  Rng draw(3);
  std::vector<SamplePair> stored;
  for (int i = 0; i < 6; ++i) stored.push_back(mu->sample(draw));
  const StaticDatasetEvaluator e(stored, 3);
  const auto box = capability_as_blackbox(mu);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto a = run_interaction(e, *box, RandomSource(s).child("replay"));
    const auto b = run_interaction(e, *box, RandomSource(s).child("replay"));
    CHECK(a.transcript == b.transcript);
    CHECK(a.verdict == b.verdict);
  }
}

TEST_CASE("ledger merge adds counts and keeps the larger round bound") {
  ResourceLedger a{1, 2, 3, 4, 5, 6, 7, std::nullopt, 2.0};
  const ResourceLedger b{10, 20, 1, 40, 50, 60, 70, 1.5, 9.0};
  a += b;
  CHECK(a.samples_model == 11);
  CHECK(a.rounds == 3);
  CHECK(a.compute_steps_evaluator == 77);
  CHECK(a.expressivity_bits_model == 1.5);
  CHECK(a.expressivity_bits_evaluator == 2.0);
}
