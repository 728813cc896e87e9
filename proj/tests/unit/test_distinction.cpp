#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pseudointel/capabilities.hpp"
#include "pseudointel/distinction.hpp"
#include "pseudointel/errors.hpp"
#include "pseudointel/evaluator_zoo.hpp"
#include "pseudointel/suite_io.hpp"

using namespace pseudointel;

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

/// e_S trained on the exact distribution: every support point once, weighted
/// by repetition proportional to its mass (masses here are multiples of 0.1).
std::vector<SamplePair> proportional_sample(const Capability& mu) {
  std::vector<SamplePair> out;
  for (const auto& wp : oracle::joint(mu)) {
    const int copies = static_cast<int>(std::lround(wp.probability * 10));
    for (int i = 0; i < copies; ++i) out.push_back(wp.pair);
  }
  return out;
}

DistinctionEstimate estimate(double dist, double radius) {
  DistinctionEstimate e;
  e.dist = dist;
  e.radius = radius;
  return e;
}

}  // namespace

TEST_CASE("hoeffding radius has the documented closed form") {
  CHECK(hoeffding_radius(10000, 0.01) == doctest::Approx(2 * std::sqrt(std::log(400.0) / 20000.0)));
  // Doubling N shrinks the radius by exactly sqrt(2).
  for (std::uint64_t n : {1u, 7u, 500u, 10000u}) {
    CHECK(hoeffding_radius(n, 0.05) / hoeffding_radius(2 * n, 0.05) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
  CHECK(code_of([] { hoeffding_radius(0, 0.1); }) == Errc::invalid_config);
  CHECK(code_of([] { hoeffding_radius(10, 0.0); }) == Errc::invalid_config);
  CHECK(code_of([] { hoeffding_radius(10, 1.0); }) == Errc::invalid_config);
}

TEST_CASE("identical arms stay within the radius") {
  const auto mu = builtin_capability("noisy-label");
  const auto e = learn_static_evaluator(fixtures::pairs({{"a", "1"}, {"b", "0"}, {"d", "1"}}));
  const auto g = capability_as_blackbox(mu);
  CHECK(exact_distinction(*e, *g, *mu) == 0.0);
  int within = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto est = mc_distinction(*e, *g, mu, 500, 0.01, RandomSource(s));
    within += est.dist <= est.radius;
  }
  CHECK(within >= 198);
}

TEST_CASE("biased shortcut: static evaluator separates by one tenth") {
  const auto mu = builtin_capability("biased-shortcut");
  const auto stored = proportional_sample(*mu);
  REQUIRE(stored.size() == 10);
  const auto e = learn_static_evaluator(stored);
  const auto g = fixtures::constant("0");
  CHECK(oracle::static_dist(stored, *g, *mu) == doctest::Approx(0.1));
  CHECK(exact_distinction(*e, *g, *mu) == doctest::Approx(0.1).epsilon(1e-12));
  const auto est = mc_distinction(*e, *g, mu, 10000, 0.01, RandomSource(77));
  CHECK(std::abs(est.dist - 0.1) <= est.radius);
  CHECK(est.p_capability == 1.0);
  CHECK(est.trials_per_arm == 10000);
}

TEST_CASE("a model perfect on the stored set accepts with estimate exactly one") {
  const auto mu = builtin_capability("noisy-label");
  const auto stored = fixtures::pairs({{"a", "1"}, {"b", "0"}, {"c", "1"}});
  const auto e = learn_static_evaluator(stored);
  const auto g = learn_memorizer(stored, Response("0"));
  const auto est = mc_distinction(*e, *g, mu, 2000, 0.05, RandomSource(5));
  CHECK(est.p_model == 1.0);
  CHECK(est.dist == doctest::Approx(1.0 - est.p_capability));
  const double exact = oracle::static_dist(stored, *g, *mu);
  CHECK(exact == doctest::Approx((0.5 + 0.2 + 0.0) / 3.0));
  CHECK(exact_distinction(*e, *g, *mu) == doctest::Approx(exact));
}

TEST_CASE("exact distinction worked examples") {
  const auto stored = fixtures::pairs({{"a", "0"}, {"b", "1"}});
  const auto mu = fixtures::labeled({{"a", 0.5, "0"}, {"b", 0.5, "1"}});
  const auto e = learn_static_evaluator(stored);
  CHECK(exact_distinction(*e, *fixtures::constant("0"), *mu) == 0.5);
  CHECK(exact_distinction(*e, *fixtures::table_model({{"a", "0"}, {"b", "1"}}), *mu) == 0.0);
}

TEST_CASE("exact distinction with a randomized model uses its response table") {
  const auto mu = fixtures::coin(0.3);
  const auto e = learn_static_evaluator(fixtures::pairs({{"x", "1"}}));
  const fixtures::CoinModel g(0.8);
  CHECK(exact_distinction(*e, g, *mu) == doctest::Approx(0.5));
}

TEST_CASE("exact distinction refuses what it cannot enumerate") {
  const auto mu = fixtures::labeled({{"a", 1.0, "1"}});
  const fixtures::AdaptiveEvaluator adaptive;
  CHECK(code_of([&] { exact_distinction(adaptive, *fixtures::constant("1"), *mu); }) == Errc::not_enumerable);
  const auto e = learn_static_evaluator(
      std::vector<SamplePair>{{Query(bits("00000000000000000000")), Response("1")}});
  const auto big = std::make_shared<ParityCapability>("big", 20, std::vector<std::size_t>{1});
  CHECK(code_of([&] { exact_distinction(*e, *fixtures::constant("1"), *big); }) == Errc::not_enumerable);
  struct Opaque final : Model {
    std::string label() const override { return "opaque"; }
    Response respond(const Query&, Rng& rng) const override { return Response(rng.bernoulli(0.5) ? "1" : "0"); }
  };
  CHECK(code_of([&] { exact_distinction(*e, Opaque{}, *mu); }) == Errc::not_enumerable);
}

TEST_CASE("mc distinction validates its inputs") {
  const auto mu = fixtures::coin(0.5);
  const auto e = learn_static_evaluator(fixtures::pairs({{"x", "1"}}));
  const auto g = fixtures::constant("1");
  CHECK(code_of([&] { mc_distinction(*e, *g, mu, 0, 0.1, RandomSource(0)); }) == Errc::invalid_config);
  CHECK(code_of([&] { mc_distinction(*e, *g, mu, 10, 1.5, RandomSource(0)); }) == Errc::invalid_config);
}

TEST_CASE("mc distinction is reproducible and charges both arms") {
  const auto mu = builtin_capability("noisy-label");
  const auto e = learn_static_evaluator(fixtures::pairs({{"a", "1"}, {"d", "0"}}));
  const auto g = fixtures::constant("1");
  ResourceLedger ledger;
  const auto a = mc_distinction(*e, *g, mu, 700, 0.05, RandomSource(3), &ledger);
  const auto b = mc_distinction(*e, *g, mu, 700, 0.05, RandomSource(3));
  CHECK(a.p_model == b.p_model);
  CHECK(a.p_capability == b.p_capability);
  CHECK(ledger.model_queries == 700);
  CHECK(ledger.oracle_queries == 700);
}

TEST_CASE("decision rule examples") {
  CHECK(decide_distinguish(estimate(0.01, 0.02), 0.1) == Decision::cannot_distinguish);
  CHECK(decide_distinguish(estimate(0.9, 0.05), 0.5) == Decision::distinguishes);
  CHECK(decide_distinguish(estimate(0.1, 0.05), 0.1) == Decision::inconclusive);
  // Boundary: an interval ending exactly at epsilon cannot distinguish.
  CHECK(decide_distinguish(estimate(0.25, 0.25), 0.5) == Decision::cannot_distinguish);
  CHECK(to_string(Decision::inconclusive) == "inconclusive");
}

TEST_CASE("decision rule is monotone in the estimate") {
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double eps = 0.05 + 0.9 * rng.uniform01();
    const double radius = 0.2 * rng.uniform01();
    const double lo = rng.uniform01(), hi = std::max(lo, rng.uniform01());
    const auto a = decide_distinguish(estimate(lo, radius), eps);
    const auto b = decide_distinguish(estimate(hi, radius), eps);
    if (a == Decision::distinguishes) CHECK(b == Decision::distinguishes);
    if (b == Decision::cannot_distinguish) CHECK(a == Decision::cannot_distinguish);
  }
}

// --- pseudorandom advantage -------------------------------------------------

namespace {

DistinguisherClass all_subsets(std::size_t n) {
  DistinguisherClass out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    out.push_back({"subset" + std::to_string(mask), [mask](std::size_t x) { return ((mask >> x) & 1U) != 0; }});
  }
  return out;
}

}  // namespace

TEST_CASE("uniform has zero advantage against any class") {
  for (std::size_t n : {1u, 2u, 5u, 8u}) {
    CHECK(pseudorandom_advantage(FiniteDistribution::uniform(n), all_subsets(n)).value == doctest::Approx(0.0));
  }
}

TEST_CASE("point mass against its indicator has advantage one half") {
  const FiniteDistribution p({1.0, 0.0});
  const DistinguisherClass d{{"is-x0", [](std::size_t x) { return x == 0; }}};
  const auto adv = pseudorandom_advantage(p, d);
  CHECK(adv.value == 0.5);
  CHECK(adv.distinguisher == 0);
}

TEST_CASE("a distinguisher and its complement have equal advantage") {
  const FiniteDistribution p({0.1, 0.5, 0.15, 0.25});
  const auto in = [](std::size_t x) { return x == 1 || x == 3; };
  const auto a = pseudorandom_advantage(p, {{"d", in}});
  const auto b = pseudorandom_advantage(p, {{"not-d", [&](std::size_t x) { return !in(x); }}});
  CHECK(a.value == doctest::Approx(b.value));
  CHECK(a.value == doctest::Approx(0.25));
  // Ties go to the first maximizer.
  CHECK(pseudorandom_advantage(p, {{"d", in}, {"not-d", [&](std::size_t x) { return !in(x); }}}).distinguisher == 0);
}

TEST_CASE("advantage over all subsets is the total variation distance") {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(6);
    std::vector<double> w(n);
    for (double& x : w) x = rng.uniform01();
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= sum;
    double tv = 0.0;
    for (double x : w) tv += std::abs(x - 1.0 / n) / 2;
    const auto adv = pseudorandom_advantage(FiniteDistribution(w), all_subsets(n));
    CHECK(adv.value == doctest::Approx(oracle::best_subset_advantage(w)).epsilon(1e-12));
    CHECK(adv.value == doctest::Approx(tv).epsilon(1e-12));
  }
}

TEST_CASE("advantage is invariant under relabeling") {
  Rng rng(99);
  const std::size_t n = 6;
  std::vector<double> w{0.3, 0.05, 0.2, 0.1, 0.25, 0.1};
  DistinguisherClass d;
  for (int k = 0; k < 5; ++k) {
    const std::uint64_t mask = rng.uniform_index(64);
    d.push_back({"d" + std::to_string(k), [mask](std::size_t x) { return ((mask >> x) & 1U) != 0; }});
  }
  const auto base = pseudorandom_advantage(FiniteDistribution(w), d);
  for (int r = 0; r < 100; ++r) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
    std::vector<std::size_t> inverse(n);
    for (std::size_t i = 0; i < n; ++i) inverse[perm[i]] = i;
    std::vector<double> pw(n);
    for (std::size_t i = 0; i < n; ++i) pw[perm[i]] = w[i];
    DistinguisherClass pd;
    for (const auto& di : d) pd.push_back({di.name, [f = di.accepts, &inverse](std::size_t x) { return f(inverse[x]); }});
    const auto moved = pseudorandom_advantage(FiniteDistribution(pw), pd);
    CHECK(moved.value == doctest::Approx(base.value).epsilon(1e-12));
  }
}

TEST_CASE("advantage rejects bad inputs") {
  CHECK(code_of([] { pseudorandom_advantage(FiniteDistribution::uniform(3), {}); }) == Errc::empty_class);
  CHECK(code_of([] { FiniteDistribution({0.5, 0.6}); }) == Errc::invalid_config);
  CHECK(code_of([] { FiniteDistribution({1.5, -0.5}); }) == Errc::invalid_config);
}
