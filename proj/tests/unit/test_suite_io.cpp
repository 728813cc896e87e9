#include <doctest.h>

#include "oracles.hpp"
#include "pseudointel/capabilities.hpp"
#include "pseudointel/errors.hpp"
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

bool same_joint(const Capability& a, const Capability& b) {
  const auto ja = a.enumerate(), jb = b.enumerate();
  if (!ja || !jb || ja->size() != jb->size()) return false;
  for (std::size_t i = 0; i < ja->size(); ++i) {
    if (!((*ja)[i].pair == (*jb)[i].pair) || std::abs((*ja)[i].probability - (*jb)[i].probability) > 1e-12) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("every builtin round-trips through the suite format") {
  const auto suite = builtin_suite("all");
  CHECK(suite.size() == builtin_capability_names().size());
  const auto back = parse_suite(suite_to_json(suite));
  REQUIRE(back.size() == suite.size());
  for (std::size_t i = 0; i < suite.size(); ++i) {
    CAPTURE(suite[i]->name());
    CHECK(back[i]->name() == suite[i]->name());
    CHECK(back[i]->query_codec() == suite[i]->query_codec());
    CHECK(same_joint(*back[i], *suite[i]));
  }
  CHECK(suite_to_json(back) == suite_to_json(suite));
}

TEST_CASE("builtin instances have the documented shape") {
  const auto biased = builtin_capability("biased-shortcut");
  double label0 = 0.0;
  for (const auto& wp : oracle::joint(*biased)) label0 += wp.pair.response == Response("0") ? wp.probability : 0.0;
  CHECK(label0 == doctest::Approx(0.9));
  const auto t16 = builtin_capability("tabular16");
  double ones = 0.0;
  for (const auto& wp : oracle::joint(*t16)) ones += wp.pair.response == Response("1") ? wp.probability : 0.0;
  CHECK(ones == doctest::Approx(0.75));
  CHECK(builtin_suite("parity").size() == 2);
  CHECK(builtin_suite("bernoulli").size() == 1);
  CHECK(code_of([] { builtin_suite("no-such-thing"); }) == Errc::invalid_config);
}

TEST_CASE("suite parsing rejects malformed documents") {
  CHECK(code_of([] { parse_suite("{"); }) == Errc::invalid_config);
  CHECK(code_of([] { parse_suite(R"({"schema":"other","capabilities":[]})"); }) == Errc::invalid_config);
  CHECK(code_of([] { parse_suite(R"({"schema":"pseudointel.suite/1","capabilities":[]})"); }) ==
        Errc::invalid_config);
  CHECK(code_of([] {
          parse_suite(R"({"schema":"pseudointel.suite/1","capabilities":[{"kind":"warp","name":"x"}]})");
        }) == Errc::invalid_config);
  CHECK(code_of([] { parse_capability(R"({"kind":"parity","name":"p","dimension":"four","indices":[1]})"); }) ==
        Errc::invalid_config);
  CHECK(code_of([] {
          parse_capability(R"({"kind":"tabular","name":"t","query_codec":"bitvector",
                               "rows":[{"query":"2","p":1,"responses":[{"y":"0","p":1}]}]})");
        }) == Errc::bad_payload);
  CHECK(code_of([] { load_suite("/nonexistent/suite.json"); }) == Errc::io_error);
}

TEST_CASE("tabular capabilities parse with codecs") {
  const auto mu = parse_capability(R"({"kind":"tabular","name":"bits","query_codec":"bitvector",
    "rows":[{"query":"01","p":0.25,"responses":[{"y":"1","p":1}]},
            {"query":"10","p":0.75,"responses":[{"y":"0","p":0.5},{"y":"1","p":0.5}]}]})");
  CHECK(mu->query_codec() == Codec::bitvector);
  CHECK(mu->contains(Query(bits("10"))));
  CHECK(oracle::conditional(*mu, Query(bits("10")), Response("1")) == doctest::Approx(0.5));
}
