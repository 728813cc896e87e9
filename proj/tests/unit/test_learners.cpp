#include <doctest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pseudointel/capabilities.hpp"
#include "pseudointel/errors.hpp"
#include "pseudointel/experiment.hpp"
#include "pseudointel/learners.hpp"
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

ExperimentConfig config(std::vector<CapabilityPtr> suite, std::size_t m, std::size_t n, std::size_t trials,
                        std::uint64_t per_arm = 1500) {
  ExperimentConfig c;
  c.suite = std::move(suite);
  c.m = m;
  c.n = n;
  c.trials = trials;
  c.per_arm = per_arm;
  c.seed = 11;
  return c;
}

bool same_trials(const PseudointelligenceReport& a, const PseudointelligenceReport& b) {
  if (a.trials.size() != b.trials.size()) return false;
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    const auto &x = a.trials[i], &y = b.trials[i];
    if (x.estimate.p_model != y.estimate.p_model || x.estimate.p_capability != y.estimate.p_capability ||
        x.decision != y.decision || x.exact_dist != y.exact_dist || !(x.ledger == y.ledger) ||
        x.model_label != y.model_label) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("disjoint sample draws") {
  const auto mu = builtin_capability("tabular16");
  const RandomSource rs(5);
  const auto none = draw_disjoint_samples(*mu, 0, 0, rs);
  CHECK(none.model_samples.empty());
  CHECK(none.evaluator_samples.empty());

  const auto d = draw_disjoint_samples(*mu, 3, 2, rs);
  CHECK(d.model_samples.size() == 3);
  CHECK(d.evaluator_samples.size() == 2);
  const auto box = capability_as_blackbox(mu);
  for (const auto* list : {&d.model_samples, &d.evaluator_samples}) {
    for (const auto& s : *list) CHECK(oracle::answer(*box, s.query) == s.response);
  }
  const auto again = draw_disjoint_samples(*mu, 3, 2, rs);
  CHECK(again.model_samples == d.model_samples);
  CHECK(again.evaluator_samples == d.evaluator_samples);
  CHECK(d.model_stream != d.evaluator_stream);
  // The model side does not depend on how many evaluator samples are drawn.
  CHECK(draw_disjoint_samples(*mu, 3, 40, rs).model_samples == d.model_samples);
}

TEST_CASE("exact copy can never be told apart") {
  const ExactCopyLearner copy;
  const StaticEvaluatorLearner e_s;
  for (const auto& mu : builtin_suite("all")) {
    const auto cfg = config({mu}, 0, 6, 1);
    const auto r = pseudointelligence_trial(copy, e_s, mu, cfg, 0, trial_source(1, 0, 0));
    CAPTURE(mu->name());
    CHECK(r.decision == Decision::cannot_distinguish);
    CHECK(r.exact_dist == 0.0);
  }
}

TEST_CASE("parity trial from the three-sample example") {
  const auto mu = builtin_capability("parity3");
  const std::vector<SamplePair> S{{Query(bits("001")), Response("1")},
                                  {Query(bits("010")), Response("0")},
                                  {Query(bits("100")), Response("1")}};
  LearnerContext ctx;
  const auto g = ParityLearner{}.train({S, mu}, RandomSource(0), ctx);
  CHECK(g->label() == "parity{1,3}");
  std::vector<SamplePair> all;
  for (const auto& wp : oracle::joint(*mu)) all.push_back(wp.pair);
  const auto e = learn_static_evaluator(all);
  CHECK(exact_distinction(*e, *g, *mu) == 0.0);
}

TEST_CASE("memorizer with no samples is caught by a static evaluator") {
  // tabular16: fallback "0" is wrong on 12 of 16 queries.
  const auto mu = builtin_capability("tabular16");
  const MemorizerLearner memorizer;
  const StaticEvaluatorLearner e_s;
  const auto cfg = config({mu}, 0, 40, 1, 4000);
  int distinguished = 0;
  for (std::size_t t = 0; t < 20; ++t) {
    const auto r = pseudointelligence_trial(memorizer, e_s, mu, cfg, t, trial_source(3, 0, t));
    REQUIRE(r.exact_dist);
    CHECK(*r.exact_dist >= 0.0);
    if (*r.exact_dist >= cfg.epsilon + r.estimate.radius + 0.05) {
      CHECK(r.decision == Decision::distinguishes);
      ++distinguished;
    }
  }
  CHECK(distinguished >= 15);
}

TEST_CASE("exact copy passes every suite with every zoo evaluator") {
  const ExactCopyLearner copy;
  std::vector<EvaluatorLearnerPtr> zoo{
      std::make_shared<StaticEvaluatorLearner>(1),
      std::make_shared<StaticEvaluatorLearner>(0),
      std::make_shared<SelfEvaluatorLearner>(std::make_shared<MemorizerLearner>()),
      std::make_shared<ModelBasedEvaluatorLearner>(std::make_shared<IdentityGenerator>(), false),
      std::make_shared<ConstantVerdictLearner>(true),
  };
  for (const auto& e : zoo) {
    const auto report = pseudointelligence_experiment(copy, *e, config(builtin_suite("all"), 0, 8, 5, 3000));
    CAPTURE(e->name());
    CHECK(report.verdict_pass);
    for (const auto& c : report.capabilities) CHECK(c.pass_rate == 1.0);
  }
}

TEST_CASE("parity d=4 with twelve samples passes") {
  auto cfg = config({builtin_capability("parity4")}, 12, 8, 100);
  cfg.epsilon = 0.1;
  cfg.delta = 0.2;
  const double recovered = oracle::parity_recovery_probability(4, 0b0101, 12);
  CHECK(recovered > 0.95);
  const auto report = pseudointelligence_experiment(ParityLearner{}, StaticEvaluatorLearner{}, cfg);
  CHECK(report.verdict_pass);
  CHECK(report.capabilities[0].pass_rate >= 0.8);
}

TEST_CASE("constant shortcut fails against the adversarial evaluator") {
  auto cfg = config({builtin_capability("biased-shortcut")}, 30, 60, 20);
  const AdversarialEvaluatorLearner adversarial(std::make_shared<ConstantLearner>());
  const auto report = pseudointelligence_experiment(ConstantLearner{}, adversarial, cfg);
  CHECK_FALSE(report.verdict_pass);
  CHECK(report.capabilities[0].mean_dist > 0.95);
  CHECK(report.capabilities[0].mean_exact_dist == 1.0);
}

TEST_CASE("experiment invariants") {
  const auto suite = builtin_suite("tabular");
  auto cfg = config(suite, 4, 6, 7, 300);
  const MemorizerLearner memorizer;
  const StaticEvaluatorLearner e_s;
  const auto report = pseudointelligence_experiment(memorizer, e_s, cfg);

  SUBCASE("counts partition the trials and the verdict follows them") {
    for (const auto& c : report.capabilities) {
      CHECK(c.pass + c.fail + c.inconclusive + c.errored == cfg.trials);
      CHECK(c.verdict_pass == verdict_from_counts(c.pass, cfg.trials, cfg.delta));
      CHECK(c.pass_rate == doctest::Approx(static_cast<double>(c.pass) / cfg.trials));
    }
  }
  SUBCASE("samples consumed are T(m+n) per capability") {
    for (const auto& c : report.capabilities) {
      CHECK(c.ledger.samples_model + c.ledger.samples_evaluator == cfg.trials * (cfg.m + cfg.n));
    }
    CHECK(report.ledger.model_queries == suite.size() * cfg.trials * cfg.per_arm);
  }
  SUBCASE("model and evaluator samples never share a stream") {
    std::set<std::string> keys;
    for (const auto& t : report.trials) {
      CHECK(t.model_sample_stream != t.evaluator_sample_stream);
      CHECK(keys.insert(t.model_sample_stream).second);
      CHECK(keys.insert(t.evaluator_sample_stream).second);
    }
  }
  SUBCASE("same seed reproduces the report, regardless of workers") {
    auto threaded = cfg;
    threaded.workers = 3;
    CHECK(same_trials(report, pseudointelligence_experiment(memorizer, e_s, cfg)));
    CHECK(same_trials(report, pseudointelligence_experiment(memorizer, e_s, threaded)));
  }
  SUBCASE("a different seed changes the samples") {
    auto other = cfg;
    other.seed = 12;
    CHECK_FALSE(same_trials(report, pseudointelligence_experiment(memorizer, e_s, other)));
  }
}

TEST_CASE("shared derivation is flagged outside the framework") {
  const auto cfg = config({builtin_capability("tabular16")}, 4, 4, 3, 300);
  const auto shared = pseudointelligence_experiment(MemorizerLearner{}, SharedDerivationEvaluatorLearner{}, cfg);
  CHECK(shared.outside_framework);
  for (const auto& t : shared.trials) {
    CHECK(t.outside_framework);
    CHECK(t.exact_dist == 0.0);
  }
  const auto independent = pseudointelligence_experiment(
      MemorizerLearner{}, SelfEvaluatorLearner{std::make_shared<MemorizerLearner>()}, cfg);
  CHECK_FALSE(independent.outside_framework);
  for (const auto& t : independent.trials) CHECK_FALSE(t.outside_framework);
}

TEST_CASE("learners report their expressivity") {
  const auto mu = builtin_capability("tabular16");
  CHECK(MemorizerLearner{}.expressivity_bits(*mu) == doctest::Approx(16.0));
  CHECK(ConstantLearner{}.expressivity_bits(*mu) == doctest::Approx(1.0));
  CHECK(ParityLearner{}.expressivity_bits(*builtin_capability("parity4")) == 4.0);
  CHECK(StaticEvaluatorLearner{}.expressivity_bits(*mu, 3) == doctest::Approx(3 * std::log2(32.0)));
  CHECK_FALSE(KGramLearner{1}.expressivity_bits(*mu));
}

TEST_CASE("invalid experiment configs are rejected") {
  const ConstantLearner g;
  const StaticEvaluatorLearner e;
  auto base = config({builtin_capability("bernoulli")}, 1, 1, 1, 10);
  auto with = [&](auto edit) {
    auto c = base;
    edit(c);
    return code_of([&] { pseudointelligence_experiment(g, e, c); });
  };
  CHECK(with([](ExperimentConfig& c) { c.suite.clear(); }) == Errc::invalid_config);
  CHECK(with([](ExperimentConfig& c) { c.epsilon = 0.0; }) == Errc::invalid_config);
  CHECK(with([](ExperimentConfig& c) { c.delta = 1.0; }) == Errc::invalid_config);
  CHECK(with([](ExperimentConfig& c) { c.trials = 0; }) == Errc::invalid_config);
  CHECK(with([](ExperimentConfig& c) { c.per_arm = 0; }) == Errc::invalid_config);
  CHECK(with([](ExperimentConfig& c) { c.n = 0; }) == Errc::empty_sample_set);
}

TEST_CASE("degenerate contracts") {
  const auto suite = builtin_suite("tabular");
  SUBCASE("epsilon near one never distinguishes") {
    auto cfg = config(suite, 1, 3, 10, 20000);
    cfg.epsilon = 0.999;
    const auto report = pseudointelligence_experiment(ConstantLearner{}, StaticEvaluatorLearner{}, cfg);
    for (const auto& t : report.trials) {
      CHECK(t.decision != Decision::distinguishes);
      if (t.estimate.dist + t.estimate.radius <= cfg.epsilon) CHECK(t.decision == Decision::cannot_distinguish);
    }
  }
  SUBCASE("an evaluator that rejects everything passes everything") {
    const auto report = pseudointelligence_experiment(ConstantLearner{}, ConstantVerdictLearner{false},
                                                      config(suite, 2, 2, 10, 1200));
    for (const auto& t : report.trials) {
      CHECK(t.estimate.dist == 0.0);
      CHECK(t.decision == Decision::cannot_distinguish);
    }
    CHECK(report.ledger.model_queries == 0);
    CHECK(report.verdict_pass);
  }
}
