#include "pseudointel/experiment.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include "pseudointel/errors.hpp"

namespace pseudointel {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(Errc::invalid_config, what);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  require(trials >= 1, "trials must be at least 1");
  require(per_arm >= 1, "per_arm must be at least 1");
  require(workers >= 1, "workers must be at least 1");
  require(!suite.empty(), "capability suite is empty");
  for (const auto& capability : suite) require(capability != nullptr, "null capability in suite");
}

SampleDraw draw_disjoint_samples(const Capability& capability, std::size_t m, std::size_t n,
                                 const RandomSource& rs) {
  SampleDraw out;
  const RandomSource model_side = rs.child("model");
  const RandomSource evaluator_side = rs.child("evaluator");
  out.model_stream = model_side.key();
  out.evaluator_stream = evaluator_side.key();

  Rng model_rng = model_side.stream();
  out.model_samples.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.model_samples.push_back(capability.sample(model_rng));

  Rng evaluator_rng = evaluator_side.stream();
  out.evaluator_samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.evaluator_samples.push_back(capability.sample(evaluator_rng));
  return out;
}

RandomSource trial_source(std::uint64_t seed, std::size_t capability_index, std::size_t trial_index) {
  return RandomSource(seed).child("capability").child(capability_index).child("trial").child(trial_index);
}

TrialResult pseudointelligence_trial(const ModelLearner& model_learner,
                                     const EvaluatorLearner& evaluator_learner,
                                     const CapabilityPtr& capability, const ExperimentConfig& config,
                                     std::size_t trial_index, const RandomSource& rs) {
  TrialResult out;
  out.trial_index = trial_index;

  // Steps 1-2: independent samples for each side.
  SampleDraw draw = draw_disjoint_samples(*capability, config.m, config.n, rs.child("samples"));
  out.model_sample_stream = draw.model_stream;
  out.evaluator_sample_stream = draw.evaluator_stream;
  out.ledger.samples_model = draw.model_samples.size();
  out.ledger.samples_evaluator = draw.evaluator_samples.size();

  // Step 3: train both learners.
  LearnerContext model_ctx;
  ModelPtr model = model_learner.train({draw.model_samples, capability}, rs.child("learn-model"), model_ctx);
  out.model_label = model->label();

  LearnerContext evaluator_ctx;
  const ModelSideArtifacts model_side{model, draw.model_samples};
  const bool shared = evaluator_learner.reads_model_side();
  EvaluatorPtr evaluator = evaluator_learner.train({draw.evaluator_samples, capability},
                                                   rs.child("learn-evaluator"), evaluator_ctx,
                                                   shared ? &model_side : nullptr);
  out.outside_framework = shared;
  out.evaluator_name = evaluator->name();

  out.ledger.compute_steps_model = model_ctx.steps();
  out.ledger.compute_steps_evaluator = evaluator_ctx.steps();
  out.ledger.rounds = evaluator->max_rounds();
  out.ledger.expressivity_bits_model = model_learner.expressivity_bits(*capability);
  out.ledger.expressivity_bits_evaluator = evaluator_learner.expressivity_bits(*capability, config.n);
  out.warnings = model_ctx.warnings();
  out.warnings.insert(out.warnings.end(), evaluator_ctx.warnings().begin(), evaluator_ctx.warnings().end());

  // Steps 4-6: interact with both arms.
  out.estimate = mc_distinction(*evaluator, *model, capability, config.per_arm, config.alpha,
                                rs.child("estimate"), &out.ledger);
  try {
    out.exact_dist = exact_distinction(*evaluator, *model, *capability);
  } catch (const Error& e) {
    if (e.code() != Errc::not_enumerable && e.code() != Errc::unsupported_query) throw;
  }

  // Step 7.
  out.decision = decide_distinguish(out.estimate, config.epsilon);
  return out;
}

bool verdict_from_counts(std::size_t pass_count, std::size_t trials, double delta) {
  return static_cast<double>(pass_count) >= (1.0 - delta) * static_cast<double>(trials) - 1e-9;
}

PseudointelligenceReport pseudointelligence_experiment(const ModelLearner& model_learner,
                                                       const EvaluatorLearner& evaluator_learner,
                                                       const ExperimentConfig& config) {
  config.validate();
  const std::size_t jobs = config.suite.size() * config.trials;
  std::vector<TrialResult> results(jobs);
  std::vector<std::exception_ptr> failures(jobs);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      const std::size_t c = job / config.trials;
      const std::size_t t = job % config.trials;
      try {
        results[job] = pseudointelligence_trial(model_learner, evaluator_learner, config.suite[c], config, t,
                                                trial_source(config.seed, c, t));
      } catch (const Error& e) {
        if (e.code() == Errc::black_box_failure) {
          results[job].errored = true;
          results[job].error = e.what();
          results[job].trial_index = t;
          results[job].outside_framework = evaluator_learner.reads_model_side();
        } else {
          failures[job] = std::current_exception();
        }
      } catch (...) {
        failures[job] = std::current_exception();
      }
      results[job].capability_index = c;
    }
  };
  const std::size_t threads = std::min(config.workers, jobs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  PseudointelligenceReport report;
  report.model_learner = model_learner.name();
  report.evaluator_learner = evaluator_learner.name();
  report.outside_framework = evaluator_learner.reads_model_side();
  report.verdict_pass = true;
  for (std::size_t c = 0; c < config.suite.size(); ++c) {
    CapabilityOutcome outcome;
    outcome.capability = config.suite[c]->name();
    double dist_sum = 0.0;
    double exact_sum = 0.0;
    std::size_t exact_count = 0;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const TrialResult& r = results[c * config.trials + t];
      outcome.ledger += r.ledger;
      if (r.errored) {
        ++outcome.errored;
        continue;
      }
      switch (r.decision) {
        case Decision::cannot_distinguish: ++outcome.pass; break;
        case Decision::distinguishes: ++outcome.fail; break;
        case Decision::inconclusive: ++outcome.inconclusive; break;
      }
      dist_sum += r.estimate.dist;
      if (r.exact_dist) {
        exact_sum += *r.exact_dist;
        ++exact_count;
      }
    }
    const std::size_t completed = config.trials - outcome.errored;
    outcome.pass_rate = static_cast<double>(outcome.pass) / static_cast<double>(config.trials);
    outcome.verdict_pass = verdict_from_counts(outcome.pass, config.trials, config.delta);
    outcome.mean_dist = completed ? dist_sum / static_cast<double>(completed) : 0.0;
    if (exact_count == completed && completed > 0) {
      outcome.mean_exact_dist = exact_sum / static_cast<double>(exact_count);
    }
    report.partial |= outcome.errored > 0;
    report.verdict_pass &= outcome.verdict_pass;
    report.ledger += outcome.ledger;
    report.capabilities.push_back(std::move(outcome));
  }
  report.trials = std::move(results);
  return report;
}

}  // namespace pseudointel
