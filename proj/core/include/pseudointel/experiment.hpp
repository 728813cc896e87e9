#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pseudointel/distinction.hpp"
#include "pseudointel/learner.hpp"

namespace pseudointel {

struct ExperimentConfig {
  double epsilon = 0.1;
  double delta = 0.1;
  std::size_t m = 0;            // samples for the model learner
  std::size_t n = 0;            // samples for the evaluator learner
  std::size_t trials = 1;       // T
  std::uint64_t per_arm = 1000; // N
  double alpha = 0.01;
  std::vector<CapabilityPtr> suite;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  /// Throws Error{invalid_config} naming the first bad field.
  void validate() const;
};

struct SampleDraw {
  std::vector<SamplePair> model_samples;      // S_G, m pairs
  std::vector<SamplePair> evaluator_samples;  // S_E, n pairs
  std::string model_stream;                   // key of the stream S_G came from
  std::string evaluator_stream;
};

/// m + n i.i.d. draws; S_G from rs/model and S_E from rs/evaluator.
SampleDraw draw_disjoint_samples(const Capability& capability, std::size_t m, std::size_t n,
                                 const RandomSource& rs);

struct TrialResult {
  std::size_t capability_index = 0;
  std::size_t trial_index = 0;
  bool errored = false;        // black-box failure; neither pass nor fail
  std::string error;
  DistinctionEstimate estimate;
  Decision decision = Decision::inconclusive;
  std::optional<double> exact_dist;  // when every party has a closed form
  ResourceLedger ledger;
  bool outside_framework = false;
  std::string model_label;
  std::string evaluator_name;
  std::string model_sample_stream;
  std::string evaluator_sample_stream;
  std::vector<std::string> warnings;
};

/// Stream rooted at (seed, capability index, trial index). Every trial of an
/// experiment uses the source returned here, so trials are order-independent.
RandomSource trial_source(std::uint64_t seed, std::size_t capability_index, std::size_t trial_index);

/// One pass of: draw disjoint samples, train g and e, estimate the distinction,
/// decide against epsilon. Errors propagate.
TrialResult pseudointelligence_trial(const ModelLearner& model_learner,
                                     const EvaluatorLearner& evaluator_learner,
                                     const CapabilityPtr& capability, const ExperimentConfig& config,
                                     std::size_t trial_index, const RandomSource& rs);

struct CapabilityOutcome {
  std::string capability;
  std::size_t pass = 0;          // cannot-distinguish
  std::size_t fail = 0;          // distinguishes
  std::size_t inconclusive = 0;
  std::size_t errored = 0;
  double pass_rate = 0.0;        // pass / T
  bool verdict_pass = false;     // pass_rate >= 1 - delta
  double mean_dist = 0.0;        // over completed trials
  std::optional<double> mean_exact_dist;
  ResourceLedger ledger;
};

struct PseudointelligenceReport {
  std::string model_learner;
  std::string evaluator_learner;
  bool outside_framework = false;
  bool partial = false;          // some trial errored
  bool verdict_pass = false;     // every capability passes
  std::vector<CapabilityOutcome> capabilities;
  std::vector<TrialResult> trials;  // ordered by (capability, trial)
  ResourceLedger ledger;
};

/// Pass iff pass_count >= (1 - delta) * trials, with inconclusive and errored
/// trials counted as failures.
bool verdict_from_counts(std::size_t pass_count, std::size_t trials, double delta);

/// T trials per capability, optionally on `workers` threads. Trials that hit a
/// black-box failure are recorded as errored and the report is flagged partial;
/// any other error propagates.
PseudointelligenceReport pseudointelligence_experiment(const ModelLearner& model_learner,
                                                       const EvaluatorLearner& evaluator_learner,
                                                       const ExperimentConfig& config);

}  // namespace pseudointel
