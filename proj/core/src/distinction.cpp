#include "pseudointel/distinction.hpp"

#include <algorithm>
#include <cmath>

#include "pseudointel/errors.hpp"

namespace pseudointel {
namespace {

double probability_of(const ResponseTable& table, const Response& target) {
  double p = 0.0;
  for (const WeightedResponse& w : table) {
    if (w.response == target) p += w.probability;
  }
  return p;
}

}  // namespace

double hoeffding_radius(std::uint64_t trials_per_arm, double alpha) {
  if (trials_per_arm == 0) throw Error(Errc::invalid_config, "trials per arm must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::invalid_config, "alpha must lie in (0, 1)");
  return 2.0 * std::sqrt(std::log(4.0 / alpha) / (2.0 * static_cast<double>(trials_per_arm)));
}

DistinctionEstimate mc_distinction(const Evaluator& evaluator, const Model& model,
                                   const CapabilityPtr& capability, std::uint64_t trials_per_arm,
                                   double alpha, const RandomSource& rs, ResourceLedger* ledger) {
  DistinctionEstimate est;
  est.radius = hoeffding_radius(trials_per_arm, alpha);
  est.trials_per_arm = trials_per_arm;
  est.alpha = alpha;

  const CapabilityOracle oracle(capability);
  const RandomSource model_arm = rs.child("model");
  const RandomSource capability_arm = rs.child("capability");
  ResourceLedger model_side;
  ResourceLedger oracle_side;
  std::uint64_t model_accepts = 0;
  std::uint64_t capability_accepts = 0;
  for (std::uint64_t i = 0; i < trials_per_arm; ++i) {
    model_accepts += run_interaction(evaluator, model, model_arm.child(i), &model_side).verdict.accept;
    capability_accepts +=
        run_interaction(evaluator, oracle, capability_arm.child(i), &oracle_side).verdict.accept;
  }

  const auto n = static_cast<double>(trials_per_arm);
  est.p_model = static_cast<double>(model_accepts) / n;
  est.p_capability = static_cast<double>(capability_accepts) / n;
  est.dist = std::abs(est.p_model - est.p_capability);
  if (ledger) {
    ledger->model_queries += model_side.model_queries;
    ledger->oracle_queries += oracle_side.model_queries;
  }
  return est;
}

double exact_distinction(const Evaluator& evaluator, const Model& model, const Capability& capability) {
  const auto table = evaluator.probe_table();
  if (!table) throw Error(Errc::not_enumerable, evaluator.name() + " has no probe table");

  double p_model = table->accept_without_query;
  double p_capability = table->accept_without_query;
  for (const Probe& probe : table->probes) {
    const auto model_row = model.response_table(probe.query);
    if (!model_row) throw Error(Errc::not_enumerable, model.label() + " has no response table");
    const auto truth_row = capability.conditional_table(probe.query);
    if (!truth_row) throw Error(Errc::not_enumerable, capability.name() + " has no conditional table");
    p_model += probe.weight * probability_of(*model_row, probe.expected);
    p_capability += probe.weight * probability_of(*truth_row, probe.expected);
  }
  // Summing many weights can land an ulp outside [0, 1].
  return std::clamp(std::abs(p_model - p_capability), 0.0, 1.0);
}

std::string_view to_string(Decision decision) {
  switch (decision) {
    case Decision::cannot_distinguish: return "cannot-distinguish";
    case Decision::distinguishes: return "distinguishes";
    case Decision::inconclusive: return "inconclusive";
  }
  return "unknown";
}

Decision decide_distinguish(const DistinctionEstimate& estimate, double epsilon) {
  if (estimate.dist - estimate.radius > epsilon) return Decision::distinguishes;
  if (estimate.dist + estimate.radius <= epsilon) return Decision::cannot_distinguish;
  return Decision::inconclusive;
}

FiniteDistribution::FiniteDistribution(std::vector<double> probabilities) : probs_(std::move(probabilities)) {
  if (probs_.empty()) throw Error(Errc::invalid_config, "distribution over an empty set");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw Error(Errc::invalid_config, "negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(Errc::invalid_config, "probabilities do not sum to 1");
}

FiniteDistribution FiniteDistribution::uniform(std::size_t size) {
  if (size == 0) throw Error(Errc::invalid_config, "distribution over an empty set");
  return FiniteDistribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

Advantage pseudorandom_advantage(const FiniteDistribution& distribution,
                                 const DistinguisherClass& distinguishers) {
  if (distinguishers.empty()) throw Error(Errc::empty_class, "no distinguishers");
  const std::size_t size = distribution.size();
  const double uniform_mass = 1.0 / static_cast<double>(size);

  Advantage best{-1.0, 0};
  for (std::size_t k = 0; k < distinguishers.size(); ++k) {
    // Accumulate the signed difference per outcome so identical distributions cancel exactly.
    double diff = 0.0;
    for (std::size_t x = 0; x < size; ++x) {
      if (distinguishers[k].accepts(x)) diff += distribution[x] - uniform_mass;
    }
    const double value = std::abs(diff);
    if (value > best.value) best = {value, k};
  }
  return best;
}

}  // namespace pseudointel
