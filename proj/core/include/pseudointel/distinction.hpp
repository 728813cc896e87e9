#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pseudointel/core.hpp"

namespace pseudointel {

/// Monte Carlo estimate of dist_e(g, mu) = |Pr[e accepts g] - Pr[e accepts mu]|.
struct DistinctionEstimate {
  double p_model = 0.0;
  double p_capability = 0.0;
  double dist = 0.0;
  double radius = 1.0;
  std::uint64_t trials_per_arm = 0;
  double alpha = 0.0;
};

/// Half-width such that |dist_hat - dist| <= radius with probability >= 1 - alpha:
/// two-sided Hoeffding at alpha/2 on each arm, combined by a union bound,
///   radius = 2 * sqrt(ln(4 / alpha) / (2 N)).
double hoeffding_radius(std::uint64_t trials_per_arm, double alpha);

/// N fresh interactions per arm. Interaction i of the model arm uses
/// rs/model/i, of the capability arm rs/capability/i. Query counts go to
/// ledger->model_queries and ledger->oracle_queries.
/// Throws Error{invalid_config} for N = 0 or alpha outside (0, 1).
DistinctionEstimate mc_distinction(const Evaluator& evaluator, const Model& model,
                                   const CapabilityPtr& capability, std::uint64_t trials_per_arm,
                                   double alpha, const RandomSource& rs,
                                   ResourceLedger* ledger = nullptr);

/// Exhaustive value of dist_e(g, mu) for a single-round evaluator with a probe
/// table, a model with known response tables, and an enumerable capability.
/// Throws Error{not_enumerable} when any of the three lacks its closed form.
double exact_distinction(const Evaluator& evaluator, const Model& model, const Capability& capability);

enum class Decision { cannot_distinguish, distinguishes, inconclusive };

std::string_view to_string(Decision decision);

/// distinguishes if dist - radius > epsilon; cannot-distinguish if
/// dist + radius <= epsilon; inconclusive otherwise.
Decision decide_distinguish(const DistinctionEstimate& estimate, double epsilon);

// --- Pseudorandomness (the non-adaptive special case) ----------------------

/// Explicit probability table over outcomes {0, ..., size-1}.
class FiniteDistribution {
 public:
  /// Throws Error{invalid_config} unless the table is non-negative and sums to 1 +- 1e-12.
  explicit FiniteDistribution(std::vector<double> probabilities);
  static FiniteDistribution uniform(std::size_t size);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t outcome) const { return probs_[outcome]; }
  const std::vector<double>& probabilities() const noexcept { return probs_; }

 private:
  std::vector<double> probs_;
};

struct Distinguisher {
  std::string name;
  std::function<bool(std::size_t)> accepts;
};

using DistinguisherClass = std::vector<Distinguisher>;

struct Advantage {
  double value;
  std::size_t distinguisher;  // index into the class; first maximizer wins ties
};

/// max over d of |Pr_{x<-P}[d(x)] - Pr_{x<-U}[d(x)]|, computed exactly.
/// Throws Error{empty_class} for an empty class.
Advantage pseudorandom_advantage(const FiniteDistribution& distribution,
                                 const DistinguisherClass& distinguishers);

}  // namespace pseudointel
