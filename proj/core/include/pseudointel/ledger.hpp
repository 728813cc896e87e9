#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pseudointel {

/// Resource accounting for one trial (or an aggregate of trials). Counts only
/// ever grow; merging adds counts and keeps the larger round bound.
struct ResourceLedger {
  std::uint64_t samples_model = 0;       // m drawn for the model learner
  std::uint64_t samples_evaluator = 0;   // n drawn for the evaluator learner
  std::uint64_t rounds = 0;              // declared max rounds r of the evaluator
  std::uint64_t model_queries = 0;       // queries answered by the model arm
  std::uint64_t oracle_queries = 0;      // queries answered by the capability arm
  std::uint64_t compute_steps_model = 0;
  std::uint64_t compute_steps_evaluator = 0;
  std::optional<double> expressivity_bits_model;      // log2|G| when finite
  std::optional<double> expressivity_bits_evaluator;  // log2|E| when finite

  ResourceLedger& operator+=(const ResourceLedger& other);
  friend bool operator==(const ResourceLedger&, const ResourceLedger&) = default;
};

/// Instrumentation handed to every learner: abstract compute steps and
/// non-fatal warnings (e.g. conflicting labels resolved by last write).
class LearnerContext {
 public:
  void tick(std::uint64_t steps = 1) noexcept { steps_ += steps; }
  void warn(std::string message) { warnings_.push_back(std::move(message)); }

  std::uint64_t steps() const noexcept { return steps_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  std::uint64_t steps_ = 0;
  std::vector<std::string> warnings_;
};

}  // namespace pseudointel
