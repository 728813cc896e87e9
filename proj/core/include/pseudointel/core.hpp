#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pseudointel/ledger.hpp"
#include "pseudointel/payload.hpp"
#include "pseudointel/random.hpp"

namespace pseudointel {

struct WeightedPair {
  SamplePair pair;
  double probability;
};

struct WeightedResponse {
  Response response;
  double probability;
};

using ResponseTable = std::vector<WeightedResponse>;

/// Ground-truth distribution over query/response pairs.
class Capability {
 public:
  virtual ~Capability() = default;

  const std::string& name() const noexcept { return name_; }
  Codec query_codec() const noexcept { return query_codec_; }
  Codec response_codec() const noexcept { return response_codec_; }

  /// True when every query has exactly one acceptable response.
  virtual bool deterministic() const = 0;
  /// Membership in the declared query space (not only the support of the marginal).
  virtual bool contains(const Query& x) const = 0;

  virtual SamplePair sample(Rng& rng) const = 0;
  /// A draw from the conditional on x. Throws Error{unsupported_query} outside the query space.
  virtual Response conditional_sample(const Query& x, Rng& rng) const = 0;

  /// Full joint table (probabilities sum to one), when the capability is small enough.
  virtual std::optional<std::vector<WeightedPair>> enumerate() const { return std::nullopt; }
  /// Exact conditional at x, when available.
  virtual std::optional<ResponseTable> conditional_table(const Query&) const { return std::nullopt; }

 protected:
  Capability(std::string name, Codec query_codec, Codec response_codec)
      : name_(std::move(name)), query_codec_(query_codec), response_codec_(response_codec) {}

 private:
  std::string name_;
  Codec query_codec_;
  Codec response_codec_;
};

/// A (possibly randomized) query to response mapping. Given the same stream
/// state and query a model returns the same response.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string label() const = 0;
  virtual Response respond(const Query& x, Rng& rng) const = 0;
  virtual bool deterministic() const { return false; }
  /// Exact response distribution at x. The default covers deterministic models only.
  virtual std::optional<ResponseTable> response_table(const Query& x) const;
};

struct Verdict {
  bool accept = false;
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

using Transcript = std::vector<SamplePair>;
using SessionStep = std::variant<Query, Verdict>;

/// One run of an evaluator. Single owner; never shared across threads.
class EvaluatorSession {
 public:
  virtual ~EvaluatorSession() = default;
  /// Either the next query (which may depend on everything in the transcript)
  /// or the final verdict.
  virtual SessionStep next(const Transcript& so_far, Rng& rng) = 0;
};

/// A single-round probe: query x, accept iff the box answers `expected`.
struct Probe {
  Query query;
  Response expected;
  double weight;
};

/// Closed form of a single-round evaluator: with probability
/// accept_without_query it accepts without querying, with probability
/// `weight` it issues the probe; leftover mass rejects without querying.
struct ProbeTable {
  double accept_without_query = 0.0;
  std::vector<Probe> probes;
};

class Evaluator {
 public:
  virtual ~Evaluator() = default;

  virtual std::string name() const = 0;
  /// Hard cap r on queries per session.
  virtual std::size_t max_rounds() const = 0;
  virtual std::unique_ptr<EvaluatorSession> start() const = 0;
  virtual std::optional<ProbeTable> probe_table() const { return std::nullopt; }
};

using CapabilityPtr = std::shared_ptr<const Capability>;
using ModelPtr = std::shared_ptr<const Model>;
using EvaluatorPtr = std::shared_ptr<const Evaluator>;

struct Interaction {
  Verdict verdict;
  Transcript transcript;
};

/// Runs one evaluator session against a black box. The evaluator and the box
/// draw from the "evaluator" and "box" children of `rs`. Adds the transcript
/// length to ledger->model_queries when a ledger is given.
///
/// Throws Error{session_overrun} if the session asks more than max_rounds()
/// queries; black-box failures propagate unchanged.
Interaction run_interaction(const Evaluator& evaluator, const Model& box, const RandomSource& rs,
                            ResourceLedger* ledger = nullptr);

/// The ground-truth arm: answers x with a fresh draw from the capability's conditional.
class CapabilityOracle final : public Model {
 public:
  explicit CapabilityOracle(CapabilityPtr capability);

  std::string label() const override;
  Response respond(const Query& x, Rng& rng) const override;
  bool deterministic() const override { return capability_->deterministic(); }
  std::optional<ResponseTable> response_table(const Query& x) const override;

  const Capability& capability() const noexcept { return *capability_; }

 private:
  CapabilityPtr capability_;
};

ModelPtr capability_as_blackbox(CapabilityPtr capability);

}  // namespace pseudointel
