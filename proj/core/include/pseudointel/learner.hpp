#pragma once

#include <optional>
#include <span>
#include <string>

#include "pseudointel/core.hpp"

namespace pseudointel {

/// What a learner is trained on. `capability` is there for codec information
/// and for the exact-copy baseline; honest learners only read `samples`.
struct TrainingInput {
  std::span<const SamplePair> samples;
  CapabilityPtr capability;
};

/// L_G: samples -> model.
class ModelLearner {
 public:
  virtual ~ModelLearner() = default;

  virtual std::string name() const = 0;
  /// The result may depend only on the input and the stream rooted at `rs`.
  virtual ModelPtr train(const TrainingInput& input, const RandomSource& rs, LearnerContext& ctx) const = 0;
  /// log2 |G| when the model class is finite.
  virtual std::optional<double> expressivity_bits(const Capability&) const { return std::nullopt; }
};

/// The model-side artifacts of a trial. The experiment hands these to an
/// evaluator learner only when it asks for them, and then flags the run as
/// outside the framework.
struct ModelSideArtifacts {
  ModelPtr model;
  std::span<const SamplePair> samples;
};

/// L_E: samples -> evaluator.
class EvaluatorLearner {
 public:
  virtual ~EvaluatorLearner() = default;

  virtual std::string name() const = 0;
  virtual EvaluatorPtr train(const TrainingInput& input, const RandomSource& rs, LearnerContext& ctx,
                             const ModelSideArtifacts* model_side) const = 0;
  virtual bool reads_model_side() const { return false; }
  /// log2 |E| for evaluators built from n samples, when finite.
  virtual std::optional<double> expressivity_bits(const Capability&, std::size_t /*n*/) const {
    return std::nullopt;
  }
};

using ModelLearnerPtr = std::shared_ptr<const ModelLearner>;
using EvaluatorLearnerPtr = std::shared_ptr<const EvaluatorLearner>;

}  // namespace pseudointel
