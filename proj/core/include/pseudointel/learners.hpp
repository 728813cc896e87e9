#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "pseudointel/evaluator_zoo.hpp"
#include "pseudointel/learner.hpp"

namespace pseudointel {

// --- Model learners (L_G) ----------------------------------------------------

/// Returns the capability's own conditional sampler. The reference point for
/// the identity law; it reads the capability, not the samples.
class ExactCopyLearner final : public ModelLearner {
 public:
  std::string name() const override { return "exact-copy"; }
  ModelPtr train(const TrainingInput& input, const RandomSource&, LearnerContext&) const override;
  std::optional<double> expressivity_bits(const Capability&) const override { return 0.0; }
};

class MemorizerLearner final : public ModelLearner {
 public:
  /// `fallback_text` is decoded with the capability's response codec; without
  /// it the codec zero value is used.
  explicit MemorizerLearner(std::optional<std::string> fallback_text = std::nullopt)
      : fallback_(std::move(fallback_text)) {}

  std::string name() const override { return "memorizer"; }
  ModelPtr train(const TrainingInput& input, const RandomSource&, LearnerContext& ctx) const override;
  std::optional<double> expressivity_bits(const Capability& capability) const override;

 private:
  std::optional<std::string> fallback_;
};

class ParityLearner final : public ModelLearner {
 public:
  /// Without a dimension it is taken from a ParityCapability or the first sample.
  explicit ParityLearner(std::optional<std::size_t> dimension = std::nullopt) : dimension_(dimension) {}

  std::string name() const override { return "parity"; }
  ModelPtr train(const TrainingInput& input, const RandomSource&, LearnerContext& ctx) const override;
  std::optional<double> expressivity_bits(const Capability& capability) const override;

 private:
  std::size_t dimension_for(const TrainingInput& input) const;
  std::optional<std::size_t> dimension_;
};

class ConstantLearner final : public ModelLearner {
 public:
  std::string name() const override { return "constant"; }
  ModelPtr train(const TrainingInput& input, const RandomSource&, LearnerContext& ctx) const override;
  std::optional<double> expressivity_bits(const Capability& capability) const override;
};

class KGramLearner final : public ModelLearner {
 public:
  /// Without an alphabet it is taken from a KGramCapability.
  explicit KGramLearner(std::size_t order, std::optional<std::string> alphabet = std::nullopt)
      : order_(order), alphabet_(std::move(alphabet)) {}

  std::string name() const override { return "kgram"; }
  ModelPtr train(const TrainingInput& input, const RandomSource&, LearnerContext& ctx) const override;

 private:
  std::size_t order_;
  std::optional<std::string> alphabet_;
};

// --- Evaluator learners (L_E) ------------------------------------------------

/// e_S over the evaluator's samples; rounds = 0 selects the exhaustive variant.
class StaticEvaluatorLearner final : public EvaluatorLearner {
 public:
  explicit StaticEvaluatorLearner(std::size_t rounds = 1) : rounds_(rounds) {}

  std::string name() const override;
  EvaluatorPtr train(const TrainingInput& input, const RandomSource&, LearnerContext& ctx,
                     const ModelSideArtifacts*) const override;
  std::optional<double> expressivity_bits(const Capability& capability, std::size_t n) const override;

 private:
  std::size_t rounds_;
};

/// Trains the auxiliary model on the evaluator's own samples, filters those
/// samples down to a challenge set and serves it as a static evaluator.
class AdversarialEvaluatorLearner final : public EvaluatorLearner {
 public:
  /// mutation_rounds = 0 disables the bit-flip mutation loop.
  explicit AdversarialEvaluatorLearner(ModelLearnerPtr aux, std::size_t mutation_rounds = 0)
      : aux_(std::move(aux)), mutation_rounds_(mutation_rounds) {}

  std::string name() const override { return "adversarial(" + aux_->name() + ")"; }
  EvaluatorPtr train(const TrainingInput& input, const RandomSource& rs, LearnerContext& ctx,
                     const ModelSideArtifacts*) const override;
  std::optional<double> expressivity_bits(const Capability& capability, std::size_t n) const override;

 private:
  ModelLearnerPtr aux_;
  std::size_t mutation_rounds_;
};

/// L_{E_G}: fresh model on the evaluator's samples, then g -> e_g.
class SelfEvaluatorLearner final : public EvaluatorLearner {
 public:
  explicit SelfEvaluatorLearner(ModelLearnerPtr learner) : learner_(std::move(learner)) {}

  std::string name() const override { return "self(" + learner_->name() + ")"; }
  EvaluatorPtr train(const TrainingInput& input, const RandomSource& rs, LearnerContext& ctx,
                     const ModelSideArtifacts*) const override;
  std::optional<double> expressivity_bits(const Capability& capability, std::size_t) const override {
    return learner_->expressivity_bits(capability);
  }

 private:
  ModelLearnerPtr learner_;
};

/// The anti-pattern: e_g derived from the already-trained model, querying the
/// model's own training queries. Runs using it are outside the framework.
class SharedDerivationEvaluatorLearner final : public EvaluatorLearner {
 public:
  std::string name() const override { return "shared-self"; }
  EvaluatorPtr train(const TrainingInput& input, const RandomSource&, LearnerContext&,
                     const ModelSideArtifacts* model_side) const override;
  bool reads_model_side() const override { return true; }
};

class ModelBasedEvaluatorLearner final : public EvaluatorLearner {
 public:
  /// With `membership_filter` only generated queries present in the sample
  /// (where the reference predictor is confident) are kept.
  ModelBasedEvaluatorLearner(ModelPtr generator, bool membership_filter, std::size_t budget = 16);

  std::string name() const override { return "model-based(" + generator_->label() + ")"; }
  EvaluatorPtr train(const TrainingInput& input, const RandomSource& rs, LearnerContext& ctx,
                     const ModelSideArtifacts*) const override;

 private:
  ModelPtr generator_;
  bool membership_filter_;
  std::size_t budget_;
};

class ConstantVerdictLearner final : public EvaluatorLearner {
 public:
  explicit ConstantVerdictLearner(bool accept) : accept_(accept) {}

  std::string name() const override { return accept_ ? "always-accept" : "always-reject"; }
  EvaluatorPtr train(const TrainingInput&, const RandomSource&, LearnerContext&,
                     const ModelSideArtifacts*) const override;
  std::optional<double> expressivity_bits(const Capability&, std::size_t) const override { return 0.0; }

 private:
  bool accept_;
};

}  // namespace pseudointel
