#include "pseudointel/learners.hpp"

#include <cmath>
#include <set>

#include "pseudointel/capabilities.hpp"
#include "pseudointel/errors.hpp"

namespace pseudointel {
namespace {

Codec response_codec_of(const TrainingInput& input) {
  return input.capability ? input.capability->response_codec() : Codec::symbol;
}

struct SpaceSize {
  std::size_t queries;
  std::size_t responses;
};

std::optional<SpaceSize> space_size(const Capability& capability) {
  const auto joint = capability.enumerate();
  if (!joint) return std::nullopt;
  std::set<Query> xs;
  std::set<Response> ys;
  for (const WeightedPair& wp : *joint) {
    xs.insert(wp.pair.query);
    ys.insert(wp.pair.response);
  }
  return SpaceSize{xs.size(), ys.size()};
}

}  // namespace

ModelPtr ExactCopyLearner::train(const TrainingInput& input, const RandomSource&, LearnerContext&) const {
  return capability_as_blackbox(input.capability);
}

ModelPtr MemorizerLearner::train(const TrainingInput& input, const RandomSource&, LearnerContext& ctx) const {
  const Codec codec = response_codec_of(input);
  Response fallback(fallback_ ? payload_from_text(codec, *fallback_) : codec_zero_value(codec));
  return learn_memorizer(input.samples, std::move(fallback), &ctx);
}

std::optional<double> MemorizerLearner::expressivity_bits(const Capability& capability) const {
  // All functions from the query space to the response space.
  const auto size = space_size(capability);
  if (!size) return std::nullopt;
  return static_cast<double>(size->queries) * std::log2(static_cast<double>(size->responses));
}

std::size_t ParityLearner::dimension_for(const TrainingInput& input) const {
  if (dimension_) return *dimension_;
  if (const auto* parity = dynamic_cast<const ParityCapability*>(input.capability.get())) {
    return parity->dimension();
  }
  if (!input.samples.empty()) return input.samples.front().query.size();
  throw Error(Errc::invalid_config, "parity learner cannot infer the dimension");
}

ModelPtr ParityLearner::train(const TrainingInput& input, const RandomSource&, LearnerContext& ctx) const {
  return learn_parity(input.samples, dimension_for(input), &ctx);
}

std::optional<double> ParityLearner::expressivity_bits(const Capability& capability) const {
  if (dimension_) return static_cast<double>(*dimension_);
  if (const auto* parity = dynamic_cast<const ParityCapability*>(&capability)) {
    return static_cast<double>(parity->dimension());
  }
  return std::nullopt;
}

ModelPtr ConstantLearner::train(const TrainingInput& input, const RandomSource&, LearnerContext& ctx) const {
  return learn_constant(input.samples, response_codec_of(input), &ctx);
}

std::optional<double> ConstantLearner::expressivity_bits(const Capability& capability) const {
  const auto size = space_size(capability);
  if (!size) return std::nullopt;
  return std::log2(static_cast<double>(size->responses));
}

ModelPtr KGramLearner::train(const TrainingInput& input, const RandomSource&, LearnerContext& ctx) const {
  std::string alphabet;
  if (alphabet_) {
    alphabet = *alphabet_;
  } else if (const auto* kgram = dynamic_cast<const KGramCapability*>(input.capability.get())) {
    alphabet = kgram->alphabet();
  } else {
    throw Error(Errc::invalid_config, "k-gram learner needs an alphabet");
  }
  return learn_kgram(input.samples, order_, std::move(alphabet), &ctx);
}

std::string StaticEvaluatorLearner::name() const {
  if (rounds_ == 0) return "static-all";
  return rounds_ == 1 ? "static" : "static-r" + std::to_string(rounds_);
}

EvaluatorPtr StaticEvaluatorLearner::train(const TrainingInput& input, const RandomSource&, LearnerContext& ctx,
                                           const ModelSideArtifacts*) const {
  ctx.tick(input.samples.size());
  if (rounds_ == 0) {
    if (input.samples.empty()) throw Error(Errc::empty_sample_set, "static evaluator needs at least one pair");
    return StaticDatasetEvaluator::exhaustive({input.samples.begin(), input.samples.end()});
  }
  return learn_static_evaluator(input.samples, rounds_);
}

std::optional<double> StaticEvaluatorLearner::expressivity_bits(const Capability& capability,
                                                                 std::size_t n) const {
  // Every possible stored list of n pairs.
  const auto size = space_size(capability);
  if (!size) return std::nullopt;
  return static_cast<double>(n) *
         std::log2(static_cast<double>(size->queries) * static_cast<double>(size->responses));
}

EvaluatorPtr AdversarialEvaluatorLearner::train(const TrainingInput& input, const RandomSource& rs,
                                                LearnerContext& ctx, const ModelSideArtifacts*) const {
  ModelPtr aux = aux_->train(input, rs.child("aux"), ctx);
  std::optional<MutationOptions> mutation;
  if (mutation_rounds_ > 0) mutation = MutationOptions{bit_flip_mutator(), input.capability, mutation_rounds_};
  ctx.tick(input.samples.size());
  return learn_adversarial_evaluator(input.samples, *aux, rs.child("filter"), mutation);
}

std::optional<double> AdversarialEvaluatorLearner::expressivity_bits(const Capability& capability,
                                                                      std::size_t n) const {
  return StaticEvaluatorLearner(1).expressivity_bits(capability, n);
}

EvaluatorPtr SelfEvaluatorLearner::train(const TrainingInput& input, const RandomSource& rs, LearnerContext& ctx,
                                         const ModelSideArtifacts*) const {
  return learn_self_evaluator(*learner_, input, rs, ctx);
}

EvaluatorPtr SharedDerivationEvaluatorLearner::train(const TrainingInput&, const RandomSource&, LearnerContext&,
                                                     const ModelSideArtifacts* model_side) const {
  if (!model_side || !model_side->model) {
    throw Error(Errc::invalid_config, "shared-self evaluator needs the trained model");
  }
  std::vector<Query> queries;
  for (const SamplePair& s : model_side->samples) queries.push_back(s.query);
  return derive_self_evaluator(model_side->model, std::move(queries));
}

ModelBasedEvaluatorLearner::ModelBasedEvaluatorLearner(ModelPtr generator, bool membership_filter,
                                                       std::size_t budget)
    : generator_(std::move(generator)), membership_filter_(membership_filter), budget_(budget) {
  if (!generator_) throw Error(Errc::invalid_config, "model-based evaluator without a generator");
}

EvaluatorPtr ModelBasedEvaluatorLearner::train(const TrainingInput& input, const RandomSource& rs,
                                               LearnerContext& ctx, const ModelSideArtifacts*) const {
  std::optional<MembershipFilter> filter;
  if (membership_filter_) {
    std::vector<Query> members;
    for (const SamplePair& s : input.samples) members.push_back(s.query);
    filter.emplace(std::move(members));
  }
  return learn_modelbased_evaluator(*generator_, filter ? &*filter : nullptr, input, rs, budget_, &ctx);
}

EvaluatorPtr ConstantVerdictLearner::train(const TrainingInput&, const RandomSource&, LearnerContext&,
                                           const ModelSideArtifacts*) const {
  return std::make_shared<ConstantVerdictEvaluator>(accept_);
}

}  // namespace pseudointel
