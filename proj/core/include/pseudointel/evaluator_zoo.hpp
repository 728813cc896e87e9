#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pseudointel/core.hpp"
#include "pseudointel/learner.hpp"

namespace pseudointel {

/// e_S: draws a stored pair uniformly, queries its x and accepts iff the box
/// answers the stored y. With rounds > 1 it repeats with fresh draws and
/// rejects at the first mismatch; the exhaustive variant walks every stored
/// pair once, in order.
class StaticDatasetEvaluator final : public Evaluator {
 public:
  explicit StaticDatasetEvaluator(std::vector<SamplePair> stored, std::size_t rounds = 1);
  static std::shared_ptr<StaticDatasetEvaluator> exhaustive(std::vector<SamplePair> stored);

  std::string name() const override;
  std::size_t max_rounds() const override { return exhaustive_ ? stored_.size() : rounds_; }
  std::unique_ptr<EvaluatorSession> start() const override;
  std::optional<ProbeTable> probe_table() const override;

  const std::vector<SamplePair>& stored() const noexcept { return stored_; }
  /// log2|S| plus the payload bits of S.
  double description_bits() const;

 private:
  StaticDatasetEvaluator(std::vector<SamplePair> stored, std::size_t rounds, bool exhaustive);

  std::vector<SamplePair> stored_;
  std::size_t rounds_;
  bool exhaustive_;
};

/// Accepts or rejects without looking at the box (r = 0).
class ConstantVerdictEvaluator final : public Evaluator {
 public:
  explicit ConstantVerdictEvaluator(bool accept) : accept_(accept) {}

  std::string name() const override { return accept_ ? "always-accept" : "always-reject"; }
  std::size_t max_rounds() const override { return 0; }
  std::unique_ptr<EvaluatorSession> start() const override;
  std::optional<ProbeTable> probe_table() const override;

 private:
  bool accept_;
};

std::shared_ptr<const StaticDatasetEvaluator> learn_static_evaluator(std::span<const SamplePair> samples,
                                                                     std::size_t rounds = 1);

// --- Adversarial evaluation --------------------------------------------------

/// Stands in for the human annotator: proposes an edited query.
using QueryMutator = std::function<Query(const Query&, Rng&)>;

struct MutationOptions {
  QueryMutator mutate;
  /// Mutated queries are relabeled with a draw from this capability's conditional.
  CapabilityPtr relabel_with;
  std::size_t max_rounds = 1;
};

struct FilterRecord {
  std::size_t seed_index;        // position in the seed sample
  std::size_t mutation_rounds;   // 0 when the seed pair itself survived
  Response aux_response;         // what the auxiliary model answered on the filtering draw
};

/// S-hat: the pairs on which the auxiliary model erred, with the evidence.
struct ChallengeSet {
  std::vector<SamplePair> pairs;
  std::vector<FilterRecord> records;
  std::string aux_label;
};

/// Keeps the seed pairs the auxiliary model gets wrong. With mutation options,
/// a pair the model gets right is edited up to max_rounds times, relabeling
/// each edit, until the model errs. Throws Error{empty_challenge_set} when
/// nothing survives and Error{invalid_config} for an empty seed or
/// max_rounds = 0.
ChallengeSet adversarial_filter(std::span<const SamplePair> seed, const Model& aux, const RandomSource& rs,
                                const std::optional<MutationOptions>& mutation = std::nullopt);

std::shared_ptr<const StaticDatasetEvaluator> learn_adversarial_evaluator(
    std::span<const SamplePair> seed, const Model& aux, const RandomSource& rs,
    const std::optional<MutationOptions>& mutation = std::nullopt);

/// Flips one uniformly chosen bit of a bitvector query.
QueryMutator bit_flip_mutator();

// --- Self-evaluation ---------------------------------------------------------

/// Queries for a self-evaluator: a fixed list (drawn uniformly) or the query
/// marginal of a capability.
using QuerySource = std::variant<std::vector<Query>, CapabilityPtr>;

/// e_g: draws x, queries the box, accepts iff the answer equals g(x). g is
/// evaluated with the session's own stream, so a randomized g is compared
/// against a fresh draw of itself.
class SelfEvaluator final : public Evaluator {
 public:
  SelfEvaluator(ModelPtr source_model, QuerySource queries);

  std::string name() const override { return "self:" + model_->label(); }
  std::size_t max_rounds() const override { return 1; }
  std::unique_ptr<EvaluatorSession> start() const override;
  std::optional<ProbeTable> probe_table() const override;

  const Model& source_model() const noexcept { return *model_; }

 private:
  ModelPtr model_;
  QuerySource queries_;
};

/// g -> e_g. Throws Error{empty_sample_set} for an empty query list.
std::shared_ptr<const SelfEvaluator> derive_self_evaluator(ModelPtr model, QuerySource queries);

/// L_{E_G}: trains a fresh model on the evaluator's own samples and returns
/// its self-evaluator, querying those samples' queries.
std::shared_ptr<const SelfEvaluator> learn_self_evaluator(const ModelLearner& learner,
                                                          const TrainingInput& evaluator_samples,
                                                          const RandomSource& rs, LearnerContext& ctx);

// --- Model-based evaluation --------------------------------------------------

/// Accepts iff the box agrees with a reference predictor on a query drawn
/// uniformly from a generated pool.
class ModelBasedEvaluator final : public Evaluator {
 public:
  ModelBasedEvaluator(std::vector<Query> pool, ModelPtr reference);

  std::string name() const override { return "model-based"; }
  std::size_t max_rounds() const override { return 1; }
  std::unique_ptr<EvaluatorSession> start() const override;
  std::optional<ProbeTable> probe_table() const override;

  const std::vector<Query>& pool() const noexcept { return pool_; }
  const Model& reference() const noexcept { return *reference_; }

 private:
  std::vector<Query> pool_;
  ModelPtr reference_;
};

/// For each sample, asks the generator (template query in, generated query
/// bytes out) up to `budget` times for a query the filter keeps (filter
/// answers "1"). The reference predictor memorizes S and falls back to its
/// majority response. Throws Error{generator_exhausted} if the pool ends up
/// empty and Error{empty_sample_set} for an empty S.
std::shared_ptr<const ModelBasedEvaluator> learn_modelbased_evaluator(const Model& generator,
                                                                      const Model* filter,
                                                                      const TrainingInput& samples,
                                                                      const RandomSource& rs,
                                                                      std::size_t budget = 16,
                                                                      LearnerContext* ctx = nullptr);

/// Generator returning its template unchanged.
class IdentityGenerator final : public Model {
 public:
  std::string label() const override { return "identity-generator"; }
  Response respond(const Query& x, Rng&) const override { return Response(x.bytes()); }
  bool deterministic() const override { return true; }
};

/// Replaces every `wildcard` byte of the template with a uniform draw from `fill`.
class TemplateFillGenerator final : public Model {
 public:
  TemplateFillGenerator(char wildcard, std::string fill);

  std::string label() const override { return "template-fill"; }
  Response respond(const Query& x, Rng& rng) const override;

 private:
  char wildcard_;
  std::string fill_;
};

/// Generator flipping one random bit of a bitvector template.
class BitFlipGenerator final : public Model {
 public:
  std::string label() const override { return "bit-flip-generator"; }
  Response respond(const Query& x, Rng& rng) const override;
};

/// Filter answering "1" for members of a query set and "0" otherwise.
class MembershipFilter final : public Model {
 public:
  explicit MembershipFilter(std::vector<Query> members);

  std::string label() const override { return "membership-filter"; }
  Response respond(const Query& x, Rng&) const override;
  bool deterministic() const override { return true; }

 private:
  std::vector<Query> members_;  // sorted
};

}  // namespace pseudointel
