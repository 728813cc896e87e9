#include "pseudointel/evaluator_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pseudointel/capabilities.hpp"
#include "pseudointel/errors.hpp"

namespace pseudointel {
namespace {

class StaticSession final : public EvaluatorSession {
 public:
  StaticSession(const std::vector<SamplePair>& stored, std::size_t rounds, bool exhaustive)
      : stored_(stored), rounds_(rounds), exhaustive_(exhaustive) {}

  SessionStep next(const Transcript& so_far, Rng& rng) override {
    if (!so_far.empty() && so_far.back().response != stored_[current_].response) return Verdict{false};
    if (so_far.size() == rounds_) return Verdict{true};
    current_ = exhaustive_ ? so_far.size() : rng.uniform_index(stored_.size());
    return stored_[current_].query;
  }

 private:
  const std::vector<SamplePair>& stored_;
  std::size_t rounds_;
  bool exhaustive_;
  std::size_t current_ = 0;
};

class ConstantVerdictSession final : public EvaluatorSession {
 public:
  explicit ConstantVerdictSession(bool accept) : accept_(accept) {}
  SessionStep next(const Transcript&, Rng&) override { return Verdict{accept_}; }

 private:
  bool accept_;
};

class SelfSession final : public EvaluatorSession {
 public:
  SelfSession(const Model& model, const QuerySource& queries) : model_(model), queries_(queries) {}

  SessionStep next(const Transcript& so_far, Rng& rng) override {
    if (so_far.empty()) {
      if (const auto* list = std::get_if<std::vector<Query>>(&queries_)) {
        return (*list)[rng.uniform_index(list->size())];
      }
      return std::get<CapabilityPtr>(queries_)->sample(rng).query;
    }
    const SamplePair& exchange = so_far.front();
    return Verdict{exchange.response == model_.respond(exchange.query, rng)};
  }

 private:
  const Model& model_;
  const QuerySource& queries_;
};

class PoolSession final : public EvaluatorSession {
 public:
  PoolSession(const std::vector<Query>& pool, const Model& reference) : pool_(pool), reference_(reference) {}

  SessionStep next(const Transcript& so_far, Rng& rng) override {
    if (so_far.empty()) return pool_[rng.uniform_index(pool_.size())];
    const SamplePair& exchange = so_far.front();
    return Verdict{exchange.response == reference_.respond(exchange.query, rng)};
  }

 private:
  const std::vector<Query>& pool_;
  const Model& reference_;
};

}  // namespace

// --- Static datasets ---------------------------------------------------------

StaticDatasetEvaluator::StaticDatasetEvaluator(std::vector<SamplePair> stored, std::size_t rounds)
    : StaticDatasetEvaluator(std::move(stored), rounds, false) {}

StaticDatasetEvaluator::StaticDatasetEvaluator(std::vector<SamplePair> stored, std::size_t rounds,
                                               bool exhaustive)
    : stored_(std::move(stored)), rounds_(rounds), exhaustive_(exhaustive) {
  if (stored_.empty()) throw Error(Errc::empty_sample_set, "static evaluator needs at least one pair");
  if (!exhaustive_ && rounds_ == 0) throw Error(Errc::invalid_config, "static evaluator needs rounds >= 1");
  if (exhaustive_) rounds_ = stored_.size();
}

std::shared_ptr<StaticDatasetEvaluator> StaticDatasetEvaluator::exhaustive(std::vector<SamplePair> stored) {
  return std::shared_ptr<StaticDatasetEvaluator>(new StaticDatasetEvaluator(std::move(stored), 0, true));
}

std::string StaticDatasetEvaluator::name() const {
  if (exhaustive_) return "static-all";
  return rounds_ == 1 ? "static" : "static-r" + std::to_string(rounds_);
}

std::unique_ptr<EvaluatorSession> StaticDatasetEvaluator::start() const {
  return std::make_unique<StaticSession>(stored_, rounds_, exhaustive_);
}

std::optional<ProbeTable> StaticDatasetEvaluator::probe_table() const {
  if (rounds_ != 1) return std::nullopt;
  ProbeTable table;
  const double w = 1.0 / static_cast<double>(stored_.size());
  for (const SamplePair& s : stored_) table.probes.push_back({s.query, s.response, w});
  return table;
}

double StaticDatasetEvaluator::description_bits() const {
  double payload = 0.0;
  for (const SamplePair& s : stored_) payload += 8.0 * static_cast<double>(s.query.size() + s.response.size());
  return std::log2(static_cast<double>(stored_.size())) + payload;
}

std::unique_ptr<EvaluatorSession> ConstantVerdictEvaluator::start() const {
  return std::make_unique<ConstantVerdictSession>(accept_);
}

std::optional<ProbeTable> ConstantVerdictEvaluator::probe_table() const {
  return ProbeTable{accept_ ? 1.0 : 0.0, {}};
}

std::shared_ptr<const StaticDatasetEvaluator> learn_static_evaluator(std::span<const SamplePair> samples,
                                                                     std::size_t rounds) {
  return std::make_shared<StaticDatasetEvaluator>(std::vector<SamplePair>(samples.begin(), samples.end()),
                                                  rounds);
}

// --- Adversarial evaluation --------------------------------------------------

ChallengeSet adversarial_filter(std::span<const SamplePair> seed, const Model& aux, const RandomSource& rs,
                                const std::optional<MutationOptions>& mutation) {
  if (seed.empty()) throw Error(Errc::invalid_config, "adversarial filter needs seed samples");
  if (mutation) {
    if (mutation->max_rounds == 0) throw Error(Errc::invalid_config, "mutation max_rounds must be >= 1");
    if (!mutation->mutate || !mutation->relabel_with) {
      throw Error(Errc::invalid_config, "mutation needs a mutator and a capability to relabel with");
    }
  }

  Rng rng = rs.child_stream("filter");
  ChallengeSet out;
  out.aux_label = aux.label();
  for (std::size_t i = 0; i < seed.size(); ++i) {
    Response guess = aux.respond(seed[i].query, rng);
    if (guess != seed[i].response) {
      out.pairs.push_back(seed[i]);
      out.records.push_back({i, 0, std::move(guess)});
      continue;
    }
    if (!mutation) continue;
    Query current = seed[i].query;
    for (std::size_t round = 1; round <= mutation->max_rounds; ++round) {
      current = mutation->mutate(current, rng);
      Response label = mutation->relabel_with->conditional_sample(current, rng);
      Response mutated_guess = aux.respond(current, rng);
      if (mutated_guess != label) {
        out.pairs.push_back({current, std::move(label)});
        out.records.push_back({i, round, std::move(mutated_guess)});
        break;
      }
    }
  }
  if (out.pairs.empty()) {
    throw Error(Errc::empty_challenge_set,
                aux.label() + " answered every seed pair correctly; nothing to challenge it with");
  }
  return out;
}

std::shared_ptr<const StaticDatasetEvaluator> learn_adversarial_evaluator(
    std::span<const SamplePair> seed, const Model& aux, const RandomSource& rs,
    const std::optional<MutationOptions>& mutation) {
  return std::make_shared<StaticDatasetEvaluator>(adversarial_filter(seed, aux, rs, mutation).pairs);
}

QueryMutator bit_flip_mutator() {
  return [](const Query& x, Rng& rng) {
    std::string bytes = x.bytes();
    if (!bytes.empty()) bytes[rng.uniform_index(bytes.size())] ^= '\1';
    return Query(std::move(bytes));
  };
}

// --- Self-evaluation ---------------------------------------------------------

SelfEvaluator::SelfEvaluator(ModelPtr source_model, QuerySource queries)
    : model_(std::move(source_model)), queries_(std::move(queries)) {
  if (!model_) throw Error(Errc::invalid_config, "self-evaluator without a model");
  if (const auto* list = std::get_if<std::vector<Query>>(&queries_); list && list->empty()) {
    throw Error(Errc::empty_sample_set, "self-evaluator needs at least one query");
  }
  if (const auto* cap = std::get_if<CapabilityPtr>(&queries_); cap && !*cap) {
    throw Error(Errc::invalid_config, "self-evaluator with a null capability as query source");
  }
}

std::unique_ptr<EvaluatorSession> SelfEvaluator::start() const {
  return std::make_unique<SelfSession>(*model_, queries_);
}

std::optional<ProbeTable> SelfEvaluator::probe_table() const {
  if (!model_->deterministic()) return std::nullopt;
  Rng unused(0);
  ProbeTable table;
  if (const auto* list = std::get_if<std::vector<Query>>(&queries_)) {
    const double w = 1.0 / static_cast<double>(list->size());
    for (const Query& x : *list) table.probes.push_back({x, model_->respond(x, unused), w});
    return table;
  }
  const auto joint = std::get<CapabilityPtr>(queries_)->enumerate();
  if (!joint) return std::nullopt;
  std::map<Query, double> marginal;
  std::vector<Query> order;
  for (const WeightedPair& wp : *joint) {
    auto [it, inserted] = marginal.try_emplace(wp.pair.query, 0.0);
    if (inserted) order.push_back(wp.pair.query);
    it->second += wp.probability;
  }
  for (const Query& x : order) table.probes.push_back({x, model_->respond(x, unused), marginal[x]});
  return table;
}

std::shared_ptr<const SelfEvaluator> derive_self_evaluator(ModelPtr model, QuerySource queries) {
  return std::make_shared<SelfEvaluator>(std::move(model), std::move(queries));
}

std::shared_ptr<const SelfEvaluator> learn_self_evaluator(const ModelLearner& learner,
                                                          const TrainingInput& evaluator_samples,
                                                          const RandomSource& rs, LearnerContext& ctx) {
  ModelPtr model = learner.train(evaluator_samples, rs.child("self-model"), ctx);
  std::vector<Query> queries;
  queries.reserve(evaluator_samples.samples.size());
  for (const SamplePair& s : evaluator_samples.samples) queries.push_back(s.query);
  return derive_self_evaluator(std::move(model), std::move(queries));
}

// --- Model-based evaluation --------------------------------------------------

ModelBasedEvaluator::ModelBasedEvaluator(std::vector<Query> pool, ModelPtr reference)
    : pool_(std::move(pool)), reference_(std::move(reference)) {
  if (pool_.empty()) throw Error(Errc::generator_exhausted, "empty query pool");
  if (!reference_) throw Error(Errc::invalid_config, "model-based evaluator without a reference");
}

std::unique_ptr<EvaluatorSession> ModelBasedEvaluator::start() const {
  return std::make_unique<PoolSession>(pool_, *reference_);
}

std::optional<ProbeTable> ModelBasedEvaluator::probe_table() const {
  if (!reference_->deterministic()) return std::nullopt;
  Rng unused(0);
  ProbeTable table;
  const double w = 1.0 / static_cast<double>(pool_.size());
  for (const Query& x : pool_) table.probes.push_back({x, reference_->respond(x, unused), w});
  return table;
}

std::shared_ptr<const ModelBasedEvaluator> learn_modelbased_evaluator(const Model& generator,
                                                                      const Model* filter,
                                                                      const TrainingInput& samples,
                                                                      const RandomSource& rs,
                                                                      std::size_t budget,
                                                                      LearnerContext* ctx) {
  if (samples.samples.empty()) throw Error(Errc::empty_sample_set, "model-based evaluator needs samples");
  if (budget == 0) throw Error(Errc::invalid_config, "generation budget must be >= 1");
  const Codec codec = samples.capability ? samples.capability->response_codec() : Codec::symbol;
  auto majority = learn_constant(samples.samples, codec, ctx);
  ModelPtr reference = learn_memorizer(samples.samples, majority->value(), ctx);

  Rng rng = rs.child_stream("generate");
  std::vector<Query> pool;
  for (const SamplePair& s : samples.samples) {
    for (std::size_t attempt = 0; attempt < budget; ++attempt) {
      if (ctx) ctx->tick();
      Query candidate(generator.respond(s.query, rng).bytes());
      if (!filter || filter->respond(candidate, rng).bytes() == "1") {
        pool.push_back(std::move(candidate));
        break;
      }
    }
  }
  if (pool.empty()) {
    throw Error(Errc::generator_exhausted, "the filter rejected every generated query within budget");
  }
  return std::make_shared<ModelBasedEvaluator>(std::move(pool), std::move(reference));
}

TemplateFillGenerator::TemplateFillGenerator(char wildcard, std::string fill)
    : wildcard_(wildcard), fill_(std::move(fill)) {
  if (fill_.empty()) throw Error(Errc::invalid_config, "template fill alphabet is empty");
}

Response TemplateFillGenerator::respond(const Query& x, Rng& rng) const {
  std::string out = x.bytes();
  for (char& c : out) {
    if (c == wildcard_) c = fill_[rng.uniform_index(fill_.size())];
  }
  return Response(std::move(out));
}

Response BitFlipGenerator::respond(const Query& x, Rng& rng) const {
  std::string bytes = x.bytes();
  if (!bytes.empty()) bytes[rng.uniform_index(bytes.size())] ^= '\1';
  return Response(std::move(bytes));
}

MembershipFilter::MembershipFilter(std::vector<Query> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
}

Response MembershipFilter::respond(const Query& x, Rng&) const {
  return Response(std::binary_search(members_.begin(), members_.end(), x) ? "1" : "0");
}

}  // namespace pseudointel
