#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pseudointel/core.hpp"

namespace pseudointel {

// ---------------------------------------------------------------------------
// Capability families
// ---------------------------------------------------------------------------

struct TabularRow {
  Query query;
  double query_probability;
  ResponseTable responses;
};

/// Explicit finite capability. Rows with zero query mass are part of the query
/// space but never sampled.
class TabularCapability final : public Capability {
 public:
  /// Validates codecs and normalization (to within 1e-9) and renormalizes.
  TabularCapability(std::string name, Codec query_codec, Codec response_codec,
                    std::vector<TabularRow> rows);

  bool deterministic() const override { return deterministic_; }
  bool contains(const Query& x) const override { return index_.count(x) != 0; }
  SamplePair sample(Rng& rng) const override;
  Response conditional_sample(const Query& x, Rng& rng) const override;
  std::optional<std::vector<WeightedPair>> enumerate() const override;
  std::optional<ResponseTable> conditional_table(const Query& x) const override;

  const std::vector<TabularRow>& rows() const noexcept { return rows_; }

 private:
  const TabularRow& row(const Query& x) const;

  std::vector<TabularRow> rows_;
  std::vector<double> marginal_;
  std::vector<std::vector<double>> response_weights_;
  std::unordered_map<Query, std::size_t> index_;
  bool deterministic_ = true;
};

/// y = XOR of x_i over a hidden index set T of {1..d}. Queries are bitvectors
/// of length d whose bits are i.i.d. Bernoulli(bias). Responses are the
/// symbols "0" and "1".
class ParityCapability final : public Capability {
 public:
  static constexpr std::size_t max_enumerable_dimension = 16;

  /// `indices` are 1-based.
  ParityCapability(std::string name, std::size_t dimension, std::vector<std::size_t> indices,
                   double bias = 0.5);

  bool deterministic() const override { return true; }
  bool contains(const Query& x) const override;
  SamplePair sample(Rng& rng) const override;
  Response conditional_sample(const Query& x, Rng& rng) const override;
  std::optional<std::vector<WeightedPair>> enumerate() const override;
  std::optional<ResponseTable> conditional_table(const Query& x) const override;

  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  double bias() const noexcept { return bias_; }

 private:
  std::size_t dimension_;
  std::vector<std::size_t> indices_;
  std::uint64_t mask_ = 0;
  double bias_;
};

/// Order-k Markov source over a single-byte alphabet. Queries are length-L
/// prefixes (first k symbols uniform, the rest from the chain) and the response
/// is the next symbol.
class KGramCapability final : public Capability {
 public:
  /// `transitions` maps every length-k context over the alphabet to a row of
  /// alphabet.size() probabilities (in alphabet order).
  KGramCapability(std::string name, std::size_t order, std::string alphabet,
                  std::size_t prefix_length, std::map<std::string, std::vector<double>> transitions);

  bool deterministic() const override { return deterministic_; }
  bool contains(const Query& x) const override;
  SamplePair sample(Rng& rng) const override;
  Response conditional_sample(const Query& x, Rng& rng) const override;
  std::optional<std::vector<WeightedPair>> enumerate() const override;
  std::optional<ResponseTable> conditional_table(const Query& x) const override;

  std::size_t order() const noexcept { return order_; }
  const std::string& alphabet() const noexcept { return alphabet_; }
  std::size_t prefix_length() const noexcept { return prefix_length_; }
  const std::vector<double>& row(std::string_view context) const;

 private:
  std::size_t order_;
  std::string alphabet_;
  std::size_t prefix_length_;
  std::map<std::string, std::vector<double>> transitions_;
  bool deterministic_ = true;
};

// ---------------------------------------------------------------------------
// Models and model learners
// ---------------------------------------------------------------------------

/// Stored response on seen queries, `fallback` everywhere else.
class MemorizerModel final : public Model {
 public:
  MemorizerModel(std::map<Query, Response> table, Response fallback)
      : table_(std::move(table)), fallback_(std::move(fallback)) {}

  std::string label() const override { return "memorizer"; }
  Response respond(const Query& x, Rng&) const override;
  bool deterministic() const override { return true; }

  const std::map<Query, Response>& table() const noexcept { return table_; }
  const Response& fallback() const noexcept { return fallback_; }

 private:
  std::map<Query, Response> table_;
  Response fallback_;
};

class ParityModel final : public Model {
 public:
  /// 1-based indices.
  ParityModel(std::size_t dimension, std::vector<std::size_t> indices);

  std::string label() const override;
  Response respond(const Query& x, Rng&) const override;
  bool deterministic() const override { return true; }

  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::size_t dimension_;
  std::vector<std::size_t> indices_;
};

class ConstantModel final : public Model {
 public:
  explicit ConstantModel(Response value) : value_(std::move(value)) {}

  std::string label() const override { return "constant"; }
  Response respond(const Query&, Rng&) const override { return value_; }
  bool deterministic() const override { return true; }

  const Response& value() const noexcept { return value_; }

 private:
  Response value_;
};

/// Samples the next symbol from a learned row keyed by the last k query symbols.
class KGramModel final : public Model {
 public:
  KGramModel(std::size_t order, std::string alphabet,
             std::map<std::string, std::vector<double>> rows);

  std::string label() const override { return "kgram"; }
  Response respond(const Query& x, Rng& rng) const override;
  std::optional<ResponseTable> response_table(const Query& x) const override;

  /// Learned distribution for a context; unseen contexts are uniform.
  std::vector<double> row(std::string_view context) const;
  const std::string& alphabet() const noexcept { return alphabet_; }

 private:
  std::string context_of(const Query& x) const;

  std::size_t order_;
  std::string alphabet_;
  std::map<std::string, std::vector<double>> rows_;
};

/// Stores every pair; on repeated queries with different responses the last
/// one wins and a warning goes to `ctx`.
std::shared_ptr<const MemorizerModel> learn_memorizer(std::span<const SamplePair> samples,
                                                      Response fallback,
                                                      LearnerContext* ctx = nullptr);

/// Proper parity learner: Gaussian elimination over GF(2). Of all index sets
/// consistent with the samples it returns the smallest characteristic vector
/// (b_1, ..., b_d) in lexicographic order. Throws Error{inconsistent} when no
/// parity fits.
std::shared_ptr<const ParityModel> learn_parity(std::span<const SamplePair> samples,
                                                std::size_t dimension,
                                                LearnerContext* ctx = nullptr);

/// Majority response; ties go to the lexicographically smallest payload and an
/// empty sample yields codec_zero_value(codec).
std::shared_ptr<const ConstantModel> learn_constant(std::span<const SamplePair> samples,
                                                    Codec codec, LearnerContext* ctx = nullptr);

/// Maximum-likelihood transitions with add-one smoothing:
/// P(b | ctx) = (count(ctx, b) + 1) / (count(ctx) + |alphabet|).
std::shared_ptr<const KGramModel> learn_kgram(std::span<const SamplePair> samples,
                                              std::size_t order, std::string alphabet,
                                              LearnerContext* ctx = nullptr);

}  // namespace pseudointel
