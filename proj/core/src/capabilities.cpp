#include "pseudointel/capabilities.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pseudointel/errors.hpp"

namespace pseudointel {
namespace {

constexpr double kNormalizationSlack = 1e-9;

void require_normalized(double total, const std::string& what) {
  if (!(std::abs(total - 1.0) <= kNormalizationSlack)) {
    throw Error(Errc::invalid_config, what + " sums to " + std::to_string(total) + ", not 1");
  }
}

Response bit_symbol(bool bit) { return Response(bit ? "1" : "0"); }

}  // namespace

// --- TabularCapability -------------------------------------------------------

TabularCapability::TabularCapability(std::string name, Codec query_codec, Codec response_codec,
                                     std::vector<TabularRow> rows)
    : Capability(std::move(name), query_codec, response_codec), rows_(std::move(rows)) {
  if (rows_.empty()) throw Error(Errc::invalid_config, "tabular capability without rows");

  double mass = 0.0;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const TabularRow& r = rows_[i];
    if (!payload_valid(query_codec, r.query.bytes())) {
      throw Error(Errc::bad_payload, "query does not decode under " + std::string(to_string(query_codec)));
    }
    if (!index_.emplace(r.query, i).second) {
      throw Error(Errc::invalid_config, "duplicate query '" +
                                            payload_to_text(query_codec, r.query.bytes()) + "'");
    }
    if (r.query_probability < 0.0) throw Error(Errc::invalid_config, "negative query probability");
    if (r.responses.empty()) throw Error(Errc::invalid_config, "row without responses");
    mass += r.query_probability;
  }
  require_normalized(mass, "query marginal of " + this->name());

  // Declared weights are kept verbatim (within tolerance of 1) so that a
  // serialized table parses back to identical numbers.
  for (TabularRow& r : rows_) {
    marginal_.push_back(r.query_probability);
    double row_mass = 0.0;
    for (const WeightedResponse& w : r.responses) {
      if (w.probability < 0.0) throw Error(Errc::invalid_config, "negative response probability");
      if (!payload_valid(response_codec, w.response.bytes())) {
        throw Error(Errc::bad_payload, "response does not decode under " +
                                           std::string(to_string(response_codec)));
      }
      row_mass += w.probability;
    }
    require_normalized(row_mass, "response row");
    std::vector<double> weights;
    std::size_t support = 0;
    for (const WeightedResponse& w : r.responses) {
      weights.push_back(w.probability);
      if (w.probability > 0.0) ++support;
    }
    if (support != 1) deterministic_ = false;
    response_weights_.push_back(std::move(weights));
  }
}

const TabularRow& TabularCapability::row(const Query& x) const {
  auto it = index_.find(x);
  if (it == index_.end()) throw Error(Errc::unsupported_query, "query not in table of " + name());
  return rows_[it->second];
}

SamplePair TabularCapability::sample(Rng& rng) const {
  const std::size_t i = rng.pick(marginal_);
  const TabularRow& r = rows_[i];
  if (r.responses.size() == 1) return {r.query, r.responses.front().response};
  return {r.query, r.responses[rng.pick(response_weights_[i])].response};
}

Response TabularCapability::conditional_sample(const Query& x, Rng& rng) const {
  auto it = index_.find(x);
  if (it == index_.end()) throw Error(Errc::unsupported_query, "query not in table of " + name());
  const TabularRow& r = rows_[it->second];
  if (r.responses.size() == 1) return r.responses.front().response;
  return r.responses[rng.pick(response_weights_[it->second])].response;
}

std::optional<std::vector<WeightedPair>> TabularCapability::enumerate() const {
  std::vector<WeightedPair> out;
  for (const TabularRow& r : rows_) {
    for (const WeightedResponse& w : r.responses) {
      const double p = r.query_probability * w.probability;
      if (p > 0.0) out.push_back({{r.query, w.response}, p});
    }
  }
  return out;
}

std::optional<ResponseTable> TabularCapability::conditional_table(const Query& x) const {
  return row(x).responses;
}

// --- ParityCapability --------------------------------------------------------

ParityCapability::ParityCapability(std::string name, std::size_t dimension,
                                   std::vector<std::size_t> indices, double bias)
    : Capability(std::move(name), Codec::bitvector, Codec::symbol),
      dimension_(dimension),
      indices_(std::move(indices)),
      bias_(bias) {
  if (dimension_ == 0 || dimension_ > 63) {
    throw Error(Errc::invalid_config, "parity dimension must be in [1, 63]");
  }
  if (!(bias_ >= 0.0 && bias_ <= 1.0)) throw Error(Errc::invalid_config, "parity bias outside [0, 1]");
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  for (std::size_t i : indices_) {
    if (i < 1 || i > dimension_) throw Error(Errc::invalid_config, "parity index out of range");
    mask_ |= std::uint64_t{1} << (i - 1);
  }
}

bool ParityCapability::contains(const Query& x) const {
  return x.size() == dimension_ && payload_valid(Codec::bitvector, x.bytes());
}

SamplePair ParityCapability::sample(Rng& rng) const {
  std::string x(dimension_, '\0');
  bool y = false;
  for (std::size_t i = 0; i < dimension_; ++i) {
    const bool bit = rng.bernoulli(bias_);
    x[i] = bit ? '\1' : '\0';
    if (bit && (mask_ >> i & 1U)) y = !y;
  }
  return {Query(std::move(x)), bit_symbol(y)};
}

Response ParityCapability::conditional_sample(const Query& x, Rng&) const {
  if (!contains(x)) throw Error(Errc::unsupported_query, "not a " + std::to_string(dimension_) + "-bit vector");
  bool y = false;
  for (std::size_t i = 0; i < dimension_; ++i) {
    if (x.bytes()[i] == '\1' && (mask_ >> i & 1U)) y = !y;
  }
  return bit_symbol(y);
}

std::optional<std::vector<WeightedPair>> ParityCapability::enumerate() const {
  if (dimension_ > max_enumerable_dimension) return std::nullopt;
  std::vector<WeightedPair> out;
  const std::uint64_t count = std::uint64_t{1} << dimension_;
  out.reserve(count);
  Rng unused(0);
  for (std::uint64_t v = 0; v < count; ++v) {
    // First character is the most significant bit, so the order is textual.
    std::string x(dimension_, '\0');
    double p = 1.0;
    for (std::size_t i = 0; i < dimension_; ++i) {
      const bool bit = (v >> (dimension_ - 1 - i)) & 1U;
      x[i] = bit ? '\1' : '\0';
      p *= bit ? bias_ : 1.0 - bias_;
    }
    if (p <= 0.0) continue;
    Query q(std::move(x));
    Response y = conditional_sample(q, unused);
    out.push_back({{std::move(q), std::move(y)}, p});
  }
  return out;
}

std::optional<ResponseTable> ParityCapability::conditional_table(const Query& x) const {
  // Exact tables only where the joint is enumerable, so exact distinction
  // refuses large parities as a whole.
  if (dimension_ > max_enumerable_dimension) return std::nullopt;
  Rng unused(0);
  return ResponseTable{{conditional_sample(x, unused), 1.0}};
}

// --- KGramCapability ---------------------------------------------------------

KGramCapability::KGramCapability(std::string name, std::size_t order, std::string alphabet,
                                 std::size_t prefix_length,
                                 std::map<std::string, std::vector<double>> transitions)
    : Capability(std::move(name), Codec::tokens, Codec::symbol),
      order_(order),
      alphabet_(std::move(alphabet)),
      prefix_length_(prefix_length),
      transitions_(std::move(transitions)) {
  if (alphabet_.empty()) throw Error(Errc::invalid_config, "empty k-gram alphabet");
  std::string sorted = alphabet_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(Errc::invalid_config, "repeated symbol in k-gram alphabet");
  }
  if (prefix_length_ < order_) throw Error(Errc::invalid_config, "prefix shorter than the k-gram order");

  // Every context over the alphabet needs a row.
  std::size_t contexts = 1;
  for (std::size_t i = 0; i < order_; ++i) contexts *= alphabet_.size();
  if (transitions_.size() != contexts) {
    throw Error(Errc::invalid_config, "expected " + std::to_string(contexts) + " transition rows, got " +
                                          std::to_string(transitions_.size()));
  }
  for (auto& [context, probs] : transitions_) {
    if (context.size() != order_ ||
        context.find_first_not_of(alphabet_) != std::string::npos) {
      throw Error(Errc::invalid_config, "bad k-gram context '" + context + "'");
    }
    if (probs.size() != alphabet_.size()) {
      throw Error(Errc::invalid_config, "row for '" + context + "' has the wrong width");
    }
    double total = 0.0;
    std::size_t support = 0;
    for (double p : probs) {
      if (p < 0.0) throw Error(Errc::invalid_config, "negative transition probability");
      total += p;
      if (p > 0.0) ++support;
    }
    require_normalized(total, "transition row '" + context + "'");
    for (double& p : probs) p /= total;
    if (support != 1) deterministic_ = false;
  }
}

const std::vector<double>& KGramCapability::row(std::string_view context) const {
  auto it = transitions_.find(std::string(context));
  if (it == transitions_.end()) throw Error(Errc::unsupported_query, "unknown context");
  return it->second;
}

bool KGramCapability::contains(const Query& x) const {
  return x.size() == prefix_length_ && x.bytes().find_first_not_of(alphabet_) == std::string::npos;
}

SamplePair KGramCapability::sample(Rng& rng) const {
  std::string seq;
  seq.reserve(prefix_length_ + 1);
  for (std::size_t i = 0; i < order_; ++i) seq.push_back(alphabet_[rng.uniform_index(alphabet_.size())]);
  while (seq.size() <= prefix_length_) {
    const auto& r = row(std::string_view(seq).substr(seq.size() - order_));
    seq.push_back(alphabet_[rng.pick(r)]);
  }
  const char next = seq.back();
  seq.pop_back();
  return {Query(std::move(seq)), Response(std::string(1, next))};
}

Response KGramCapability::conditional_sample(const Query& x, Rng& rng) const {
  if (!contains(x)) throw Error(Errc::unsupported_query, "not a length-" + std::to_string(prefix_length_) + " prefix");
  const auto& r = row(std::string_view(x.bytes()).substr(prefix_length_ - order_));
  return Response(std::string(1, alphabet_[rng.pick(r)]));
}

std::optional<std::vector<WeightedPair>> KGramCapability::enumerate() const {
  constexpr double kMaxEntries = 1 << 20;
  if (std::pow(static_cast<double>(alphabet_.size()), static_cast<double>(prefix_length_ + 1)) > kMaxEntries) {
    return std::nullopt;
  }
  const std::size_t a = alphabet_.size();
  std::vector<WeightedPair> out;
  // Depth-first over sequences; p tracks the prefix probability.
  std::string seq;
  auto walk = [&](auto&& self, double p) -> void {
    if (seq.size() == prefix_length_) {
      const auto& r = row(std::string_view(seq).substr(prefix_length_ - order_));
      for (std::size_t j = 0; j < a; ++j) {
        if (p * r[j] > 0.0) {
          out.push_back({{Query(seq), Response(std::string(1, alphabet_[j]))}, p * r[j]});
        }
      }
      return;
    }
    for (std::size_t j = 0; j < a; ++j) {
      double step;
      if (seq.size() < order_) {
        step = 1.0 / static_cast<double>(a);
      } else {
        step = row(std::string_view(seq).substr(seq.size() - order_))[j];
      }
      if (step <= 0.0) continue;
      seq.push_back(alphabet_[j]);
      self(self, p * step);
      seq.pop_back();
    }
  };
  walk(walk, 1.0);
  return out;
}

std::optional<ResponseTable> KGramCapability::conditional_table(const Query& x) const {
  if (!contains(x)) throw Error(Errc::unsupported_query, "not a length-" + std::to_string(prefix_length_) + " prefix");
  const auto& r = row(std::string_view(x.bytes()).substr(prefix_length_ - order_));
  ResponseTable out;
  for (std::size_t j = 0; j < alphabet_.size(); ++j) {
    if (r[j] > 0.0) out.push_back({Response(std::string(1, alphabet_[j])), r[j]});
  }
  return out;
}

// --- Models ------------------------------------------------------------------

Response MemorizerModel::respond(const Query& x, Rng&) const {
  auto it = table_.find(x);
  return it == table_.end() ? fallback_ : it->second;
}

ParityModel::ParityModel(std::size_t dimension, std::vector<std::size_t> indices)
    : dimension_(dimension), indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
}

std::string ParityModel::label() const {
  std::string out = "parity{";
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(indices_[i]);
  }
  return out + "}";
}

Response ParityModel::respond(const Query& x, Rng&) const {
  if (x.size() != dimension_ || !payload_valid(Codec::bitvector, x.bytes())) {
    throw Error(Errc::unsupported_query, "parity model expects a " + std::to_string(dimension_) + "-bit vector");
  }
  bool y = false;
  for (std::size_t i : indices_) y ^= x.bytes()[i - 1] == '\1';
  return bit_symbol(y);
}

KGramModel::KGramModel(std::size_t order, std::string alphabet,
                       std::map<std::string, std::vector<double>> rows)
    : order_(order), alphabet_(std::move(alphabet)), rows_(std::move(rows)) {}

std::string KGramModel::context_of(const Query& x) const {
  const std::string& b = x.bytes();
  return b.size() >= order_ ? b.substr(b.size() - order_) : b;
}

std::vector<double> KGramModel::row(std::string_view context) const {
  auto it = rows_.find(std::string(context));
  if (it != rows_.end()) return it->second;
  return std::vector<double>(alphabet_.size(), 1.0 / static_cast<double>(alphabet_.size()));
}

Response KGramModel::respond(const Query& x, Rng& rng) const {
  const auto r = row(context_of(x));
  return Response(std::string(1, alphabet_[rng.pick(r)]));
}

std::optional<ResponseTable> KGramModel::response_table(const Query& x) const {
  const auto r = row(context_of(x));
  ResponseTable out;
  for (std::size_t j = 0; j < alphabet_.size(); ++j) {
    if (r[j] > 0.0) out.push_back({Response(std::string(1, alphabet_[j])), r[j]});
  }
  return out;
}

// --- Learners ----------------------------------------------------------------

std::shared_ptr<const MemorizerModel> learn_memorizer(std::span<const SamplePair> samples,
                                                      Response fallback, LearnerContext* ctx) {
  std::map<Query, Response> table;
  std::size_t conflicts = 0;
  for (const SamplePair& s : samples) {
    if (ctx) ctx->tick();
    auto [it, inserted] = table.try_emplace(s.query, s.response);
    if (!inserted && it->second != s.response) {
      ++conflicts;
      it->second = s.response;
    }
  }
  if (conflicts && ctx) {
    ctx->warn("ConflictingLabels: " + std::to_string(conflicts) +
              " repeated queries with different responses, kept the last");
  }
  return std::make_shared<MemorizerModel>(std::move(table), std::move(fallback));
}

namespace {

// Row-echelon basis over GF(2); row i (if present) has lowest set bit i.
class Gf2Basis {
 public:
  explicit Gf2Basis(std::size_t width, LearnerContext* ctx) : rows_(width), ctx_(ctx) {}

  struct Row {
    std::uint64_t mask = 0;
    bool rhs = false;
  };

  Row reduce(Row r) const {
    for (std::size_t bit = 0; bit < rows_.size() && r.mask; ++bit) {
      if ((r.mask >> bit & 1U) && rows_[bit]) {
        r.mask ^= rows_[bit]->mask;
        r.rhs ^= rows_[bit]->rhs;
        if (ctx_) ctx_->tick();
      }
    }
    return r;
  }

  /// False when the row contradicts the basis.
  bool insert(Row r) {
    r = reduce(r);
    if (r.mask == 0) return !r.rhs;
    const auto pivot = static_cast<std::size_t>(__builtin_ctzll(r.mask));
    rows_[pivot] = r;
    return true;
  }

 private:
  std::vector<std::optional<Row>> rows_;
  LearnerContext* ctx_;
};

}  // namespace

std::shared_ptr<const ParityModel> learn_parity(std::span<const SamplePair> samples,
                                                std::size_t dimension, LearnerContext* ctx) {
  if (dimension == 0 || dimension > 63) throw Error(Errc::invalid_config, "parity dimension must be in [1, 63]");
  Gf2Basis basis(dimension, ctx);
  for (const SamplePair& s : samples) {
    const std::string& x = s.query.bytes();
    if (x.size() != dimension || !payload_valid(Codec::bitvector, x)) {
      throw Error(Errc::bad_payload, "parity sample is not a " + std::to_string(dimension) + "-bit vector");
    }
    if (s.response.bytes() != "0" && s.response.bytes() != "1") {
      throw Error(Errc::bad_payload, "parity label must be 0 or 1");
    }
    Gf2Basis::Row r;
    for (std::size_t i = 0; i < dimension; ++i) {
      if (x[i] == '\1') r.mask |= std::uint64_t{1} << i;
    }
    r.rhs = s.response.bytes() == "1";
    if (!basis.insert(r)) throw Error(Errc::inconsistent, "no parity is consistent with the samples");
  }

  // Fix b_1, b_2, ... in turn, preferring 0 whenever the system allows it.
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < dimension; ++i) {
    const Gf2Basis::Row unit{std::uint64_t{1} << i, false};
    const bool forced_one = [&] {
      const auto reduced = basis.reduce(unit);
      return reduced.mask == 0 && reduced.rhs;
    }();
    basis.insert({unit.mask, forced_one});
    if (forced_one) indices.push_back(i + 1);
  }
  return std::make_shared<ParityModel>(dimension, std::move(indices));
}

std::shared_ptr<const ConstantModel> learn_constant(std::span<const SamplePair> samples, Codec codec,
                                                    LearnerContext* ctx) {
  if (samples.empty()) return std::make_shared<ConstantModel>(Response(codec_zero_value(codec)));
  std::map<Response, std::size_t> counts;
  for (const SamplePair& s : samples) {
    if (ctx) ctx->tick();
    ++counts[s.response];
  }
  // std::map iterates in lexicographic order, so strict > keeps the smallest on ties.
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return std::make_shared<ConstantModel>(best->first);
}

std::shared_ptr<const KGramModel> learn_kgram(std::span<const SamplePair> samples, std::size_t order,
                                              std::string alphabet, LearnerContext* ctx) {
  if (alphabet.empty()) throw Error(Errc::invalid_config, "empty k-gram alphabet");
  const std::size_t a = alphabet.size();
  std::map<std::string, std::vector<std::uint64_t>> counts;
  std::size_t skipped = 0;
  for (const SamplePair& s : samples) {
    if (ctx) ctx->tick();
    const std::string& x = s.query.bytes();
    const std::string& y = s.response.bytes();
    const auto symbol = y.size() == 1 ? alphabet.find(y[0]) : std::string::npos;
    if (x.size() < order || symbol == std::string::npos) {
      ++skipped;
      continue;
    }
    auto& row = counts[x.substr(x.size() - order)];
    row.resize(a, 0);
    ++row[symbol];
  }
  if (skipped && ctx) ctx->warn(std::to_string(skipped) + " samples did not fit the k-gram alphabet");

  std::map<std::string, std::vector<double>> rows;
  for (const auto& [context, row] : counts) {
    const double total = static_cast<double>(std::accumulate(row.begin(), row.end(), std::uint64_t{0}));
    std::vector<double> probs(a);
    for (std::size_t j = 0; j < a; ++j) {
      probs[j] = (static_cast<double>(row[j]) + 1.0) / (total + static_cast<double>(a));
    }
    rows.emplace(context, std::move(probs));
  }
  return std::make_shared<KGramModel>(order, std::move(alphabet), std::move(rows));
}

}  // namespace pseudointel
