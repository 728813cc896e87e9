#pragma once

#include <map>
#include <memory>
#include <optional>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include "pseudointel/capabilities.hpp"
#include "pseudointel/core.hpp"
#include "pseudointel/evaluator_zoo.hpp"

namespace fixtures {

using namespace pseudointel;

inline SamplePair pair(std::string x, std::string y) { return {Query(std::move(x)), Response(std::move(y))}; }

inline std::vector<SamplePair> pairs(std::initializer_list<std::pair<const char*, const char*>> list) {
  std::vector<SamplePair> out;
  for (const auto& [x, y] : list) out.push_back(pair(x, y));
  return out;
}

/// Deterministic symbol-coded tabular capability with the given query weights.
inline CapabilityPtr labeled(std::vector<std::tuple<std::string, double, std::string>> rows,
                             std::string name = "labeled") {
  std::vector<TabularRow> table;
  for (auto& [x, p, y] : rows) table.push_back({Query(x), p, {{Response(y), 1.0}}});
  return std::make_shared<TabularCapability>(std::move(name), Codec::symbol, Codec::symbol, std::move(table));
}

/// Single query "x" answered "1" with probability p.
inline CapabilityPtr coin(double p) {
  std::vector<TabularRow> rows{{Query("x"), 1.0, {{Response("0"), 1.0 - p}, {Response("1"), p}}}};
  return std::make_shared<TabularCapability>("coin", Codec::symbol, Codec::symbol, std::move(rows));
}

inline ModelPtr constant(std::string y) { return std::make_shared<ConstantModel>(Response(std::move(y))); }

/// A model answering from a fixed table (deterministic).
inline ModelPtr table_model(std::initializer_list<std::pair<const char*, const char*>> entries,
                            std::string fallback = "0") {
  std::map<Query, Response> table;
  for (const auto& [x, y] : entries) table.emplace(Query(x), Response(y));
  return std::make_shared<MemorizerModel>(std::move(table), Response(std::move(fallback)));
}

/// Answers "1" with probability p regardless of the query.
class CoinModel final : public Model {
 public:
  explicit CoinModel(double p) : p_(p) {}
  std::string label() const override { return "coin"; }
  Response respond(const Query&, Rng& rng) const override { return Response(rng.bernoulli(p_) ? "1" : "0"); }
  std::optional<ResponseTable> response_table(const Query&) const override {
    return ResponseTable{{Response("0"), 1.0 - p_}, {Response("1"), p_}};
  }

 private:
  double p_;
};

/// Asks "a"; if the box says "1" asks "b", otherwise "c"; accepts iff the
/// second answer is "1". Declares `declared_rounds` and asks `asked` queries.
class AdaptiveEvaluator final : public Evaluator {
 public:
  explicit AdaptiveEvaluator(std::size_t declared_rounds = 2, std::size_t asked = 2)
      : declared_(declared_rounds), asked_(asked) {}
  std::string name() const override { return "adaptive"; }
  std::size_t max_rounds() const override { return declared_; }
  std::unique_ptr<EvaluatorSession> start() const override {
    struct Session final : EvaluatorSession {
      std::size_t asked;
      explicit Session(std::size_t a) : asked(a) {}
      SessionStep next(const Transcript& t, Rng&) override {
        if (t.size() >= asked) return Verdict{t.back().response.bytes() == "1"};
        if (t.empty()) return Query("a");
        if (t.size() == 1) return Query(t[0].response.bytes() == "1" ? "b" : "c");
        return Query("a");
      }
    };
    return std::make_unique<Session>(asked_);
  }

 private:
  std::size_t declared_;
  std::size_t asked_;
};

}  // namespace fixtures
