#include "pseudointel/core.hpp"

#include <algorithm>

#include "pseudointel/errors.hpp"

namespace pseudointel {

ResourceLedger& ResourceLedger::operator+=(const ResourceLedger& other) {
  samples_model += other.samples_model;
  samples_evaluator += other.samples_evaluator;
  rounds = std::max(rounds, other.rounds);
  model_queries += other.model_queries;
  oracle_queries += other.oracle_queries;
  compute_steps_model += other.compute_steps_model;
  compute_steps_evaluator += other.compute_steps_evaluator;
  if (!expressivity_bits_model) expressivity_bits_model = other.expressivity_bits_model;
  if (!expressivity_bits_evaluator) expressivity_bits_evaluator = other.expressivity_bits_evaluator;
  return *this;
}

std::optional<ResponseTable> Model::response_table(const Query& x) const {
  if (!deterministic()) return std::nullopt;
  Rng unused(0);
  return ResponseTable{{respond(x, unused), 1.0}};
}

Interaction run_interaction(const Evaluator& evaluator, const Model& box, const RandomSource& rs,
                            ResourceLedger* ledger) {
  Rng evaluator_rng = rs.child_stream("evaluator");
  Rng box_rng = rs.child_stream("box");
  const std::size_t max_rounds = evaluator.max_rounds();
  auto session = evaluator.start();

  Interaction out;
  for (;;) {
    SessionStep step = session->next(out.transcript, evaluator_rng);
    if (auto* verdict = std::get_if<Verdict>(&step)) {
      out.verdict = *verdict;
      break;
    }
    if (out.transcript.size() >= max_rounds) {
      throw Error(Errc::session_overrun, evaluator.name() + " issued more than " +
                                             std::to_string(max_rounds) + " queries");
    }
    Query& x = std::get<Query>(step);
    Response y = box.respond(x, box_rng);
    out.transcript.push_back({std::move(x), std::move(y)});
  }
  if (ledger) ledger->model_queries += out.transcript.size();
  return out;
}

CapabilityOracle::CapabilityOracle(CapabilityPtr capability) : capability_(std::move(capability)) {
  if (!capability_) throw Error(Errc::invalid_config, "null capability");
}

std::string CapabilityOracle::label() const { return "oracle:" + capability_->name(); }

Response CapabilityOracle::respond(const Query& x, Rng& rng) const {
  if (!capability_->contains(x)) {
    throw Error(Errc::unsupported_query, "query outside the query space of " + capability_->name());
  }
  return capability_->conditional_sample(x, rng);
}

std::optional<ResponseTable> CapabilityOracle::response_table(const Query& x) const {
  return capability_->conditional_table(x);
}

ModelPtr capability_as_blackbox(CapabilityPtr capability) {
  return std::make_shared<CapabilityOracle>(std::move(capability));
}

}  // namespace pseudointel
