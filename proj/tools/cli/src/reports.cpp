#include "reports.hpp"

#include <cstdio>
#include <fstream>

#include "pseudointel/errors.hpp"

namespace pseudointel::cli {

std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  return out + "\n";
}

namespace {

ojson optional_number(const std::optional<double>& value) { return value ? ojson(*value) : ojson(nullptr); }

std::string optional_fixed(const std::optional<double>& value) { return value ? fixed6(*value) : std::string(); }

}  // namespace

ojson ledger_json(const ResourceLedger& l) {
  ojson out;
  out["samples_model"] = l.samples_model;
  out["samples_evaluator"] = l.samples_evaluator;
  out["rounds"] = l.rounds;
  out["model_queries"] = l.model_queries;
  out["oracle_queries"] = l.oracle_queries;
  out["compute_steps_model"] = l.compute_steps_model;
  out["compute_steps_evaluator"] = l.compute_steps_evaluator;
  out["expressivity_bits_model"] = optional_number(l.expressivity_bits_model);
  out["expressivity_bits_evaluator"] = optional_number(l.expressivity_bits_evaluator);
  return out;
}

ojson estimate_json(const DistinctionEstimate& e) {
  ojson out;
  out["p_model"] = e.p_model;
  out["p_capability"] = e.p_capability;
  out["dist_hat"] = e.dist;
  out["radius"] = e.radius;
  out["per_arm"] = e.trials_per_arm;
  out["alpha"] = e.alpha;
  return out;
}

ojson trial_json(const TrialResult& t, const std::vector<CapabilityPtr>& suite) {
  ojson out;
  out["capability"] = suite.at(t.capability_index)->name();
  out["trial"] = t.trial_index;
  out["status"] = t.errored ? "errored" : "completed";
  if (t.errored) {
    out["error"] = t.error;
    out["outside_framework"] = t.outside_framework;
    return out;
  }
  out["decision"] = std::string(to_string(t.decision));
  out["estimate"] = estimate_json(t.estimate);
  out["exact_dist"] = optional_number(t.exact_dist);
  out["model"] = t.model_label;
  out["evaluator"] = t.evaluator_name;
  out["outside_framework"] = t.outside_framework;
  out["model_sample_stream"] = t.model_sample_stream;
  out["evaluator_sample_stream"] = t.evaluator_sample_stream;
  out["ledger"] = ledger_json(t.ledger);
  out["warnings"] = t.warnings;
  return out;
}

std::string trial_csv_header() {
  return csv_row({"capability", "trial", "status", "decision", "p_model", "p_capability", "dist_hat", "radius",
                  "exact_dist", "model", "evaluator", "rounds", "model_queries", "oracle_queries",
                  "compute_steps_model", "compute_steps_evaluator", "outside_framework"});
}

std::string trial_csv_row(const TrialResult& t, const std::vector<CapabilityPtr>& suite) {
  const std::string name = suite.at(t.capability_index)->name();
  const std::string outside = t.outside_framework ? "true" : "false";
  if (t.errored) {
    return csv_row({name, std::to_string(t.trial_index), "errored", "", "", "", "", "", "", "", "", "", "", "", "",
                    "", outside});
  }
  const auto& l = t.ledger;
  return csv_row({name, std::to_string(t.trial_index), "completed", std::string(to_string(t.decision)),
                  fixed6(t.estimate.p_model), fixed6(t.estimate.p_capability), fixed6(t.estimate.dist),
                  fixed6(t.estimate.radius), optional_fixed(t.exact_dist), t.model_label, t.evaluator_name,
                  std::to_string(l.rounds), std::to_string(l.model_queries), std::to_string(l.oracle_queries),
                  std::to_string(l.compute_steps_model), std::to_string(l.compute_steps_evaluator), outside});
}

std::string summary_csv_header() {
  return csv_row({"point", "capability", "m", "n", "r", "per_arm", "epsilon", "delta", "alpha", "trials", "pass",
                  "fail", "inconclusive", "errored", "pass_rate", "mean_dist_hat", "mean_exact_dist", "verdict",
                  "samples_model", "samples_evaluator", "max_rounds", "model_queries", "oracle_queries",
                  "compute_steps_model", "compute_steps_evaluator", "expressivity_bits_model",
                  "expressivity_bits_evaluator", "outside_framework", "seed", "config_hash"});
}

std::string summary_csv_rows(const PseudointelligenceReport& report, const PointParameters& p) {
  const ExperimentConfig& e = *p.experiment;
  std::string out;
  for (const CapabilityOutcome& c : report.capabilities) {
    const auto& l = c.ledger;
    out += csv_row({std::to_string(p.point), c.capability, std::to_string(e.m), std::to_string(e.n), p.rounds,
                    std::to_string(e.per_arm), fixed6(e.epsilon), fixed6(e.delta), fixed6(e.alpha),
                    std::to_string(e.trials), std::to_string(c.pass), std::to_string(c.fail),
                    std::to_string(c.inconclusive), std::to_string(c.errored), fixed6(c.pass_rate),
                    fixed6(c.mean_dist), optional_fixed(c.mean_exact_dist), c.verdict_pass ? "pass" : "fail",
                    std::to_string(l.samples_model), std::to_string(l.samples_evaluator), std::to_string(l.rounds),
                    std::to_string(l.model_queries), std::to_string(l.oracle_queries),
                    std::to_string(l.compute_steps_model), std::to_string(l.compute_steps_evaluator),
                    optional_fixed(l.expressivity_bits_model), optional_fixed(l.expressivity_bits_evaluator),
                    report.outside_framework ? "true" : "false", std::to_string(e.seed), p.config_hash});
  }
  return out;
}

void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << text;
  if (!out.flush()) throw Error(Errc::io_error, "cannot write " + path.string());
}

}  // namespace pseudointel::cli
