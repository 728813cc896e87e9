#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "pseudointel/experiment.hpp"

namespace pseudointel::cli {

using ojson = nlohmann::ordered_json;

/// Fixed-point with six decimals, independent of the global locale.
std::string fixed6(double value);
std::string csv_field(std::string_view text);
std::string csv_row(const std::vector<std::string>& fields);

ojson ledger_json(const ResourceLedger& ledger);
ojson estimate_json(const DistinctionEstimate& estimate);
ojson trial_json(const TrialResult& trial, const std::vector<CapabilityPtr>& suite);

std::string trial_csv_header();
std::string trial_csv_row(const TrialResult& trial, const std::vector<CapabilityPtr>& suite);

/// Run parameters shared by the summary rows of pseudoint and sweep.
struct PointParameters {
  std::size_t point = 0;
  std::string rounds;  // evaluator rounds setting, empty when not applicable
  const ExperimentConfig* experiment = nullptr;
  std::string config_hash;
};

std::string summary_csv_header();
std::string summary_csv_rows(const PseudointelligenceReport& report, const PointParameters& params);

/// Writes `text` to `dir/name`, creating `dir` if needed. Throws Error{io_error}.
void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text);

}  // namespace pseudointel::cli
