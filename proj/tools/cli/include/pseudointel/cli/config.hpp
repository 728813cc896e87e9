#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "pseudointel/experiment.hpp"
#include "pseudointel/learner.hpp"

namespace pseudointel::cli {

/// Schema tag every run config must carry (see docs/config-schema.md).
inline constexpr const char* kConfigSchema = "pseudointel.config/1";

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
};

/// A validated run config. `document` keeps the parsed JSON so that grid
/// points can rebuild learners with substituted fields.
struct RunConfig {
  nlohmann::json document;
  std::string config_hash;  // FNV-1a 64 over the canonical dump, hex
  std::filesystem::path base_dir;
  ExperimentConfig experiment;
  nlohmann::json model;
  nlohmann::json evaluator;
  nlohmann::json sweep;  // null when absent
  std::optional<std::size_t> serve_m;
};

/// Throws Error{invalid_config} (or io_error for unreadable files).
RunConfig parse_config(const nlohmann::json& document, const std::filesystem::path& base_dir,
                       const Overrides& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

std::string config_hash(const nlohmann::json& document);

/// "builtin:<name>", a suite file path, an inline suite or capability object,
/// or an array of those.
std::vector<CapabilityPtr> resolve_capabilities(const nlohmann::json& ref, const std::filesystem::path& base_dir);

ModelLearnerPtr make_model_learner(const nlohmann::json& spec);
EvaluatorLearnerPtr make_evaluator_learner(const nlohmann::json& spec);

/// Kinds accepted by the factories, for zoo-list.
std::vector<std::string> model_learner_kinds();
std::vector<std::string> evaluator_learner_kinds();
std::vector<std::string> generator_kinds();

}  // namespace pseudointel::cli
