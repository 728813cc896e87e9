#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pseudointel/core.hpp"

namespace pseudointel {

/// Capability suites as JSON text, schema "pseudointel.suite/1" (see docs/suite-format.md).
/// Throws Error{invalid_config} (or Error{bad_payload} for undecodable
/// payload text) on any schema violation.
std::vector<CapabilityPtr> parse_suite(std::string_view json_text);
/// A single capability object (one element of "capabilities").
CapabilityPtr parse_capability(std::string_view json_text);
std::vector<CapabilityPtr> load_suite(const std::filesystem::path& path);

/// Inverse of parse_suite for the shipped capability kinds.
std::string suite_to_json(const std::vector<CapabilityPtr>& suite);

/// Shipped desk-scale capabilities, addressable as "builtin:<name>".
std::vector<std::string> builtin_capability_names();
CapabilityPtr builtin_capability(std::string_view name);

/// Named groups of builtins ("tabular", "parity", "all").
std::vector<std::string> builtin_suite_names();
std::vector<CapabilityPtr> builtin_suite(std::string_view name);

}  // namespace pseudointel
