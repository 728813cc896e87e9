#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pseudointel::cli {

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = ".";
  std::optional<std::size_t> workers;
  std::string listen = "stdio";             // serve-model only
  std::optional<std::size_t> max_sessions;  // serve-model only
};

/// Exit codes of `distinguish`; every command returns kExitError on bad
/// configs or I/O failures.
enum ExitCode : int {
  kExitCannotDistinguish = 0,
  kExitOk = 0,
  kExitError = 1,
  kExitDistinguishes = 2,
  kExitInconclusive = 3,
};

int cmd_distinguish(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_pseudoint(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_serve_model(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_zoo_list(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pseudointel::cli
