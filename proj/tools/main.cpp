#include <csignal>
#include <iostream>
#include <string>
#include <vector>

#include "pseudointel/cli/commands.hpp"

int main(int argc, char** argv) {
  // A vanished remote peer must surface as an error, not kill the process.
  std::signal(SIGPIPE, SIG_IGN);
  std::vector<std::string> args(argv + 1, argv + argc);
  return pseudointel::cli::run_cli(args, std::cout, std::cerr);
}
