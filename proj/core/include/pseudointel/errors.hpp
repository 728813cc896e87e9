#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pseudointel {

enum class Errc {
  invalid_config,
  session_overrun,
  black_box_failure,
  unsupported_query,
  not_enumerable,
  empty_class,
  empty_sample_set,
  empty_challenge_set,
  inconsistent,
  generator_exhausted,
  protocol_error,
  bad_payload,
  io_error,
};

std::string_view to_string(Errc code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (and the CLI exit-code mapping) can dispatch without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace pseudointel
