#include "pseudointel/errors.hpp"

namespace pseudointel {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::session_overrun: return "SessionOverrun";
    case Errc::black_box_failure: return "BlackBoxFailure";
    case Errc::unsupported_query: return "UnsupportedQuery";
    case Errc::not_enumerable: return "NotEnumerable";
    case Errc::empty_class: return "EmptyClass";
    case Errc::empty_sample_set: return "EmptySampleSet";
    case Errc::empty_challenge_set: return "EmptyChallengeSet";
    case Errc::inconsistent: return "Inconsistent";
    case Errc::generator_exhausted: return "GeneratorExhausted";
    case Errc::protocol_error: return "ProtocolError";
    case Errc::bad_payload: return "BadPayload";
    case Errc::io_error: return "IOError";
  }
  return "Unknown";
}

}  // namespace pseudointel
