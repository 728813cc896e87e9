#include "pseudointel/payload.hpp"

#include <algorithm>

#include "pseudointel/errors.hpp"

namespace pseudointel {

std::string_view to_string(Codec codec) {
  switch (codec) {
    case Codec::bitvector: return "bitvector";
    case Codec::tokens: return "tokens";
    case Codec::symbol: return "symbol";
  }
  return "unknown";
}

Codec codec_from_string(std::string_view name) {
  if (name == "bitvector") return Codec::bitvector;
  if (name == "tokens") return Codec::tokens;
  if (name == "symbol") return Codec::symbol;
  throw Error(Errc::invalid_config, "unknown codec '" + std::string(name) + "'");
}

bool payload_valid(Codec codec, std::string_view bytes) {
  switch (codec) {
    case Codec::bitvector:
      return std::all_of(bytes.begin(), bytes.end(), [](char c) { return c == '\0' || c == '\1'; });
    case Codec::tokens: return true;
    case Codec::symbol: return !bytes.empty();
  }
  return false;
}

std::string payload_to_text(Codec codec, std::string_view bytes) {
  if (codec != Codec::bitvector) return std::string(bytes);
  std::string text(bytes.size(), '0');
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (bytes[i] == '\1') text[i] = '1';
  }
  return text;
}

std::string payload_from_text(Codec codec, std::string_view text) {
  if (codec == Codec::bitvector) {
    std::string out(text.size(), '\0');
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '1') {
        out[i] = '\1';
      } else if (text[i] != '0') {
        throw Error(Errc::bad_payload, "bitvector text may only contain 0 and 1: '" +
                                           std::string(text) + "'");
      }
    }
    return out;
  }
  if (!payload_valid(codec, text)) {
    throw Error(Errc::bad_payload, "empty symbol");
  }
  return std::string(text);
}

std::string codec_zero_value(Codec codec) {
  switch (codec) {
    case Codec::bitvector: return std::string(1, '\0');
    case Codec::tokens: return {};
    case Codec::symbol: return "0";
  }
  return {};
}

std::string bits(std::string_view text) { return payload_from_text(Codec::bitvector, text); }

}  // namespace pseudointel
