#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace pseudointel {

/// How the opaque payload bytes of a query or response are interpreted.
///
///  - bitvector: one byte per bit, each 0x00 or 0x01; text form "0110".
///  - tokens:    a (possibly empty) sequence of single-byte tokens; text form is the bytes.
///  - symbol:    a non-empty categorical label; text form is the bytes.
enum class Codec { bitvector, tokens, symbol };

std::string_view to_string(Codec codec);
Codec codec_from_string(std::string_view name);

bool payload_valid(Codec codec, std::string_view bytes);
std::string payload_to_text(Codec codec, std::string_view bytes);
/// Throws Error{bad_payload} when the text does not decode under the codec.
std::string payload_from_text(Codec codec, std::string_view text);
/// The value a learner falls back to when it has seen nothing: "0" for symbols,
/// a single zero bit for bitvectors, the empty sequence for tokens.
std::string codec_zero_value(Codec codec);

/// Byte-string payload with byte equality and lexicographic (unsigned) order.
template <class Tag>
class Payload {
 public:
  Payload() = default;
  explicit Payload(std::string bytes) : bytes_(std::move(bytes)) {}

  const std::string& bytes() const noexcept { return bytes_; }
  std::size_t size() const noexcept { return bytes_.size(); }

  friend bool operator==(const Payload&, const Payload&) = default;
  friend std::strong_ordering operator<=>(const Payload& a, const Payload& b) {
    const int c = a.bytes_.compare(b.bytes_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  std::string bytes_;
};

struct QueryTag {};
struct ResponseTag {};
using Query = Payload<QueryTag>;
using Response = Payload<ResponseTag>;

struct SamplePair {
  Query query;
  Response response;

  friend bool operator==(const SamplePair&, const SamplePair&) = default;
};

/// Builds a bitvector payload from its text form, e.g. bits("0101").
std::string bits(std::string_view text);

}  // namespace pseudointel

template <class Tag>
struct std::hash<pseudointel::Payload<Tag>> {
  std::size_t operator()(const pseudointel::Payload<Tag>& p) const noexcept {
    return std::hash<std::string>{}(p.bytes());
  }
};
