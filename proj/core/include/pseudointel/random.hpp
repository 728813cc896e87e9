#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>

namespace pseudointel {

/// SplitMix64 generator. The whole state is one 64-bit word, so a stream can be
/// forked from a key for free and shipped across a process boundary verbatim.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t state) noexcept : state_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state() const noexcept { return state_; }
  void set_state(std::uint64_t s) noexcept { state_ = s; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Unbiased uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;

  bool bernoulli(double p) noexcept { return uniform01() < p; }

  /// Index drawn with probability proportional to weights (inverse CDF).
  std::size_t pick(std::span<const double> weights) noexcept;

 private:
  std::uint64_t state_;
};

/// Hierarchical keyed randomness. A source is a master seed plus a key path
/// ("trial/3/arm/model"); children with distinct keys give independent streams,
/// and the same (seed, path) always reproduces the same stream.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t master_seed);

  RandomSource child(std::string_view tag) const;
  RandomSource child(std::uint64_t index) const;

  Rng stream() const noexcept { return Rng(state_); }
  /// Same as child(tag).stream() without materializing the child key.
  Rng child_stream(std::string_view tag) const noexcept;

  std::uint64_t master_seed() const noexcept { return seed_; }
  const std::string& key() const noexcept { return key_; }

 private:
  RandomSource(std::uint64_t seed, std::uint64_t state, std::string key)
      : seed_(seed), state_(state), key_(std::move(key)) {}

  std::uint64_t seed_;
  std::uint64_t state_;
  std::string key_;
};

}  // namespace pseudointel
