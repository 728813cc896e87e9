#include "pseudointel/random.hpp"

namespace pseudointel {
namespace {

std::uint64_t mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a, then finalized. Tags and indices hash into disjoint domains.
std::uint64_t tag_hash(std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix(h ^ 0x5bd1e9955bd1e995ULL);
}

std::uint64_t derive(std::uint64_t parent, std::uint64_t salt) noexcept {
  return mix(mix(parent) ^ salt ^ 0x9e3779b97f4a7c15ULL);
}

}  // namespace

std::uint64_t Rng::uniform_index(std::uint64_t n) noexcept {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = (*this)();
    if (r >= threshold) return r % n;
  }
}

std::size_t Rng::pick(std::span<const double> weights) noexcept {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = uniform01() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    acc += weights[i];
    if (u < acc) return i;
  }
  return last_positive;
}

RandomSource::RandomSource(std::uint64_t master_seed)
    : seed_(master_seed), state_(mix(master_seed ^ 0x243f6a8885a308d3ULL)) {}

RandomSource RandomSource::child(std::string_view tag) const {
  std::string key = key_.empty() ? std::string(tag) : key_ + "/" + std::string(tag);
  return RandomSource(seed_, derive(state_, tag_hash(tag)), std::move(key));
}

RandomSource RandomSource::child(std::uint64_t index) const {
  std::string key = key_.empty() ? std::to_string(index) : key_ + "/" + std::to_string(index);
  return RandomSource(seed_, derive(state_, mix(index + 0x632be59bd9b4e019ULL)), std::move(key));
}

Rng RandomSource::child_stream(std::string_view tag) const noexcept {
  return Rng(derive(state_, tag_hash(tag)));
}

}  // namespace pseudointel
