#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace arena {

// splitmix64 finalizer
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stateless generator: every draw is a hash of (key, seed, round, lane), so draws do not
// depend on evaluation order across runs or threads.
class CounterRng {
 public:
  enum Lane : std::uint32_t { kOptimizer = 0, kContext = 1, kLearner = 2, kAux = 3 };

  CounterRng(std::uint64_t key, std::uint64_t seed) : base_(mix64(mix64(key) ^ (seed * 0xd1b54a32d192ed03ULL))) {}

  std::uint64_t bits(std::uint64_t round, std::uint32_t lane) const {
    return mix64(base_ ^ mix64(round * 4 + lane));
  }
  // Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t round, std::uint32_t lane) const {
    return static_cast<double>(bits(round, lane) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t base_;
};

// Inverse-CDF draw from a probability vector; falls back to the last positive entry on rounding.
inline int sample_index(std::span<const double> p, double u) {
  double acc = 0.0;
  int last = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    acc += p[k];
    last = static_cast<int>(k);
    if (u < acc) return last;
  }
  return last;
}

}  // namespace arena
