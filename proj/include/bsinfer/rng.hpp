#pragma once

#include <cstdint>
#include <random>

#include "bsinfer/normal.hpp"

namespace bsinfer {

namespace detail {

// SplitMix64 output function (Steele, Lea & Flood 2014). Used to derive
// decorrelated per-stream seeds from a (seed, index) pair.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// A self-contained random stream. Streams for distinct (seed, index)
// pairs are independent for practical purposes, so replicated experiments
// can be fanned out across workers and still reduce to the same result.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(derive(seed, 0)) {}

  static RngStream for_replication(std::uint64_t seed, std::uint64_t index) {
    return RngStream(derive(seed, index), 0);
  }

  // Uniform draw strictly inside (0, 1): 53 random bits at the cell midpoint.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the inverse-cdf transform. Fully determined by the
  // engine state, unlike std::normal_distribution.
  double normal_draw() { return normal::quantile(uniform()); }

 private:
  RngStream(std::uint64_t raw_seed, int) : engine_(raw_seed) {}

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    return detail::splitmix64(seed + (index + 1) * 0x9e3779b97f4a7c15ULL);
  }

  std::mt19937_64 engine_;
};

}  // namespace bsinfer
