#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qmt/errors.hpp"

namespace qmt {

// Deterministic 64-bit generator: splitmix64 (Steele, Lea & Flood, 2014).
// The whole state is one uint64, so a seed pins the entire stream; every
// sampled trace in the toolkit is reproducible byte for byte from the seed.
// qmt pins this exact algorithm as "splitmix64/1"; any future change of
// generator must change that tag and therefore the report format.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static const char* algorithm() { return "splitmix64/1"; }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Inverse-CDF draw over the weights in the order given (weights need not be
// normalized).  Returns the index of the chosen entry.  Throws
// DegenerateDistributionError when the weights sum to (numerically) nothing.
std::size_t sample_index(std::span<const double> weights, SplitMix64& rng);

}  // namespace qmt
