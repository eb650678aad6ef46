#pragma once

#include <cstdint>

namespace hapdeploy {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen over <random> engines because
// its output is fully specified by the algorithm, so traces are reproducible
// across platforms and standard-library versions.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 significant bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi).
  double next_double(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(next_double() * static_cast<double>(n));
  }

private:
  std::uint64_t state_;
};

// Independent per-stream seed derived from (master seed, stream id).
// Implemented as one SplitMix64 step over a mixed key, so streams for
// different ids never coincide in practice.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) {
  SplitMix64 g(master ^ (0x9E3779B97F4A7C15ULL * (stream_id + 0x632BE59BD9B4E019ULL)));
  return g.next_u64();
}

}  // namespace hapdeploy
