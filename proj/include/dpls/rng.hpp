#pragma once

#include <cstdint>

namespace dpls {

/// splitmix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based draws: the k-th value of a stream depends only on (seed, k), so any
/// subset of draws can be produced in any order on any platform.
std::uint64_t draw_u64(std::uint64_t seed, std::uint64_t k);
/// Uniform on the open interval (0, 1), 53-bit resolution.
double draw_uniform(std::uint64_t seed, std::uint64_t k);
/// Standard normal from uniforms 2k and 2k+1 (Box-Muller, cosine branch).
double draw_normal(std::uint64_t seed, std::uint64_t k);

/// Sequential view of a counter-based stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t start = 0) : seed_(seed), k_(start) {}

  std::uint64_t next_u64() { return draw_u64(seed_, k_++); }
  double uniform() { return draw_uniform(seed_, k_++); }
  double normal() { return draw_normal(seed_, k_++); }
  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  std::uint64_t k_;
};

}  // namespace dpls
