#include "dpls/rng.hpp"

#include <cmath>
#include <numbers>

namespace dpls {

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t draw_u64(std::uint64_t seed, std::uint64_t k) {
  return mix64(seed + (k + 1) * 0x9e3779b97f4a7c15ULL);
}

double draw_uniform(std::uint64_t seed, std::uint64_t k) {
  return (static_cast<double>(draw_u64(seed, k) >> 11) + 0.5) * 0x1.0p-53;
}

double draw_normal(std::uint64_t seed, std::uint64_t k) {
  const double u1 = draw_uniform(seed, 2 * k);
  const double u2 = draw_uniform(seed, 2 * k + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::below(std::uint64_t bound) {
  // Rejection keeps the result unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % bound;
}

}  // namespace dpls
