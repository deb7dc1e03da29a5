#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "dpls/field.hpp"
#include "dpls/lattice.hpp"

namespace dpls::testing {

inline Region region_of(const GridSpec& g, std::vector<Point> pts) { return Region(g, pts); }

/// Random region on `grid`: each cell kept with probability `density`, never empty.
inline Region random_region(const GridSpec& grid, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(density);
  std::vector<CellIndex> cells;
  for (CellIndex c = 0; c < grid.size(); ++c) {
    if (keep(rng)) cells.push_back(c);
  }
  if (cells.empty()) cells.push_back(std::uniform_int_distribution<CellIndex>(0, grid.size() - 1)(rng));
  return Region::from_sorted_indices(grid, std::move(cells));
}

/// Random region of exactly k distinct cells.
inline Region random_region_k(const GridSpec& grid, std::size_t k, std::mt19937_64& rng) {
  std::vector<CellIndex> all(static_cast<std::size_t>(grid.size()));
  for (CellIndex c = 0; c < grid.size(); ++c) all[static_cast<std::size_t>(c)] = c;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min(k, all.size()));
  return Region::from_indices(grid, std::move(all));
}

inline Field noise_field(const GridSpec& grid, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, sigma);
  std::vector<double> v(static_cast<std::size_t>(grid.size()));
  for (auto& x : v) x = z(rng);
  return Field(grid, std::move(v));
}

/// Adds `shift` to every cell of r.
inline Field shifted(const Field& f, const Region& r, double shift) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (CellIndex c : r.indices()) v[static_cast<std::size_t>(c)] += shift;
  return Field(f.grid(), std::move(v), std::vector<std::uint8_t>(f.mask().begin(), f.mask().end()));
}

}  // namespace dpls::testing
