#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dpls/lattice.hpp"

namespace dpls {

/// A supporting plane of a 3D hull: normal . x <= offset for every enclosed point.
/// The normal is primitive (gcd of its components is 1) and points outward.
struct HullFacet {
  std::array<std::int64_t, 3> normal{};
  std::int64_t offset = 0;
  std::vector<Point> vertices;  // extreme points lying on the plane, lexicographic
};

/// Minimal vertex representation of conv(R).
///
/// affine_dim is 0 for a single point, 1 for a segment, 2 for a polygon, 3 for a
/// polyhedron. In a 2D grid polygon vertices run counter-clockwise starting at the
/// lexicographically smallest vertex; otherwise vertices are listed lexicographically.
/// facets is filled for full-dimensional 3D hulls only.
struct HullPolytope {
  int affine_dim = 0;
  std::vector<Point> vertices;
  std::vector<HullFacet> facets;
};

HullPolytope convex_hull(const Region& r);

/// |Co(R)|: the number of lattice points inside or on the boundary of conv(R).
/// Supported for grids of dimension 1 to 3.
std::int64_t hull_cardinality(const Region& r);

/// Same count for a strictly increasing list of cells of `grid`, avoiding a Region copy.
std::int64_t hull_cardinality(const GridSpec& grid, std::span<const CellIndex> sorted_cells);

/// |Co(R)| - |R|.
std::int64_t hull_excess(const Region& r);

}  // namespace dpls
