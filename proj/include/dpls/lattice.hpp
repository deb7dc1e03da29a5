#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace dpls {

using CellIndex = std::int64_t;

/// A lattice point with 1-based coordinates (s_1, ..., s_d).
struct Point {
  std::vector<int> coords;

  Point() = default;
  Point(std::initializer_list<int> c) : coords(c) {}
  explicit Point(std::vector<int> c) : coords(std::move(c)) {}

  std::size_t dim() const { return coords.size(); }
  int operator[](std::size_t i) const { return coords[i]; }

  auto operator<=>(const Point&) const = default;
  bool operator==(const Point&) const = default;
};

/// Regular lattice {1..n_1} x ... x {1..n_d}.
///
/// Cells are addressed by a row-major linear index in which the first coordinate varies
/// slowest, so ascending index order coincides with lexicographic coordinate order.
/// Copies share the immutable dimension table.
class GridSpec {
 public:
  GridSpec();
  explicit GridSpec(std::vector<int> dims);

  std::size_t dim() const { return impl_->dims.size(); }
  const std::vector<int>& dims() const { return impl_->dims; }
  int extent(std::size_t axis) const { return impl_->dims[axis]; }
  /// n, the total number of cells.
  CellIndex size() const { return impl_->n; }
  /// n_max, the largest extent over all axes.
  int max_extent() const { return impl_->n_max; }

  bool contains(const Point& p) const;
  CellIndex index_of(const Point& p) const;
  Point point_at(CellIndex index) const;
  /// Writes the coordinates of `index` into `out` (size dim()).
  void coords_of(CellIndex index, std::span<int> out) const;
  CellIndex stride(std::size_t axis) const { return impl_->strides[axis]; }

  bool operator==(const GridSpec& other) const;

 private:
  struct Impl {
    std::vector<int> dims;
    std::vector<CellIndex> strides;
    CellIndex n = 0;
    int n_max = 0;
  };
  std::shared_ptr<const Impl> impl_;
};

/// Duplicate-free set of lattice cells stored in canonical (ascending index, i.e.
/// lexicographic) order. Two equal regions compare equal member by member.
class Region {
 public:
  Region() = default;
  explicit Region(GridSpec grid) : grid_(std::move(grid)) {}
  Region(GridSpec grid, std::span<const Point> points);

  /// Sorts and deduplicates; every index must lie inside the grid.
  static Region from_indices(GridSpec grid, std::vector<CellIndex> indices);
  /// Trusts the caller that `indices` is strictly increasing and in range.
  static Region from_sorted_indices(GridSpec grid, std::vector<CellIndex> indices);

  const GridSpec& grid() const { return grid_; }
  std::span<const CellIndex> indices() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  bool contains(CellIndex index) const;
  bool contains(const Point& p) const;
  Point point(std::size_t i) const { return grid_.point_at(cells_[i]); }
  std::vector<Point> points() const;

  bool operator==(const Region& other) const;

 private:
  GridSpec grid_;
  std::vector<CellIndex> cells_;
};

Region full_region(const GridSpec& grid);

Region unite(const Region& a, const Region& b);
Region intersect(const Region& a, const Region& b);
Region subtract(const Region& a, const Region& b);

/// D(R, R') = |R \ R'| + |R' \ R|.
std::int64_t symmetric_difference(const Region& a, const Region& b);

/// Distance between two lattice points given as coordinate spans.
using PointMetric = std::function<double(std::span<const int>, std::span<const int>)>;

double euclidean_distance(std::span<const int> a, std::span<const int> b);

/// Smallest pairwise distance between the two regions (Euclidean unless a metric is given).
double region_distance(const Region& a, const Region& b);
double region_distance(const Region& a, const Region& b, const PointMetric& metric);

/// Largest pairwise distance inside the region; 0 for a singleton.
double intrinsic_diameter(const Region& r);
double intrinsic_diameter(const Region& r, const PointMetric& metric);

/// Maximum, over all lattice lines parallel to `axis` (1-based), of the number of maximal
/// runs of consecutive region cells on that line.
int smoothness_index(const Region& r, int axis);

/// Membership in the smooth class R_K: at most K runs on every axis-parallel line.
bool in_smooth_class(const Region& r, int max_runs);

/// Baseline plus pairwise disjoint anomaly regions covering the whole grid.
/// Anomalies are kept in canonical order (ascending first cell), which fixes the order
/// in which per-region losses are accumulated.
class Partition {
 public:
  Partition() = default;
  static Partition from_anomalies(const GridSpec& grid, std::vector<Region> anomalies);

  const GridSpec& grid() const { return baseline_.grid(); }
  const Region& baseline() const { return baseline_; }
  const std::vector<Region>& anomalies() const { return anomalies_; }
  std::size_t m() const { return anomalies_.size(); }

 private:
  Region baseline_;
  std::vector<Region> anomalies_;
};

}  // namespace dpls
