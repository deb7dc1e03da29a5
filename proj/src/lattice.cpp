#include "dpls/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "dpls/errors.hpp"

namespace dpls {

GridSpec::GridSpec() {
  static const auto empty = std::make_shared<const Impl>();
  impl_ = empty;
}

GridSpec::GridSpec(std::vector<int> dims) {
  if (dims.empty()) throw InputError("grid: at least one dimension is required");
  auto impl = std::make_shared<Impl>();
  impl->strides.assign(dims.size(), 1);
  CellIndex n = 1;
  for (std::size_t i = dims.size(); i-- > 0;) {
    if (dims[i] <= 0) throw InputError("grid: dimension sizes must be positive");
    impl->strides[i] = n;
    if (n > std::numeric_limits<CellIndex>::max() / dims[i]) {
      throw InputError("grid: total size overflows");
    }
    n *= dims[i];
  }
  impl->n = n;
  impl->n_max = *std::max_element(dims.begin(), dims.end());
  impl->dims = std::move(dims);
  impl_ = std::move(impl);
}

bool GridSpec::contains(const Point& p) const {
  if (p.dim() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (p[i] < 1 || p[i] > impl_->dims[i]) return false;
  }
  return true;
}

CellIndex GridSpec::index_of(const Point& p) const {
  if (!contains(p)) throw InputError("grid: point outside the lattice");
  CellIndex idx = 0;
  for (std::size_t i = 0; i < dim(); ++i) idx += static_cast<CellIndex>(p[i] - 1) * impl_->strides[i];
  return idx;
}

Point GridSpec::point_at(CellIndex index) const {
  Point p;
  p.coords.resize(dim());
  coords_of(index, p.coords);
  return p;
}

void GridSpec::coords_of(CellIndex index, std::span<int> out) const {
  for (std::size_t i = 0; i < dim(); ++i) {
    out[i] = static_cast<int>(index / impl_->strides[i]) + 1;
    index %= impl_->strides[i];
  }
}

bool GridSpec::operator==(const GridSpec& other) const {
  return impl_ == other.impl_ || impl_->dims == other.impl_->dims;
}

// ---------------------------------------------------------------------------

Region::Region(GridSpec grid, std::span<const Point> points) : grid_(std::move(grid)) {
  cells_.reserve(points.size());
  for (const auto& p : points) cells_.push_back(grid_.index_of(p));
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

Region Region::from_indices(GridSpec grid, std::vector<CellIndex> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  if (!indices.empty() && (indices.front() < 0 || indices.back() >= grid.size())) {
    throw InputError("region: cell index outside the lattice");
  }
  return from_sorted_indices(std::move(grid), std::move(indices));
}

Region Region::from_sorted_indices(GridSpec grid, std::vector<CellIndex> indices) {
  Region r(std::move(grid));
  r.cells_ = std::move(indices);
  return r;
}

bool Region::contains(CellIndex index) const {
  return std::binary_search(cells_.begin(), cells_.end(), index);
}

bool Region::contains(const Point& p) const {
  return grid_.contains(p) && contains(grid_.index_of(p));
}

std::vector<Point> Region::points() const {
  std::vector<Point> out;
  out.reserve(cells_.size());
  for (CellIndex c : cells_) out.push_back(grid_.point_at(c));
  return out;
}

bool Region::operator==(const Region& other) const {
  return grid_ == other.grid_ && cells_ == other.cells_;
}

Region full_region(const GridSpec& grid) {
  std::vector<CellIndex> all(static_cast<std::size_t>(grid.size()));
  for (CellIndex i = 0; i < grid.size(); ++i) all[static_cast<std::size_t>(i)] = i;
  return Region::from_sorted_indices(grid, std::move(all));
}

namespace {

void require_same_grid(const Region& a, const Region& b, const char* op) {
  if (!(a.grid() == b.grid())) {
    throw InputError(std::string(op) + ": regions live on different grids");
  }
}

template <typename Merge>
Region set_op(const Region& a, const Region& b, const char* name, Merge merge) {
  require_same_grid(a, b, name);
  std::vector<CellIndex> out;
  merge(a.indices().begin(), a.indices().end(), b.indices().begin(), b.indices().end(),
        std::back_inserter(out));
  return Region::from_sorted_indices(a.grid(), std::move(out));
}

std::int64_t squared_distance(std::span<const int> a, std::span<const int> b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::int64_t d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::vector<int> coordinate_table(const Region& r) {
  const std::size_t d = r.grid().dim();
  std::vector<int> coords(r.size() * d);
  for (std::size_t i = 0; i < r.size(); ++i) {
    r.grid().coords_of(r.indices()[i], std::span<int>(coords.data() + i * d, d));
  }
  return coords;
}

void require_nonempty(const Region& r, const char* op) {
  if (r.empty()) throw InputError(std::string(op) + ": region is empty");
}

}  // namespace

Region unite(const Region& a, const Region& b) {
  return set_op(a, b, "unite", [](auto... args) { return std::set_union(args...); });
}

Region intersect(const Region& a, const Region& b) {
  return set_op(a, b, "intersect", [](auto... args) { return std::set_intersection(args...); });
}

Region subtract(const Region& a, const Region& b) {
  return set_op(a, b, "subtract", [](auto... args) { return std::set_difference(args...); });
}

std::int64_t symmetric_difference(const Region& a, const Region& b) {
  require_same_grid(a, b, "symmetric_difference");
  auto ia = a.indices().begin();
  auto ib = b.indices().begin();
  std::int64_t common = 0;
  while (ia != a.indices().end() && ib != b.indices().end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<std::int64_t>(a.size() + b.size()) - 2 * common;
}

double euclidean_distance(std::span<const int> a, std::span<const int> b) {
  return std::sqrt(static_cast<double>(squared_distance(a, b)));
}

double region_distance(const Region& a, const Region& b) {
  require_same_grid(a, b, "region_distance");
  require_nonempty(a, "region_distance");
  require_nonempty(b, "region_distance");
  const std::size_t d = a.grid().dim();
  const auto ca = coordinate_table(a);
  const auto cb = coordinate_table(b);
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 0; i < a.size() && best > 0; ++i) {
    std::span<const int> p(ca.data() + i * d, d);
    for (std::size_t j = 0; j < b.size(); ++j) {
      best = std::min(best, squared_distance(p, std::span<const int>(cb.data() + j * d, d)));
    }
  }
  return std::sqrt(static_cast<double>(best));
}

double region_distance(const Region& a, const Region& b, const PointMetric& metric) {
  require_same_grid(a, b, "region_distance");
  require_nonempty(a, "region_distance");
  require_nonempty(b, "region_distance");
  const std::size_t d = a.grid().dim();
  const auto ca = coordinate_table(a);
  const auto cb = coordinate_table(b);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      best = std::min(best, metric(std::span<const int>(ca.data() + i * d, d),
                                   std::span<const int>(cb.data() + j * d, d)));
    }
  }
  return best;
}

double intrinsic_diameter(const Region& r) {
  require_nonempty(r, "intrinsic_diameter");
  const std::size_t d = r.grid().dim();
  const auto c = coordinate_table(r);
  std::int64_t best = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::span<const int> p(c.data() + i * d, d);
    for (std::size_t j = i + 1; j < r.size(); ++j) {
      best = std::max(best, squared_distance(p, std::span<const int>(c.data() + j * d, d)));
    }
  }
  return std::sqrt(static_cast<double>(best));
}

double intrinsic_diameter(const Region& r, const PointMetric& metric) {
  require_nonempty(r, "intrinsic_diameter");
  const std::size_t d = r.grid().dim();
  const auto c = coordinate_table(r);
  double best = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t j = i + 1; j < r.size(); ++j) {
      best = std::max(best, metric(std::span<const int>(c.data() + i * d, d),
                                   std::span<const int>(c.data() + j * d, d)));
    }
  }
  return best;
}

int smoothness_index(const Region& r, int axis) {
  const std::size_t d = r.grid().dim();
  if (axis < 1 || static_cast<std::size_t>(axis) > d) {
    throw InputError("smoothness_index: axis must lie in [1, d]");
  }
  if (r.empty()) return 0;
  const auto a = static_cast<std::size_t>(axis - 1);
  const CellIndex stride = r.grid().stride(a);
  const int extent = r.grid().extent(a);

  // Key each cell by its line (index with the axis coordinate zeroed); record the
  // position along the axis.
  std::vector<std::pair<CellIndex, int>> keyed;
  keyed.reserve(r.size());
  for (CellIndex c : r.indices()) {
    const int along = static_cast<int>((c / stride) % extent);
    keyed.emplace_back(c - static_cast<CellIndex>(along) * stride, along);
  }
  std::sort(keyed.begin(), keyed.end());

  int best = 0;
  std::size_t i = 0;
  while (i < keyed.size()) {
    int runs = 1;
    std::size_t j = i + 1;
    for (; j < keyed.size() && keyed[j].first == keyed[i].first; ++j) {
      if (keyed[j].second != keyed[j - 1].second + 1) ++runs;
    }
    best = std::max(best, runs);
    i = j;
  }
  return best;
}

bool in_smooth_class(const Region& r, int max_runs) {
  for (std::size_t axis = 1; axis <= r.grid().dim(); ++axis) {
    if (smoothness_index(r, static_cast<int>(axis)) > max_runs) return false;
  }
  return true;
}

Partition Partition::from_anomalies(const GridSpec& grid, std::vector<Region> anomalies) {
  std::vector<std::uint8_t> taken(static_cast<std::size_t>(grid.size()), 0);
  for (const auto& r : anomalies) {
    if (!(r.grid() == grid)) throw InputError("partition: anomaly lives on a different grid");
    if (r.empty()) throw InputError("partition: anomaly regions must be nonempty");
    for (CellIndex c : r.indices()) {
      auto& slot = taken[static_cast<std::size_t>(c)];
      if (slot) throw InputError("partition: anomaly regions overlap");
      slot = 1;
    }
  }
  std::sort(anomalies.begin(), anomalies.end(), [](const Region& a, const Region& b) {
    return a.indices().front() < b.indices().front();
  });
  std::vector<CellIndex> rest;
  rest.reserve(taken.size());
  for (std::size_t i = 0; i < taken.size(); ++i) {
    if (!taken[i]) rest.push_back(static_cast<CellIndex>(i));
  }
  Partition p;
  p.baseline_ = Region::from_sorted_indices(grid, std::move(rest));
  p.anomalies_ = std::move(anomalies);
  return p;
}

}  // namespace dpls
