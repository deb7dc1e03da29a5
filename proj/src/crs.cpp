#include "dpls/crs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dpls/errors.hpp"

namespace dpls {

CandidateOrder sort_candidates(const Field& field, double mu0) {
  CandidateOrder out;
  out.perm.reserve(static_cast<std::size_t>(field.valid_count()));
  for (CellIndex c = 0; c < field.grid().size(); ++c) {
    if (field.is_valid(c)) out.perm.push_back(c);
  }
  std::vector<double> dev(static_cast<std::size_t>(field.grid().size()), 0.0);
  for (CellIndex c : out.perm) dev[static_cast<std::size_t>(c)] = std::abs(field.value(c) - mu0);
  std::stable_sort(out.perm.begin(), out.perm.end(), [&](CellIndex a, CellIndex b) {
    return dev[static_cast<std::size_t>(a)] > dev[static_cast<std::size_t>(b)];
  });
  out.key.reserve(out.perm.size());
  for (CellIndex c : out.perm) out.key.push_back(dev[static_cast<std::size_t>(c)]);
  return out;
}

EuclideanBall::EuclideanBall(double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw InputError("ball: radius must be finite and >= 0");
  bound_ = static_cast<std::int64_t>(std::floor(radius * radius));
}

EuclideanBall EuclideanBall::from_squared(double radius_sq) {
  if (!(radius_sq >= 0.0) || !std::isfinite(radius_sq)) throw InputError("ball: radius must be finite and >= 0");
  EuclideanBall b;
  b.bound_ = static_cast<std::int64_t>(std::floor(radius_sq));
  return b;
}

bool EuclideanBall::contains(std::span<const int> offset) const {
  std::int64_t s = 0;
  for (int o : offset) s += static_cast<std::int64_t>(o) * o;
  return s <= bound_;
}

int EuclideanBall::reach() const {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(bound_)));
  while (r * r > bound_) --r;
  while ((r + 1) * (r + 1) <= bound_) ++r;
  return static_cast<int>(r);
}

namespace {

// All offsets of the shape in lexicographic order, d ints each.
std::vector<int> make_stencil(const BallShape& shape, std::size_t d) {
  const int reach = shape.reach();
  std::vector<int> out;
  std::vector<int> o(d, -reach);
  while (true) {
    if (shape.contains(o)) out.insert(out.end(), o.begin(), o.end());
    std::size_t k = d;
    while (k > 0) {
      --k;
      if (o[k] < reach) {
        ++o[k];
        break;
      }
      o[k] = -reach;
      if (k == 0) return out;
    }
  }
}

}  // namespace

Region ball(const GridSpec& grid, const Point& center, double radius) {
  if (!grid.contains(center)) throw InputError("ball: centre outside the grid");
  const EuclideanBall shape(radius);
  const std::size_t d = grid.dim();
  const auto stencil = make_stencil(shape, d);
  std::vector<CellIndex> cells;
  for (std::size_t s = 0; s < stencil.size(); s += d) {
    CellIndex idx = 0;
    bool inside = true;
    for (std::size_t i = 0; i < d && inside; ++i) {
      const int c = center[i] + stencil[s + i];
      inside = c >= 1 && c <= grid.extent(i);
      idx += static_cast<CellIndex>(c - 1) * grid.stride(i);
    }
    if (inside) cells.push_back(idx);
  }
  return Region::from_sorted_indices(grid, std::move(cells));
}

double crs_radius_squared(std::size_t d, double n, int m) {
  if (m < 1) throw InputError("crs_radius: m must be at least 1");
  if (d == 2) return n / (static_cast<double>(m) * std::numbers::pi);
  const double half = static_cast<double>(d) / 2.0;
  const double volume = n * std::tgamma(half + 1.0) / (static_cast<double>(m) * std::pow(std::numbers::pi, half));
  return std::pow(volume, 2.0 / static_cast<double>(d));
}

double crs_radius(std::size_t d, double n, int m) {
  if (d == 2) return std::sqrt(crs_radius_squared(d, n, m));
  if (m < 1) throw InputError("crs_radius: m must be at least 1");
  const double half = static_cast<double>(d) / 2.0;
  const double volume = n * std::tgamma(half + 1.0) / (static_cast<double>(m) * std::pow(std::numbers::pi, half));
  return std::pow(volume, 1.0 / static_cast<double>(d));
}

double crs_radius(const GridSpec& grid, int m) {
  return crs_radius(grid.dim(), static_cast<double>(grid.size()), m);
}

// ---------------------------------------------------------------------------

CrsEngine::CrsEngine(const CandidateOrder& order, const GridSpec& grid, std::shared_ptr<const BallShape> shape)
    : order_(order), grid_(grid), shape_(std::move(shape)) {
  const std::size_t d = grid_.dim();
  rank_of_.assign(static_cast<std::size_t>(grid_.size()), -1);
  coords_.resize(order_.perm.size() * d);
  for (std::size_t r = 0; r < order_.perm.size(); ++r) {
    const CellIndex c = order_.perm[r];
    if (c < 0 || c >= grid_.size()) throw InputError("crs: candidate cell outside the grid");
    rank_of_[static_cast<std::size_t>(c)] = static_cast<std::int64_t>(r);
    grid_.coords_of(c, std::span<int>(coords_.data() + r * d, d));
  }
  stencil_ = make_stencil(*shape_, d);
  dead_.assign(order_.perm.size(), 0);
}

void CrsEngine::carve(std::size_t p, CellIndex N, std::vector<CellIndex>& out) {
  out.clear();
  const std::size_t d = grid_.dim();
  const int* centre = coords_.data() + p * d;
  const auto limit = static_cast<std::size_t>(N);
  if (stencil_.size() / d <= limit - p) {
    for (std::size_t s = 0; s < stencil_.size(); s += d) {
      CellIndex idx = 0;
      bool inside = true;
      for (std::size_t i = 0; i < d && inside; ++i) {
        const int c = centre[i] + stencil_[s + i];
        inside = c >= 1 && c <= grid_.extent(i);
        idx += static_cast<CellIndex>(c - 1) * grid_.stride(i);
      }
      if (!inside) continue;
      const std::int64_t r = rank_of_[static_cast<std::size_t>(idx)];
      if (r < static_cast<std::int64_t>(p) || r >= N) continue;
      auto& flag = dead_[static_cast<std::size_t>(r)];
      if (flag == stamp_) continue;
      flag = stamp_;
      out.push_back(idx);
    }
    return;  // stencil offsets are lexicographic, so cells already ascend
  }
  int diff[3];
  std::vector<int> wide;
  int* delta = diff;
  if (d > 3) {
    wide.resize(d);
    delta = wide.data();
  }
  for (std::size_t r = p; r < limit; ++r) {
    if (dead_[r] == stamp_) continue;
    const int* q = coords_.data() + r * d;
    for (std::size_t i = 0; i < d; ++i) delta[i] = q[i] - centre[i];
    if (!shape_->contains(std::span<const int>(delta, d))) continue;
    dead_[r] = stamp_;
    out.push_back(order_.perm[r]);
  }
  std::sort(out.begin(), out.end());
}

int CrsEngine::run(CellIndex N, int m, double xi, std::vector<std::vector<CellIndex>>& kept,
                   std::vector<std::vector<CellIndex>>* discarded) {
  if (N < 0 || N > static_cast<CellIndex>(order_.perm.size())) {
    throw InputError("crs: N must lie in [0, number of candidates]");
  }
  if (m < 1) throw InputError("crs: m must be at least 1");
  if (++stamp_ == 0) {
    std::fill(dead_.begin(), dead_.end(), 0);
    stamp_ = 1;
  }
  kept.clear();
  if (discarded) discarded->clear();
  std::vector<CellIndex> buf;
  int iterations = 0;
  std::size_t p = 0;
  const auto limit = static_cast<std::size_t>(N);
  while (static_cast<int>(kept.size()) < m && p < limit) {
    if (dead_[p] == stamp_) {
      ++p;
      continue;
    }
    carve(p, N, buf);
    ++iterations;
    if (static_cast<double>(buf.size()) >= xi) {
      kept.push_back(buf);
    } else if (discarded) {
      discarded->push_back(buf);
    }
  }
  return iterations;
}

CrsOutcome crs_detailed(const CandidateOrder& order, CellIndex N, int m, double xi, const GridSpec& grid) {
  if (N < 1) throw InputError("crs: N must be at least 1");
  auto shape = std::make_shared<EuclideanBall>(
      EuclideanBall::from_squared(crs_radius_squared(grid.dim(), static_cast<double>(grid.size()), m)));
  CrsEngine engine(order, grid, shape);
  std::vector<std::vector<CellIndex>> kept, discarded;
  CrsOutcome out;
  out.iterations = engine.run(N, m, xi, kept, &discarded);
  for (auto& k : kept) out.kept.push_back(Region::from_sorted_indices(grid, std::move(k)));
  for (auto& k : discarded) out.discarded.push_back(Region::from_sorted_indices(grid, std::move(k)));
  return out;
}

std::vector<Region> crs(const CandidateOrder& order, CellIndex N, int m, double xi, const GridSpec& grid) {
  return crs_detailed(order, N, m, xi, grid).kept;
}

}  // namespace dpls
