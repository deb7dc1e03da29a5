#include "dpls/simulate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "dpls/errors.hpp"
#include "dpls/rng.hpp"

namespace dpls {

namespace {

enum class Shape { square, ellipse, disc_holes, two_blobs, u_shape, slab_disc, two_bars };

struct Placement {
  Shape shape;
  std::array<double, 3> at;  // position as a fraction of the free room along each axis
  double multiplier;         // mean = multiplier * delta
};

std::vector<Placement> layout(SettingId id) {
  switch (id) {
    case SettingId::squares:
      return {{Shape::square, {0.0, 0.0, 0}, 2.0},
              {Shape::square, {0.0, 1.0, 0}, 3.0},
              {Shape::square, {0.5, 0.5, 0}, 1.0},
              {Shape::square, {1.0, 0.0, 0}, 3.0},
              {Shape::square, {1.0, 1.0, 0}, 2.0}};
    case SettingId::mixed:
      return {{Shape::two_blobs, {0.2, 0.25, 0}, 3.0},
              {Shape::disc_holes, {0.75, 0.25, 0}, 2.0},
              {Shape::ellipse, {0.45, 0.8, 0}, 1.0}};
    case SettingId::concave:
      return {{Shape::u_shape, {0.25, 0.25, 0}, 1.0}, {Shape::two_blobs, {0.75, 0.75, 0}, 1.0}};
    case SettingId::three_d:
      return {{Shape::slab_disc, {0.2, 0.2, 0.2}, 1.0}, {Shape::two_bars, {0.8, 0.8, 0.8}, 1.0}};
  }
  return {};
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Potential of a centre-relative offset; the region takes the k cells of lowest
// (primary, secondary) potential. An infinite primary excludes the cell.
struct Potential {
  double primary;
  double secondary;
};

class ShapeField {
 public:
  ShapeField(Shape shape, CellIndex k) : shape_(shape), k_(static_cast<double>(k)) {
    switch (shape) {
      case Shape::square:
        side_ = std::max<long>(1, std::lround(std::sqrt(k_)));
        break;
      case Shape::ellipse:
        major_ = std::sqrt(2.0 * k_ / std::numbers::pi);
        break;
      case Shape::disc_holes: {
        const double r = std::sqrt(k_ / std::numbers::pi);
        hole_ = std::max(2L, std::lround(0.5 * r));
        break;
      }
      case Shape::two_blobs:
        break;
      case Shape::u_shape: {
        const double s = std::ceil(std::sqrt(1.3 * k_));
        notch_ = std::floor(s / 6.0);
        break;
      }
      case Shape::slab_disc:
        break;
      case Shape::two_bars:
        break;
    }
  }

  /// Half the footprint along an axis for shapes that are placed flush with the border.
  double half_extent() const { return shape_ == Shape::square ? 0.5 * static_cast<double>(side_ - 1) : 0.0; }

  Potential at(double dx, double dy, double dz) const {
    const double r2 = dx * dx + dy * dy + dz * dz;
    switch (shape_) {
      case Shape::square:
        return {std::max({std::abs(dx), std::abs(dy), std::abs(dz)}), r2};
      case Shape::ellipse: {
        const double minor = major_ / 2.0;
        return {(dx / minor) * (dx / minor) + (dy / major_) * (dy / major_), 0.0};
      }
      case Shape::disc_holes: {
        if (k_ >= 4 && dx == 0 && dy == 0) return {kInf, 0};
        if (k_ >= 60 && std::abs(dx) == static_cast<double>(hole_) && std::abs(dy) == static_cast<double>(hole_)) {
          return {kInf, 0};
        }
        return {r2, 0.0};
      }
      case Shape::two_blobs: {
        // Two half-discs split by an empty row.
        if (dy == 0) return {kInf, 0};
        const double ay = std::abs(dy) - 0.5;
        return {dx * dx + ay * ay, dy};
      }
      case Shape::u_shape: {
        if (std::abs(dx) <= notch_ && dy >= -notch_) return {kInf, 0};
        return {std::max(std::abs(dx), std::abs(dy)), r2};
      }
      case Shape::slab_disc: {
        if (dx != 0 && dx != 1) return {kInf, 0};
        if (k_ >= 20 && dy == 0 && dz == 0) return {kInf, 0};
        return {dy * dy + dz * dz, dx};
      }
      case Shape::two_bars: {
        if (dy == 0) return {kInf, 0};
        const double ay = std::abs(dy) - 0.5;
        return {dx * dx + ay * ay + dz * dz / 4.0, dy};
      }
    }
    return {kInf, 0};
  }

 private:
  Shape shape_;
  double k_;
  long side_ = 1;
  double major_ = 1.0;
  long hole_ = 2;
  double notch_ = 0.0;
};

std::int64_t squared_gap(std::span<const int> a, std::span<const int> b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::int64_t d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

struct Layout {
  const GridSpec& grid;
  std::vector<int> owner;   // 0 = baseline, j + 1 = region j
  std::vector<std::uint8_t> reserved;  // holes, slits and notches that jitter must not fill
  std::vector<int> coords;  // d ints per cell
  std::int64_t sep2;

  Layout(const GridSpec& g, int sep) : grid(g), owner(static_cast<std::size_t>(g.size()), 0), reserved(static_cast<std::size_t>(g.size()), 0), sep2(std::int64_t{sep} * sep) {
    const std::size_t d = g.dim();
    coords.resize(static_cast<std::size_t>(g.size()) * d);
    for (CellIndex c = 0; c < g.size(); ++c) g.coords_of(c, std::span<int>(coords.data() + c * d, d));
  }

  std::span<const int> at(CellIndex c) const {
    const std::size_t d = grid.dim();
    return {coords.data() + static_cast<std::size_t>(c) * d, d};
  }

  // True when c keeps the separation floor to every region other than `self`.
  bool clear_of_others(CellIndex c, int self) const {
    for (CellIndex o = 0; o < grid.size(); ++o) {
      const int w = owner[static_cast<std::size_t>(o)];
      if (w == 0 || w == self) continue;
      if (squared_gap(at(c), at(o)) < sep2) return false;
    }
    return true;
  }

  std::vector<CellIndex> members(int label) const {
    std::vector<CellIndex> out;
    for (CellIndex c = 0; c < grid.size(); ++c) {
      if (owner[static_cast<std::size_t>(c)] == label) out.push_back(c);
    }
    return out;
  }

  template <typename Fn>
  void for_face_neighbours(CellIndex c, Fn&& fn) const {
    const auto p = at(c);
    for (std::size_t a = 0; a < grid.dim(); ++a) {
      if (p[a] > 1) fn(c - grid.stride(a));
      if (p[a] < grid.extent(a)) fn(c + grid.stride(a));
    }
  }
};

void grow(Layout& lay, const Placement& pl, CellIndex k, int label) {
  const GridSpec& g = lay.grid;
  const std::size_t d = g.dim();
  const ShapeField field(pl.shape, k);
  std::array<double, 3> centre{0, 0, 0};
  for (std::size_t i = 0; i < d; ++i) {
    const double h = field.half_extent();
    centre[i] = std::round(1.0 + pl.at[i] * (g.extent(i) - 1 - 2.0 * h)) + h;
  }
  struct Scored {
    Potential pot;
    CellIndex cell;
  };
  std::vector<Scored> scored;
  std::vector<CellIndex> excluded;
  for (CellIndex c = 0; c < g.size(); ++c) {
    if (lay.owner[static_cast<std::size_t>(c)] != 0) continue;
    const auto p = lay.at(c);
    std::array<double, 3> delta{0, 0, 0};
    for (std::size_t i = 0; i < d; ++i) delta[i] = p[i] - centre[i];
    const Potential pot = field.at(delta[0], delta[1], delta[2]);
    if (!std::isfinite(pot.primary)) {
      excluded.push_back(c);
      continue;
    }
    if (!lay.clear_of_others(c, label)) continue;
    scored.push_back({pot, c});
  }
  if (static_cast<CellIndex>(scored.size()) < k) {
    throw InfeasibleError("simulate: region does not fit on the grid with the separation floor");
  }
  const auto k_it = scored.begin() + static_cast<std::ptrdiff_t>(k);
  std::partial_sort(scored.begin(), k_it, scored.end(), [](const Scored& a, const Scored& b) {
    if (a.pot.primary != b.pot.primary) return a.pot.primary < b.pot.primary;
    if (a.pot.secondary != b.pot.secondary) return a.pot.secondary < b.pot.secondary;
    return a.cell < b.cell;
  });
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = g.extent(i);
    hi[i] = 1;
  }
  for (auto it = scored.begin(); it != k_it; ++it) {
    lay.owner[static_cast<std::size_t>(it->cell)] = label;
    const auto p = lay.at(it->cell);
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  for (CellIndex c : excluded) {
    const auto p = lay.at(c);
    bool inside = true;
    for (std::size_t i = 0; i < d; ++i) inside = inside && p[i] >= lo[i] && p[i] <= hi[i];
    if (inside) lay.reserved[static_cast<std::size_t>(c)] = 1;
  }
}

bool smooth_enough(const Layout& lay, int label, int k) {
  return in_smooth_class(Region::from_sorted_indices(lay.grid, lay.members(label)), k);
}

// Area-preserving boundary jitter: a selected inner boundary cell leaves the region and a
// random outer boundary cell joins it. Swaps that break the separation floor, the
// smoothness bound or the region's original diameter are resampled a few times, then
// skipped.
void jitter(Layout& lay, int label, double prob, int smooth_k, CounterRng& rng) {
  const auto owned = [&](CellIndex c) { return lay.owner[static_cast<std::size_t>(c)] == label; };
  const auto start = lay.members(label);
  std::int64_t diam2 = 0;
  for (std::size_t i = 0; i < start.size(); ++i)
    for (std::size_t j = i + 1; j < start.size(); ++j) diam2 = std::max(diam2, squared_gap(lay.at(start[i]), lay.at(start[j])));
  const auto within_diameter = [&](CellIndex o) {
    for (CellIndex r : lay.members(label)) {
      if (squared_gap(lay.at(o), lay.at(r)) > diam2) return false;
    }
    return true;
  };
  std::vector<CellIndex> inner;
  for (CellIndex c : lay.members(label)) {
    bool edge = false;
    lay.for_face_neighbours(c, [&](CellIndex nb) { edge = edge || !owned(nb); });
    if (edge) inner.push_back(c);
  }
  for (CellIndex c : inner) {
    if (rng.uniform() >= prob) continue;
    if (!owned(c)) continue;
    std::vector<CellIndex> outer;
    for (CellIndex r : lay.members(label)) {
      lay.for_face_neighbours(r, [&](CellIndex nb) {
        const auto i = static_cast<std::size_t>(nb);
        if (nb != c && lay.owner[i] == 0 && !lay.reserved[i]) outer.push_back(nb);
      });
    }
    std::sort(outer.begin(), outer.end());
    outer.erase(std::unique(outer.begin(), outer.end()), outer.end());
    for (int attempt = 0; attempt < 8 && !outer.empty(); ++attempt) {
      const CellIndex o = outer[static_cast<std::size_t>(rng.below(outer.size()))];
      if (!lay.clear_of_others(o, label)) continue;
      lay.owner[static_cast<std::size_t>(c)] = 0;
      if (!within_diameter(o)) {
        lay.owner[static_cast<std::size_t>(c)] = label;
        continue;
      }
      lay.owner[static_cast<std::size_t>(o)] = label;
      if (smooth_enough(lay, label, smooth_k)) break;
      lay.owner[static_cast<std::size_t>(o)] = 0;
      lay.owner[static_cast<std::size_t>(c)] = label;
    }
  }
}

CellIndex exact_root(CellIndex n, int power) {
  const auto r = static_cast<CellIndex>(std::llround(std::pow(static_cast<double>(n), 1.0 / power)));
  for (CellIndex c = std::max<CellIndex>(1, r - 1); c <= r + 1; ++c) {
    CellIndex p = 1;
    for (int i = 0; i < power; ++i) p *= c;
    if (p == n) return c;
  }
  return 0;
}

}  // namespace

SettingId parse_setting(const std::string& text) {
  if (text == "1" || text == "squares") return SettingId::squares;
  if (text == "2" || text == "mixed") return SettingId::mixed;
  if (text == "3" || text == "concave") return SettingId::concave;
  if (text == "3d" || text == "three_d" || text == "4") return SettingId::three_d;
  throw InputError("unknown setting '" + text + "' (expected 1, 2, 3 or 3d)");
}

std::string setting_name(SettingId id) {
  switch (id) {
    case SettingId::squares:
      return "1";
    case SettingId::mixed:
      return "2";
    case SettingId::concave:
      return "3";
    case SettingId::three_d:
      return "3d";
  }
  return "?";
}

SimSetting make_setting(SettingId id, CellIndex n, double delta, CellIndex total_area, std::uint64_t seed) {
  const int power = id == SettingId::three_d ? 3 : 2;
  const CellIndex side = exact_root(n, power);
  if (side == 0) {
    throw InputError(power == 3 ? "simulate: n must be a perfect cube for the 3D setting"
                                : "simulate: n must be a perfect square");
  }
  SimSetting s;
  s.setting = id;
  s.grid = GridSpec(std::vector<int>(static_cast<std::size_t>(power), static_cast<int>(side)));
  s.delta = delta;
  s.total_area = total_area;
  s.seed = seed;
  return s;
}

std::vector<double> GroundTruth::mean_surface() const {
  std::vector<double> mu(static_cast<std::size_t>(partition.grid().size()), means.empty() ? 0.0 : means[0]);
  for (std::size_t j = 0; j < partition.anomalies().size(); ++j) {
    for (CellIndex c : partition.anomalies()[j].indices()) mu[static_cast<std::size_t>(c)] = means[j + 1];
  }
  return mu;
}

GroundTruth make_truth(const SimSetting& s) {
  const GridSpec& g = s.grid;
  const bool three = s.setting == SettingId::three_d;
  if (g.dim() != (three ? 3u : 2u)) {
    throw InputError(three ? "simulate: the 3D setting needs a 3D grid" : "simulate: settings 1-3 need a 2D grid");
  }
  if (!(s.delta > 0.0)) throw InputError("simulate: delta must be positive");
  const auto plan = layout(s.setting);
  const auto m = static_cast<CellIndex>(plan.size());
  if (s.total_area < m || s.total_area >= g.size()) {
    throw InfeasibleError("simulate: total area must lie in [number of regions, n)");
  }
  const double jp = s.jitter_prob.value_or(s.setting == SettingId::squares ? 0.0 : 0.25);
  if (!(jp >= 0.0 && jp < 1.0)) throw InputError("simulate: jitter probability must lie in [0, 1)");
  const int sep = s.separation.value_or(std::max(2, static_cast<int>(std::lround(0.1 * g.max_extent()))));
  if (sep < 1) throw InputError("simulate: separation must be at least 1");

  Layout lay(g, sep);
  for (CellIndex j = 0; j < m; ++j) {
    const CellIndex k = s.total_area / m + (j < s.total_area % m ? 1 : 0);
    grow(lay, plan[static_cast<std::size_t>(j)], k, static_cast<int>(j + 1));
  }
  if (jp > 0.0) {
    CounterRng rng(mix64(s.seed ^ 0x6a09e667f3bcc909ULL));
    for (CellIndex j = 0; j < m; ++j) jitter(lay, static_cast<int>(j + 1), jp, s.smooth_k, rng);
  }

  std::vector<std::pair<Region, double>> regions;
  for (CellIndex j = 0; j < m; ++j) {
    Region r = Region::from_sorted_indices(g, lay.members(static_cast<int>(j + 1)));
    if (!in_smooth_class(r, s.smooth_k)) {
      throw InfeasibleError("simulate: generated region exceeds the smoothness bound");
    }
    regions.emplace_back(std::move(r), plan[static_cast<std::size_t>(j)].multiplier * s.delta);
  }
  std::sort(regions.begin(), regions.end(), [](const auto& a, const auto& b) {
    return a.first.indices().front() < b.first.indices().front();
  });
  GroundTruth t;
  t.means.push_back(0.0);
  std::vector<Region> anomalies;
  t.delta_min = g.size();
  for (auto& [r, mu] : regions) {
    t.delta_min = std::min<CellIndex>(t.delta_min, static_cast<CellIndex>(r.size()));
    t.means.push_back(mu);
    anomalies.push_back(std::move(r));
  }
  t.partition = Partition::from_anomalies(g, std::move(anomalies));
  t.m_star = static_cast<int>(m);
  return t;
}

Field sample_field(const GroundTruth& truth, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InputError("sample_field: sigma must be nonnegative");
  std::vector<double> y = truth.mean_surface();
  if (sigma > 0.0) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += sigma * draw_normal(seed, i);
  }
  return Field(truth.partition.grid(), std::move(y));
}

struct DependentSampler::Impl {
  Eigen::MatrixXd lower;
};

DependentSampler::DependentSampler(const GridSpec& grid, double zeta) : impl_(std::make_unique<Impl>()) {
  if (!(zeta > 0.0)) throw InputError("dependent sampler: zeta must be positive");
  const CellIndex n = grid.size();
  if (n > kMaxCells) throw InfeasibleError("dependent sampler: grid too large for a dense factorisation");
  const std::size_t d = grid.dim();
  std::vector<int> coords(static_cast<std::size_t>(n) * d);
  for (CellIndex c = 0; c < n; ++c) grid.coords_of(c, std::span<int>(coords.data() + c * d, d));
  Eigen::MatrixXd cov(n, n);
  for (CellIndex i = 0; i < n; ++i) {
    cov(i, i) = 1.0;
    for (CellIndex j = 0; j < i; ++j) {
      const double dist = euclidean_distance(std::span<const int>(coords.data() + i * d, d),
                                             std::span<const int>(coords.data() + j * d, d));
      cov(i, j) = cov(j, i) = std::exp(-zeta * dist);
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    cov.diagonal().array() += 1e-10;
    llt.compute(cov);
    if (llt.info() != Eigen::Success) throw InfeasibleError("dependent sampler: covariance factorisation failed");
  }
  impl_->lower = llt.matrixL();
}

DependentSampler::~DependentSampler() = default;
DependentSampler::DependentSampler(DependentSampler&&) noexcept = default;
DependentSampler& DependentSampler::operator=(DependentSampler&&) noexcept = default;

std::vector<double> DependentSampler::errors(std::uint64_t seed) const {
  const auto n = impl_->lower.rows();
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = draw_normal(seed, static_cast<std::uint64_t>(i));
  const Eigen::VectorXd e = impl_->lower.triangularView<Eigen::Lower>() * z;
  return {e.data(), e.data() + n};
}

Field DependentSampler::sample(const GroundTruth& truth, double sigma, std::uint64_t seed) const {
  if (!(sigma >= 0.0)) throw InputError("sample_dependent_field: sigma must be nonnegative");
  if (truth.partition.grid().size() != impl_->lower.rows()) {
    throw InputError("sample_dependent_field: truth and sampler grids differ");
  }
  std::vector<double> y = truth.mean_surface();
  if (sigma > 0.0) {
    const auto e = errors(seed);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += sigma * e[i];
  }
  return Field(truth.partition.grid(), std::move(y));
}

Field sample_dependent_field(const GroundTruth& truth, double sigma, double zeta, std::uint64_t seed) {
  return DependentSampler(truth.partition.grid(), zeta).sample(truth, sigma, seed);
}

}  // namespace dpls
