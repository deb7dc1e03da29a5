#include "dpls/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <unordered_map>

#include "dpls/crs.hpp"
#include "dpls/errors.hpp"
#include "dpls/hull.hpp"
#include "dpls/parallel.hpp"

namespace dpls {

namespace {

struct RegionStats {
  double dev_ss = 0.0;     // sum of (Y - mu0)^2, the share of the baseline loss it removes
  double fitted_ss = 0.0;  // sum of (Y - mean)^2
  std::int64_t hull = 0;
};

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stats keyed by region contents. Consecutive N values mostly reproduce the same regions,
// so the hull of each distinct region is computed once per row.
class RegionCache {
 public:
  RegionCache(const Field& field, double mu0) : field_(field), mu0_(mu0) {}

  const RegionStats& get(const std::vector<CellIndex>& cells) {
    std::uint64_t h = mix(cells.size());
    for (CellIndex c : cells) h = mix(h ^ static_cast<std::uint64_t>(c));
    auto& bucket = map_[h];
    for (const auto& e : bucket) {
      if (e.cells == cells) return e.stats;
    }
    if (stored_ > kMaxStored) {
      map_.clear();
      stored_ = 0;
      return get(cells);
    }
    RegionStats s;
    s.dev_ss = detail::sum_squares(field_, cells, mu0_);
    s.fitted_ss = detail::fitted_sum_squares(field_, cells).loss;
    s.hull = hull_cardinality(field_.grid(), cells);
    stored_ += cells.size();
    bucket.push_back({cells, s});
    return bucket.back().stats;
  }

 private:
  static constexpr std::size_t kMaxStored = std::size_t{1} << 21;
  struct Entry {
    std::vector<CellIndex> cells;
    RegionStats stats;
  };
  const Field& field_;
  double mu0_;
  std::unordered_map<std::uint64_t, std::vector<Entry>> map_;
  std::size_t stored_ = 0;
};

std::shared_ptr<const BallShape> shape_for(std::size_t d, CellIndex n_eff, int m) {
  return std::make_shared<EuclideanBall>(
      EuclideanBall::from_squared(crs_radius_squared(d, static_cast<double>(n_eff), m)));
}

struct Plan {
  CostParams params;
  CellIndex n_eff = 0;
  std::vector<int> m_values;
  std::vector<CellIndex> n_values;
};

Plan make_plan(const Field& field, const DetectorConfig& config) {
  Plan plan;
  plan.params = resolve_params(field, config);
  plan.n_eff = field.valid_count();
  const CellIndex stride = config.faithful ? 1 : config.n_stride;
  if (stride < 1) throw InputError("detect: n_stride must be at least 1");
  if (!config.faithful && config.m_max < 1) throw InputError("detect: m_max must be at least 1");
  const CellIndex m_top = config.faithful ? plan.n_eff : std::min<CellIndex>(config.m_max, plan.n_eff);
  for (CellIndex m = 1; m <= m_top; ++m) plan.m_values.push_back(static_cast<int>(m));
  for (CellIndex N = 1; N <= plan.n_eff; N += stride) plan.n_values.push_back(N);
  return plan;
}

struct Evaluation {
  std::vector<double> totals;  // row-major m x N, NaN where m > N
  double null_total = 0.0;
  std::size_t best_mi = 0, best_ni = 0;
  bool best_null = true;
};

Evaluation evaluate_grid(const Field& field, const CandidateOrder& order, const Plan& plan, const DetectorConfig& config) {
  const CostParams& p = plan.params;
  const GridSpec& grid = field.grid();
  const std::size_t cols = plan.n_values.size();
  Evaluation ev;
  ev.totals.assign(plan.m_values.size() * cols, std::numeric_limits<double>::quiet_NaN());
  ev.null_total = penalised_cost(field, Partition::from_anomalies(grid, {}), p).total;

  double total_ss = 0.0;
  for (CellIndex c : order.perm) {
    const double r = field.value(c) - p.mu0;
    total_ss += r * r;
  }

  parallel_for(plan.m_values.size(), config.workers, [&](std::size_t mi) {
    const int m = plan.m_values[mi];
    CrsEngine engine(order, grid, shape_for(grid.dim(), plan.n_eff, m));
    RegionCache cache(field, p.mu0);
    const double xi = xi_threshold(plan.n_eff, m, config.xi_scale);
    std::vector<std::vector<CellIndex>> kept;
    for (std::size_t ni = 0; ni < cols; ++ni) {
      const CellIndex N = plan.n_values[ni];
      if (N < m) continue;
      engine.run(N, m, xi, kept);
      double dev = 0.0, fit = 0.0;
      std::int64_t hulls = 0;
      for (const auto& cells : kept) {
        const RegionStats& s = cache.get(cells);
        dev += s.dev_ss;
        fit += s.fitted_ss / p.sigma2;
        hulls += s.hull;
      }
      const double loss = (total_ss - dev) / p.sigma2 + fit;
      ev.totals[mi * cols + ni] =
          (loss + p.beta * static_cast<double>(kept.size())) + p.lambda * static_cast<double>(hulls);
    }
  });

  // Lexicographic (total, m, N): rows and columns are scanned in increasing order and
  // only a strictly smaller total replaces the incumbent.
  double best = ev.null_total;
  for (std::size_t mi = 0; mi < plan.m_values.size(); ++mi) {
    for (std::size_t ni = 0; ni < cols; ++ni) {
      const double t = ev.totals[mi * cols + ni];
      if (t < best) {
        best = t;
        ev.best_mi = mi;
        ev.best_ni = ni;
        ev.best_null = false;
      }
    }
  }
  return ev;
}

DetectionResult detect_once(const Field& field, const DetectorConfig& config) {
  const Plan plan = make_plan(field, config);
  const CandidateOrder order = sort_candidates(field, plan.params.mu0);
  const Evaluation ev = evaluate_grid(field, order, plan, config);
  const GridSpec& grid = field.grid();

  std::vector<Region> regions;
  DetectionResult res;
  if (!ev.best_null) {
    const int m = plan.m_values[ev.best_mi];
    const CellIndex N = plan.n_values[ev.best_ni];
    CrsEngine engine(order, grid, shape_for(grid.dim(), plan.n_eff, m));
    std::vector<std::vector<CellIndex>> kept;
    engine.run(N, m, xi_threshold(plan.n_eff, m, config.xi_scale), kept);
    for (auto& cells : kept) regions.push_back(Region::from_sorted_indices(grid, std::move(cells)));
    res.argmin_m = m;
    res.argmin_n = N;
  }
  const Partition part = Partition::from_anomalies(grid, std::move(regions));
  res.params = plan.params;
  res.best_cost = penalised_cost(field, part, plan.params);
  res.regions = part.anomalies();
  res.baseline = part.baseline();
  res.m_hat = static_cast<int>(res.regions.size());
  for (const auto& r : res.regions) res.region_means.push_back(detail::fitted_sum_squares(field, r.indices()).mu_hat);
  if (config.keep_surface) {
    CostSurface s;
    s.m_values = plan.m_values;
    s.n_values = plan.n_values;
    s.totals = ev.totals;
    s.null_total = ev.null_total;
    res.surface = std::move(s);
  }
  return res;
}

double median_over(const Field& field, const Region& r) {
  std::vector<double> v;
  for (CellIndex c : r.indices()) {
    if (field.is_valid(c)) v.push_back(field.value(c));
  }
  if (v.empty()) throw InputError("detect_two_pass: detected baseline has no valid cells");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

double xi_threshold(CellIndex n_eff, int m, double xi_scale) {
  if (m < 1) throw InputError("xi_threshold: m must be at least 1");
  const double decades = std::floor(std::log10(std::sqrt(static_cast<double>(n_eff))));
  return xi_scale * 20.0 * decades / static_cast<double>(m);
}

CostParams resolve_params(const Field& field, const DetectorConfig& config) {
  if (field.valid_count() < 1) throw InputError("detect: field has no valid cells");
  if (!config.beta) throw InputError("detect: beta is required");
  if (!(config.penalty_scale >= 0.0)) throw InputError("detect: penalty_scale must be nonnegative");
  CostParams p;
  if (!config.mu0 || !config.sigma2) {
    const RobustBaseline rb = robust_baseline(field);
    p.mu0 = rb.mu0;
    p.sigma2 = rb.sigma * rb.sigma;
  }
  if (config.mu0) p.mu0 = *config.mu0;
  if (config.sigma2) p.sigma2 = *config.sigma2;
  if (!(p.sigma2 > 0.0) || !std::isfinite(p.sigma2)) throw InputError("detect: sigma2 must be positive");
  p.beta = *config.beta * config.penalty_scale;
  p.lambda = config.lambda ? *config.lambda * config.penalty_scale
                           : p.beta / static_cast<double>(field.valid_count());
  if (p.beta < 0.0 || p.lambda < 0.0) throw InputError("detect: penalties must be nonnegative");
  return p;
}

DetectionResult detect(const Field& field, const DetectorConfig& config) {
  if (config.two_pass) return detect_two_pass(field, config);
  return detect_once(field, config);
}

DetectionResult detect_two_pass(const Field& field, const DetectorConfig& config) {
  DetectorConfig cfg = config;
  cfg.two_pass = false;
  const DetectionResult first = detect_once(field, cfg);
  cfg.mu0 = median_over(field, first.baseline);
  cfg.sigma2 = first.params.sigma2;
  cfg.beta = first.params.beta;
  cfg.lambda = first.params.lambda;
  cfg.penalty_scale = 1.0;
  return detect_once(field, cfg);
}

CostSurface cost_surface(const Field& field, const DetectorConfig& config) {
  DetectorConfig cfg = config;
  cfg.keep_surface = true;
  return *detect(field, cfg).surface;
}

std::vector<SweepPoint> beta_sweep(const Field& field, const DetectorConfig& config, std::span<const double> betas) {
  std::vector<SweepPoint> out;
  for (double b : betas) {
    DetectorConfig cfg = config;
    cfg.beta = b;
    const DetectionResult r = detect(field, cfg);
    out.push_back({b, r.m_hat, r.best_cost.total});
  }
  return out;
}

}  // namespace dpls
