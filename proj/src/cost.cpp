#include "dpls/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dpls/errors.hpp"
#include "dpls/hull.hpp"

namespace dpls {

namespace detail {

double sum_squares(const Field& field, std::span<const CellIndex> cells, double mu) {
  double s = 0.0;
  for (CellIndex c : cells) {
    if (!field.is_valid(c)) continue;
    const double r = field.value(c) - mu;
    s += r * r;
  }
  return s;
}

FittedLoss fitted_sum_squares(const Field& field, std::span<const CellIndex> cells) {
  double sum = 0.0;
  std::size_t k = 0;
  for (CellIndex c : cells) {
    if (!field.is_valid(c)) continue;
    sum += field.value(c);
    ++k;
  }
  if (k == 0) return {0.0, std::numeric_limits<double>::quiet_NaN()};
  const double mean = sum / static_cast<double>(k);
  return {sum_squares(field, cells, mean), mean};
}

double baseline_sum_squares(const Field& field, std::span<const std::uint8_t> in_anomaly, double mu0) {
  double s = 0.0;
  const auto n = static_cast<CellIndex>(in_anomaly.size());
  for (CellIndex c = 0; c < n; ++c) {
    if (in_anomaly[static_cast<std::size_t>(c)] || !field.is_valid(c)) continue;
    const double r = field.value(c) - mu0;
    s += r * r;
  }
  return s;
}

CostBreakdown assemble(double baseline_ss, std::span<const double> anomaly_ss, std::int64_t hull_points,
                       const CostParams& params) {
  CostBreakdown b;
  b.loss_baseline = baseline_ss / params.sigma2;
  for (double ss : anomaly_ss) b.loss_anomalies += ss / params.sigma2;
  b.penalty_count = params.beta * static_cast<double>(anomaly_ss.size());
  b.penalty_hull = params.lambda * static_cast<double>(hull_points);
  b.total = ((b.loss_baseline + b.loss_anomalies) + b.penalty_count) + b.penalty_hull;
  return b;
}

}  // namespace detail

namespace {

void check_region(const Field& field, const Region& r, const char* op) {
  if (!(r.grid() == field.grid())) {
    throw InputError(std::string(op) + ": region and field live on different grids");
  }
}

void check_sigma2(double sigma2, const char* op) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw InputError(std::string(op) + ": sigma2 must be positive and finite");
  }
}

double median_of(std::vector<double>& v) {
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h), v.end());
  const double upper = v[h];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h));
  return 0.5 * (lower + upper);
}

}  // namespace

double regional_loss(const Field& field, const Region& r, double mu, double sigma2) {
  check_region(field, r, "regional_loss");
  check_sigma2(sigma2, "regional_loss");
  return detail::sum_squares(field, r.indices(), mu) / sigma2;
}

FittedLoss fitted_loss(const Field& field, const Region& r, double sigma2) {
  check_region(field, r, "fitted_loss");
  check_sigma2(sigma2, "fitted_loss");
  const FittedLoss f = detail::fitted_sum_squares(field, r.indices());
  if (std::isnan(f.mu_hat)) throw InputError("fitted_loss: region has no valid cells");
  return {f.loss / sigma2, f.mu_hat};
}

CostBreakdown penalised_cost(const Field& field, const Partition& partition, const CostParams& params) {
  if (!(partition.grid() == field.grid())) {
    throw InputError("penalised_cost: partition and field live on different grids");
  }
  check_sigma2(params.sigma2, "penalised_cost");
  std::vector<std::uint8_t> in_anomaly(static_cast<std::size_t>(field.grid().size()), 0);
  std::vector<double> anomaly_ss;
  std::int64_t hull_points = 0;
  for (const Region& r : partition.anomalies()) {
    for (CellIndex c : r.indices()) in_anomaly[static_cast<std::size_t>(c)] = 1;
    anomaly_ss.push_back(detail::fitted_sum_squares(field, r.indices()).loss);
    hull_points += hull_cardinality(r);
  }
  const double base = detail::baseline_sum_squares(field, in_anomaly, params.mu0);
  return detail::assemble(base, anomaly_ss, hull_points, params);
}

RobustBaseline robust_baseline(const Field& field) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(field.valid_count()));
  for (CellIndex c = 0; c < field.grid().size(); ++c) {
    if (field.is_valid(c)) v.push_back(field.value(c));
  }
  if (v.size() < 2) throw InputError("robust_baseline: at least two valid cells are required");
  RobustBaseline out;
  out.mu0 = median_of(v);
  for (double& x : v) x = std::abs(x - out.mu0);
  out.sigma = 1.4826 * median_of(v);
  if (!(out.sigma > 0.0)) {
    throw DegenerateScaleError("robust_baseline: median absolute deviation is zero", out.mu0);
  }
  return out;
}

Penalties theoretical_penalties(double n, int n_max, double c_beta, double c_lambda, double phi) {
  if (!(n > 1.0) || n_max < 1) throw InputError("theoretical_penalties: need n > 1 and n_max >= 1");
  if (c_beta < 0.0 || c_lambda < 0.0) throw InputError("theoretical_penalties: constants must be nonnegative");
  if (!(phi >= 1.0)) throw InfeasibleError("theoretical_penalties: phi must be at least 1");
  const double excess = std::pow(n, phi - 1.0);
  if (excess > static_cast<double>(n_max)) {
    throw InfeasibleError("theoretical_penalties: n^(phi-1) exceeds n_max");
  }
  const double log_n = std::log(n);
  const double nm = static_cast<double>(n_max);
  return {c_beta * (std::pow(n, phi) / nm) * log_n, c_lambda * (excess / nm) * log_n};
}

Penalties theoretical_penalties(const GridSpec& grid, double c_beta, double c_lambda, double phi) {
  return theoretical_penalties(static_cast<double>(grid.size()), grid.max_extent(), c_beta, c_lambda, phi);
}

}  // namespace dpls
