#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dpls/cost.hpp"
#include "dpls/field.hpp"
#include "dpls/lattice.hpp"

namespace dpls {

struct DetectorConfig {
  /// Required. Multiplied by penalty_scale.
  std::optional<double> beta;
  /// Defaults to beta / n_eff after scaling, n_eff being the number of valid cells.
  std::optional<double> lambda;
  /// Unset values come from robust_baseline (median, MAD^2).
  std::optional<double> sigma2;
  std::optional<double> mu0;
  double penalty_scale = 1.0;
  int m_max = 20;
  CellIndex n_stride = 1;
  /// xi_m = xi_scale * 20 * floor(log10(sqrt(n_eff))) / m.
  double xi_scale = 1.0;
  /// Full search: m runs up to N, stride 1. Overrides m_max and n_stride.
  bool faithful = false;
  bool two_pass = false;
  bool keep_surface = false;
  int workers = 1;
};

/// Totals over the evaluated (m, N) cells. Cells with m > N or outside the grid of
/// evaluated values hold NaN.
struct CostSurface {
  std::vector<int> m_values;
  std::vector<CellIndex> n_values;
  std::vector<double> totals;  // row-major: m_values.size() rows of n_values.size()
  double null_total = 0.0;

  double at(std::size_t mi, std::size_t ni) const { return totals[mi * n_values.size() + ni]; }
};

struct DetectionResult {
  int m_hat = 0;
  std::vector<Region> regions;  // canonical order
  std::vector<double> region_means;
  Region baseline;
  CostBreakdown best_cost;
  int argmin_m = 0;        // 0 for the null model
  CellIndex argmin_n = 0;  // 0 for the null model
  CostParams params;       // resolved values actually used
  std::optional<CostSurface> surface;
};

DetectionResult detect(const Field& field, const DetectorConfig& config);

/// Detects once, replaces mu0 by the median of Y over the detected baseline and detects
/// again. sigma2 and the penalties keep their first-pass values.
DetectionResult detect_two_pass(const Field& field, const DetectorConfig& config);

CostSurface cost_surface(const Field& field, const DetectorConfig& config);

/// Threshold xi_m for a field with n_eff valid cells.
double xi_threshold(CellIndex n_eff, int m, double xi_scale = 1.0);

/// Penalty parameters and baseline after filling unset fields of the config.
CostParams resolve_params(const Field& field, const DetectorConfig& config);

struct SweepPoint {
  double beta = 0.0;
  int m_hat = 0;
  double total = 0.0;
};

/// Detection repeated for each beta (lambda follows the config rule). A sensitivity aid;
/// no value is selected automatically.
std::vector<SweepPoint> beta_sweep(const Field& field, const DetectorConfig& config, std::span<const double> betas);

}  // namespace dpls
