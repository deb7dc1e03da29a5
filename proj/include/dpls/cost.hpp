#pragma once

#include <cstdint>
#include <span>

#include "dpls/field.hpp"
#include "dpls/lattice.hpp"

namespace dpls {

struct CostParams {
  double beta = 0.0;    // per-anomaly penalty
  double lambda = 0.0;  // per-hull-point penalty
  double sigma2 = 1.0;  // variance proxy
  double mu0 = 0.0;     // baseline mean, never fitted
};

/// Parts of C(m; R_1:m). total is accumulated as
/// ((loss_baseline + loss_anomalies) + penalty_count) + penalty_hull.
struct CostBreakdown {
  double loss_baseline = 0.0;
  double loss_anomalies = 0.0;
  double penalty_count = 0.0;
  double penalty_hull = 0.0;
  double total = 0.0;
};

struct FittedLoss {
  double loss = 0.0;
  double mu_hat = 0.0;
};

struct RobustBaseline {
  double mu0 = 0.0;
  double sigma = 0.0;
};

struct Penalties {
  double beta = 0.0;
  double lambda = 0.0;
};

/// (1/sigma2) * sum over the valid cells of R of (Y - mu)^2, in canonical order.
double regional_loss(const Field& field, const Region& r, double mu, double sigma2);

/// Sample mean over the valid cells of R and the loss at that mean (two passes).
FittedLoss fitted_loss(const Field& field, const Region& r, double sigma2);

/// Baseline uses params.mu0; anomalies use fitted means. Masked cells contribute nothing.
CostBreakdown penalised_cost(const Field& field, const Partition& partition, const CostParams& params);

/// Median and 1.4826 * MAD of the valid cells. Throws DegenerateScaleError when MAD is 0.
RobustBaseline robust_baseline(const Field& field);

/// beta = c_beta * (n^phi / n_max) * ln n and lambda = c_lambda * (n^(phi-1) / n_max) * ln n.
/// Requires phi >= 1 and n^(phi-1) <= n_max.
Penalties theoretical_penalties(const GridSpec& grid, double c_beta, double c_lambda, double phi);
/// Same with an explicit cell count, e.g. the number of unmasked cells.
Penalties theoretical_penalties(double n, int n_max, double c_beta, double c_lambda, double phi);

namespace detail {

/// Unscaled sum of squares of (Y - mu) over the valid cells in `cells`.
double sum_squares(const Field& field, std::span<const CellIndex> cells, double mu);

/// Unscaled fitted sum of squares; mu_hat is NaN when no cell is valid.
FittedLoss fitted_sum_squares(const Field& field, std::span<const CellIndex> cells);

/// Baseline sum of squares over every valid cell whose flag in `in_anomaly` is 0.
double baseline_sum_squares(const Field& field, std::span<const std::uint8_t> in_anomaly, double mu0);

/// Assembles the breakdown from unscaled sums. anomaly_ss must be in canonical order.
CostBreakdown assemble(double baseline_ss, std::span<const double> anomaly_ss, std::int64_t hull_points,
                       const CostParams& params);

}  // namespace detail

}  // namespace dpls
