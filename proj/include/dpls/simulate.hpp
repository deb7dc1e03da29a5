#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dpls/field.hpp"
#include "dpls/lattice.hpp"

namespace dpls {

enum class SettingId { squares = 1, mixed = 2, concave = 3, three_d = 4 };

/// "1", "2", "3" or "3d" (also "three_d").
SettingId parse_setting(const std::string& text);
std::string setting_name(SettingId id);

struct SimSetting {
  SettingId setting = SettingId::squares;
  GridSpec grid;
  double delta = 1.0;
  CellIndex total_area = 0;
  /// Probability that a boundary cell is swapped. Unset: 0 for setting 1, 0.25 otherwise.
  std::optional<double> jitter_prob;
  /// Correlation decay of the dependent sampler; unset means independent errors.
  std::optional<double> zeta;
  std::uint64_t seed = 0;
  double sigma = 1.0;
  /// Every generated region has at most this many runs on any axis-parallel line.
  int smooth_k = 6;
  /// Minimum Euclidean distance between regions. Unset: max(2, round(0.1 * n_max)).
  std::optional<int> separation;
};

/// Square grid with n cells (n must be a perfect square, or a perfect cube for three_d).
SimSetting make_setting(SettingId id, CellIndex n, double delta, CellIndex total_area, std::uint64_t seed);

struct GroundTruth {
  Partition partition;
  std::vector<double> means;  // mu_0 (always 0), then one per anomaly in canonical order
  CellIndex delta_min = 0;    // smallest anomaly size
  int m_star = 0;

  /// Piecewise-constant mean surface by cell.
  std::vector<double> mean_surface() const;
};

/// Region layout of the setting. Throws InfeasibleError when the regions do not fit.
GroundTruth make_truth(const SimSetting& s);

/// Y = mu + sigma * eps with iid standard normal eps, drawn per cell index from `seed`.
Field sample_field(const GroundTruth& truth, double sigma, std::uint64_t seed);

/// Dependent errors with covariance sigma^2 * exp(-zeta * dist). Factorises on every
/// call; use DependentSampler to reuse the factor.
Field sample_dependent_field(const GroundTruth& truth, double sigma, double zeta, std::uint64_t seed);

/// Cholesky factor of the exponential covariance on a grid, computed once. Consumes the
/// same normal vector as sample_field, so a very large zeta reproduces it exactly.
class DependentSampler {
 public:
  static constexpr CellIndex kMaxCells = 4096;

  DependentSampler(const GridSpec& grid, double zeta);
  ~DependentSampler();
  DependentSampler(DependentSampler&&) noexcept;
  DependentSampler& operator=(DependentSampler&&) noexcept;

  Field sample(const GroundTruth& truth, double sigma, std::uint64_t seed) const;
  /// Correlated standard-normal errors for `seed`.
  std::vector<double> errors(std::uint64_t seed) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dpls
