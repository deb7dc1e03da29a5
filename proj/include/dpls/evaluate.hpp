#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dpls/detector.hpp"
#include "dpls/lattice.hpp"
#include "dpls/simulate.hpp"

namespace dpls {

/// [sum_i min_j |est_i \ truth_j| + sum_j min_i |truth_j \ est_i|] / sum_j |truth_j|.
/// An empty estimate gives 1. Throws on an empty truth list.
double err_metric(std::span<const Region> truth, std::span<const Region> est);

struct ReplicateRecord {
  std::uint64_t seed = 0;
  int m_hat = 0;  // -1 when the replicate failed
  double err = 0.0;
  double runtime_s = 0.0;
  std::string failure;
};

struct McReport {
  SimSetting setting;
  int B = 0;
  int m_star = 0;
  double noc = 0.0;
  double err = 0.0;
  CostParams params;                 // resolved for replicate 1
  std::vector<std::int64_t> freq_map;  // per cell: replicates that flagged it as anomalous
  std::vector<ReplicateRecord> replicates;
};

struct McOptions {
  int workers = 1;
};

/// The detector configuration used by the benchmark when fields are left unset:
/// beta = delta * delta_min, lambda = beta / n, mu0 = 0 (known baseline) and
/// sigma2 = sigma^2 (1 when sigma is 0).
DetectorConfig mc_config(const SimSetting& s, const GroundTruth& truth, const DetectorConfig& base);

/// B replicates with noise seeds setting.seed + 1 .. setting.seed + B. The layout uses
/// setting.seed. Failed replicates are recorded with m_hat = -1 and err = 1.
McReport run_monte_carlo(const SimSetting& setting, const DetectorConfig& config, int B, const McOptions& opts = {});

}  // namespace dpls
