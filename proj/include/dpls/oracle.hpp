#pragma once

#include <cstdint>
#include <optional>

#include "dpls/cost.hpp"
#include "dpls/field.hpp"
#include "dpls/lattice.hpp"

namespace dpls {

struct OracleResult {
  Partition best_partition;
  CostBreakdown best_cost;
  std::int64_t enumerated = 0;  // labelings costed
};

/// Exhaustive minimum of penalised_cost over every assignment of the valid cells to the
/// baseline or one of at most `max_labels` anomalies, counting each assignment once up to
/// relabeling. Masked cells stay in the baseline. With `smooth_k`, anomalies outside the
/// smooth class R_K are skipped. Refuses grids with more than 16 cells.
OracleResult exact_minimise(const Field& field, const CostParams& params, int max_labels = 2,
                            std::optional<int> smooth_k = std::nullopt);

}  // namespace dpls
