#include "dpls/oracle.hpp"

#include <array>
#include <vector>

#include "dpls/errors.hpp"
#include "dpls/hull.hpp"

namespace dpls {

namespace {

struct SubsetInfo {
  bool ready = false;
  bool smooth = true;
  double ss = 0.0;
  std::int64_t hull = 0;
};

}  // namespace

OracleResult exact_minimise(const Field& field, const CostParams& params, int max_labels, std::optional<int> smooth_k) {
  const GridSpec& grid = field.grid();
  if (grid.size() > 16) throw InfeasibleError("oracle: refusing to enumerate more than 16 cells");
  if (max_labels < 0 || max_labels > 2) throw InputError("oracle: max_labels must lie in [0, 2]");
  if (!(params.sigma2 > 0.0)) throw InputError("oracle: sigma2 must be positive");

  std::vector<CellIndex> cells;  // valid cells, ascending
  for (CellIndex c = 0; c < grid.size(); ++c) {
    if (field.is_valid(c)) cells.push_back(c);
  }
  const std::size_t k = cells.size();
  std::vector<SubsetInfo> memo(std::size_t{1} << k);
  auto info = [&](std::uint32_t mask) -> const SubsetInfo& {
    SubsetInfo& s = memo[mask];
    if (!s.ready) {
      std::vector<CellIndex> members;
      for (std::size_t i = 0; i < k; ++i) {
        if (mask >> i & 1U) members.push_back(cells[i]);
      }
      s.ss = detail::fitted_sum_squares(field, members).loss;
      s.hull = hull_cardinality(grid, members);
      if (smooth_k) s.smooth = in_smooth_class(Region::from_sorted_indices(grid, members), *smooth_k);
      s.ready = true;
    }
    return s;
  };

  std::vector<std::uint8_t> in_anomaly(static_cast<std::size_t>(grid.size()), 0);
  std::vector<int> label(k, 0);
  OracleResult best;
  bool have = false;
  std::array<std::uint32_t, 2> best_masks{0, 0};
  int best_used = 0;

  // Restricted growth strings: label[i] <= 1 + max(label[0..i)), so each partition of the
  // anomalous cells into unordered labels appears exactly once.
  auto visit = [&](int used) {
    std::array<std::uint32_t, 2> masks{0, 0};
    for (std::size_t i = 0; i < k; ++i) {
      if (label[i] > 0) masks[static_cast<std::size_t>(label[i] - 1)] |= 1U << i;
    }
    std::array<double, 2> ss{};
    std::int64_t hull = 0;
    for (int j = 0; j < used; ++j) {
      const SubsetInfo& s = info(masks[static_cast<std::size_t>(j)]);
      if (!s.smooth) return;
      ss[static_cast<std::size_t>(j)] = s.ss;
      hull += s.hull;
    }
    for (std::size_t i = 0; i < k; ++i) in_anomaly[static_cast<std::size_t>(cells[i])] = label[i] > 0;
    const double base = detail::baseline_sum_squares(field, in_anomaly, params.mu0);
    const CostBreakdown c = detail::assemble(base, std::span<const double>(ss.data(), static_cast<std::size_t>(used)), hull, params);
    ++best.enumerated;
    if (!have || c.total < best.best_cost.total) {
      have = true;
      best.best_cost = c;
      best_masks = masks;
      best_used = used;
    }
  };

  // Odometer over restricted growth strings.
  auto recurse = [&](auto&& self, std::size_t i, int used) -> void {
    if (i == k) {
      visit(used);
      return;
    }
    const int top = std::min(used + 1, max_labels);
    for (int l = 0; l <= top; ++l) {
      label[i] = l;
      self(self, i + 1, std::max(used, l));
    }
    label[i] = 0;
  };
  recurse(recurse, 0, 0);

  std::vector<Region> anomalies;
  for (int j = 0; j < best_used; ++j) {
    std::vector<CellIndex> members;
    for (std::size_t i = 0; i < k; ++i) {
      if (best_masks[static_cast<std::size_t>(j)] >> i & 1U) members.push_back(cells[i]);
    }
    anomalies.push_back(Region::from_sorted_indices(grid, std::move(members)));
  }
  best.best_partition = Partition::from_anomalies(grid, std::move(anomalies));
  return best;
}

}  // namespace dpls
