#include "dpls/field.hpp"

#include <algorithm>
#include <cmath>

#include "dpls/errors.hpp"

namespace dpls {

Field::Field(GridSpec grid, std::vector<double> values) : Field(std::move(grid), std::move(values), {}) {}

Field::Field(GridSpec grid, std::vector<double> values, std::vector<std::uint8_t> valid)
    : grid_(std::move(grid)), values_(std::move(values)), valid_(std::move(valid)) {
  const auto n = static_cast<std::size_t>(grid_.size());
  if (values_.size() != n) throw InputError("field: value count does not match the grid size");
  if (!valid_.empty() && valid_.size() != n) throw InputError("field: mask size does not match the grid size");
  if (std::all_of(valid_.begin(), valid_.end(), [](std::uint8_t v) { return v != 0; })) valid_.clear();
  valid_count_ = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_valid(static_cast<CellIndex>(i))) continue;
    if (!std::isfinite(values_[i])) throw InputError("field: valid cells must hold finite values");
    ++valid_count_;
  }
}

Region Field::valid_region() const {
  std::vector<CellIndex> cells;
  cells.reserve(static_cast<std::size_t>(valid_count_));
  for (CellIndex c = 0; c < grid_.size(); ++c) {
    if (is_valid(c)) cells.push_back(c);
  }
  return Region::from_sorted_indices(grid_, std::move(cells));
}

}  // namespace dpls
