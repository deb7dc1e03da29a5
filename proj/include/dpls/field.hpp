#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dpls/lattice.hpp"

namespace dpls {

/// Observed values Y(s) on a grid, stored by linear cell index, with an optional
/// validity mask. Invalid (masked) cells take part in no loss and no candidate order.
class Field {
 public:
  Field() = default;
  Field(GridSpec grid, std::vector<double> values);
  Field(GridSpec grid, std::vector<double> values, std::vector<std::uint8_t> valid);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double value(CellIndex c) const { return values_[static_cast<std::size_t>(c)]; }
  bool is_valid(CellIndex c) const { return valid_.empty() || valid_[static_cast<std::size_t>(c)] != 0; }
  bool has_mask() const { return !valid_.empty(); }
  /// Empty when every cell is valid.
  std::span<const std::uint8_t> mask() const { return valid_; }
  CellIndex valid_count() const { return valid_count_; }
  Region valid_region() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
  CellIndex valid_count_ = 0;
};

}  // namespace dpls
