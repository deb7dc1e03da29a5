#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dpls/field.hpp"
#include "dpls/lattice.hpp"

namespace dpls {

struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  /// Days since 1970-01-01 in the proleptic Gregorian calendar.
  std::int64_t days() const;
  static Date parse(const std::string& text);  // YYYY-MM-DD
  std::string str() const;
  auto operator<=>(const Date&) const = default;
};

/// T slices on a common grid. A cell value is missing in a slice when its valid flag is 0.
struct RasterStack {
  GridSpec grid;
  std::vector<Date> times;
  std::vector<std::vector<double>> values;       // [t][cell]
  std::vector<std::vector<std::uint8_t>> valid;  // [t][cell]

  std::size_t size() const { return times.size(); }
};

// Stack file: a grid CSV header (dims, optional mask) followed by blocks
//   time: YYYY-MM-DD
//   <row-major values>
RasterStack read_stack(std::istream& in, const std::string& source = "<stream>");
RasterStack load_stack(const std::string& path);
void write_stack(std::ostream& out, const RasterStack& s);
void save_stack(const std::string& path, const RasterStack& s);

/// Removes a per-cell least-squares line in time (days). Cells observed fewer than three
/// times come back missing in every slice. Requires T >= 3.
RasterStack detrend_linear(const RasterStack& s);

struct Window {
  enum class Kind { calendar_month, fixed_days };
  Kind kind = Kind::calendar_month;
  int days = 30;  // window length for fixed_days, counted from the first timestamp
};

/// Per cell: mean inside each window, then the maximum of those means. Cells with no
/// observation in any window are masked.
Field max_composite(const RasterStack& s, const Window& w);

}  // namespace dpls
