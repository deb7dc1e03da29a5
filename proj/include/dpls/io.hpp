#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "dpls/cost.hpp"
#include "dpls/detector.hpp"
#include "dpls/evaluate.hpp"
#include "dpls/field.hpp"
#include "dpls/hull.hpp"
#include "dpls/lattice.hpp"
#include "dpls/simulate.hpp"

namespace dpls {

using Json = nlohmann::ordered_json;

// Grid CSV:
//   dims: n1 n2 [n3]
//   mask: <sentinel>          (optional; a number or nan)
//   v,v,...                   (row-major values, last axis fastest)
// Values are written in shortest round-trip form, so load(save(x)) == x bit for bit.
Field read_grid(std::istream& in, const std::string& source = "<stream>");
Field load_grid(const std::string& path);
void write_grid(std::ostream& out, const Field& field);
void save_grid(const std::string& path, const Field& field);

/// Rounds to 9 significant digits; the JSON writers use it for every real value.
double round9(double x);

Json point_to_json(const Point& p);
Json region_to_json(const Region& r);
/// Reads {"points": [[...], ...]} (and optional "dims"). Without dims the grid is the
/// smallest box [1, max_i] that holds every point.
Region region_from_json(const Json& j);
Region region_from_json(const Json& j, const GridSpec& grid);

Json breakdown_to_json(const CostBreakdown& b);
Json params_to_json(const CostParams& p);
Json result_to_json(const DetectionResult& r, bool explain_cost = false);
Json surface_to_json(const CostSurface& s);
Json hull_to_json(const HullPolytope& h, std::int64_t cardinality);
Json truth_to_json(const GroundTruth& t, const SimSetting& s);
GroundTruth truth_from_json(const Json& j);
/// Runtimes are included only when `timings` is set, so reports can be compared byte
/// for byte across runs.
Json report_to_json(const McReport& r, bool timings = false);

void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);
void save_result(const std::string& path, const DetectionResult& r, bool explain_cost = false);

/// Per-cell counts laid out like a grid CSV (no mask).
void save_count_map(const std::string& path, const GridSpec& grid, std::span<const std::int64_t> counts);
/// 8-bit binary PGM, value 255 * count / scale; rows are the grid's last axis, all other
/// axes are stacked vertically.
void save_pgm(const std::string& path, const GridSpec& grid, std::span<const std::int64_t> counts, std::int64_t scale);

}  // namespace dpls
