#include "dpls/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "dpls/errors.hpp"

namespace dpls {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

bool parse_double(const std::string& tok, double& out) {
  const std::string l = lower(tok);
  if (l == "nan" || l == "-nan") {
    out = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  return out;
}

Json real(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round9(x);
}

}  // namespace

Field read_grid(std::istream& in, const std::string& source) {
  std::string raw;
  std::size_t line_no = 0;
  std::vector<int> dims;
  std::optional<double> sentinel;
  bool has_mask = false;
  std::vector<double> values;
  CellIndex n = 0;

  auto next_content = [&](std::string& line) {
    while (std::getline(in, raw)) {
      ++line_no;
      line = trim(raw);
      if (!line.empty()) return true;
    }
    return false;
  };

  std::string line;
  if (!next_content(line)) throw InputError(source + ": empty grid file");
  if (line.rfind("dims:", 0) != 0) throw InputError(where(source, line_no) + "expected 'dims: n1 n2 [n3]'");
  {
    std::istringstream ss(line.substr(5));
    std::string tok;
    while (ss >> tok) {
      int v = 0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 1) {
        throw InputError(where(source, line_no) + "dimension '" + tok + "' is not a positive integer");
      }
      dims.push_back(v);
    }
    if (dims.empty()) throw InputError(where(source, line_no) + "dims header lists no dimensions");
  }
  const GridSpec grid(dims);
  n = grid.size();
  values.reserve(static_cast<std::size_t>(n));

  bool pending = next_content(line);
  if (pending && line.rfind("mask:", 0) == 0) {
    has_mask = true;
    const std::string tok = trim(line.substr(5));
    double s = 0.0;
    if (!parse_double(tok, s)) throw InputError(where(source, line_no) + "mask sentinel '" + tok + "' is not a number");
    if (!std::isnan(s)) sentinel = s;
    pending = next_content(line);
  }
  while (pending) {
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t comma = line.find(',', start);
      const std::string tok = trim(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      double v = 0.0;
      if (!parse_double(tok, v)) {
        throw InputError(where(source, line_no) + "value '" + tok + "' is not numeric");
      }
      if (static_cast<CellIndex>(values.size()) >= n) {
        throw InputError(where(source, line_no) + "more values than the " + std::to_string(n) + " cells declared by dims");
      }
      values.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    pending = next_content(line);
  }
  if (static_cast<CellIndex>(values.size()) != n) {
    throw InputError(source + ": expected " + std::to_string(n) + " values, found " + std::to_string(values.size()) +
                     " (" + std::to_string(n - static_cast<CellIndex>(values.size())) + " missing)");
  }
  std::vector<std::uint8_t> valid;
  if (has_mask) {
    valid.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const bool masked = sentinel ? values[i] == *sentinel : std::isnan(values[i]);
      valid[i] = masked ? 0 : 1;
    }
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if ((valid.empty() || valid[i]) && !std::isfinite(values[i])) {
      throw InputError(source + ": cell " + std::to_string(i) + " holds a non-finite value and no mask covers it");
    }
  }
  return Field(grid, std::move(values), std::move(valid));
}

Field load_grid(const std::string& path) {
  auto in = open_in(path);
  return read_grid(in, path);
}

void write_grid(std::ostream& out, const Field& field) {
  const GridSpec& g = field.grid();
  out << "dims:";
  for (int d : g.dims()) out << ' ' << d;
  out << '\n';
  if (field.has_mask()) out << "mask: nan\n";
  const CellIndex row = g.extent(g.dim() - 1);
  for (CellIndex c = 0; c < g.size(); ++c) {
    out << (field.is_valid(c) ? fmt_double(field.value(c)) : "nan");
    out << ((c + 1) % row == 0 ? '\n' : ',');
  }
}

void save_grid(const std::string& path, const Field& field) {
  auto out = open_out(path);
  write_grid(out, field);
  if (!out) throw InputError("failed writing '" + path + "'");
}

double round9(double x) {
  if (!std::isfinite(x)) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

Json point_to_json(const Point& p) {
  Json a = Json::array();
  for (int c : p.coords) a.push_back(c);
  return a;
}

Json region_to_json(const Region& r) {
  Json pts = Json::array();
  for (const Point& p : r.points()) pts.push_back(point_to_json(p));
  return Json{{"points", pts}};
}

namespace {

std::vector<Point> json_points(const Json& j) {
  if (!j.is_object() || !j.contains("points") || !j["points"].is_array()) {
    throw InputError("region JSON: expected an object with a \"points\" array");
  }
  std::vector<Point> pts;
  std::size_t d = 0;
  for (const auto& p : j["points"]) {
    if (!p.is_array() || p.empty()) throw InputError("region JSON: every point must be a nonempty array");
    Point q;
    for (const auto& c : p) {
      if (!c.is_number_integer()) throw InputError("region JSON: coordinates must be integers");
      q.coords.push_back(c.get<int>());
    }
    if (d == 0) d = q.dim();
    if (q.dim() != d) throw InputError("region JSON: points have different dimensions");
    pts.push_back(std::move(q));
  }
  return pts;
}

}  // namespace

Region region_from_json(const Json& j, const GridSpec& grid) {
  const auto pts = json_points(j);
  for (const auto& p : pts) {
    if (!grid.contains(p)) throw InputError("region JSON: point outside the grid");
  }
  return Region(grid, pts);
}

Region region_from_json(const Json& j) {
  const auto pts = json_points(j);
  if (j.contains("dims")) {
    std::vector<int> dims;
    for (const auto& v : j["dims"]) dims.push_back(v.get<int>());
    return region_from_json(j, GridSpec(dims));
  }
  if (pts.empty()) throw InputError("region JSON: cannot infer a grid from an empty region without \"dims\"");
  std::vector<int> dims(pts.front().dim(), 1);
  for (const auto& p : pts) {
    for (std::size_t i = 0; i < p.dim(); ++i) {
      if (p[i] < 1) throw InputError("region JSON: coordinates are 1-based");
      dims[i] = std::max(dims[i], p[i]);
    }
  }
  return region_from_json(j, GridSpec(dims));
}

Json breakdown_to_json(const CostBreakdown& b) {
  return Json{{"loss_baseline", real(b.loss_baseline)},
              {"loss_anomalies", real(b.loss_anomalies)},
              {"penalty_count", real(b.penalty_count)},
              {"penalty_hull", real(b.penalty_hull)},
              {"total", real(b.total)}};
}

Json params_to_json(const CostParams& p) {
  return Json{{"beta", real(p.beta)}, {"lambda", real(p.lambda)}, {"sigma2", real(p.sigma2)}, {"mu0", real(p.mu0)}};
}

Json surface_to_json(const CostSurface& s) {
  Json rows = Json::array();
  for (std::size_t mi = 0; mi < s.m_values.size(); ++mi) {
    Json row = Json::array();
    for (std::size_t ni = 0; ni < s.n_values.size(); ++ni) row.push_back(real(s.at(mi, ni)));
    rows.push_back(std::move(row));
  }
  return Json{{"m_values", s.m_values}, {"n_values", s.n_values}, {"null_total", real(s.null_total)}, {"totals", rows}};
}

Json result_to_json(const DetectionResult& r, bool explain_cost) {
  Json j;
  j["m_hat"] = r.m_hat;
  j["argmin_cell"] = Json{{"m", r.argmin_m}, {"N", r.argmin_n}};
  j["params"] = params_to_json(r.params);
  j["best_cost"] = breakdown_to_json(r.best_cost);
  Json regions = Json::array();
  for (std::size_t i = 0; i < r.regions.size(); ++i) {
    Json reg = region_to_json(r.regions[i]);
    reg["size"] = r.regions[i].size();
    reg["mean"] = real(r.region_means[i]);
    if (explain_cost) {
      const std::int64_t h = hull_cardinality(r.regions[i]);
      reg["hull_cardinality"] = h;
      reg["penalty_hull"] = real(r.params.lambda * static_cast<double>(h));
    }
    regions.push_back(std::move(reg));
  }
  j["regions"] = std::move(regions);
  j["baseline_size"] = r.baseline.size();
  if (r.surface) j["cost_surface"] = surface_to_json(*r.surface);
  return j;
}

Json hull_to_json(const HullPolytope& h, std::int64_t cardinality) {
  Json verts = Json::array();
  for (const auto& v : h.vertices) verts.push_back(point_to_json(v));
  Json j{{"affine_dim", h.affine_dim}, {"vertices", verts}};
  if (!h.facets.empty()) {
    Json facets = Json::array();
    for (const auto& f : h.facets) {
      Json fv = Json::array();
      for (const auto& v : f.vertices) fv.push_back(point_to_json(v));
      facets.push_back(Json{{"normal", f.normal}, {"offset", f.offset}, {"vertices", fv}});
    }
    j["facets"] = std::move(facets);
  }
  j["cardinality"] = cardinality;
  return j;
}

Json truth_to_json(const GroundTruth& t, const SimSetting& s) {
  Json regions = Json::array();
  for (std::size_t i = 0; i < t.partition.anomalies().size(); ++i) {
    Json reg = region_to_json(t.partition.anomalies()[i]);
    reg["mean"] = real(t.means[i + 1]);
    regions.push_back(std::move(reg));
  }
  return Json{{"setting", setting_name(s.setting)},
              {"dims", t.partition.grid().dims()},
              {"delta", real(s.delta)},
              {"seed", s.seed},
              {"m_star", t.m_star},
              {"delta_min", t.delta_min},
              {"mu0", real(t.means.front())},
              {"regions", regions}};
}

GroundTruth truth_from_json(const Json& j) {
  if (!j.contains("dims") || !j.contains("regions")) throw InputError("truth JSON: needs \"dims\" and \"regions\"");
  std::vector<int> dims;
  for (const auto& v : j["dims"]) dims.push_back(v.get<int>());
  const GridSpec grid(dims);
  std::vector<std::pair<Region, double>> regs;
  for (const auto& r : j["regions"]) regs.emplace_back(region_from_json(r, grid), r.value("mean", 0.0));
  std::sort(regs.begin(), regs.end(), [](const auto& a, const auto& b) {
    return a.first.indices().front() < b.first.indices().front();
  });
  GroundTruth t;
  t.means.push_back(j.value("mu0", 0.0));
  std::vector<Region> anomalies;
  t.delta_min = grid.size();
  for (auto& [r, mu] : regs) {
    t.delta_min = std::min<CellIndex>(t.delta_min, static_cast<CellIndex>(r.size()));
    t.means.push_back(mu);
    anomalies.push_back(std::move(r));
  }
  t.m_star = static_cast<int>(anomalies.size());
  t.partition = Partition::from_anomalies(grid, std::move(anomalies));
  return t;
}

Json report_to_json(const McReport& r, bool timings) {
  const SimSetting& s = r.setting;
  Json reps = Json::array();
  for (const auto& rec : r.replicates) {
    Json e{{"seed", rec.seed}, {"m_hat", rec.m_hat}, {"err", real(rec.err)}};
    if (timings) e["runtime_s"] = real(rec.runtime_s);
    if (!rec.failure.empty()) e["failure"] = rec.failure;
    reps.push_back(std::move(e));
  }
  Json j;
  j["setting"] = setting_name(s.setting);
  j["dims"] = s.grid.dims();
  j["delta"] = real(s.delta);
  j["total_area"] = s.total_area;
  j["sigma"] = real(s.sigma);
  j["zeta"] = s.zeta ? real(*s.zeta) : Json(nullptr);
  j["seed"] = s.seed;
  j["B"] = r.B;
  j["m_star"] = r.m_star;
  j["params"] = params_to_json(r.params);
  j["noc"] = real(r.noc);
  j["err"] = real(r.err);
  j["replicates"] = std::move(reps);
  return j;
}

void write_json(const std::string& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw InputError("failed writing '" + path + "'");
}

Json read_json(const std::string& path) {
  auto in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void save_result(const std::string& path, const DetectionResult& r, bool explain_cost) {
  write_json(path, result_to_json(r, explain_cost));
}

void save_count_map(const std::string& path, const GridSpec& grid, std::span<const std::int64_t> counts) {
  if (static_cast<CellIndex>(counts.size()) != grid.size()) throw InputError("count map size does not match the grid");
  auto out = open_out(path);
  out << "dims:";
  for (int d : grid.dims()) out << ' ' << d;
  out << '\n';
  const CellIndex row = grid.extent(grid.dim() - 1);
  for (CellIndex c = 0; c < grid.size(); ++c) {
    out << counts[static_cast<std::size_t>(c)] << ((c + 1) % row == 0 ? '\n' : ',');
  }
}

void save_pgm(const std::string& path, const GridSpec& grid, std::span<const std::int64_t> counts, std::int64_t scale) {
  if (static_cast<CellIndex>(counts.size()) != grid.size()) throw InputError("count map size does not match the grid");
  const CellIndex width = grid.extent(grid.dim() - 1);
  const CellIndex height = grid.size() / width;
  auto out = open_out(path, true);
  out << "P5\n" << width << ' ' << height << "\n255\n";
  for (std::int64_t c : counts) {
    const double v = scale > 0 ? 255.0 * static_cast<double>(c) / static_cast<double>(scale) : 0.0;
    out.put(static_cast<char>(static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L))));
  }
}

}  // namespace dpls
