#include "dpls/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "dpls/errors.hpp"
#include "dpls/io.hpp"

namespace dpls {

namespace {

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int month_length(int y, int m) {
  static constexpr int len[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : len[m - 1];
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

std::int64_t Date::days() const {
  // Howard Hinnant's days_from_civil.
  const std::int64_t y = month <= 2 ? year - 1 : year;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const std::int64_t yoe = y - era * 400;
  const std::int64_t mp = (month + 9) % 12;
  const std::int64_t doy = (153 * mp + 2) / 5 + day - 1;
  const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

Date Date::parse(const std::string& text) {
  const std::string t = trim(text);
  Date d;
  int* parts[] = {&d.year, &d.month, &d.day};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? t.find('-', pos) : t.size();
    if (end == std::string::npos || end == pos) throw InputError("date '" + t + "' is not YYYY-MM-DD");
    const auto [ptr, ec] = std::from_chars(t.data() + pos, t.data() + end, *parts[i]);
    if (ec != std::errc() || ptr != t.data() + end) throw InputError("date '" + t + "' is not YYYY-MM-DD");
    pos = end + 1;
  }
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > month_length(d.year, d.month)) {
    throw InputError("date '" + t + "' does not exist");
  }
  return d;
}

std::string Date::str() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

RasterStack read_stack(std::istream& in, const std::string& source) {
  std::string raw;
  std::size_t line_no = 0;
  std::string header;
  std::vector<std::pair<std::size_t, std::string>> lines;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string t = trim(raw);
    if (!t.empty()) lines.emplace_back(line_no, t);
  }
  std::size_t i = 0;
  while (i < lines.size() && lines[i].second.rfind("time:", 0) != 0) {
    header += lines[i].second + "\n";
    ++i;
  }
  if (header.empty()) throw InputError(source + ": missing dims header");
  RasterStack s;
  while (i < lines.size()) {
    const auto [ln, text] = lines[i];
    Date d;
    try {
      d = Date::parse(text.substr(5));
    } catch (const InputError& e) {
      throw InputError(source + ":" + std::to_string(ln) + ": " + e.what());
    }
    std::string block = header;
    ++i;
    while (i < lines.size() && lines[i].second.rfind("time:", 0) != 0) {
      block += lines[i].second + "\n";
      ++i;
    }
    std::istringstream bs(block);
    const Field f = read_grid(bs, source + " [time " + d.str() + "]");
    if (s.times.empty()) {
      s.grid = f.grid();
    }
    s.times.push_back(d);
    s.values.emplace_back(f.values().begin(), f.values().end());
    std::vector<std::uint8_t> v(static_cast<std::size_t>(f.grid().size()), 1);
    for (CellIndex c = 0; c < f.grid().size(); ++c) v[static_cast<std::size_t>(c)] = f.is_valid(c);
    s.valid.push_back(std::move(v));
  }
  if (s.times.empty()) throw InputError(source + ": no 'time:' blocks");
  return s;
}

RasterStack load_stack(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "' for reading");
  return read_stack(in, path);
}

void write_stack(std::ostream& out, const RasterStack& s) {
  out << "dims:";
  for (int d : s.grid.dims()) out << ' ' << d;
  out << "\nmask: nan\n";
  const CellIndex row = s.grid.extent(s.grid.dim() - 1);
  for (std::size_t t = 0; t < s.size(); ++t) {
    out << "time: " << s.times[t].str() << '\n';
    for (CellIndex c = 0; c < s.grid.size(); ++c) {
      const auto k = static_cast<std::size_t>(c);
      if (s.valid[t][k]) {
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof buf, s.values[t][k]);
        out.write(buf, res.ptr - buf);
      } else {
        out << "nan";
      }
      out << ((c + 1) % row == 0 ? '\n' : ',');
    }
  }
}

void save_stack(const std::string& path, const RasterStack& s) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  write_stack(out, s);
}

RasterStack detrend_linear(const RasterStack& s) {
  if (s.size() < 3) throw InputError("detrend_linear: at least three time slices are required");
  RasterStack out = s;
  const std::int64_t origin = s.times.front().days();
  std::vector<double> t(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) t[k] = static_cast<double>(s.times[k].days() - origin);
  for (CellIndex c = 0; c < s.grid.size(); ++c) {
    const auto i = static_cast<std::size_t>(c);
    double st = 0.0, sy = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (!s.valid[k][i]) continue;
      st += t[k];
      sy += s.values[k][i];
      ++count;
    }
    if (count < 3) {
      for (std::size_t k = 0; k < s.size(); ++k) out.valid[k][i] = 0;
      continue;
    }
    const double tm = st / static_cast<double>(count);
    const double ym = sy / static_cast<double>(count);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (!s.valid[k][i]) continue;
      sxx += (t[k] - tm) * (t[k] - tm);
      sxy += (t[k] - tm) * (s.values[k][i] - ym);
    }
    if (!(sxx > 0.0)) throw InputError("detrend_linear: timestamps of a cell do not vary");
    const double slope = sxy / sxx;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (!s.valid[k][i]) continue;
      out.values[k][i] = s.values[k][i] - (ym + slope * (t[k] - tm));
    }
  }
  return out;
}

Field max_composite(const RasterStack& s, const Window& w) {
  if (s.size() == 0) throw InputError("max_composite: stack has no slices");
  if (w.kind == Window::Kind::fixed_days && w.days < 1) throw InputError("max_composite: window length must be positive");
  const std::int64_t origin = s.times.front().days();
  std::vector<std::int64_t> key(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    key[k] = w.kind == Window::Kind::calendar_month
                 ? static_cast<std::int64_t>(s.times[k].year) * 12 + (s.times[k].month - 1)
                 : (s.times[k].days() - origin) / w.days;
    if (key[k] < 0 && w.kind == Window::Kind::fixed_days) {
      throw InputError("max_composite: timestamps must not precede the first slice for fixed windows");
    }
  }
  std::map<std::int64_t, std::vector<std::size_t>> windows;
  for (std::size_t k = 0; k < s.size(); ++k) windows[key[k]].push_back(k);

  const auto n = static_cast<std::size_t>(s.grid.size());
  std::vector<double> best(n, -std::numeric_limits<double>::infinity());
  std::vector<std::uint8_t> valid(n, 0);
  for (const auto& [_, slices] : windows) {
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t k : slices) {
        if (!s.valid[k][i]) continue;
        sum += s.values[k][i];
        ++count;
      }
      if (count == 0) continue;
      best[i] = std::max(best[i], sum / static_cast<double>(count));
      valid[i] = 1;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!valid[i]) best[i] = std::numeric_limits<double>::quiet_NaN();
  }
  return Field(s.grid, std::move(best), std::move(valid));
}

}  // namespace dpls
