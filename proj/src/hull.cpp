#include "dpls/hull.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "dpls/errors.hpp"

namespace dpls {

namespace {

using V3 = std::array<std::int64_t, 3>;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

V3 sub(const V3& a, const V3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

V3 cross(const V3& a, const V3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

std::int64_t dot(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

bool is_zero(const V3& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }

V3 primitive(V3 v) {
  const std::int64_t g = std::gcd(std::gcd(std::abs(v[0]), std::abs(v[1])), std::abs(v[2]));
  if (g > 1) {
    for (auto& x : v) x /= g;
  }
  return v;
}

// 2D cross product of (b - a) and (c - a) in the first two components.
std::int64_t cross2(const V3& a, const V3& b, const V3& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

Point to_point(const V3& v, std::size_t d) {
  Point p;
  p.coords.resize(d);
  for (std::size_t i = 0; i < d; ++i) p.coords[i] = static_cast<int>(v[i]);
  return p;
}

void check_dimension(const GridSpec& grid) {
  if (grid.dim() < 1 || grid.dim() > 3) {
    throw UnsupportedDimensionError("hull: only 1-, 2- and 3-dimensional grids are supported (d = " +
                                    std::to_string(grid.dim()) + ")");
  }
}

// Coordinates of cells that are extreme on their line along the fastest axis. Cells are
// sorted, so such lines are contiguous runs; a hull vertex is always one of these.
std::vector<V3> run_extremes(const GridSpec& grid, std::span<const CellIndex> cells) {
  const std::size_t d = grid.dim();
  const CellIndex last_extent = grid.extent(d - 1);
  std::vector<V3> out;
  std::array<int, 3> buf{};
  auto push = [&](CellIndex c) {
    grid.coords_of(c, std::span<int>(buf.data(), d));
    out.push_back({buf[0], d > 1 ? buf[1] : 0, d > 2 ? buf[2] : 0});
  };
  std::size_t i = 0;
  while (i < cells.size()) {
    const CellIndex line = cells[i] / last_extent;
    std::size_t j = i;
    while (j + 1 < cells.size() && cells[j + 1] / last_extent == line) ++j;
    push(cells[i]);
    if (j != i) push(cells[j]);
    i = j + 1;
  }
  return out;
}

// Drops points that are strictly inside their line along `axis`.
void keep_line_extremes(std::vector<V3>& pts, std::size_t axis) {
  if (pts.size() < 3) return;
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) {
    V3 k = pts[i];
    std::swap(k[axis], k[2]);
    return k;
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::vector<std::uint8_t> keep(pts.size(), 1);
  std::size_t i = 0;
  while (i < order.size()) {
    const V3 ki = key(order[i]);
    std::size_t j = i;
    while (j + 1 < order.size()) {
      const V3 kj = key(order[j + 1]);
      if (kj[0] != ki[0] || kj[1] != ki[1]) break;
      ++j;
    }
    for (std::size_t t = i + 1; t < j; ++t) keep[order[t]] = 0;
    i = j + 1;
  }
  std::size_t w = 0;
  for (std::size_t r = 0; r < pts.size(); ++r) {
    if (keep[r]) pts[w++] = pts[r];
  }
  pts.resize(w);
}

// Andrew's monotone chain on lexicographically sorted points (first two components).
// Returns the counter-clockwise hull without collinear vertices.
std::vector<V3> monotone_chain(const std::vector<V3>& pts) {
  if (pts.size() <= 1) return pts;
  std::vector<V3> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    while (k >= lower && cross2(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  if (h.size() == 2 && h[0] == h[1]) h.resize(1);
  return h;
}

std::int64_t segment_count(const V3& a, const V3& b) {
  const V3 d = sub(b, a);
  return std::gcd(std::gcd(std::abs(d[0]), std::abs(d[1])), std::abs(d[2])) + 1;
}

// Closed lattice-point count of a convex polygon given counter-clockwise. For every
// integer column the boundary is intersected exactly in rational arithmetic.
std::int64_t polygon_count(const std::vector<V3>& poly) {
  std::int64_t xmin = poly[0][0], xmax = poly[0][0];
  for (const auto& v : poly) {
    xmin = std::min(xmin, v[0]);
    xmax = std::max(xmax, v[0]);
  }
  const auto width = static_cast<std::size_t>(xmax - xmin + 1);
  std::vector<std::int64_t> lo(width, std::numeric_limits<std::int64_t>::max());
  std::vector<std::int64_t> hi(width, std::numeric_limits<std::int64_t>::min());
  auto update = [&](std::int64_t x, std::int64_t ylo, std::int64_t yhi) {
    const auto i = static_cast<std::size_t>(x - xmin);
    lo[i] = std::min(lo[i], ylo);
    hi[i] = std::max(hi[i], yhi);
  };
  for (std::size_t e = 0; e < poly.size(); ++e) {
    const V3& a = poly[e];
    const V3& b = poly[(e + 1) % poly.size()];
    if (a[0] == b[0]) {
      update(a[0], std::min(a[1], b[1]), std::max(a[1], b[1]));
      continue;
    }
    const V3& p = a[0] < b[0] ? a : b;
    const V3& q = a[0] < b[0] ? b : a;
    const std::int64_t dx = q[0] - p[0];
    const std::int64_t dy = q[1] - p[1];
    for (std::int64_t x = p[0]; x <= q[0]; ++x) {
      const std::int64_t num = p[1] * dx + (x - p[0]) * dy;
      update(x, ceil_div(num, dx), floor_div(num, dx));
    }
  }
  std::int64_t count = 0;
  for (std::size_t i = 0; i < width; ++i) {
    if (hi[i] >= lo[i]) count += hi[i] - lo[i] + 1;
  }
  return count;
}

// ---------------------------------------------------------------------------
// 3D

struct Face {
  int a, b, c;
  V3 normal;
  std::int64_t offset;
};

Face make_face(const std::vector<V3>& p, int a, int b, int c) {
  const V3 n = cross(sub(p[b], p[a]), sub(p[c], p[a]));
  return {a, b, c, n, dot(n, p[a])};
}

struct Simplex {
  int dim = -1;
  int idx[4] = {-1, -1, -1, -1};
};

Simplex find_simplex(const std::vector<V3>& p) {
  Simplex s;
  if (p.empty()) return s;
  s.dim = 0;
  s.idx[0] = 0;
  const int n = static_cast<int>(p.size());
  int i1 = -1;
  for (int i = 1; i < n && i1 < 0; ++i) {
    if (p[i] != p[0]) i1 = i;
  }
  if (i1 < 0) return s;
  s.dim = 1;
  s.idx[1] = i1;
  const V3 d1 = sub(p[i1], p[0]);
  int i2 = -1;
  for (int i = 1; i < n && i2 < 0; ++i) {
    if (!is_zero(cross(d1, sub(p[i], p[0])))) i2 = i;
  }
  if (i2 < 0) return s;
  s.dim = 2;
  s.idx[2] = i2;
  const V3 nrm = cross(d1, sub(p[i2], p[0]));
  for (int i = 1; i < n; ++i) {
    if (dot(nrm, sub(p[i], p[0])) != 0) {
      s.dim = 3;
      s.idx[3] = i;
      break;
    }
  }
  return s;
}

// Incremental hull of a full-dimensional point set; faces are triangles with outward
// normals. Points on or inside the current hull are skipped, so coplanar triangles may
// remain; their planes are still valid supporting planes.
std::vector<Face> incremental_hull(const std::vector<V3>& p, const Simplex& s) {
  std::vector<Face> faces;
  const int* t = s.idx;
  const int tri[4][4] = {{t[0], t[1], t[2], t[3]}, {t[0], t[1], t[3], t[2]}, {t[0], t[2], t[3], t[1]},
                         {t[1], t[2], t[3], t[0]}};
  for (const auto& f : tri) {
    Face face = make_face(p, f[0], f[1], f[2]);
    if (dot(face.normal, p[f[3]]) > face.offset) face = make_face(p, f[0], f[2], f[1]);
    faces.push_back(face);
  }
  std::vector<std::pair<int, int>> edges;
  std::vector<Face> next;
  for (int i = 0; i < static_cast<int>(p.size()); ++i) {
    if (i == t[0] || i == t[1] || i == t[2] || i == t[3]) continue;
    edges.clear();
    next.clear();
    for (const auto& f : faces) {
      if (dot(f.normal, p[i]) > f.offset) {
        edges.emplace_back(f.a, f.b);
        edges.emplace_back(f.b, f.c);
        edges.emplace_back(f.c, f.a);
      } else {
        next.push_back(f);
      }
    }
    if (edges.empty()) continue;
    std::sort(edges.begin(), edges.end());
    for (const auto& [u, v] : edges) {
      if (!std::binary_search(edges.begin(), edges.end(), std::make_pair(v, u))) {
        next.push_back(make_face(p, u, v, i));
      }
    }
    faces.swap(next);
  }
  return faces;
}

struct Plane {
  V3 normal;
  std::int64_t offset;
  auto operator<=>(const Plane&) const = default;
};

std::vector<Plane> unique_planes(const std::vector<V3>& p, const std::vector<Face>& faces) {
  std::vector<Plane> planes;
  planes.reserve(faces.size());
  for (const auto& f : faces) {
    const V3 n = primitive(f.normal);
    planes.push_back({n, dot(n, p[f.a])});
  }
  std::sort(planes.begin(), planes.end());
  planes.erase(std::unique(planes.begin(), planes.end()), planes.end());
  return planes;
}

std::int64_t polyhedron_count(const std::vector<V3>& p, const std::vector<Plane>& planes) {
  V3 lo = p[0], hi = p[0];
  for (const auto& v : p) {
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], v[k]);
      hi[k] = std::max(hi[k], v[k]);
    }
  }
  std::int64_t count = 0;
  for (std::int64_t x = lo[0]; x <= hi[0]; ++x) {
    for (std::int64_t y = lo[1]; y <= hi[1]; ++y) {
      std::int64_t zlo = lo[2], zhi = hi[2];
      for (const auto& pl : planes) {
        const std::int64_t rhs = pl.offset - pl.normal[0] * x - pl.normal[1] * y;
        const std::int64_t c = pl.normal[2];
        if (c > 0) {
          zhi = std::min(zhi, floor_div(rhs, c));
        } else if (c < 0) {
          zlo = std::max(zlo, ceil_div(rhs, c));
        } else if (rhs < 0) {
          zhi = zlo - 1;
        }
        if (zhi < zlo) break;
      }
      if (zhi >= zlo) count += zhi - zlo + 1;
    }
  }
  return count;
}

// Drops the coordinate `axis` and keeps the other two in order.
V3 project(const V3& v, int axis) {
  V3 out{0, 0, 0};
  int k = 0;
  for (int i = 0; i < 3; ++i) {
    if (i != axis) out[k++] = v[i];
  }
  return out;
}

struct PlanarHull {
  V3 normal;
  std::int64_t offset;
  int axis;                 // coordinate dropped by the projection
  std::vector<V3> polygon;  // projected, counter-clockwise
};

PlanarHull planar_hull(const std::vector<V3>& p, const Simplex& s) {
  PlanarHull h;
  h.normal = primitive(cross(sub(p[s.idx[1]], p[s.idx[0]]), sub(p[s.idx[2]], p[s.idx[0]])));
  h.offset = dot(h.normal, p[s.idx[0]]);
  h.axis = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(h.normal[k]) > std::abs(h.normal[h.axis])) h.axis = k;
  }
  std::vector<V3> proj;
  proj.reserve(p.size());
  for (const auto& v : p) proj.push_back(project(v, h.axis));
  std::sort(proj.begin(), proj.end());
  proj.erase(std::unique(proj.begin(), proj.end()), proj.end());
  h.polygon = monotone_chain(proj);
  return h;
}

bool in_convex_polygon(const std::vector<V3>& poly, const V3& q) {
  for (std::size_t e = 0; e < poly.size(); ++e) {
    if (cross2(poly[e], poly[(e + 1) % poly.size()], q) < 0) return false;
  }
  return true;
}

std::int64_t planar_count(const std::vector<V3>& p, const PlanarHull& h) {
  V3 lo = p[0], hi = p[0];
  for (const auto& v : p) {
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], v[k]);
      hi[k] = std::max(hi[k], v[k]);
    }
  }
  const int u = h.axis == 0 ? 1 : 0;
  const int w = h.axis == 2 ? 1 : 2;
  const std::int64_t nk = h.normal[h.axis];
  std::int64_t count = 0;
  for (std::int64_t a = lo[u]; a <= hi[u]; ++a) {
    for (std::int64_t b = lo[w]; b <= hi[w]; ++b) {
      const std::int64_t rhs = h.offset - h.normal[u] * a - h.normal[w] * b;
      if (rhs % nk != 0) continue;
      const std::int64_t c = rhs / nk;
      if (c < lo[h.axis] || c > hi[h.axis]) continue;
      if (in_convex_polygon(h.polygon, V3{a, b, 0})) ++count;
    }
  }
  return count;
}

std::vector<V3> hull_candidates(const GridSpec& grid, std::span<const CellIndex> cells) {
  auto pts = run_extremes(grid, cells);
  if (grid.dim() == 3) {
    keep_line_extremes(pts, 1);
    keep_line_extremes(pts, 0);
  }
  return pts;
}

std::int64_t count_cells(const GridSpec& grid, std::span<const CellIndex> cells) {
  check_dimension(grid);
  if (cells.empty()) throw InputError("hull_cardinality: region is empty");
  const auto pts = hull_candidates(grid, cells);
  switch (grid.dim()) {
    case 1:
      return pts.back()[0] - pts.front()[0] + 1;
    case 2: {
      const auto poly = monotone_chain(pts);
      if (poly.size() == 1) return 1;
      if (poly.size() == 2) return segment_count(poly[0], poly[1]);
      return polygon_count(poly);
    }
    default: {
      const Simplex s = find_simplex(pts);
      if (s.dim == 0) return 1;
      if (s.dim == 1) {
        const auto [mn, mx] = std::minmax_element(pts.begin(), pts.end());
        return segment_count(*mn, *mx);
      }
      if (s.dim == 2) return planar_count(pts, planar_hull(pts, s));
      return polyhedron_count(pts, unique_planes(pts, incremental_hull(pts, s)));
    }
  }
}

}  // namespace

std::int64_t hull_cardinality(const GridSpec& grid, std::span<const CellIndex> sorted_cells) {
  return count_cells(grid, sorted_cells);
}

std::int64_t hull_cardinality(const Region& r) { return count_cells(r.grid(), r.indices()); }

std::int64_t hull_excess(const Region& r) {
  return hull_cardinality(r) - static_cast<std::int64_t>(r.size());
}

HullPolytope convex_hull(const Region& r) {
  const GridSpec& grid = r.grid();
  check_dimension(grid);
  if (r.empty()) throw InputError("convex_hull: region is empty");
  const std::size_t d = grid.dim();
  const auto pts = hull_candidates(grid, r.indices());
  HullPolytope out;

  if (d == 1) {
    out.affine_dim = pts.front() == pts.back() ? 0 : 1;
    out.vertices.push_back(to_point(pts.front(), d));
    if (out.affine_dim == 1) out.vertices.push_back(to_point(pts.back(), d));
    return out;
  }
  if (d == 2) {
    const auto poly = monotone_chain(pts);
    out.affine_dim = std::min<int>(2, static_cast<int>(poly.size()) - 1);
    for (const auto& v : poly) out.vertices.push_back(to_point(v, d));
    return out;
  }

  const Simplex s = find_simplex(pts);
  out.affine_dim = s.dim;
  if (s.dim == 0) {
    out.vertices.push_back(to_point(pts.front(), d));
  } else if (s.dim == 1) {
    const auto [mn, mx] = std::minmax_element(pts.begin(), pts.end());
    out.vertices = {to_point(*mn, d), to_point(*mx, d)};
  } else if (s.dim == 2) {
    // Lift the projected polygon back onto the plane.
    const PlanarHull h = planar_hull(pts, s);
    std::vector<V3> lifted;
    for (const auto& q : h.polygon) {
      for (const auto& v : pts) {
        if (project(v, h.axis)[0] == q[0] && project(v, h.axis)[1] == q[1]) {
          lifted.push_back(v);
          break;
        }
      }
    }
    std::sort(lifted.begin(), lifted.end());
    for (const auto& v : lifted) out.vertices.push_back(to_point(v, d));
  } else {
    const auto planes = unique_planes(pts, incremental_hull(pts, s));
    // A point is a vertex iff the normals of the planes through it span three dimensions.
    std::vector<V3> verts;
    for (const auto& v : pts) {
      std::vector<V3> tight;
      for (const auto& pl : planes) {
        if (dot(pl.normal, v) == pl.offset) tight.push_back(pl.normal);
      }
      bool full_rank = false;
      for (std::size_t i = 0; i < tight.size() && !full_rank; ++i) {
        for (std::size_t j = i + 1; j < tight.size() && !full_rank; ++j) {
          const V3 c = cross(tight[i], tight[j]);
          for (std::size_t k = j + 1; k < tight.size() && !full_rank; ++k) {
            full_rank = dot(c, tight[k]) != 0;
          }
        }
      }
      if (full_rank) verts.push_back(v);
    }
    std::sort(verts.begin(), verts.end());
    for (const auto& v : verts) out.vertices.push_back(to_point(v, d));
    for (const auto& pl : planes) {
      HullFacet f;
      f.normal = pl.normal;
      f.offset = pl.offset;
      for (const auto& v : verts) {
        if (dot(pl.normal, v) == pl.offset) f.vertices.push_back(to_point(v, d));
      }
      out.facets.push_back(std::move(f));
    }
  }
  return out;
}

}  // namespace dpls
