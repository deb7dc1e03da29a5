#pragma once

// Slow, obviously-correct hull oracles for tests. Every supporting line (2D) or plane
// (3D) through pairs or triples of input points is enumerated; a point lies in the
// closed hull iff it satisfies all of them.

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "dpls/lattice.hpp"

namespace dpls::testing {

using V3 = std::array<std::int64_t, 3>;

inline V3 to_v3(const Point& p) {
  V3 v{0, 0, 0};
  for (std::size_t i = 0; i < p.dim(); ++i) v[i] = p[i];
  return v;
}

inline V3 sub(const V3& a, const V3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline V3 cross(const V3& a, const V3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline std::int64_t dot(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline bool is_zero(const V3& a) { return a[0] == 0 && a[1] == 0 && a[2] == 0; }

struct HalfSpace {
  V3 normal;
  std::int64_t offset;  // normal . x <= offset
};

/// Constraints whose intersection is conv(pts). Equalities come as two half-spaces.
inline std::vector<HalfSpace> brute_constraints(const std::vector<V3>& pts) {
  std::vector<HalfSpace> out;
  const std::size_t n = pts.size();
  auto add_if_supporting = [&](const V3& normal, const V3& through) {
    if (is_zero(normal)) return;
    const std::int64_t off = dot(normal, through);
    bool le = true;
    bool ge = true;
    for (const auto& p : pts) {
      const std::int64_t v = dot(normal, p);
      le = le && v <= off;
      ge = ge && v >= off;
    }
    if (le) out.push_back({normal, off});
    if (ge) out.push_back({{-normal[0], -normal[1], -normal[2]}, -off});
  };

  // Affine frame of the point set.
  const V3& a = pts.front();
  V3 dir{0, 0, 0};
  V3 plane{0, 0, 0};
  bool full3d = false;
  for (const auto& p : pts) {
    const V3 d = sub(p, a);
    if (is_zero(dir)) {
      dir = d;
    } else if (is_zero(plane)) {
      plane = cross(dir, d);
    } else if (dot(plane, d) != 0) {
      full3d = true;
      break;
    }
  }

  if (!full3d) {
    // Pin the set to its affine span.
    std::vector<V3> normals;
    if (is_zero(dir)) {
      normals = {V3{1, 0, 0}, V3{0, 1, 0}, V3{0, 0, 1}};
    } else if (is_zero(plane)) {
      for (const V3& e : {V3{1, 0, 0}, V3{0, 1, 0}, V3{0, 0, 1}}) normals.push_back(cross(dir, e));
    } else {
      normals.push_back(plane);
    }
    for (const auto& nrm : normals) {
      if (is_zero(nrm)) continue;
      out.push_back({nrm, dot(nrm, a)});
      out.push_back({{-nrm[0], -nrm[1], -nrm[2]}, -dot(nrm, a)});
    }
  }

  if (full3d) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
          add_if_supporting(cross(sub(pts[j], pts[i]), sub(pts[k], pts[i])), pts[i]);
  } else if (!is_zero(plane)) {
    // In-plane supporting lines through pairs.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) add_if_supporting(cross(plane, sub(pts[j], pts[i])), pts[i]);
  } else if (!is_zero(dir)) {
    // Segment: bound the projection onto its direction.
    const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [&](const V3& x, const V3& y) {
      return dot(dir, x) < dot(dir, y);
    });
    add_if_supporting(dir, *hi);
    add_if_supporting(dir, *lo);
  }
  return out;
}

inline bool inside(const std::vector<HalfSpace>& hs, const V3& x) {
  return std::all_of(hs.begin(), hs.end(), [&](const HalfSpace& h) { return dot(h.normal, x) <= h.offset; });
}

/// Lattice points of the bounding box of R that lie in conv(R).
inline std::int64_t brute_hull_count(const Region& r) {
  std::vector<V3> pts;
  for (const auto& p : r.points()) pts.push_back(to_v3(p));
  const auto hs = brute_constraints(pts);
  V3 lo = pts.front();
  V3 hi = pts.front();
  for (const auto& p : pts) {
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  std::int64_t count = 0;
  for (std::int64_t x = lo[0]; x <= hi[0]; ++x)
    for (std::int64_t y = lo[1]; y <= hi[1]; ++y)
      for (std::int64_t z = lo[2]; z <= hi[2]; ++z) count += inside(hs, {x, y, z}) ? 1 : 0;
  return count;
}

/// Points of R that are not in the hull of the remaining points.
inline std::vector<Point> brute_extreme_points(const Region& r) {
  const auto all = r.points();
  std::vector<Point> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    std::vector<V3> rest;
    for (std::size_t j = 0; j < all.size(); ++j) {
      if (j != i) rest.push_back(to_v3(all[j]));
    }
    if (rest.empty() || !inside(brute_constraints(rest), to_v3(all[i]))) out.push_back(all[i]);
  }
  return out;
}

}  // namespace dpls::testing
