#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dpls/crs.hpp"
#include "dpls/errors.hpp"
#include "support/fixtures.hpp"

using namespace dpls;
using dpls::testing::noise_field;
using dpls::testing::region_of;

TEST_CASE("candidate order") {
  GridSpec g({1, 3});
  auto o = sort_candidates(Field(g, {5, -7, 1}), 0.0);
  CHECK(o.perm == std::vector<CellIndex>{1, 0, 2});
  CHECK(o.key == std::vector<double>{7, 5, 1});

  auto tie = sort_candidates(Field(GridSpec({2, 2}), {3, -3, 3, -3}), 0.0);
  CHECK(tie.perm == std::vector<CellIndex>{0, 1, 2, 3});

  auto masked = sort_candidates(Field(g, {5, -7, 1}, {1, 0, 1}), 0.0);
  CHECK(masked.perm == std::vector<CellIndex>{0, 2});

  std::mt19937_64 rng(1);
  auto r = sort_candidates(noise_field(GridSpec({20, 20}), 1.0, rng), 0.3);
  CHECK(std::is_sorted(r.key.rbegin(), r.key.rend()));
}

TEST_CASE("ball examples") {
  GridSpec g({5, 5});
  CHECK(ball(g, {3, 3}, 0.0) == region_of(g, {{3, 3}}));
  CHECK(ball(g, {3, 3}, 1.0) == region_of(g, {{2, 3}, {3, 2}, {3, 3}, {3, 4}, {4, 3}}));
  CHECK(ball(g, {1, 1}, 1.0) == region_of(g, {{1, 1}, {1, 2}, {2, 1}}));
  CHECK(ball(g, {3, 3}, 1.5).size() == 9);
  CHECK_THROWS_AS(ball(g, {6, 1}, 1.0), InputError);
}

TEST_CASE("crs radius") {
  GridSpec g({50, 50});
  CHECK(crs_radius(g, 1) == doctest::Approx(std::sqrt(2500.0 / std::numbers::pi)));
  CHECK(crs_radius(g, 1) == doctest::Approx(28.209).epsilon(1e-4));
  CHECK(crs_radius(2, 2500.0, 3) == doctest::Approx(std::sqrt(2500.0 / (3.0 * std::numbers::pi))));
  const double r3 = std::cbrt(1728.0 * std::tgamma(2.5) / (2.0 * std::pow(std::numbers::pi, 1.5)));
  CHECK(crs_radius(GridSpec({12, 12, 12}), 2) == doctest::Approx(r3));
  // ball volume matches n/m
  CHECK(4.0 / 3.0 * std::numbers::pi * r3 * r3 * r3 == doctest::Approx(864.0));
  CHECK(crs_radius_squared(2, 400.0, 5) == doctest::Approx(400.0 / (5.0 * std::numbers::pi)));
  CHECK_THROWS_AS(crs_radius(g, 0), InputError);
}

TEST_CASE("crs examples") {
  GridSpec g({20, 20});
  std::vector<double> v(400, 0.0);
  // two tight clusters of 10 points at opposite corners
  std::vector<Point> a, b;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 5; ++j) {
      a.push_back({i, j});
      b.push_back({21 - i, 21 - j});
    }
  for (const auto& p : a) v[static_cast<std::size_t>(g.index_of(p))] = 10.0;
  for (const auto& p : b) v[static_cast<std::size_t>(g.index_of(p))] = 9.0;
  Field f(g, v);
  auto order = sort_candidates(f, 0.0);

  auto two = crs(order, 20, 2, 5.0, g);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == Region(g, a));
  CHECK(two[1] == Region(g, b));

  auto single = crs(order, 1, 1, 1.0, g);
  REQUIRE(single.size() == 1);
  CHECK(single[0].size() == 1);
  CHECK(crs(order, 1, 1, 2.0, g).empty());

  auto none = crs_detailed(order, 20, 2, 50.0, g);
  CHECK(none.kept.empty());
  std::size_t total = 0;
  for (const auto& r : none.discarded) total += r.size();
  CHECK(total == 20);
}

TEST_CASE("crs properties on noise") {
  std::mt19937_64 rng(12);
  GridSpec g({15, 15});
  for (int t = 0; t < 40; ++t) {
    Field f = noise_field(g, 1.0, rng);
    auto order = sort_candidates(f, 0.0);
    const CellIndex N = 5 + t * 5;
    const int m = 1 + t % 4;
    const double xi = t % 3;
    auto out = crs_detailed(order, N, m, xi, g);
    CHECK(out.kept.size() <= static_cast<std::size_t>(m));
    CHECK(out.iterations <= N);

    std::vector<CellIndex> seen;
    for (const auto& r : out.kept) {
      CHECK(static_cast<double>(r.size()) >= xi);
      CHECK(intrinsic_diameter(r) <= 2.0 * crs_radius(g, m) + 1e-9);
      seen.insert(seen.end(), r.indices().begin(), r.indices().end());
    }
    for (const auto& r : out.discarded) seen.insert(seen.end(), r.indices().begin(), r.indices().end());
    std::vector<CellIndex> first(order.perm.begin(), order.perm.begin() + N);
    std::sort(seen.begin(), seen.end());
    std::sort(first.begin(), first.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    // everything carved comes from the first N candidates
    CHECK(std::includes(first.begin(), first.end(), seen.begin(), seen.end()));
    if (static_cast<int>(out.kept.size()) < m) CHECK(seen == first);

    auto again = crs_detailed(order, N, m, xi, g);
    CHECK(again.kept == out.kept);
  }
}

TEST_CASE("engine reuse matches fresh runs") {
  std::mt19937_64 rng(13);
  GridSpec g({12, 12});
  Field f = noise_field(g, 1.0, rng);
  auto order = sort_candidates(f, 0.0);
  auto shape = std::make_shared<EuclideanBall>(EuclideanBall::from_squared(crs_radius_squared(2, 144.0, 3)));
  CrsEngine engine(order, g, shape);
  std::vector<std::vector<CellIndex>> kept;
  for (CellIndex N = 1; N <= 144; N += 7) {
    engine.run(N, 3, 2.0, kept);
    auto fresh = crs(order, N, 3, 2.0, g);
    REQUIRE(fresh.size() == kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
      CHECK(std::equal(kept[i].begin(), kept[i].end(), fresh[i].indices().begin(), fresh[i].indices().end()));
    }
  }
}
