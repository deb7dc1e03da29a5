#include <doctest.h>

#include <cmath>
#include <numeric>

#include "dpls/errors.hpp"
#include "dpls/hull.hpp"
#include "dpls/rng.hpp"
#include "dpls/simulate.hpp"

using namespace dpls;

namespace {

double region_mean(const Field& f, const Region& r) {
  double s = 0;
  for (CellIndex c : r.indices()) s += f.value(c);
  return s / static_cast<double>(r.size());
}

void check_layout(const SimSetting& s, const GroundTruth& t) {
  const auto& an = t.partition.anomalies();
  const int sep = s.separation.value_or(std::max(2, static_cast<int>(std::lround(0.1 * s.grid.max_extent()))));
  CellIndex area = 0;
  for (std::size_t i = 0; i < an.size(); ++i) {
    area += static_cast<CellIndex>(an[i].size());
    CHECK(in_smooth_class(an[i], s.smooth_k));
    for (std::size_t j = i + 1; j < an.size(); ++j) {
      CHECK(region_distance(an[i], an[j]) >= static_cast<double>(sep));
    }
  }
  CHECK(area == s.total_area);
  CHECK(t.m_star == static_cast<int>(an.size()));
}

}  // namespace

TEST_CASE("counter rng is stable and well spread") {
  CHECK(draw_u64(1, 0) == draw_u64(1, 0));
  CHECK(draw_u64(1, 0) != draw_u64(2, 0));
  double sum = 0, sq = 0;
  for (int k = 0; k < 20000; ++k) {
    const double u = draw_uniform(42, static_cast<std::uint64_t>(k));
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    const double z = draw_normal(42, static_cast<std::uint64_t>(k));
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / 20000) < 0.05);
  CHECK(std::abs(sq / 20000 - 1.0) < 0.05);
  CounterRng rng(9);
  for (int k = 0; k < 1000; ++k) CHECK(rng.below(7) < 7);
}

TEST_CASE("setting names") {
  CHECK(parse_setting("1") == SettingId::squares);
  CHECK(parse_setting("3d") == SettingId::three_d);
  CHECK(parse_setting("three_d") == SettingId::three_d);
  CHECK(setting_name(SettingId::mixed) == "2");
  CHECK_THROWS_AS(parse_setting("7"), InputError);
  CHECK_THROWS_AS(make_setting(SettingId::squares, 401, 1.0, 10, 1), InputError);
}

TEST_CASE("setting 1 gives five equal squares with the prescribed means") {
  auto s = make_setting(SettingId::squares, 2500, 3.0, 500, 1);
  auto t = make_truth(s);
  REQUIRE(t.m_star == 5);
  std::vector<double> means(t.means.begin() + 1, t.means.end());
  std::sort(means.begin(), means.end());
  CHECK(means == std::vector<double>{3, 6, 6, 9, 9});
  CHECK(t.means[0] == 0.0);
  for (const auto& r : t.partition.anomalies()) {
    CHECK(r.size() == 100);
    CHECK(hull_excess(r) == 0);
    CHECK(intrinsic_diameter(r) == doctest::Approx(9.0 * std::sqrt(2.0)));
  }
  CHECK(t.delta_min == 100);
  check_layout(s, t);
}

TEST_CASE("settings 2, 3 and 3D") {
  for (CellIndex area : {29, 43, 60}) {
    auto s = make_setting(SettingId::mixed, 400, 2.0, area, 5);
    auto t = make_truth(s);
    CHECK(t.m_star == 3);
    check_layout(s, t);
    // the ellipse (mean delta) is convex before jitter; the holed disc and the split
    // region never are
    for (std::size_t j = 0; j < 3; ++j) {
      if (t.means[j + 1] > s.delta) CHECK(hull_excess(t.partition.anomalies()[j]) > 0);
    }
  }
  for (CellIndex area : {18, 26, 42, 177}) {
    auto s = make_setting(SettingId::concave, area > 100 ? 2500 : 400, 2.0, area, 5);
    auto t = make_truth(s);
    CHECK(t.m_star == 2);
    CHECK(t.means[1] == t.means[2]);
    check_layout(s, t);
    for (const auto& r : t.partition.anomalies()) CHECK(hull_excess(r) > 0);
  }
  auto s = make_setting(SettingId::three_d, 1728, 3.0, 59, 5);
  auto t = make_truth(s);
  CHECK(t.m_star == 2);
  CHECK(t.means[1] == 3.0);
  CHECK(t.means[2] == 3.0);
  check_layout(s, t);
}

TEST_CASE("layouts without jitter ignore the seed") {
  auto a = make_setting(SettingId::mixed, 400, 2.0, 60, 1);
  auto b = make_setting(SettingId::mixed, 400, 2.0, 60, 99);
  a.jitter_prob = 0.0;
  b.jitter_prob = 0.0;
  CHECK(make_truth(a).partition.anomalies() == make_truth(b).partition.anomalies());
  a.jitter_prob = 0.25;
  CHECK(make_truth(a).partition.anomalies() == make_truth(a).partition.anomalies());
}

TEST_CASE("sampled fields") {
  auto s = make_setting(SettingId::squares, 2500, 3.0, 500, 1);
  auto t = make_truth(s);
  Field noiseless = sample_field(t, 0.0, 7);
  auto surface = t.mean_surface();
  CHECK(std::equal(surface.begin(), surface.end(), noiseless.values().begin()));

  Field f = sample_field(t, 1.0, 7);
  Field g = sample_field(t, 1.0, 7);
  CHECK(std::equal(f.values().begin(), f.values().end(), g.values().begin()));
  const auto& an = t.partition.anomalies();
  for (std::size_t j = 0; j < an.size(); ++j) {
    CHECK(std::abs(region_mean(f, an[j]) - t.means[j + 1]) < 4.0 / std::sqrt(double(an[j].size())));
  }
  const auto& base = t.partition.baseline();
  const double mb = region_mean(f, base);
  double var = 0;
  for (CellIndex c : base.indices()) var += (f.value(c) - mb) * (f.value(c) - mb);
  var /= static_cast<double>(base.size() - 1);
  CHECK(std::abs(var - 1.0) < 0.1);
  CHECK(std::abs(mb) < 0.1);
}

TEST_CASE("dependent sampler") {
  auto s = make_setting(SettingId::mixed, 400, 2.0, 43, 1);
  auto t = make_truth(s);
  const auto& g = s.grid;

  auto lag1 = [&](double zeta, int reps) {
    DependentSampler ds(g, zeta);
    double num = 0, den = 0;
    for (int b = 0; b < reps; ++b) {
      auto e = ds.errors(static_cast<std::uint64_t>(b + 1));
      for (int i = 1; i <= 20; ++i)
        for (int j = 1; j < 20; ++j) {
          const auto x = e[static_cast<std::size_t>(g.index_of({i, j}))];
          const auto y = e[static_cast<std::size_t>(g.index_of({i, j + 1}))];
          num += x * y;
          den += x * x;
        }
    }
    return num / den;
  };
  CHECK(std::abs(lag1(0.5, 200) - std::exp(-0.5)) <= 0.05);
  CHECK(lag1(0.01, 20) > lag1(3.0, 20));

  // very weak dependence reproduces the independent sampler
  DependentSampler loose(g, 60.0);
  Field a = loose.sample(t, 1.0, 5);
  Field b = sample_field(t, 1.0, 5);
  for (CellIndex c = 0; c < g.size(); ++c) CHECK(a.value(c) == doctest::Approx(b.value(c)).epsilon(1e-9));

  CHECK_THROWS_AS(DependentSampler(GridSpec({65, 65}), 1.0), InfeasibleError);
}
