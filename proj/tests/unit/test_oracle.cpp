#include <doctest.h>

#include <random>

#include "dpls/cost.hpp"
#include "dpls/errors.hpp"
#include "dpls/oracle.hpp"
#include "support/fixtures.hpp"

using namespace dpls;
using dpls::testing::noise_field;
using dpls::testing::region_of;

TEST_CASE("constant baseline field stays baseline") {
  GridSpec g({3, 3});
  Field f(g, std::vector<double>(9, 0.0));
  auto o = exact_minimise(f, {.beta = 1.0, .lambda = 0.1, .sigma2 = 1.0, .mu0 = 0.0});
  CHECK(o.best_partition.m() == 0);
  CHECK(o.best_cost.total == 0.0);
}

TEST_CASE("a single extreme cell is isolated") {
  GridSpec g({3, 3});
  std::mt19937_64 rng(1);
  Field base = noise_field(g, 1.0, rng);
  std::vector<double> v(base.values().begin(), base.values().end());
  v[4] += 100.0;
  Field f(g, v);
  auto o = exact_minimise(f, {.beta = 1.0, .lambda = 0.1, .sigma2 = 1.0, .mu0 = 0.0});
  REQUIRE(o.best_partition.m() >= 1);
  bool isolated = false;
  for (const auto& r : o.best_partition.anomalies()) {
    if (r.contains(CellIndex{4})) isolated = r.size() == 1;
  }
  CHECK(isolated);
}

TEST_CASE("enumeration counts each labeling once up to relabeling") {
  GridSpec g({1, 3});
  Field f(g, {1, 2, 3});
  CostParams p{.beta = 1.0, .lambda = 0.0, .sigma2 = 1.0, .mu0 = 0.0};
  // Each cell: baseline or in the anomaly (2^3). With two unordered labels, count
  // the set partitions of each subset into at most 2 blocks: sum_k C(3,k) * S2(k).
  CHECK(exact_minimise(f, p, 0).enumerated == 1);
  CHECK(exact_minimise(f, p, 1).enumerated == 8);
  CHECK(exact_minimise(f, p, 2).enumerated == 1 + 3 * 1 + 3 * 2 + 1 * 4);
}

TEST_CASE("oracle totals agree with penalised_cost") {
  GridSpec g({3, 3});
  std::mt19937_64 rng(2);
  for (int t = 0; t < 30; ++t) {
    Field f = noise_field(g, 3.0, rng);
    CostParams p{.beta = 2.0 + t, .lambda = 0.05 * t, .sigma2 = 1.3, .mu0 = 0.2};
    auto o = exact_minimise(f, p, 2);
    CHECK(penalised_cost(f, o.best_partition, p).total == o.best_cost.total);
  }
}

TEST_CASE("comparative statics") {
  GridSpec g({3, 3});
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    Field f = noise_field(g, 3.0, rng);
    CostParams hi{.beta = 12.0, .lambda = 0.5, .sigma2 = 1.0, .mu0 = 0.0};
    CostParams lo = hi;
    lo.beta = 3.0;
    auto a = exact_minimise(f, hi, 2);
    auto b = exact_minimise(f, lo, 2);
    CHECK(b.best_cost.total <= a.best_cost.total);
    CHECK(b.best_partition.m() >= a.best_partition.m());
    CostParams l0 = hi;
    l0.lambda = 0.0;
    CHECK(exact_minimise(f, l0, 2).best_cost.total <= a.best_cost.total);
  }
}

TEST_CASE("smoothness filter and masks") {
  GridSpec g({1, 5});
  Field f(g, {9, 0, 9, 0, 9});
  CostParams p{.beta = 0.5, .lambda = 0.0, .sigma2 = 1.0, .mu0 = 0.0};
  auto free = exact_minimise(f, p, 1);
  REQUIRE(free.best_partition.m() == 1);
  CHECK(free.best_partition.anomalies()[0].size() == 3);
  auto smooth = exact_minimise(f, p, 1, 1);
  for (const auto& r : smooth.best_partition.anomalies()) CHECK(in_smooth_class(r, 1));

  Field masked(g, {9, 0, 9, 0, 9}, {1, 1, 0, 1, 1});
  auto m = exact_minimise(masked, p, 2);
  for (const auto& r : m.best_partition.anomalies()) CHECK_FALSE(r.contains(CellIndex{2}));
}

TEST_CASE("oracle guards") {
  GridSpec big({5, 4});
  CHECK_THROWS_AS(exact_minimise(Field(big, std::vector<double>(20, 0.0)), {}, 2), InfeasibleError);
  GridSpec g({2, 2});
  CHECK_THROWS_AS(exact_minimise(Field(g, {0, 0, 0, 0}), {}, 3), InputError);
}
