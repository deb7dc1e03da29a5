#include <doctest.h>

#include <cmath>
#include <random>

#include "dpls/cost.hpp"
#include "dpls/errors.hpp"
#include "dpls/hull.hpp"
#include "support/fixtures.hpp"

using namespace dpls;
using dpls::testing::noise_field;
using dpls::testing::random_region;
using dpls::testing::region_of;

TEST_CASE("regional loss examples") {
  GridSpec g({1, 3});
  Field f(g, {1, 2, 3});
  Region all = full_region(g);
  CHECK(regional_loss(f, Region(g), 2.0, 1.0) == 0.0);
  CHECK(regional_loss(f, all, 2.0, 1.0) == 2.0);
  CHECK(regional_loss(f, all, 2.0, 4.0) == 0.5);
  CHECK(regional_loss(Field(g, {3, 3, 3}), all, 3.0, 1.0) == 0.0);
  CHECK_THROWS_AS(regional_loss(f, all, 2.0, 0.0), InputError);
}

TEST_CASE("fitted loss examples") {
  GridSpec g({1, 3});
  auto fl = fitted_loss(Field(g, {1, 2, 3}), full_region(g), 1.0);
  CHECK(fl.mu_hat == 2.0);
  CHECK(fl.loss == 2.0);
  CHECK(fitted_loss(Field(g, {7, 7, 7}), full_region(g), 1.0).loss == 0.0);
  CHECK_THROWS_AS(fitted_loss(Field(g, {1, 2, 3}), Region(g), 1.0), InputError);
}

TEST_CASE("masked cells take no part in losses") {
  GridSpec g({1, 4});
  Field f(g, {1, 100, 3, 5}, {1, 0, 1, 1});
  auto fl = fitted_loss(f, full_region(g), 1.0);
  CHECK(fl.mu_hat == 3.0);
  CHECK(fl.loss == 8.0);
}

TEST_CASE("fitted mean is optimal") {
  std::mt19937_64 rng(2);
  GridSpec g({8, 8});
  for (int t = 0; t < 100; ++t) {
    Field f = noise_field(g, 2.0, rng);
    Region r = random_region(g, 0.3, rng);
    auto fl = fitted_loss(f, r, 1.5);
    CHECK(fl.loss <= regional_loss(f, r, 0.0, 1.5) + 1e-12);
    CHECK(fl.loss <= regional_loss(f, r, fl.mu_hat + 0.01 * (t - 50), 1.5) + 1e-12);
  }
}

TEST_CASE("penalised cost examples") {
  GridSpec g({5, 5});
  std::mt19937_64 rng(4);
  Field f = noise_field(g, 1.0, rng);
  CostParams p{.beta = 3.0, .lambda = 0.5, .sigma2 = 1.0, .mu0 = 0.0};

  auto null = penalised_cost(f, Partition::from_anomalies(g, {}), p);
  CHECK(null.total == null.loss_baseline);
  CHECK(null.loss_baseline == regional_loss(f, full_region(g), 0.0, 1.0));

  Region sq = region_of(g, {{2, 2}, {2, 3}, {3, 2}, {3, 3}});
  auto one = penalised_cost(f, Partition::from_anomalies(g, {sq}), p);
  CHECK(one.penalty_hull == 2.0);
  CHECK(one.penalty_count == 3.0);

  // lambda = 0 is the plain L0 objective
  CostParams l0 = p;
  l0.lambda = 0.0;
  auto c0 = penalised_cost(f, Partition::from_anomalies(g, {sq}), l0);
  CHECK(c0.total == doctest::Approx(c0.loss_baseline + c0.loss_anomalies + 3.0));
}

TEST_CASE("cost decomposes when a region leaves the baseline") {
  std::mt19937_64 rng(8);
  GridSpec g({7, 7});
  CostParams p{.beta = 2.5, .lambda = 0.3, .sigma2 = 1.7, .mu0 = 0.4};
  for (int t = 0; t < 50; ++t) {
    Field f = noise_field(g, 1.0, rng);
    Region a = random_region(g, 0.15, rng);
    Region b = subtract(random_region(g, 0.15, rng), a);
    if (b.empty()) continue;
    auto before = penalised_cost(f, Partition::from_anomalies(g, {a}), p);
    auto after = penalised_cost(f, Partition::from_anomalies(g, {a, b}), p);
    const double expect = p.beta + p.lambda * static_cast<double>(hull_cardinality(b)) +
                          fitted_loss(f, b, p.sigma2).loss - regional_loss(f, b, p.mu0, p.sigma2);
    CHECK(after.total - before.total == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("sigma2 scaling divides the losses only") {
  std::mt19937_64 rng(9);
  GridSpec g({6, 6});
  Field f = noise_field(g, 1.0, rng);
  Region a = random_region(g, 0.2, rng);
  CostParams p{.beta = 2.0, .lambda = 0.1, .sigma2 = 1.0, .mu0 = 0.0};
  CostParams q = p;
  q.sigma2 = 4.0;
  auto part = Partition::from_anomalies(g, {a});
  auto x = penalised_cost(f, part, p);
  auto y = penalised_cost(f, part, q);
  CHECK(y.loss_baseline == doctest::Approx(x.loss_baseline / 4.0));
  CHECK(y.loss_anomalies == doctest::Approx(x.loss_anomalies / 4.0));
  CHECK(y.penalty_count == x.penalty_count);
  CHECK(y.penalty_hull == x.penalty_hull);
}

TEST_CASE("robust baseline") {
  GridSpec g({1, 5});
  // median is robust to the outlier; the scale collapses but the location is kept
  try {
    robust_baseline(Field(g, {0, 0, 0, 0, 100}));
    FAIL("expected DegenerateScaleError");
  } catch (const DegenerateScaleError& e) {
    CHECK(e.mu0() == 0.0);
  }
  CHECK(robust_baseline(Field(g, {0, -1, 1, 0, 100})).mu0 == 0.0);
  try {
    robust_baseline(Field(g, {2, 2, 2, 2, 2}));
    FAIL("expected DegenerateScaleError");
  } catch (const DegenerateScaleError& e) {
    CHECK(e.mu0() == 2.0);
  }
  std::mt19937_64 rng(10);
  auto rb = robust_baseline(noise_field(GridSpec({100, 100}), 1.0, rng));
  CHECK(rb.sigma >= 0.9);
  CHECK(rb.sigma <= 1.1);
  CHECK(std::abs(rb.mu0) < 0.05);
}

TEST_CASE("theoretical penalties") {
  auto p = theoretical_penalties(GridSpec({50, 50}), 1.0, 1.0, 1.0);
  CHECK(p.beta == doctest::Approx(50.0 * std::log(2500.0)));
  CHECK(p.lambda / p.beta == doctest::Approx(1.0 / 2500.0));
  auto q = theoretical_penalties(GridSpec({10, 40}), 2.0, 3.0, 1.0);
  CHECK(q.beta == doctest::Approx(2.0 * 400.0 / 40.0 * std::log(400.0)));
  CHECK(q.lambda == doctest::Approx(3.0 / 40.0 * std::log(400.0)));
  CHECK_THROWS_AS(theoretical_penalties(GridSpec({50, 50}), 1.0, 1.0, 0.5), InfeasibleError);
  CHECK_THROWS_AS(theoretical_penalties(GridSpec({50, 50}), 1.0, 1.0, 2.0), InfeasibleError);
  CHECK_NOTHROW(theoretical_penalties(GridSpec({50, 50}), 1.0, 1.0, 1.4));
}
