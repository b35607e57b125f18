#include <cdfo/subproblems.hpp>

#include "oracles.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using namespace cdfo;
using namespace cdfo::testing;

ConvexRegion unit_box(int n) { return ConvexRegion::box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0)); }

Vector random_vector(int n, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

TEST(Criticality, UnconstrainedValueIsGradientNorm) {
  std::mt19937_64 rng(1);
  for (int n : {1, 2, 5, 10}) {
    const ConvexRegion region = ConvexRegion::whole_space(n);
    for (int i = 0; i < 10; ++i) {
      const Vector g = random_vector(n, 3.0, rng);
      const Vector x = random_vector(n, 1.0, rng);
      for (double r : {1.0, 0.3}) {
        EXPECT_NEAR(criticality_measure(g, x, region, r).value, r * g.norm(), 1e-9 * (1.0 + g.norm()));
      }
    }
  }
}

TEST(Criticality, InteriorPointWithLargeRoomMatchesGradientNorm) {
  const ConvexRegion region = ConvexRegion::ball(Vector::Zero(3), 10.0);
  const Vector g{{1.0, -2.0, 2.0}};
  EXPECT_NEAR(criticality_measure(g, Vector::Zero(3), region).value, 3.0, 1e-9);
}

TEST(Criticality, MatchesDenseGridOnBoxesAndBalls) {
  std::mt19937_64 rng(2);
  const std::vector<ConvexRegion> regions = {
      unit_box(2), ConvexRegion::ball(Vector::Zero(2), 1.0),
      ConvexRegion::intersect({unit_box(2), ConvexRegion::ball(Vector{{0.5, 0.0}}, 1.0)}),
      ConvexRegion::box(Vector{{0.0, 0.0}}, Vector{{0.3, 5.0}})};
  for (const auto& region : regions) {
    for (int i = 0; i < 25; ++i) {
      const Vector x = project(region, random_vector(2, 1.5, rng)).point;
      const Vector g = random_vector(2, 1.0, rng);
      const double got = criticality_measure(g, x, region).value;
      const double grid = grid_criticality_2d(g, x, region, 1.0, 400, 1440);
      EXPECT_NEAR(got, grid, 1e-3) << "x=" << x.transpose() << " g=" << g.transpose();
      EXPECT_GE(got, grid - 1e-12);
    }
  }
}

TEST(Criticality, IsPositivelyHomogeneous) {
  std::mt19937_64 rng(3);
  const ConvexRegion region = ConvexRegion::intersect({unit_box(3), ConvexRegion::halfspace(Vector::Ones(3), 0.5)});
  for (int i = 0; i < 20; ++i) {
    const Vector x = project(region, random_vector(3, 2.0, rng)).point;
    const Vector g = random_vector(3, 1.0, rng);
    const double base = criticality_measure(g, x, region).value;
    for (double a : {0.01, 3.0, 250.0}) {
      EXPECT_NEAR(criticality_measure(a * g, x, region).value, a * base, 1e-9 * (1.0 + a * base));
    }
  }
}

TEST(Criticality, VanishesAtStationaryPoints) {
  const ConvexRegion region = unit_box(2);
  EXPECT_NEAR(criticality_measure(Vector{{-1.0, -2.0}}, Vector{{1.0, 1.0}}, region).value, 0.0, 1e-12);
  EXPECT_NEAR(criticality_measure(Vector::Zero(2), Vector{{0.2, 0.1}}, region).value, 0.0, 1e-15);
}

TEST(Criticality, MinimizerIsFeasibleAndAttainsTheValue) {
  std::mt19937_64 rng(4);
  const ConvexRegion region = ConvexRegion::ball(Vector::Zero(4), 1.0);
  for (int i = 0; i < 20; ++i) {
    const Vector x = project(region, random_vector(4, 2.0, rng)).point;
    const Vector g = random_vector(4, 1.0, rng);
    const CriticalityResult res = criticality_measure(g, x, region, 0.5);
    EXPECT_TRUE(contains(region, x + res.minimizer));
    EXPECT_LE(res.minimizer.norm(), 0.5 * (1.0 + 1e-9));
    EXPECT_NEAR(-g.dot(res.minimizer), res.value, 1e-12 * (1.0 + res.value));
  }
}

TEST(Criticality, RejectsInfeasibleBasePoint) {
  EXPECT_THROW(criticality_measure(Vector::Ones(2), Vector{{3.0, 0.0}}, unit_box(2)), std::invalid_argument);
}

QuadraticModel random_model(int n, const Vector& x, std::mt19937_64& rng) {
  Matrix h(n, n);
  std::normal_distribution<double> normal;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) h(i, j) = 2.0 * normal(rng);
  }
  return {normal(rng), random_vector(n, 1.0, rng), h, x};
}

TEST(TrustRegionStep, SatisfiesCauchyDecreaseOrIsFlagged) {
  std::mt19937_64 rng(5);
  int flagged = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 4;
    const ConvexRegion region =
        trial % 2 ? unit_box(n) : ConvexRegion::intersect({unit_box(n), ConvexRegion::ball(Vector::Zero(n), 1.2)});
    const Vector x = project(region, random_vector(n, 1.5, rng)).point;
    const QuadraticModel m = random_model(n, x, rng);
    const double delta = std::pow(10.0, -2.0 + 2.5 * (trial % 7) / 6.0);
    const TrustRegionStep step = solve_trust_region_step(m, x, region, delta);
    const Vector y = x + step.step;
    EXPECT_TRUE(contains(region, y));
    EXPECT_LE(step.step.norm(), delta * (1.0 + 1e-9));
    EXPECT_NEAR(step.predicted_reduction, m(x) - m(y), 1e-10 * (1.0 + std::abs(m(x))));
    const double pi = criticality_measure(m.g, x, region).value;
    const double target = 0.1 * pi * std::min({pi / (1.0 + spectral_norm(m.H)), delta, 1.0});
    EXPECT_NEAR(step.criticality, pi, 1e-9 * (1.0 + pi));
    EXPECT_EQ(step.satisfied_cauchy, step.predicted_reduction >= target * (1.0 - 1e-12));
    flagged += step.satisfied_cauchy ? 0 : 1;
  }
  EXPECT_EQ(flagged, 0);
}

TEST(TrustRegionStep, FindsInteriorMinimumOfConvexModel) {
  const Vector x{{0.0, 0.0}};
  const QuadraticModel m(0.0, Vector{{-1.0, 0.5}}, Matrix{{4.0, 1.0}, {1.0, 3.0}}, x);
  const Vector expected = -m.H.ldlt().solve(m.g);
  const TrustRegionStep step = solve_trust_region_step(m, x, unit_box(2), 1.0);
  EXPECT_LE((step.step - expected).norm(), 1e-10);
}

TEST(TrustRegionStep, StationaryModelGivesZeroStep) {
  const Vector x{{1.0, 1.0}};
  const QuadraticModel m(0.0, Vector{{-1.0, -1.0}}, Matrix::Identity(2, 2), x);
  const TrustRegionStep step = solve_trust_region_step(m, x, unit_box(2), 0.5);
  EXPECT_LE(step.predicted_reduction, 1e-14);
  EXPECT_TRUE(contains(unit_box(2), x + step.step));
}

}  // namespace
