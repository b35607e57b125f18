#include <cdfo/fully_linear.hpp>
#include <cdfo/linear_models.hpp>

#include "oracles.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using namespace cdfo;
using namespace cdfo::testing;

ConvexRegion unit_box(int n) { return ConvexRegion::box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0)); }

long double gram_determinant(const InterpolationSet& set) {
  const int n = set.dimension();
  const double s = set.sampling_radius();
  Matrix m(set.size(), n + 1);
  for (int t = 0; t < set.size(); ++t) {
    m(t, 0) = 1.0;
    m.row(t).tail(n) = ((set.points[static_cast<std::size_t>(t)] - set.base) / s).transpose();
  }
  return dense_determinant(LongMatrix((m.transpose() * m).cast<long double>()));
}

TEST(RegressionBasis, InterpolatesWhenSquare) {
  std::mt19937_64 rng(1);
  for (int n : {2, 3, 5}) {
    const InterpolationSet set =
        random_set(unit_box(n), Vector::Zero(n), 0.5, n + 1, ModelKind::LinearRegression, rng);
    const RegressionBasis basis = RegressionBasis::build(set);
    for (int s = 0; s < set.size(); ++s) {
      const Vector l = basis.lagrange_values(set.points[static_cast<std::size_t>(s)]);
      for (int t = 0; t < set.size(); ++t) EXPECT_NEAR(l(t), s == t ? 1.0 : 0.0, 1e-10);
    }
  }
}

TEST(RegressionBasis, ReproducesLinearFunctions) {
  std::mt19937_64 rng(2);
  for (int n : {2, 3, 5}) {
    for (int p = n + 1; p <= 2 * n + 3; ++p) {
      const Vector x = Vector::Constant(n, 0.3);
      const InterpolationSet set = random_set(unit_box(n), x, 0.4, p, ModelKind::LinearRegression, rng);
      const RegressionBasis basis = RegressionBasis::build(set);
      for (int i = 0; i < 20; ++i) {
        const Vector y = sample_feasible(unit_box(n), x, 0.4, rng);
        const Vector l = basis.lagrange_values(y);
        EXPECT_NEAR(l.sum(), 1.0, 1e-10);
        Vector combo = Vector::Zero(n);
        for (int t = 0; t < p; ++t) combo += l(t) * (set.points[static_cast<std::size_t>(t)] - x);
        EXPECT_LE((combo - (y - x)).norm(), 1e-10);
      }
    }
  }
}

TEST(RegressionBasis, FitMatchesNormalEquations) {
  std::mt19937_64 rng(3);
  const int n = 3, p = 9;
  const Vector x{{0.1, -0.2, 0.4}};
  InterpolationSet set = random_set(unit_box(n), x, 0.7, p, ModelKind::LinearRegression, rng);
  std::normal_distribution<double> normal;
  for (int t = 0; t < p; ++t) set.values.push_back(normal(rng));
  const RegressionBasis basis = RegressionBasis::build(set);
  const RegressionFit fit = fit_regression_model(basis, set.values);

  Matrix m(p, n + 1);
  Vector f(p);
  for (int t = 0; t < p; ++t) {
    m(t, 0) = 1.0;
    m.row(t).tail(n) = (set.points[static_cast<std::size_t>(t)] - x).transpose();
    f(t) = set.values[static_cast<std::size_t>(t)];
  }
  const Vector coef = (m.transpose() * m).ldlt().solve(m.transpose() * f);
  EXPECT_NEAR(fit.model.c, coef(0), 1e-10);
  EXPECT_LE((fit.model.g - coef.tail(n)).norm(), 1e-9);
  EXPECT_NEAR(fit.residual, (m * coef - f).norm(), 1e-10);
}

TEST(RegressionBasis, AffineDataIsFitExactly) {
  std::mt19937_64 rng(4);
  const int n = 4;
  const Vector a = Vector::LinSpaced(n, -1.0, 2.0);
  const Vector x = Vector::Zero(n);
  InterpolationSet set = random_set(unit_box(n), x, 2.0, 2 * n, ModelKind::LinearRegression, rng);
  for (const auto& y : set.points) set.values.push_back(3.0 + a.dot(y));
  const RegressionFit fit = fit_regression_model(RegressionBasis::build(set), set.values);
  EXPECT_NEAR(fit.model.c, 3.0, 1e-12);
  EXPECT_LE((fit.model.g - a).norm(), 1e-12);
  EXPECT_LE(fit.residual, 1e-12);
}

TEST(RegressionBasis, LagrangeValuesDoNotDependOnRadius) {
  std::mt19937_64 rng(5);
  InterpolationSet set = random_set(unit_box(2), Vector::Zero(2), 0.8, 5, ModelKind::LinearRegression, rng);
  const Vector y{{0.2, -0.3}};
  const Vector l1 = RegressionBasis::build(set).lagrange_values(y);
  set.radius = 0.05;
  const Vector l2 = RegressionBasis::build(set).lagrange_values(y);
  EXPECT_LE((l1 - l2).norm(), 1e-12);
}

TEST(RegressionBasis, CollinearPointsAreDegenerate) {
  InterpolationSet set;
  set.base = Vector::Zero(2);
  set.radius = 1.0;
  for (double s : {0.0, 0.1, 0.2, 0.3}) set.points.push_back(Vector{{s, 2.0 * s}});
  EXPECT_THROW(RegressionBasis::build(set), DegenerateGeometry);
}

TEST(RegressionBasis, SwapRatioMatchesGramDeterminant) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 3;
    const int p = n + 1 + trial % (n + 2);
    const Vector x = Vector::Zero(n);
    InterpolationSet set = random_set(unit_box(n), x, 0.6, p, ModelKind::LinearRegression, rng);
    const RegressionBasis basis = RegressionBasis::build(set);
    const int t = trial % p;
    const Vector y = sample_feasible(unit_box(n), x, 0.6, rng);
    const double predicted = basis.swap_determinant_ratio(t, y);
    const long double before = gram_determinant(set);
    set.points[static_cast<std::size_t>(t)] = y;
    const long double after = gram_determinant(set);
    const double actual = static_cast<double>(after / before);
    EXPECT_NEAR(predicted, actual, 1e-8 * std::max(1.0, std::abs(actual)));
    const double l = eval_regression_lagrange(basis, t, y);
    EXPECT_GE(actual, l * l * (1.0 - 1e-8));
  }
}

TEST(RegressionConstants, FollowTheClosedForm) {
  const FullyLinearConstants k = regression_constants(5, 2.0, 3.0, 0.5);
  EXPECT_DOUBLE_EQ(k.kappa_eg, 5 * 2.0 * 3.0 * 0.25);
  EXPECT_DOUBLE_EQ(k.kappa_ef, 5 * 2.0 * 3.0 * 0.25 + 1.5);
  EXPECT_EQ(k.kappa_h, 0.0);
}

}  // namespace
