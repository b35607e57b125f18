#include <cdfo/fully_linear.hpp>
#include <cdfo/poisedness.hpp>

#include "oracles.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

namespace {

using namespace cdfo;
using namespace cdfo::testing;

ConvexRegion unit_box(int n) { return ConvexRegion::box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0)); }

TestFunction quadratic(const Matrix& a, const Vector& b) {
  return {[a, b](const Vector& y) { return 0.5 * (y - b).dot(a * (y - b)); },
          [a, b](const Vector& y) { return Vector(a * (y - b)); }};
}

TEST(Constants, MfnFormulas) {
  const int p = 5;
  const double lambda = 2.0, L = 3.0, beta = 0.5;
  const double kh = L * p * (8 * lambda * beta * beta + 36 * lambda * beta + 58 * lambda + 6);
  EXPECT_DOUBLE_EQ(mfn_hessian_constant(p, lambda, L, beta), kh);
  const FullyLinearConstants k = mfn_constants(p, lambda, L, beta);
  EXPECT_DOUBLE_EQ(k.kappa_h, kh);
  EXPECT_NEAR(k.kappa_eg, std::pow(p, 1.5) * lambda * (L + kh) * beta * beta, 1e-9 * k.kappa_eg);
  EXPECT_NEAR(k.kappa_ef,
              L / 2 + 1.5 * std::pow(p, 1.5) * lambda * (L + kh) * beta * beta + 0.5 * p * lambda * lambda * kh * beta * beta,
              1e-9 * k.kappa_ef);
}

TEST(Bounds, AffineObjectiveGivesZeroRatios) {
  const TestFunction affine{[](const Vector& y) { return 1.0 + 2.0 * y(0) - 3.0 * y(1); },
                            [](const Vector&) { return Vector{{2.0, -3.0}}; }};
  for (ModelKind kind : {ModelKind::LinearRegression, ModelKind::MfnQuadratic}) {
    const ImprovementResult res = improve_to_poised(std::nullopt, unit_box(2), Vector{{0.5, -0.5}}, 0.3, 5, 2.0, kind);
    const BoundReport r = check_fully_linear_bounds(res.set, kind, unit_box(2), affine, 0.0, 2.0, 1.0);
    EXPECT_EQ(r.ratio_f, 0.0);
    EXPECT_EQ(r.ratio_g, 0.0);
    EXPECT_EQ(r.ratio_h, 0.0);
    EXPECT_FALSE(r.violated());
  }
}

TEST(Bounds, QuadraticErrorsStayBelowFullyLinearBounds) {
  const Matrix a{{3.0, 1.0}, {1.0, 2.0}};
  const double L = Eigen::SelfAdjointEigenSolver<Matrix>(a).eigenvalues().maxCoeff();
  const TestFunction f = quadratic(a, Vector{{0.3, -0.2}});
  std::mt19937_64 rng(7);
  for (ModelKind kind : {ModelKind::LinearRegression, ModelKind::MfnQuadratic}) {
    for (int i = 0; i < 10; ++i) {
      const Vector x = sample_feasible(unit_box(2), Vector::Zero(2), 1.4, rng);
      const int p = kind == ModelKind::LinearRegression ? 3 + i % 3 : 4 + i % 3;
      const ImprovementResult res = improve_to_poised(std::nullopt, unit_box(2), x, 0.2 + 0.1 * i, p, 5.0, kind);
      const double lambda = std::max(1.0, res.certificate.lambda_observed);
      BoundCheckOptions opts;
      opts.seed = static_cast<std::uint64_t>(i);
      const BoundReport r = check_fully_linear_bounds(res.set, kind, unit_box(2), f, L, lambda, res.set.beta(), opts);
      EXPECT_LE(r.ratio_f, 1.0);
      EXPECT_LE(r.ratio_g, 1.0);
      EXPECT_LE(r.ratio_h, 1.0);
      EXPECT_EQ(r.samples_used, 2 * opts.samples);
    }
  }
}

TEST(Bounds, UnderstatedLipschitzConstantIsFlagged) {
  // Tightly clustered regression set: the bound is dominated by L/2 Delta^2,
  // which the curvature of f attains.
  const Matrix a = 2.0 * Matrix::Identity(2, 2);
  const TestFunction f = quadratic(a, Vector::Zero(2));
  InterpolationSet set;
  set.base = Vector::Zero(2);
  set.radius = 0.5;
  set.points = {Vector{{0.0, 0.0}}, Vector{{1e-3, 0.0}}, Vector{{0.0, 1e-3}}};
  const double beta = set.beta();
  const double lambda = check_poisedness(set, ModelKind::LinearRegression, unit_box(2),
                                         std::numeric_limits<double>::max(), beta * (1.0 + 1e-9))
                            .lambda_observed;
  EXPECT_GT(lambda, 400.0);
  const BoundReport honest =
      check_fully_linear_bounds(set, ModelKind::LinearRegression, unit_box(2), f, 2.0, lambda, beta);
  const BoundReport halved =
      check_fully_linear_bounds(set, ModelKind::LinearRegression, unit_box(2), f, 1.0, lambda, beta);
  EXPECT_FALSE(honest.violated());
  EXPECT_TRUE(halved.violated());
  EXPECT_GT(halved.ratio_f, 1.5);
}

TEST(Bounds, RejectsInfeasibleBaseAndNegativeLipschitz) {
  const TestFunction f = quadratic(Matrix::Identity(2, 2), Vector::Zero(2));
  InterpolationSet set = initial_invertible_set(unit_box(2), Vector::Zero(2), 0.5, 4).set;
  EXPECT_THROW(check_fully_linear_bounds(set, ModelKind::MfnQuadratic, unit_box(2), f, -1.0, 2.0, 1.0),
               std::invalid_argument);
  set.base = Vector{{3.0, 0.0}};
  EXPECT_THROW(check_fully_linear_bounds(set, ModelKind::MfnQuadratic, unit_box(2), f, 1.0, 2.0, 1.0),
               std::invalid_argument);
}

}  // namespace
