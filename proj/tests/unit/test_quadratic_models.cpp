#include <cdfo/lagrange_basis.hpp>
#include <cdfo/mfn_models.hpp>

#include "oracles.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using namespace cdfo;
using namespace cdfo::testing;

ConvexRegion unit_box(int n) { return ConvexRegion::box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0)); }

struct Draw {
  int n;
  int p;
};

Draw draw_shape(int trial) {
  const int dims[] = {2, 3, 5};
  const int n = dims[trial % 3];
  const int lo = n + 2, hi = full_quadratic_size(n);
  return {n, lo + (trial / 3) % (hi - lo + 1)};
}

// Minimum-Frobenius-norm interpolant by a weighted least-norm KKT solve over
// the monomial coefficients (off-diagonal Hessian entries count twice).
QuadraticModel min_frobenius_oracle(const InterpolationSet& set) {
  const int n = set.dimension(), p = set.size();
  const int nh = n * (n + 1) / 2, nv = 1 + n + nh;
  Matrix a(p, nv);
  Vector w = Vector::Zero(nv);
  for (int t = 0; t < p; ++t) {
    const Vector d = set.points[static_cast<std::size_t>(t)] - set.base;
    int col = 0;
    a(t, col++) = 1.0;
    for (int i = 0; i < n; ++i) a(t, col++) = d(i);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        w(col) = i == j ? 1.0 : 2.0;
        a(t, col++) = i == j ? 0.5 * d(i) * d(i) : d(i) * d(j);
      }
    }
  }
  Matrix kkt = Matrix::Zero(nv + p, nv + p);
  kkt.topLeftCorner(nv, nv) = (2.0 * w).asDiagonal();
  kkt.topRightCorner(nv, p) = a.transpose();
  kkt.bottomLeftCorner(p, nv) = a;
  Vector rhs = Vector::Zero(nv + p);
  for (int t = 0; t < p; ++t) rhs(nv + t) = set.values[static_cast<std::size_t>(t)];
  const Vector z = kkt.fullPivLu().solve(rhs);
  Vector g = z.segment(1, n);
  Matrix h(n, n);
  int col = 1 + n;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) h(i, j) = h(j, i) = z(col++);
  }
  return {z(0), g, h, set.base};
}

TEST(MfnSystem, LagrangePolynomialsSatisfyDeltaProperty) {
  std::mt19937_64 rng(21);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Draw d = draw_shape(trial);
    const Vector x = Vector::Constant(d.n, 0.1 * (trial % 5));
    const InterpolationSet set = random_set(unit_box(d.n), x, 0.5, d.p, ModelKind::MfnQuadratic, rng);
    const MfnSystem sys = MfnSystem::assemble(set);
    for (int s = 0; s < d.p; ++s) {
      for (int t = 0; t < d.p; ++t) {
        const double v = eval_mfn_lagrange(sys, t, set.points[static_cast<std::size_t>(s)]);
        worst = std::max(worst, std::abs(v - (s == t ? 1.0 : 0.0)));
      }
    }
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(MfnSystem, LagrangePolynomialsReproduceLinearFunctions) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const Draw d = draw_shape(trial);
    const Vector x = Vector::Constant(d.n, -0.2);
    const InterpolationSet set = random_set(unit_box(d.n), x, 0.5, d.p, ModelKind::MfnQuadratic, rng);
    const LagrangeBasis basis = LagrangeBasis::build(set, ModelKind::MfnQuadratic);
    for (int i = 0; i < 100; ++i) {
      const Vector y = sample_feasible(unit_box(d.n), x, 0.5, rng);
      const Vector l = basis.values(y);
      EXPECT_NEAR(l.sum(), 1.0, 1e-8);
      Vector combo = Vector::Zero(d.n);
      for (int t = 0; t < d.p; ++t) combo += l(t) * (set.points[static_cast<std::size_t>(t)] - x);
      EXPECT_LE((combo - (y - x)).norm(), 1e-8);
    }
  }
}

TEST(MfnSystem, AffineFunctionsGiveZeroHessian) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const Draw d = draw_shape(trial);
    const Vector x = Vector::Zero(d.n);
    InterpolationSet set = random_set(unit_box(d.n), x, 0.8, d.p, ModelKind::MfnQuadratic, rng);
    const Vector a = Vector::LinSpaced(d.n, -3.0, 5.0);
    for (const auto& y : set.points) set.values.push_back(7.0 + a.dot(y));
    const QuadraticModel m = MfnSystem::assemble(set).fit(set.values);
    EXPECT_LE(m.H.norm(), 1e-8);
    for (int i = 0; i < 50; ++i) {
      const Vector y = sample_feasible(unit_box(d.n), x, 0.8, rng);
      EXPECT_NEAR(m(y), 7.0 + a.dot(y), 1e-8 * (1.0 + std::abs(7.0 + a.dot(y))));
    }
  }
}

TEST(MfnSystem, FullSetReproducesQuadratics) {
  std::mt19937_64 rng(24);
  std::normal_distribution<double> normal;
  for (int n : {2, 3, 4}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Vector x = Vector::Constant(n, 0.25);
      InterpolationSet set =
          random_set(unit_box(n), x, 0.6, full_quadratic_size(n), ModelKind::MfnQuadratic, rng);
      Matrix h(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) h(i, j) = normal(rng);
      }
      h = (0.5 * (h + h.transpose())).eval();
      const Vector g = Vector::LinSpaced(n, 1.0, -1.0);
      auto f = [&](const Vector& y) { return 0.5 + g.dot(y) + 0.5 * y.dot(h * y); };
      for (const auto& y : set.points) set.values.push_back(f(y));
      const QuadraticModel m = MfnSystem::assemble(set).fit(set.values);
      const QuadraticModel oracle = full_quadratic_interpolant(set);
      EXPECT_LE((m.H - h).norm(), 1e-7 * (1.0 + h.norm()));
      EXPECT_LE((m.H - oracle.H).norm(), 1e-7 * (1.0 + h.norm()));
      for (int i = 0; i < 30; ++i) {
        const Vector y = sample_feasible(unit_box(n), x, 0.6, rng);
        EXPECT_NEAR(m(y), f(y), 1e-7 * (1.0 + std::abs(f(y))));
        EXPECT_NEAR(m(y), oracle(y), 1e-7 * (1.0 + std::abs(f(y))));
      }
    }
  }
}

TEST(MfnSystem, FitHasMinimumFrobeniusNorm) {
  std::mt19937_64 rng(25);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 3;
    const int p = n + 2 + trial % (full_quadratic_size(n) - n - 2);
    const Vector x = Vector::Zero(n);
    InterpolationSet set = random_set(unit_box(n), x, 0.7, p, ModelKind::MfnQuadratic, rng);
    for (int t = 0; t < p; ++t) set.values.push_back(normal(rng));
    const QuadraticModel m = MfnSystem::assemble(set).fit(set.values);
    const QuadraticModel oracle = min_frobenius_oracle(set);
    EXPECT_LE((m.H - oracle.H).norm(), 1e-6 * (1.0 + oracle.H.norm()));
    EXPECT_LE((m.g - oracle.g).norm(), 1e-6 * (1.0 + oracle.g.norm()));
    EXPECT_NEAR(m.c, oracle.c, 1e-8);
  }
}

TEST(MfnSystem, KktMatrixMatchesDirectAssembly) {
  std::mt19937_64 rng(26);
  const InterpolationSet set = random_set(unit_box(3), Vector::Zero(3), 2.0, 7, ModelKind::MfnQuadratic, rng);
  // radius >= 1, so no scaling is applied.
  EXPECT_LE((MfnSystem::assemble(set).kkt_matrix() - mfn_kkt_matrix(set)).norm(), 1e-14);
}

TEST(MfnSystem, DeterminantMatchesLongDoubleOracle) {
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 20; ++trial) {
    const Draw d = draw_shape(trial);
    const InterpolationSet set = random_set(unit_box(d.n), Vector::Zero(d.n), 0.5, d.p, ModelKind::MfnQuadratic, rng);
    const MfnSystem sys = MfnSystem::assemble(set);
    const long double oracle = dense_determinant(sys.kkt_matrix());
    EXPECT_EQ(sys.log_det().sign, oracle > 0 ? 1 : -1);
    EXPECT_NEAR(sys.log_det().log_abs, std::log(std::fabs(static_cast<double>(oracle))), 1e-8);
  }
}

TEST(MfnSystem, SwapDeterminantUpdateMatchesRefactorization) {
  std::mt19937_64 rng(28);
  double worst_rel = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Draw d = draw_shape(trial);
    const Vector x = Vector::Constant(d.n, 0.2);
    InterpolationSet set = random_set(unit_box(d.n), x, 0.5, d.p, ModelKind::MfnQuadratic, rng);
    const MfnSystem before = MfnSystem::assemble(set);
    const int t = trial % d.p;
    const Vector y = sample_feasible(unit_box(d.n), x, 0.5, rng);
    const SignedLogDet predicted = det_after_point_swap(before, t, y);
    const double l = eval_mfn_lagrange(before, t, y);
    set.points[static_cast<std::size_t>(t)] = y;
    const Matrix f_new = MfnSystem::assemble(set).kkt_matrix();
    const long double actual = dense_determinant(f_new);
    const long double old = dense_determinant(before.kkt_matrix());
    ASSERT_NE(actual, 0.0L);
    const double rel = std::abs(static_cast<double>(predicted.sign * std::exp(static_cast<long double>(predicted.log_abs)) / actual) - 1.0);
    worst_rel = std::max(worst_rel, rel);
    EXPECT_GE(std::fabs(actual), static_cast<long double>(l * l) * std::fabs(old) * (1.0L - 1e-8L));
  }
  EXPECT_LE(worst_rel, 1e-7);
}

TEST(MfnSystem, LagrangeValuesAreScaleInvariant) {
  std::mt19937_64 rng(29);
  InterpolationSet set = random_set(unit_box(2), Vector::Zero(2), 0.02, 5, ModelKind::MfnQuadratic, rng);
  const Vector y{{0.005, -0.01}};
  const Vector small = MfnSystem::assemble(set).lagrange_values(y);
  set.radius = 1.0;
  const Vector unscaled = MfnSystem::assemble(set).lagrange_values(y);
  EXPECT_LE((small - unscaled).norm(), 1e-8);
}

TEST(MfnSystem, DuplicatePointsAreSingular) {
  InterpolationSet set;
  set.base = Vector::Zero(2);
  set.radius = 1.0;
  set.points = {Vector{{0.0, 0.0}}, Vector{{0.5, 0.0}}, Vector{{0.0, 0.5}}, Vector{{0.5, 0.0}}};
  EXPECT_THROW(MfnSystem::assemble(set), SingularGeometry);
}

TEST(MfnSystem, RejectsPointCountsOutsideRange) {
  InterpolationSet set;
  set.base = Vector::Zero(2);
  set.points = {Vector{{0.0, 0.0}}, Vector{{0.5, 0.0}}, Vector{{0.0, 0.5}}};
  EXPECT_THROW(MfnSystem::assemble(set), std::invalid_argument);
}

TEST(LagrangeBasis, ParsesModelKinds) {
  EXPECT_EQ(parse_model_kind("mfn"), ModelKind::MfnQuadratic);
  EXPECT_EQ(parse_model_kind("linear-regression"), ModelKind::LinearRegression);
  EXPECT_EQ(parse_model_kind("linreg"), ModelKind::LinearRegression);
  EXPECT_THROW(parse_model_kind("cubic"), std::invalid_argument);
}

}  // namespace
