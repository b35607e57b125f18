#pragma once

#include <cdfo/convex_region.hpp>
#include <cdfo/interpolation_set.hpp>
#include <cdfo/lagrange_basis.hpp>

#include <cstdint>
#include <functional>

namespace cdfo {

/// Objective with an exact gradient, for validation only.
struct TestFunction {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

struct FullyLinearConstants {
  double kappa_ef = 0.0;
  double kappa_eg = 0.0;
  double kappa_h = 0.0;  ///< Hessian constant, MFN only
};

/// kappa_ef = p Lambda L beta^2 + L/2, kappa_eg = p Lambda L beta^2.
FullyLinearConstants regression_constants(int p, double lambda, double lipschitz, double beta);

/// kappa_H = L p (8 Lambda beta^2 + 36 Lambda beta + 58 Lambda + 6).
double mfn_hessian_constant(int p, double lambda, double lipschitz, double beta);

/// kappa_ef = L/2 + 3/2 p^{3/2} Lambda (L + kappa_H) beta^2 + 1/2 p Lambda^2 kappa_H beta^2,
/// kappa_eg = p^{3/2} Lambda (L + kappa_H) beta^2.
FullyLinearConstants mfn_constants(int p, double lambda, double lipschitz, double beta);

FullyLinearConstants fully_linear_constants(ModelKind kind, int p, double lambda, double lipschitz,
                                            double beta);

struct BoundCheckOptions {
  int samples = 1000;
  std::uint64_t seed = 0;
};

struct BoundReport {
  FullyLinearConstants constants;
  double max_f_error = 0.0;     ///< max |f - m| over B(x, Delta) ∩ C
  double max_g_error = 0.0;     ///< max |(grad f(x) - g)^T d| over |d| <= 1, x + d in C
  double max_rayleigh = 0.0;    ///< max |(y_s - x)^T H (y_t - x)|, MFN only
  double ratio_f = 0.0;
  double ratio_g = 0.0;
  double ratio_h = 0.0;
  int samples_used = 0;

  bool violated() const noexcept { return ratio_f > 1.0 || ratio_g > 1.0 || ratio_h > 1.0; }
};

/// Observed model errors relative to the theoretical fully-linear bounds.
///
/// The function error is sampled uniformly on B(x, Delta) ∩ C. The gradient
/// error is sampled on B(x, 1) ∩ C and also maximized exactly through the
/// criticality measure of ±(grad f(x) - g). Values missing from the set are
/// computed from f. Requires x in C.
BoundReport check_fully_linear_bounds(const InterpolationSet& set, ModelKind kind,
                                      const ConvexRegion& region, const TestFunction& f,
                                      double lipschitz, double lambda, double beta,
                                      const BoundCheckOptions& options = {});

}  // namespace cdfo
