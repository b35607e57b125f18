#pragma once

#include <cdfo/interpolation_set.hpp>
#include <cdfo/lagrange.hpp>
#include <cdfo/models.hpp>

#include <span>

namespace cdfo {

/// Least-squares design for a linear regression model and its Lagrange
/// polynomials.
///
/// The design matrix M has rows [1, (y_t - x)^T / s] with s = min(radius, 1).
/// Lagrange values do not depend on s; model coefficients are mapped back to
/// the original coordinates when fitting.
class RegressionBasis {
 public:
  /// Throws DegenerateGeometry if the numerical rank of M is below n + 1.
  static RegressionBasis build(const InterpolationSet& set);

  int dimension() const noexcept { return static_cast<int>(base_.size()); }
  int size() const noexcept { return static_cast<int>(design_.rows()); }
  double scale() const noexcept { return scale_; }
  const Vector& base() const noexcept { return base_; }

  const Matrix& design_matrix() const noexcept { return design_; }
  /// Moore-Penrose pseudoinverse, (n+1) x p. Column t holds (c_t, g_t).
  const Matrix& pseudoinverse() const noexcept { return pinv_; }
  const Vector& singular_values() const noexcept { return singular_values_; }
  int rank() const noexcept { return rank_; }
  double rank_tolerance() const noexcept { return rank_tolerance_; }

  /// All regression Lagrange values at y: (M^+)^T [1; (y - x)/s].
  Vector lagrange_values(const Vector& y) const;
  LagrangePolynomial lagrange_polynomial(int t) const;

  /// det(M^T M) in scaled coordinates; grows by at least l_t(y)^2 when y_t is
  /// replaced by y.
  SignedLogDet gram_log_det() const;

  /// det(M~^T M~) / det(M^T M) after replacing point t by y, from two rank-one
  /// updates: (1 - h_tt)(1 + v^T G^{-1} v) + l_t(y)^2 with G = M^T M.
  double swap_determinant_ratio(int t, const Vector& y) const;

 private:
  Vector base_;
  double scale_ = 1.0;
  Matrix design_;
  Matrix pinv_;
  Vector singular_values_;
  int rank_ = 0;
  double rank_tolerance_ = 0.0;
};

struct RegressionFit {
  LinearModel model;
  double residual = 0.0;  ///< |M [c; g] - f|
};

inline RegressionBasis build_design_matrix(const InterpolationSet& set) {
  return RegressionBasis::build(set);
}

RegressionFit fit_regression_model(const RegressionBasis& basis, std::span<const double> values);

/// l_t(y) for a 0-based index t.
double eval_regression_lagrange(const RegressionBasis& basis, int t, const Vector& y);

}  // namespace cdfo
