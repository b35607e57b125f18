#pragma once

#include <cdfo/interpolation_set.hpp>
#include <cdfo/lagrange.hpp>
#include <cdfo/models.hpp>

#include <Eigen/LU>

#include <span>
#include <vector>

namespace cdfo {

/// Bordered KKT system of minimum-Frobenius-norm quadratic interpolation,
///
///     F = [ Q   M ]     Q_ij = 1/2 ((y_i - x)^T (y_j - x))^2,
///         [ M^T 0 ]     M    = [1, (y_t - x)^T],
///
/// assembled in displacements divided by s = min(radius, 1) and factorized
/// once with partial-pivoting LU. The first p columns of F^{-1} define the
/// Lagrange polynomials.
class MfnSystem {
 public:
  /// Requires n + 2 <= p <= (n+1)(n+2)/2. Throws SingularGeometry when an LU
  /// pivot falls below 1e-12 times the largest entry of F.
  static MfnSystem assemble(const InterpolationSet& set);

  int dimension() const noexcept { return static_cast<int>(base_.size()); }
  int size() const noexcept { return static_cast<int>(displacements_.cols()); }
  double scale() const noexcept { return scale_; }
  const Vector& base() const noexcept { return base_; }

  /// Scaled displacements, one column per point.
  const Matrix& displacements() const noexcept { return displacements_; }
  const Matrix& kkt_matrix() const noexcept { return kkt_; }
  Matrix q_block() const { return kkt_.topLeftCorner(size(), size()); }
  Matrix m_block() const { return kkt_.topRightCorner(size(), dimension() + 1); }
  SignedLogDet log_det() const noexcept { return log_det_; }

  /// phi(y) = [{1/2 (z^T z_s)^2}_s; 1; z] with z = (y - x)/s.
  Vector phi(const Vector& y) const;
  Vector solve(const Vector& rhs) const { return lu_.solve(rhs); }

  /// All Lagrange values at y, l(y) = (F^{-1} phi(y))_{1..p}.
  Vector lagrange_values(const Vector& y) const;
  const LagrangePolynomial& lagrange_polynomial(int t) const;

  /// Column t of F^{-1}: [lambda_t; c_t; g_t] in scaled coordinates.
  Eigen::Ref<const Vector> lagrange_solution(int t) const { return inverse_columns_.col(t); }

  /// Solve F [lambda; c; g] = [f; 0; 0] and return the model in original
  /// coordinates (g scaled by 1/s, H by 1/s^2).
  QuadraticModel fit(std::span<const double> values) const;

  /// Multipliers lambda of the last fit, in original coordinates (1/s^4).
  Vector multipliers(std::span<const double> values) const;

  /// Predicted det of F after replacing point t by y_new:
  /// det(F~) = (l_t(y)^2 + alpha_t beta_t) det(F), alpha_t = e_t^T F^{-1} e_t,
  /// beta_t = 1/2 |z|^4 - phi^T F^{-1} phi. No refactorization.
  SignedLogDet det_after_point_swap(int t, const Vector& y_new) const;

  /// The ratio det(F~)/det(F) used by det_after_point_swap.
  double swap_determinant_ratio(int t, const Vector& y_new) const;

 private:
  Vector base_;
  double scale_ = 1.0;
  Matrix displacements_;
  Matrix kkt_;
  Eigen::PartialPivLU<Matrix> lu_;
  SignedLogDet log_det_;
  Matrix inverse_columns_;
  std::vector<LagrangePolynomial> polynomials_;
};

inline MfnSystem assemble_system(const InterpolationSet& set) { return MfnSystem::assemble(set); }

inline QuadraticModel fit_mfn_model(const MfnSystem& system, std::span<const double> values) {
  return system.fit(values);
}

/// l_t(y) for a 0-based index t.
double eval_mfn_lagrange(const MfnSystem& system, int t, const Vector& y);

inline SignedLogDet det_after_point_swap(const MfnSystem& system, int t, const Vector& y_new) {
  return system.det_after_point_swap(t, y_new);
}

}  // namespace cdfo
