#pragma once

#include <cdfo/interpolation_set.hpp>
#include <cdfo/lagrange.hpp>
#include <cdfo/linear_models.hpp>
#include <cdfo/mfn_models.hpp>

#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace cdfo {

std::string_view to_string(ModelKind kind);
/// Accepts "linreg"/"linear-regression" and "mfn"/"mfn-quadratic".
ModelKind parse_model_kind(std::string_view text);

/// Smallest point count admitted for a model kind in dimension n.
constexpr int min_points(ModelKind kind, int n) {
  return kind == ModelKind::LinearRegression ? n + 1 : n + 2;
}

/// Lagrange polynomials of either model kind behind one interface.
class LagrangeBasis {
 public:
  /// Throws DegenerateGeometry / SingularGeometry on bad geometry.
  static LagrangeBasis build(const InterpolationSet& set, ModelKind kind);

  ModelKind kind() const noexcept { return kind_; }
  int size() const noexcept { return static_cast<int>(polynomials_.size()); }
  int dimension() const noexcept { return static_cast<int>(base_.size()); }
  const Vector& base() const noexcept { return base_; }
  const std::vector<Vector>& points() const noexcept { return points_; }

  const LagrangePolynomial& polynomial(int t) const { return polynomials_.at(static_cast<std::size_t>(t)); }
  Vector values(const Vector& y) const;

  /// det F for MFN, det(M^T M) for regression; both grow by at least
  /// l_t(y)^2 when point t is replaced by y.
  SignedLogDet log_det() const;
  /// Predicted ratio of log_det() after replacing point t by y.
  double swap_determinant_ratio(int t, const Vector& y) const;

  /// Model through the given values; linear models come back with H = 0.
  QuadraticModel fit(std::span<const double> values) const;

  const RegressionBasis* regression() const noexcept { return std::get_if<RegressionBasis>(&impl_); }
  const MfnSystem* mfn() const noexcept { return std::get_if<MfnSystem>(&impl_); }

 private:
  ModelKind kind_ = ModelKind::MfnQuadratic;
  Vector base_;
  std::vector<Vector> points_;
  std::variant<RegressionBasis, MfnSystem> impl_;
  std::vector<LagrangePolynomial> polynomials_;
};

}  // namespace cdfo
