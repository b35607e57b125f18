#pragma once

#include <cdfo/types.hpp>

#include <cmath>
#include <limits>

namespace cdfo {

enum class ModelKind { LinearRegression, MfnQuadratic };

/// Determinant stored as sign and log-magnitude; sign 0 means exactly zero.
struct SignedLogDet {
  int sign = 0;
  double log_abs = -std::numeric_limits<double>::infinity();

  bool is_zero() const noexcept { return sign == 0; }
  double value() const noexcept { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

/// One Lagrange polynomial, stored in scaled coordinates z = (y - x) / scale:
/// l(y) = c + g^T z + 1/2 z^T H z. H is empty for the regression (linear) case.
struct LagrangePolynomial {
  Vector base;
  double scale = 1.0;
  double c = 0.0;
  Vector g;
  Matrix H;

  bool is_linear() const noexcept { return H.size() == 0; }

  double operator()(const Vector& y) const {
    const Vector z = (y - base) / scale;
    double v = c + g.dot(z);
    if (!is_linear()) v += 0.5 * z.dot(H * z);
    return v;
  }

  /// Gradient with respect to y (not z).
  Vector gradient(const Vector& y) const {
    if (is_linear()) return g / scale;
    const Vector z = (y - base) / scale;
    return (g + H * z) / scale;
  }
};

}  // namespace cdfo
