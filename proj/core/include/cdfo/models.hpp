#pragma once

#include <cdfo/types.hpp>

namespace cdfo {

/// Affine model m(y) = c + g^T (y - x).
struct LinearModel {
  double c = 0.0;
  Vector g;
  Vector base;

  double operator()(const Vector& y) const { return c + g.dot(y - base); }
};

/// Quadratic model m(y) = c + g^T (y - x) + 1/2 (y - x)^T H (y - x).
///
/// H is kept exactly symmetric; every constructor path symmetrizes it.
struct QuadraticModel {
  double c = 0.0;
  Vector g;
  Matrix H;
  Vector base;

  QuadraticModel() = default;
  QuadraticModel(double c_, Vector g_, Matrix H_, Vector base_)
      : c(c_), g(std::move(g_)), H(0.5 * (H_ + H_.transpose())), base(std::move(base_)) {}

  static QuadraticModel from_linear(const LinearModel& m) {
    const auto n = m.g.size();
    return {m.c, m.g, Matrix::Zero(n, n), m.base};
  }

  int dimension() const noexcept { return static_cast<int>(g.size()); }

  double operator()(const Vector& y) const {
    const Vector d = y - base;
    return c + g.dot(d) + 0.5 * d.dot(H * d);
  }

  Vector gradient(const Vector& y) const { return g + H * (y - base); }
};

/// Spectral norm of a symmetric matrix.
double spectral_norm(const Matrix& symmetric);

}  // namespace cdfo
