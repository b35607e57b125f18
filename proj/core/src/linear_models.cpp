#include <cdfo/linear_models.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cdfo {

RegressionBasis RegressionBasis::build(const InterpolationSet& set) {
  validate(set);
  const int n = set.dimension();
  const int p = set.size();
  if (p < n + 1) {
    throw std::invalid_argument("regression needs at least n + 1 points (have " +
                                std::to_string(p) + ")");
  }

  RegressionBasis basis;
  basis.base_ = set.base;
  basis.scale_ = set.sampling_radius();
  basis.design_.resize(p, n + 1);
  for (int t = 0; t < p; ++t) {
    basis.design_(t, 0) = 1.0;
    basis.design_.row(t).tail(n) = ((set.points[t] - set.base) / basis.scale_).transpose();
  }

  Eigen::JacobiSVD<Matrix> svd(basis.design_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  basis.singular_values_ = svd.singularValues();
  const double sigma_max = basis.singular_values_.size() ? basis.singular_values_(0) : 0.0;
  basis.rank_tolerance_ =
      std::max(p, n + 1) * std::numeric_limits<double>::epsilon() * sigma_max;
  basis.rank_ = static_cast<int>((basis.singular_values_.array() > basis.rank_tolerance_).count());
  if (basis.rank_ < n + 1) {
    throw DegenerateGeometry("degenerate geometry: design matrix has rank " +
                             std::to_string(basis.rank_) + " < " + std::to_string(n + 1));
  }

  Vector inv_sigma = Vector::Zero(basis.singular_values_.size());
  for (int i = 0; i < basis.rank_; ++i) inv_sigma(i) = 1.0 / basis.singular_values_(i);
  basis.pinv_ = svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().transpose();
  return basis;
}

Vector RegressionBasis::lagrange_values(const Vector& y) const {
  Vector phi(dimension() + 1);
  phi(0) = 1.0;
  phi.tail(dimension()) = (y - base_) / scale_;
  return pinv_.transpose() * phi;
}

LagrangePolynomial RegressionBasis::lagrange_polynomial(int t) const {
  if (t < 0 || t >= size()) throw std::out_of_range("regression Lagrange index out of range");
  LagrangePolynomial poly;
  poly.base = base_;
  poly.scale = scale_;
  poly.c = pinv_(0, t);
  poly.g = pinv_.col(t).tail(dimension());
  return poly;
}

SignedLogDet RegressionBasis::gram_log_det() const {
  SignedLogDet det;
  det.sign = 1;
  det.log_abs = 0.0;
  for (Eigen::Index i = 0; i < singular_values_.size(); ++i) {
    det.log_abs += 2.0 * std::log(singular_values_(i));
  }
  return det;
}

double RegressionBasis::swap_determinant_ratio(int t, const Vector& y) const {
  if (t < 0 || t >= size()) throw std::out_of_range("swap index out of range");
  Vector v(dimension() + 1);
  v(0) = 1.0;
  v.tail(dimension()) = (y - base_) / scale_;
  const Vector u = design_.row(t).transpose();
  // G^{-1} = M^+ (M^+)^T when M has full column rank.
  const Vector pv = pinv_.transpose() * v;
  const Vector pu = pinv_.transpose() * u;
  const double leverage = pu.squaredNorm();
  const double ell = pv.dot(pu);
  return (1.0 - leverage) * (1.0 + pv.squaredNorm()) + ell * ell;
}

RegressionFit fit_regression_model(const RegressionBasis& basis, std::span<const double> values) {
  if (static_cast<int>(values.size()) != basis.size()) {
    throw std::invalid_argument("fit_regression_model: expected " + std::to_string(basis.size()) +
                                " values, got " + std::to_string(values.size()));
  }
  const Eigen::Map<const Vector> f(values.data(), static_cast<Eigen::Index>(values.size()));
  const Vector coeffs = basis.pseudoinverse() * f;
  RegressionFit fit;
  fit.model.c = coeffs(0);
  fit.model.g = coeffs.tail(basis.dimension()) / basis.scale();
  fit.model.base = basis.base();
  fit.residual = (basis.design_matrix() * coeffs - f).norm();
  return fit;
}

double eval_regression_lagrange(const RegressionBasis& basis, int t, const Vector& y) {
  if (t < 0 || t >= basis.size()) throw std::out_of_range("regression Lagrange index out of range");
  return basis.lagrange_values(y)(t);
}

}  // namespace cdfo
