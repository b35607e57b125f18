#include <cdfo/mfn_models.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace cdfo {

namespace {

constexpr double kPivotThreshold = 1e-12;

// One step of iterative refinement on top of the LU solve.
Matrix refined_solve(const Eigen::PartialPivLU<Matrix>& lu, const Matrix& F, const Matrix& rhs) {
  Matrix x = lu.solve(rhs);
  x += lu.solve(rhs - F * x);
  return x;
}

}  // namespace

MfnSystem MfnSystem::assemble(const InterpolationSet& set) {
  validate(set);
  const int n = set.dimension();
  const int p = set.size();
  if (p < n + 2 || p > full_quadratic_size(n)) {
    throw std::invalid_argument("minimum Frobenius norm interpolation needs n+2 <= p <= (n+1)(n+2)/2"
                                " (n = " + std::to_string(n) + ", p = " + std::to_string(p) + ")");
  }

  MfnSystem sys;
  sys.base_ = set.base;
  sys.scale_ = set.sampling_radius();
  sys.displacements_.resize(n, p);
  for (int t = 0; t < p; ++t) sys.displacements_.col(t) = (set.points[t] - set.base) / sys.scale_;

  const int dim = p + n + 1;
  sys.kkt_ = Matrix::Zero(dim, dim);
  const Matrix gram = sys.displacements_.transpose() * sys.displacements_;
  sys.kkt_.topLeftCorner(p, p) = 0.5 * gram.array().square().matrix();
  sys.kkt_.block(0, p, p, 1).setOnes();
  sys.kkt_.block(0, p + 1, p, n) = sys.displacements_.transpose();
  sys.kkt_.block(p, 0, n + 1, p) = sys.kkt_.block(0, p, p, n + 1).transpose();

  sys.lu_.compute(sys.kkt_);
  const Vector pivots = sys.lu_.matrixLU().diagonal();
  const double largest = sys.kkt_.cwiseAbs().maxCoeff();
  const double smallest_pivot = pivots.cwiseAbs().minCoeff();
  if (!(smallest_pivot >= kPivotThreshold * largest)) {
    throw SingularGeometry("singular geometry: smallest LU pivot " + std::to_string(smallest_pivot) +
                           " below threshold");
  }
  int sign = static_cast<int>(sys.lu_.permutationP().determinant());
  double log_abs = 0.0;
  for (Eigen::Index i = 0; i < pivots.size(); ++i) {
    if (pivots(i) < 0.0) sign = -sign;
    log_abs += std::log(std::abs(pivots(i)));
  }
  if (!std::isfinite(log_abs)) throw SingularGeometry("singular geometry: determinant underflow");
  sys.log_det_ = {sign, log_abs};

  sys.inverse_columns_ = refined_solve(sys.lu_, sys.kkt_, Matrix::Identity(dim, dim).leftCols(p));

  sys.polynomials_.reserve(p);
  for (int t = 0; t < p; ++t) {
    LagrangePolynomial poly;
    poly.base = sys.base_;
    poly.scale = sys.scale_;
    const auto col = sys.inverse_columns_.col(t);
    poly.c = col(p);
    poly.g = col.tail(n);
    const Matrix h = sys.displacements_ * col.head(p).asDiagonal() * sys.displacements_.transpose();
    poly.H = 0.5 * (h + h.transpose());
    sys.polynomials_.push_back(std::move(poly));
  }
  return sys;
}

Vector MfnSystem::phi(const Vector& y) const {
  const int p = size();
  const int n = dimension();
  const Vector z = (y - base_) / scale_;
  Vector out(p + n + 1);
  out.head(p) = 0.5 * (displacements_.transpose() * z).array().square().matrix();
  out(p) = 1.0;
  out.tail(n) = z;
  return out;
}

Vector MfnSystem::lagrange_values(const Vector& y) const {
  return inverse_columns_.transpose() * phi(y);
}

const LagrangePolynomial& MfnSystem::lagrange_polynomial(int t) const {
  if (t < 0 || t >= size()) throw std::out_of_range("MFN Lagrange index out of range");
  return polynomials_[static_cast<std::size_t>(t)];
}

Vector MfnSystem::multipliers(std::span<const double> values) const {
  const int p = size();
  if (static_cast<int>(values.size()) != p) {
    throw std::invalid_argument("fit_mfn_model: expected " + std::to_string(p) + " values, got " +
                                std::to_string(values.size()));
  }
  Vector rhs = Vector::Zero(kkt_.rows());
  for (int t = 0; t < p; ++t) rhs(t) = values[static_cast<std::size_t>(t)];
  const Vector sol = refined_solve(lu_, kkt_, rhs);
  return sol.head(p) / std::pow(scale_, 4);
}

QuadraticModel MfnSystem::fit(std::span<const double> values) const {
  const int p = size();
  const int n = dimension();
  if (static_cast<int>(values.size()) != p) {
    throw std::invalid_argument("fit_mfn_model: expected " + std::to_string(p) + " values, got " +
                                std::to_string(values.size()));
  }
  Vector rhs = Vector::Zero(kkt_.rows());
  for (int t = 0; t < p; ++t) rhs(t) = values[static_cast<std::size_t>(t)];
  const Vector sol = refined_solve(lu_, kkt_, rhs);
  const Matrix h = displacements_ * sol.head(p).asDiagonal() * displacements_.transpose();
  return QuadraticModel(sol(p), sol.tail(n) / scale_, h / (scale_ * scale_), base_);
}

double MfnSystem::swap_determinant_ratio(int t, const Vector& y_new) const {
  if (t < 0 || t >= size()) throw std::out_of_range("swap index out of range");
  const Vector ph = phi(y_new);
  const Vector w = refined_solve(lu_, kkt_, ph);
  const double z2 = ((y_new - base_) / scale_).squaredNorm();
  const double ell = w(t);
  const double alpha = inverse_columns_(t, t);
  const double beta = 0.5 * z2 * z2 - ph.dot(w);
  return ell * ell + alpha * beta;
}

SignedLogDet MfnSystem::det_after_point_swap(int t, const Vector& y_new) const {
  const double ratio = swap_determinant_ratio(t, y_new);
  if (ratio == 0.0) return {};
  return {ratio > 0.0 ? log_det_.sign : -log_det_.sign, log_det_.log_abs + std::log(std::abs(ratio))};
}

double eval_mfn_lagrange(const MfnSystem& system, int t, const Vector& y) {
  if (t < 0 || t >= system.size()) throw std::out_of_range("MFN Lagrange index out of range");
  return system.lagrange_solution(t).dot(system.phi(y));
}

}  // namespace cdfo
