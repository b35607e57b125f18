#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace cdfo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The sample displacements do not span the space (rank-deficient design).
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// The bordered interpolation matrix is numerically singular.
class SingularGeometry : public Error {
 public:
  using Error::Error;
};

/// An iterative projection failed to converge.
class ProjectionError : public Error {
 public:
  ProjectionError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// No feasible point with a nonzero Lagrange value could be found.
class RegionTooThin : public Error {
 public:
  using Error::Error;
};

/// Default feasibility tolerance, scaled with the magnitude of the point.
inline double membership_tolerance(const Vector& y) { return 1e-9 * (1.0 + y.norm()); }

}  // namespace cdfo
