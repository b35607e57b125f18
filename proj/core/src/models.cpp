#include <cdfo/interpolation_set.hpp>
#include <cdfo/models.hpp>

#include <Eigen/Eigenvalues>

#include <stdexcept>
#include <string>

namespace cdfo {

double spectral_norm(const Matrix& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

void validate(const InterpolationSet& set) {
  const int n = set.dimension();
  if (n == 0) throw std::invalid_argument("interpolation set: empty base point");
  if (!(set.radius > 0.0)) throw std::invalid_argument("interpolation set: radius must be positive");
  if (set.points.empty()) throw std::invalid_argument("interpolation set: no points");
  for (std::size_t t = 0; t < set.points.size(); ++t) {
    if (set.points[t].size() != n) {
      throw std::invalid_argument("interpolation set: point " + std::to_string(t) +
                                  " has wrong dimension");
    }
  }
  if (set.has_values() && set.values.size() != set.points.size()) {
    throw std::invalid_argument("interpolation set: values and points differ in length");
  }
}

}  // namespace cdfo
