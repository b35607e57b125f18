#pragma once

#include <cdfo/types.hpp>

#include <algorithm>
#include <vector>

namespace cdfo {

/// Sample points around a base point, with optional function values.
///
/// The base point need not be one of the samples.
struct InterpolationSet {
  Vector base;
  double radius = 1.0;
  std::vector<Vector> points;
  std::vector<double> values;  ///< empty, or one value per point

  int dimension() const noexcept { return static_cast<int>(base.size()); }
  int size() const noexcept { return static_cast<int>(points.size()); }
  bool has_values() const noexcept { return !values.empty(); }

  /// min(radius, 1): the radius of the region where poisedness is measured.
  double sampling_radius() const noexcept { return std::min(radius, 1.0); }

  double max_displacement() const {
    double d = 0.0;
    for (const auto& y : points) d = std::max(d, (y - base).norm());
    return d;
  }

  /// The displacement constant beta = max_t |y_t - x| / min(radius, 1).
  double beta() const { return max_displacement() / sampling_radius(); }
};

/// Throws std::invalid_argument unless points (and values, if present) are consistent.
void validate(const InterpolationSet& set);

/// Largest number of points admitted by quadratic interpolation in dimension n.
constexpr int full_quadratic_size(int n) { return (n + 1) * (n + 2) / 2; }

}  // namespace cdfo
