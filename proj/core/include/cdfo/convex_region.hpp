#pragma once

#include <cdfo/types.hpp>

#include <variant>
#include <vector>

namespace cdfo {

/// Closed convex feasible set with nonempty interior.
///
/// A region is an immutable value built from a small algebra: the whole
/// space, an axis-aligned box, a Euclidean ball, a list of halfspaces, or an
/// intersection of other regions. On construction it is flattened into a
/// list of primitive sets (boxes merged), which is what projection works on.
class ConvexRegion {
 public:
  struct WholeSpace {};
  struct Box {
    Vector lower;
    Vector upper;
  };
  struct Ball {
    Vector center;
    double radius = 1.0;
  };
  /// The set { y : normal^T y <= offset }.
  struct Halfspace {
    Vector normal;
    double offset = 0.0;
  };
  struct Halfspaces {
    std::vector<Halfspace> list;
  };
  struct Intersection {
    std::vector<ConvexRegion> members;
  };

  using Kind = std::variant<WholeSpace, Box, Ball, Halfspaces, Intersection>;
  using Primitive = std::variant<Box, Ball, Halfspace>;

  static ConvexRegion whole_space(int dimension);
  static ConvexRegion box(Vector lower, Vector upper);
  static ConvexRegion ball(Vector center, double radius);
  static ConvexRegion halfspace(Vector normal, double offset);
  static ConvexRegion halfspaces(std::vector<Halfspace> list);
  static ConvexRegion intersect(std::vector<ConvexRegion> members);

  int dimension() const noexcept { return dimension_; }
  const Kind& kind() const noexcept { return kind_; }
  const std::vector<Primitive>& primitives() const noexcept { return primitives_; }
  bool is_whole_space() const noexcept { return primitives_.empty(); }

 private:
  ConvexRegion(int dimension, Kind kind);

  int dimension_ = 0;
  Kind kind_;
  std::vector<Primitive> primitives_;
};

struct ProjectionResult {
  Vector point;
  int iterations = 0;
  /// Final sweep residual of the iterative scheme; zero for closed forms.
  double residual = 0.0;
};

/// Euclidean projection of y onto the region.
///
/// Closed forms are used for a single primitive, box-and-ball and
/// ball-and-ball pairs; anything else goes through Dykstra's alternating
/// projections until the sweep residual is at most 1e-10. Throws
/// ProjectionError after 10000 sweeps.
ProjectionResult project(const ConvexRegion& region, const Vector& y);

/// Projection onto region ∩ B(center, radius).
ProjectionResult project_onto_ball_intersection(const ConvexRegion& region, const Vector& center,
                                                double radius, const Vector& y);

/// Euclidean distance from y to the region.
double distance(const ConvexRegion& region, const Vector& y);

bool contains(const ConvexRegion& region, const Vector& y, double tol);

/// Membership with the default tolerance 1e-9 (1 + |y|).
inline bool contains(const ConvexRegion& region, const Vector& y) {
  return contains(region, y, membership_tolerance(y));
}

namespace detail {

/// Projection onto the intersection of the given primitives.
ProjectionResult project_primitives(const std::vector<const ConvexRegion::Primitive*>& sets,
                                    const Vector& y);

}  // namespace detail

}  // namespace cdfo
