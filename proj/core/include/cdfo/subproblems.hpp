#pragma once

#include <cdfo/convex_region.hpp>
#include <cdfo/models.hpp>

namespace cdfo {

/// |min g^T d| over { d : |d| <= radius, x + d in C }.
struct CriticalityResult {
  double value = 0.0;
  Vector minimizer;
  int iterations = 0;
  double gap_estimate = 0.0;
};

/// Criticality measure of a linear function over the feasible directions.
///
/// The minimizer lies on the projection arc d(t) = P_C(x - t g) - x, whose
/// length is nondecreasing in t; the point where |d(t)| reaches the radius
/// satisfies the KKT conditions with the ball constraint active. The arc is
/// bracketed and bisected; if it never reaches the radius the ball constraint
/// is inactive and the far end of the arc is returned.
///
/// Throws std::invalid_argument if x is infeasible.
CriticalityResult criticality_measure(const Vector& g, const Vector& x, const ConvexRegion& region,
                                      double radius = 1.0);

struct TrustRegionOptions {
  double c1 = 0.1;
  int cauchy_halvings = 50;
  int refinement_steps = 10;
};

struct TrustRegionStep {
  Vector step;
  double predicted_reduction = 0.0;
  double cauchy_constant_used = 0.1;
  bool satisfied_cauchy = false;
  double criticality = 0.0;     ///< pi^m at x
  double cauchy_target = 0.0;   ///< c1 pi min(pi / (1 + |H|), Delta, 1)
  double hessian_norm = 0.0;
};

/// Approximate minimizer of the model over C ∩ B(x, delta).
///
/// Candidates: the criticality minimizer scaled along its own segment (which
/// alone gives the Cauchy decrease with any c1 <= 1/2), a backtracking search
/// along the projected-gradient path, and a short projected-gradient
/// refinement (plus a Newton candidate when H is positive definite). The
/// best candidate is returned.
TrustRegionStep solve_trust_region_step(const QuadraticModel& model, const Vector& x,
                                        const ConvexRegion& region, double delta,
                                        const TrustRegionOptions& options = {});

}  // namespace cdfo
