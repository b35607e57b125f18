#pragma once

#include <cdfo/convex_region.hpp>
#include <cdfo/interpolation_set.hpp>
#include <cdfo/lagrange_basis.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cdfo {

struct MaximizerOptions {
  int random_starts = 20;
  int max_iterations = 200;
  /// Stop a start once |P_K(y + r^2 grad) - y| / r falls below this.
  double stationarity_tolerance = 1e-8;
  /// Random starts for polynomial t are drawn from a generator seeded with (seed, t).
  std::uint64_t seed = 0;
};

struct LagrangeMaximum {
  double value = 0.0;  ///< |l_t| at point
  double signed_value = 0.0;
  Vector point;
  int starts_used = 0;
  bool early_exit = false;
};

/// Estimate of max |l_t(y)| over C ∩ B(x, min(delta, 1)).
///
/// Linear polynomials are maximized exactly through the criticality measure.
/// Quadratic ones use projected-gradient ascent on +l_t and -l_t from every
/// interpolation point, the 2n axis points x ± r e_i and a number of random
/// feasible points, all projected into the region. With early_exit_at set,
/// the search stops as soon as some iterate exceeds that value.
LagrangeMaximum maximize_abs_lagrange(const LagrangeBasis& basis, int t, const ConvexRegion& region,
                                      const Vector& x, double delta,
                                      std::optional<double> early_exit_at = std::nullopt,
                                      const MaximizerOptions& options = {});

struct PoisednessCertificate {
  double lambda_observed = 0.0;
  int witness_index = -1;
  Vector witness_point;
  bool verified = false;
  /// All points feasible and within beta min(delta, 1) of x.
  bool geometry_ok = false;
  std::string reason;
  int starts_used = 0;
  /// Best |l_t| found per polynomial; entries after an early stop are NaN.
  std::vector<double> best_values;
};

/// Lambda-poisedness check of the set underlying basis, around (x, delta).
///
/// Stops at the first polynomial found above lambda. Throws
/// std::invalid_argument if lambda < 1.
PoisednessCertificate check_poisedness(const LagrangeBasis& basis, const ConvexRegion& region,
                                       const Vector& x, double delta, double lambda, double beta,
                                       const MaximizerOptions& options = {});

/// As above, building the basis first; a singular or degenerate set is
/// reported as not poised rather than thrown.
PoisednessCertificate check_poisedness(const InterpolationSet& set, ModelKind kind,
                                       const ConvexRegion& region, double lambda, double beta,
                                       const MaximizerOptions& options = {});

/// Structured starting set ignoring C: x, x + r e_i, x - r e_i, then
/// x + (r / sqrt 2)(e_s + e_t) for s < t in lexicographic order.
InterpolationSet structured_initial_set(const Vector& x, double delta, int p);

struct InitialSetResult {
  InterpolationSet set;
  int replacements = 0;
};

/// Invertible feasible set of p points in B(x, min(delta, 1)) ∩ C.
///
/// Infeasible points of the structured set are replaced one at a time by a
/// feasible maximizer of their Lagrange polynomial. Throws RegionTooThin if
/// no replacement with |l_t| > 1e-8 is found.
InitialSetResult initial_invertible_set(const ConvexRegion& region, const Vector& x, double delta,
                                        int p, ModelKind kind = ModelKind::MfnQuadratic,
                                        const MaximizerOptions& options = {});

struct SwapRecord {
  int index = 0;
  Vector old_point;
  Vector new_point;
  double lagrange_value = 0.0;
  SignedLogDet det_before;
  SignedLogDet det_predicted;
  SignedLogDet det_actual;
};

struct ImprovementResult {
  InterpolationSet set;
  PoisednessCertificate certificate;
  std::vector<SwapRecord> swaps;
  bool reinitialized = false;
  int initial_replacements = 0;
};

class ImprovementCapExceeded : public Error {
 public:
  ImprovementCapExceeded(const std::string& what, std::vector<SwapRecord> swaps)
      : Error(what), swaps_(std::move(swaps)) {}
  const std::vector<SwapRecord>& swaps() const noexcept { return swaps_; }

 private:
  std::vector<SwapRecord> swaps_;
};

/// Greedy repair of a set until it is lambda-poised in B(x, min(delta, 1)) ∩ C.
///
/// The set is rebuilt from scratch when absent, of the wrong size, singular,
/// infeasible or not within min(delta, 1) of x. Each sweep maximizes every
/// Lagrange polynomial and swaps in the largest violation. Values are dropped
/// from the output whenever a point changed. Throws ImprovementCapExceeded
/// after 100 p swaps.
ImprovementResult improve_to_poised(const std::optional<InterpolationSet>& set,
                                    const ConvexRegion& region, const Vector& x, double delta,
                                    int p, double lambda, ModelKind kind = ModelKind::MfnQuadratic,
                                    const MaximizerOptions& options = {});

}  // namespace cdfo
