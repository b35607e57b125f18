#pragma once

#include <cdfo/fully_linear.hpp>
#include <cdfo/harness/problems.hpp>
#include <cdfo/solver.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cdfo::harness {

struct BoundSuiteOptions {
  std::string problem;
  std::string region;  ///< empty: the problem's default region
  ModelKind kind = ModelKind::MfnQuadratic;
  int sets = 50;
  int samples = 1000;
  std::uint64_t seed = 0;
  /// Lambda used when building poised sets.
  double lambda = 10.0;
  /// Overrides the registered Lipschitz constant.
  std::optional<double> lipschitz;
  /// Multiplies the Lipschitz constant (0.5 gives the halved negative control).
  double lipschitz_scale = 1.0;
};

struct BoundRow {
  int set = 0;
  std::string origin;  ///< "poised" (improved, beta = 1) or "clustered" (small beta)
  int p = 0;
  double delta = 0.0;
  double beta = 0.0;
  double lambda = 0.0;  ///< observed poisedness constant used in the bounds
  double lipschitz = 0.0;
  BoundReport report;
};

/// Randomized sets around random feasible base points. Even-numbered sets
/// are built by improve_to_poised; odd ones cluster the points within 2% of
/// min(Delta, 1) of x, which gives small beta and tight regression bounds.
std::vector<BoundRow> run_bound_suite(const BoundSuiteOptions& options);

inline constexpr std::string_view kBoundsHeader =
    "problem,model,set,origin,p,delta,beta,lambda,L,kappa_ef,kappa_eg,kappa_h,"
    "max_f_error,max_g_error,max_rayleigh,ratio_f,ratio_g,ratio_h,violated";

void write_bounds_csv(std::ostream& out, const std::string& problem, ModelKind kind,
                      const std::vector<BoundRow>& rows);

struct BenchCell {
  std::string problem;
  ModelKind kind = ModelKind::MfnQuadratic;
  std::uint64_t seed = 0;
  double final_f = 0.0;
  double final_pi_f = 0.0;
  int evaluations = 0;
  std::string status;
  double wall_seconds = 0.0;
};

/// One solve on a registered problem; pi_f uses the true gradient.
BenchCell run_bench_cell(const Problem& problem, const ConvexRegion& region, SolverConfig config);

/// Wall time is written only when requested, so the default output is deterministic.
void write_bench_csv(std::ostream& out, const std::vector<BenchCell>& cells, bool with_timing);

/// First-order stationarity of the problem at x, using its exact gradient.
double true_criticality(const Problem& problem, const ConvexRegion& region, const Vector& x);

}  // namespace cdfo::harness
