#pragma once

#include <cdfo/convex_region.hpp>
#include <cdfo/interpolation_set.hpp>
#include <cdfo/lagrange_basis.hpp>
#include <cdfo/models.hpp>
#include <cdfo/poisedness.hpp>
#include <cdfo/subproblems.hpp>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cdfo {

struct SolverConfig {
  double delta0 = 0.1;
  double delta_max = 10.0;
  double gamma_dec = 0.5;
  double gamma_inc = 2.0;
  double eps_c = 1e-2;
  double mu = 1.0;
  double eta = 0.1;
  double lambda = 10.0;
  /// Number of interpolation points; 0 picks n + 1 (linreg) or (n+1)(n+2)/2 (mfn).
  int points = 0;
  double c1 = 0.1;
  int max_evals = 500;
  double delta_min = 1e-8;
  /// Safety net on the number of iterations that use no evaluations.
  int max_iterations = 100000;
  ModelKind model_kind = ModelKind::MfnQuadratic;
  std::uint64_t seed = 0;
  int refinement_steps = 10;

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate(int dimension) const;
  int resolved_points(int dimension) const;
};

enum class StepKind { Criticality, Successful, ModelImproving, Unsuccessful };

std::string_view to_string(StepKind kind);

struct IterationRow {
  int k = 0;
  double f = 0.0;       ///< f(x_k)
  double delta = 0.0;   ///< Delta_k
  double pi_m = 0.0;
  std::optional<double> rho;
  StepKind kind = StepKind::Criticality;
  int evals = 0;        ///< evaluations used by the end of the iteration
  bool fully_linear = false;

  // Not part of the CSV.
  Vector x;
  double delta_next = 0.0;
  double hessian_norm = 0.0;
  double predicted_reduction = 0.0;
  bool cauchy_satisfied = true;
};

enum class TerminationStatus { BudgetExhausted, RadiusBelowMinimum, IterationLimit, Failed };

std::string_view to_string(TerminationStatus status);

struct RunRecord {
  std::vector<IterationRow> rows;
  TerminationStatus status = TerminationStatus::BudgetExhausted;
  std::string note;
  int evaluations = 0;
};

inline constexpr std::string_view kRunRecordHeader = "k,f,delta,pi_m,rho,step_kind,evals,fully_linear";

/// CSV with the fixed header above; doubles in shortest round-trip form, rho
/// empty when no step was evaluated.
void write_csv(std::ostream& out, const RunRecord& record);

using Objective = std::function<double(const Vector&)>;

struct SolveResult {
  Vector x;
  double f = 0.0;
  RunRecord record;
  InterpolationSet final_set;
  QuadraticModel final_model;
};

/// A hard failure inside solve(); carries the record up to that point.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, RunRecord record)
      : Error(what), record_(std::move(record)) {}
  const RunRecord& record() const noexcept { return record_; }

 private:
  RunRecord record_;
};

/// Caches the poisedness certificate of a model until its set, base point or
/// radius change.
class ModelCertifier {
 public:
  ModelCertifier(const ConvexRegion& region, double lambda, MaximizerOptions options = {})
      : region_(region), lambda_(lambda), options_(options) {}

  const PoisednessCertificate& certify(const LagrangeBasis& basis, const InterpolationSet& set);
  int checks_run() const noexcept { return checks_; }

 private:
  const ConvexRegion& region_;
  double lambda_;
  MaximizerOptions options_;
  std::optional<InterpolationSet> key_;
  PoisednessCertificate cached_;
  int checks_ = 0;
};

/// Lambda-poisedness with beta = 1 around (set.base, set.radius).
PoisednessCertificate certify_model(const LagrangeBasis& basis, const InterpolationSet& set,
                                    const ConvexRegion& region, double lambda,
                                    const MaximizerOptions& options = {});

/// Trust-region minimization of f over the region using only feasible
/// evaluations. An infeasible x0 is projected first (noted in the record).
SolveResult solve(const Objective& f, const ConvexRegion& region, const Vector& x0,
                  const SolverConfig& config);

}  // namespace cdfo
