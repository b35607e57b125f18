#include <cdfo/solver.hpp>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace cdfo {

namespace {

struct BudgetReached {};

class Evaluator {
 public:
  Evaluator(const Objective& f, int budget) : f_(f), budget_(budget) {}

  double operator()(const Vector& y) {
    if (count_ >= budget_) throw BudgetReached{};
    ++count_;
    const double v = f_(y);
    if (!std::isfinite(v)) throw Error(fmt::format("objective returned {} at an evaluated point", v));
    return v;
  }

  int count() const noexcept { return count_; }
  bool exhausted() const noexcept { return count_ >= budget_; }

 private:
  const Objective& f_;
  int budget_;
  int count_ = 0;
};

struct KnownValue {
  Vector point;
  double value;
};

bool same_points(const InterpolationSet& a, const InterpolationSet& b) {
  if (a.size() != b.size() || a.radius != b.radius || a.base != b.base) return false;
  for (int t = 0; t < a.size(); ++t) {
    if (a.points[static_cast<std::size_t>(t)] != b.points[static_cast<std::size_t>(t)]) return false;
  }
  return true;
}

std::size_t farthest_from(const InterpolationSet& set, const Vector& center) {
  std::size_t idx = 0;
  double best = -1.0;
  for (std::size_t t = 0; t < set.points.size(); ++t) {
    const double d = (set.points[t] - center).norm();
    if (d > best) {
      best = d;
      idx = t;
    }
  }
  return idx;
}

class Solver {
 public:
  Solver(const Objective& f, const ConvexRegion& region, const SolverConfig& config)
      : region_(region),
        config_(config),
        eval_(f, config.max_evals),
        certifier_(region, config.lambda, MaximizerOptions{.seed = config.seed}) {
    maximizer_.seed = config.seed;
    step_options_.c1 = config.c1;
    step_options_.refinement_steps = config.refinement_steps;
  }

  SolveResult run(const Vector& x0) {
    const int n = static_cast<int>(x0.size());
    p_ = config_.resolved_points(n);
    x_ = x0;
    if (!contains(region_, x_)) {
      x_ = project(region_, x0).point;
      record_.note = "x0 was infeasible and has been projected onto the region";
    }
    delta_ = config_.delta0;

    try {
      fx_ = eval_(x_);
      repair(delta_, {{x_, fx_}});
      iterate();
    } catch (const BudgetReached&) {
      record_.status = TerminationStatus::BudgetExhausted;
    } catch (const Error& e) {
      record_.status = TerminationStatus::Failed;
      record_.evaluations = eval_.count();
      throw SolverFailure(e.what(), std::move(record_));
    }
    record_.evaluations = eval_.count();

    SolveResult out;
    out.x = x_;
    out.f = fx_;
    out.final_set = set_;
    if (has_model_) {
      out.final_model = model_;
    } else {
      out.final_model = QuadraticModel(fx_, Vector::Zero(n), Matrix::Zero(n, n), x_);
    }
    out.record = std::move(record_);
    return out;
  }

 private:
  void iterate() {
    for (int k = 0;; ++k) {
      if (eval_.exhausted()) {
        record_.status = TerminationStatus::BudgetExhausted;
        return;
      }
      if (delta_ < config_.delta_min) {
        record_.status = TerminationStatus::RadiusBelowMinimum;
        return;
      }
      if (k >= config_.max_iterations) {
        record_.status = TerminationStatus::IterationLimit;
        return;
      }

      IterationRow row;
      row.k = k;
      row.f = fx_;
      row.delta = delta_;
      row.x = x_;
      const CriticalityResult crit = criticality_measure(model_.gradient(x_), x_, region_, 1.0);
      row.pi_m = crit.value;
      const bool fully_linear = certifier_.certify(*basis_, set_).verified;
      row.fully_linear = fully_linear;
      row.hessian_norm = spectral_norm(model_.H);

      if (row.pi_m < config_.eps_c && (row.pi_m < delta_ / config_.mu || !fully_linear)) {
        row.kind = StepKind::Criticality;
        const double next = fully_linear ? config_.gamma_dec * delta_ : delta_;
        repair(next, {});
        delta_ = next;
      } else {
        const TrustRegionStep step = solve_trust_region_step(model_, x_, region_, delta_, step_options_);
        row.predicted_reduction = step.predicted_reduction;
        row.cauchy_satisfied = step.satisfied_cauchy;
        std::optional<KnownValue> trial;
        if (step.predicted_reduction > 0.0) {
          trial = KnownValue{x_ + step.step, 0.0};
          trial->value = eval_(trial->point);
          row.rho = (fx_ - trial->value) / step.predicted_reduction;
        }

        if (row.rho && *row.rho >= config_.eta) {
          row.kind = StepKind::Successful;
          x_ = trial->point;
          fx_ = trial->value;
          delta_ = std::min(config_.gamma_inc * delta_, config_.delta_max);
          if (!replace_farthest(x_, *trial, delta_)) recenter(x_, delta_);
        } else if (!fully_linear) {
          row.kind = StepKind::ModelImproving;
          std::vector<KnownValue> known;
          if (trial) {
            replace_farthest(x_, *trial, delta_);
            known.push_back(*trial);
          }
          repair(delta_, known);
        } else {
          row.kind = StepKind::Unsuccessful;
          delta_ = config_.gamma_dec * delta_;
          if (!trial || !replace_farthest(x_, *trial, delta_)) recenter(x_, delta_);
        }
      }
      row.evals = eval_.count();
      row.delta_next = delta_;
      record_.rows.push_back(std::move(row));
    }
  }

  void rebuild() {
    basis_ = LagrangeBasis::build(set_, config_.model_kind);
    model_ = basis_->fit(set_.values);
    has_model_ = true;
  }

  /// Improve the set around (x, radius), evaluating only new points.
  void repair(double radius, const std::vector<KnownValue>& extra) {
    std::optional<InterpolationSet> current;
    if (set_.size() > 0) current = set_;
    ImprovementResult res =
        improve_to_poised(current, region_, x_, radius, p_, config_.lambda, config_.model_kind, maximizer_);
    InterpolationSet next = std::move(res.set);
    if (!next.has_values() || next.values.size() != next.points.size()) {
      std::vector<KnownValue> known = extra;
      for (std::size_t t = 0; t < set_.points.size() && t < set_.values.size(); ++t) {
        known.push_back({set_.points[t], set_.values[t]});
      }
      next.values.assign(next.points.size(), 0.0);
      for (std::size_t t = 0; t < next.points.size(); ++t) {
        const auto hit = std::find_if(known.begin(), known.end(),
                                      [&](const KnownValue& kv) { return kv.point == next.points[t]; });
        next.values[t] = hit != known.end() ? hit->value : eval_(next.points[t]);
      }
    }
    set_ = std::move(next);
    rebuild();
  }

  bool replace_farthest(const Vector& center, const KnownValue& incoming, double radius) {
    InterpolationSet cand = set_;
    const std::size_t idx = farthest_from(cand, center);
    cand.points[idx] = incoming.point;
    cand.values[idx] = incoming.value;
    cand.base = center;
    cand.radius = radius;
    try {
      auto basis = LagrangeBasis::build(cand, config_.model_kind);
      set_ = std::move(cand);
      basis_ = std::move(basis);
      model_ = basis_->fit(set_.values);
      return true;
    } catch (const DegenerateGeometry&) {
      return false;
    } catch (const SingularGeometry&) {
      return false;
    }
  }

  void recenter(const Vector& center, double radius) {
    set_.base = center;
    set_.radius = radius;
    rebuild();
  }

  const ConvexRegion& region_;
  const SolverConfig& config_;
  Evaluator eval_;
  ModelCertifier certifier_;
  MaximizerOptions maximizer_;
  TrustRegionOptions step_options_;
  RunRecord record_;

  int p_ = 0;
  Vector x_;
  double fx_ = 0.0;
  double delta_ = 0.0;
  InterpolationSet set_;
  std::optional<LagrangeBasis> basis_;
  QuadraticModel model_;
  bool has_model_ = false;
};

}  // namespace

void SolverConfig::validate(int dimension) const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(fmt::format("invalid solver config: {}", what));
  };
  require(dimension >= 1, "dimension must be positive");
  require(delta0 > 0.0, "delta0 must be positive");
  require(delta_max >= delta0, "delta_max must be at least delta0");
  require(gamma_dec > 0.0 && gamma_dec < 1.0, "gamma_dec must lie in (0, 1)");
  require(gamma_inc > 1.0, "gamma_inc must exceed 1");
  require(eps_c > 0.0, "eps_c must be positive");
  require(mu > 0.0, "mu must be positive");
  require(eta > 0.0 && eta < 1.0, "eta must lie in (0, 1)");
  require(lambda > 1.0, "lambda must exceed 1");
  require(c1 > 0.0 && c1 < 1.0, "c1 must lie in (0, 1)");
  require(max_evals >= 1, "max_evals must be positive");
  require(delta_min >= 0.0, "delta_min must be nonnegative");
  require(refinement_steps >= 0, "refinement_steps must be nonnegative");
  const int p = resolved_points(dimension);
  if (p < min_points(model_kind, dimension) || p > full_quadratic_size(dimension)) {
    throw std::invalid_argument(fmt::format("invalid solver config: {} points outside [{}, {}] for {}", p,
                                            min_points(model_kind, dimension),
                                            full_quadratic_size(dimension), to_string(model_kind)));
  }
}

int SolverConfig::resolved_points(int dimension) const {
  if (points > 0) return points;
  return model_kind == ModelKind::LinearRegression ? dimension + 1 : full_quadratic_size(dimension);
}

std::string_view to_string(StepKind kind) {
  switch (kind) {
    case StepKind::Criticality: return "criticality";
    case StepKind::Successful: return "successful";
    case StepKind::ModelImproving: return "model-improving";
    case StepKind::Unsuccessful: return "unsuccessful";
  }
  return "unknown";
}

std::string_view to_string(TerminationStatus status) {
  switch (status) {
    case TerminationStatus::BudgetExhausted: return "budget-exhausted";
    case TerminationStatus::RadiusBelowMinimum: return "radius-below-minimum";
    case TerminationStatus::IterationLimit: return "iteration-limit";
    case TerminationStatus::Failed: return "failed";
  }
  return "unknown";
}

void write_csv(std::ostream& out, const RunRecord& record) {
  out << kRunRecordHeader << '\n';
  for (const auto& row : record.rows) {
    fmt::print(out, "{},{},{},{},{},{},{},{}\n", row.k, row.f, row.delta, row.pi_m,
               row.rho ? fmt::format("{}", *row.rho) : std::string(), to_string(row.kind), row.evals,
               row.fully_linear ? 1 : 0);
  }
}

const PoisednessCertificate& ModelCertifier::certify(const LagrangeBasis& basis,
                                                     const InterpolationSet& set) {
  if (key_ && same_points(*key_, set)) return cached_;
  cached_ = certify_model(basis, set, region_, lambda_, options_);
  key_ = set;
  ++checks_;
  return cached_;
}

PoisednessCertificate certify_model(const LagrangeBasis& basis, const InterpolationSet& set,
                                    const ConvexRegion& region, double lambda,
                                    const MaximizerOptions& options) {
  return check_poisedness(basis, region, set.base, set.radius, lambda, 1.0, options);
}

SolveResult solve(const Objective& f, const ConvexRegion& region, const Vector& x0,
                  const SolverConfig& config) {
  if (x0.size() != region.dimension()) {
    throw std::invalid_argument("solve: x0 and region dimensions differ");
  }
  config.validate(static_cast<int>(x0.size()));
  return Solver(f, region, config).run(x0);
}

}  // namespace cdfo
