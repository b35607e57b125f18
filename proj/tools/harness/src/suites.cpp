#include <cdfo/harness/region_spec.hpp>
#include <cdfo/harness/suites.hpp>
#include <cdfo/poisedness.hpp>
#include <cdfo/subproblems.hpp>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <chrono>
#include <limits>
#include <ostream>
#include <random>

namespace cdfo::harness {

namespace {

constexpr double kClusterFraction = 0.02;

Vector random_base_point(const ConvexRegion& region, int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Vector y(n);
  for (int i = 0; i < n; ++i) y(i) = u(rng);
  return project(region, y).point;
}

InterpolationSet clustered_set(const ConvexRegion& region, const Vector& x, double delta, int p,
                               std::mt19937_64& rng) {
  const auto n = x.size();
  const double r = kClusterFraction * std::min(delta, 1.0);
  std::normal_distribution<double> normal;
  InterpolationSet set;
  set.base = x;
  set.radius = delta;
  set.points.push_back(x);
  while (set.size() < p) {
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = normal(rng);
    set.points.push_back(project_onto_ball_intersection(region, x, r, x + r * d.normalized()).point);
  }
  return set;
}

}  // namespace

std::vector<BoundRow> run_bound_suite(const BoundSuiteOptions& options) {
  const Problem problem = make_problem(options.problem);
  const ConvexRegion region =
      parse_region(options.region.empty() ? problem.region : options.region, problem.dimension);
  const int n = problem.dimension;
  const double lipschitz = options.lipschitz.value_or(problem.lipschitz) * options.lipschitz_scale;
  const int p_min = min_points(options.kind, n);
  const int p_max = options.kind == ModelKind::LinearRegression ? 2 * n + 1 : full_quadratic_size(n);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> delta_dist(0.05, 1.0);
  std::uniform_int_distribution<int> p_dist(p_min, p_max);

  std::vector<BoundRow> rows;
  for (int i = 0; i < options.sets; ++i) {
    BoundRow row;
    row.set = i;
    row.lipschitz = lipschitz;
    const Vector x = random_base_point(region, n, rng);
    row.delta = delta_dist(rng);
    row.p = p_dist(rng);
    MaximizerOptions maximizer;
    maximizer.seed = options.seed + static_cast<std::uint64_t>(i);

    InterpolationSet set;
    if (i % 2 == 0) {
      row.origin = "poised";
      const ImprovementResult improved =
          improve_to_poised(std::nullopt, region, x, row.delta, row.p, options.lambda, options.kind, maximizer);
      set = improved.set;
    } else {
      row.origin = "clustered";
      // Degenerate draws are rare; redraw until the basis builds.
      for (int attempt = 0;; ++attempt) {
        set = clustered_set(region, x, row.delta, row.p, rng);
        try {
          (void)LagrangeBasis::build(set, options.kind);
          break;
        } catch (const Error&) {
          if (attempt > 100) throw;
        }
      }
    }
    row.beta = set.beta();
    const LagrangeBasis basis = LagrangeBasis::build(set, options.kind);
    const PoisednessCertificate cert =
        check_poisedness(basis, region, x, row.delta, std::numeric_limits<double>::max(),
                         row.beta * (1.0 + 1e-9), maximizer);
    row.lambda = std::max(1.0, cert.lambda_observed);

    BoundCheckOptions check;
    check.samples = options.samples;
    check.seed = options.seed * 7919 + static_cast<std::uint64_t>(i);
    row.report = check_fully_linear_bounds(set, options.kind, region, problem.function, lipschitz,
                                           row.lambda, row.beta, check);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_bounds_csv(std::ostream& out, const std::string& problem, ModelKind kind,
                      const std::vector<BoundRow>& rows) {
  out << kBoundsHeader << '\n';
  for (const auto& r : rows) {
    const auto& b = r.report;
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", problem,
               to_string(kind), r.set, r.origin, r.p, r.delta, r.beta, r.lambda, r.lipschitz,
               b.constants.kappa_ef, b.constants.kappa_eg, b.constants.kappa_h, b.max_f_error,
               b.max_g_error, b.max_rayleigh, b.ratio_f, b.ratio_g, b.ratio_h, b.violated() ? 1 : 0);
  }
}

double true_criticality(const Problem& problem, const ConvexRegion& region, const Vector& x) {
  return criticality_measure(problem.function.gradient(x), x, region, 1.0).value;
}

BenchCell run_bench_cell(const Problem& problem, const ConvexRegion& region, SolverConfig config) {
  BenchCell cell;
  cell.problem = problem.name;
  cell.kind = config.model_kind;
  cell.seed = config.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const SolveResult res = solve(problem.function.value, region, problem.x0, config);
    cell.final_f = res.f;
    cell.final_pi_f = true_criticality(problem, region, res.x);
    cell.evaluations = res.record.evaluations;
    cell.status = std::string(to_string(res.record.status));
  } catch (const SolverFailure& e) {
    cell.status = "failed";
    cell.evaluations = e.record().evaluations;
    cell.final_f = std::numeric_limits<double>::quiet_NaN();
    cell.final_pi_f = std::numeric_limits<double>::quiet_NaN();
  }
  cell.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return cell;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchCell>& cells, bool with_timing) {
  out << "problem,model,seed,final_f,final_pi_f,evals,status" << (with_timing ? ",wall_seconds" : "") << '\n';
  for (const auto& c : cells) {
    fmt::print(out, "{},{},{},{},{},{},{}", c.problem, to_string(c.kind), c.seed, c.final_f,
               c.final_pi_f, c.evaluations, c.status);
    if (with_timing) fmt::print(out, ",{:.6f}", c.wall_seconds);
    out << '\n';
  }
}

}  // namespace cdfo::harness
