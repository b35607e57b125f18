#include <cdfo/harness/io.hpp>
#include <cdfo/harness/problems.hpp>
#include <cdfo/harness/region_spec.hpp>
#include <cdfo/harness/suites.hpp>
#include <cdfo/poisedness.hpp>
#include <cdfo/solver.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cdfo;
using namespace cdfo::harness;

namespace {

constexpr int kOk = 0;
constexpr int kNotPoised = 1;
constexpr int kConfigError = 2;
constexpr int kSolverFailure = 3;

std::string format_point(const Vector& v) {
  std::vector<double> xs(v.data(), v.data() + v.size());
  return fmt::format("[{}]", fmt::join(xs, ", "));
}

fs::path output_dir(const std::string& flag) { return flag.empty() ? default_output_dir() : fs::path(flag); }

// ---- solve ----------------------------------------------------------------

struct SolveArgs {
  std::string problem;
  std::string region;
  std::string model = "mfn";
  std::string out;
  SolverConfig config;
};

void add_solver_flags(CLI::App* cmd, SolverConfig& c) {
  cmd->add_option("--points", c.points, "Interpolation points (0: n+1 for linreg, (n+1)(n+2)/2 for mfn)");
  cmd->add_option("--lambda", c.lambda, "Poisedness constant");
  cmd->add_option("--max-evals", c.max_evals, "Evaluation budget");
  cmd->add_option("--seed", c.seed, "Seed for the Lagrange maximizer");
  cmd->add_option("--delta0", c.delta0);
  cmd->add_option("--delta-max", c.delta_max);
  cmd->add_option("--delta-min", c.delta_min);
  cmd->add_option("--gamma-dec", c.gamma_dec);
  cmd->add_option("--gamma-inc", c.gamma_inc);
  cmd->add_option("--eps-c", c.eps_c, "Criticality threshold");
  cmd->add_option("--mu", c.mu);
  cmd->add_option("--eta", c.eta, "Acceptance threshold on rho");
  cmd->add_option("--c1", c.c1, "Cauchy decrease constant");
  cmd->add_option("--refinement-steps", c.refinement_steps);
  cmd->add_option("--max-iterations", c.max_iterations);
}

int run_solve(SolveArgs& args) {
  const Problem problem = make_problem(args.problem);
  const ConvexRegion region =
      parse_region(args.region.empty() ? problem.region : args.region, problem.dimension);
  args.config.model_kind = parse_model_kind(args.model);
  args.config.validate(problem.dimension);

  const fs::path dir = output_dir(args.out);
  try {
    const SolveResult res = solve(problem.function.value, region, problem.x0, args.config);
    std::ostringstream csv;
    write_csv(csv, res.record);
    write_text(dir / "runrecord.csv", csv.str());
    write_model(dir / "final_model.json", res.final_model);
    write_set(dir / "final_set.json", res.final_set);
    const double pi_m = res.record.rows.empty() ? std::nan("") : res.record.rows.back().pi_m;
    fmt::print("{} {} status={} evals={} iterations={} f={} pi_m={} x={}\n", problem.name,
               to_string(args.config.model_kind), to_string(res.record.status), res.record.evaluations,
               res.record.rows.size(), res.f, pi_m, format_point(res.x));
    if (!res.record.note.empty()) fmt::print("note: {}\n", res.record.note);
    return kOk;
  } catch (const SolverFailure& e) {
    std::ostringstream csv;
    write_csv(csv, e.record());
    write_text(dir / "runrecord.csv", csv.str());
    fmt::print(stderr, "solver failure: {}\n", e.what());
    return kSolverFailure;
  }
}

// ---- poisedness -----------------------------------------------------------

struct PoisednessArgs {
  std::string set_path;
  std::string region;
  double lambda = 10.0;
  std::string model = "auto";
  double beta = 1.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string swap_log;
};

ModelKind resolve_kind(const std::string& model, const InterpolationSet& set) {
  if (model != "auto") return parse_model_kind(model);
  return set.size() >= min_points(ModelKind::MfnQuadratic, set.dimension()) ? ModelKind::MfnQuadratic
                                                                           : ModelKind::LinearRegression;
}

void print_certificate(const PoisednessCertificate& cert) {
  fmt::print("lambda_observed={}\n", cert.lambda_observed);
  fmt::print("verified={}\n", cert.verified ? "true" : "false");
  fmt::print("geometry_ok={}\n", cert.geometry_ok ? "true" : "false");
  if (cert.witness_index >= 0) {
    fmt::print("witness_index={}\n", cert.witness_index);
    fmt::print("witness_point={}\n", format_point(cert.witness_point));
  }
  if (!cert.reason.empty()) fmt::print("reason={}\n", cert.reason);
}

int run_check(const PoisednessArgs& args) {
  const InterpolationSet set = read_set(args.set_path);
  const ConvexRegion region = parse_region(args.region, set.dimension());
  MaximizerOptions options;
  options.seed = args.seed;
  const PoisednessCertificate cert =
      check_poisedness(set, resolve_kind(args.model, set), region, args.lambda, args.beta, options);
  print_certificate(cert);
  return cert.verified ? kOk : kNotPoised;
}

int run_improve(const PoisednessArgs& args) {
  InterpolationSet set = read_set(args.set_path);
  const ConvexRegion region = parse_region(args.region, set.dimension());
  const ModelKind kind = resolve_kind(args.model, set);
  MaximizerOptions options;
  options.seed = args.seed;
  const Vector x = set.base;
  const double delta = set.radius;
  const int p = set.size();
  const ImprovementResult res = improve_to_poised(std::move(set), region, x, delta, p, args.lambda, kind, options);

  const fs::path out = args.out.empty() ? default_output_dir() / "improved_set.json" : fs::path(args.out);
  fs::path log = args.swap_log;
  if (log.empty()) log = out.parent_path() / (out.stem().string() + ".swaps.json");
  write_set(out, res.set);
  write_swap_log(log, res.swaps);
  fmt::print("swaps={} reinitialized={}\n", res.swaps.size(), res.reinitialized ? "true" : "false");
  print_certificate(res.certificate);
  fmt::print("set={}\nswap_log={}\n", out.string(), log.string());
  return res.certificate.verified ? kOk : kNotPoised;
}

// ---- bounds ---------------------------------------------------------------

struct BoundsArgs {
  BoundSuiteOptions suite;
  std::string model = "mfn";
  std::optional<double> lipschitz;
  std::string out;
};

int run_bounds(BoundsArgs& args) {
  args.suite.kind = parse_model_kind(args.model);
  args.suite.lipschitz = args.lipschitz;
  const auto rows = run_bound_suite(args.suite);
  std::ostringstream csv;
  write_bounds_csv(csv, args.suite.problem, args.suite.kind, rows);
  const fs::path out = args.out.empty() ? default_output_dir() / "bounds.csv" : fs::path(args.out);
  write_text(out, csv.str());

  int violations = 0;
  double worst_f = 0.0, worst_g = 0.0, worst_h = 0.0;
  for (const auto& r : rows) {
    violations += r.report.violated() ? 1 : 0;
    worst_f = std::max(worst_f, r.report.ratio_f);
    worst_g = std::max(worst_g, r.report.ratio_g);
    worst_h = std::max(worst_h, r.report.ratio_h);
  }
  fmt::print("{} {} sets={} violations={} max_ratio_f={} max_ratio_g={} max_ratio_h={} report={}\n",
             args.suite.problem, to_string(args.suite.kind), rows.size(), violations, worst_f, worst_g,
             worst_h, out.string());
  return violations == 0 ? kOk : kNotPoised;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
  std::vector<std::string> problems;
  std::vector<std::string> models{"linreg", "mfn"};
  std::vector<std::uint64_t> seeds{0};
  std::string out;
  bool timing = false;
  int jobs = 1;
  SolverConfig config;
};

int run_bench(BenchArgs& args) {
  if (args.problems.empty()) args.problems = problem_names();
  struct Cell {
    Problem problem;
    ConvexRegion region;
    SolverConfig config;
  };
  std::vector<Cell> cells;
  for (const auto& name : args.problems) {
    Problem problem = make_problem(name);
    ConvexRegion region = parse_region(problem.region, problem.dimension);
    for (const auto& model : args.models) {
      for (const auto seed : args.seeds) {
        SolverConfig c = args.config;
        c.model_kind = parse_model_kind(model);
        c.seed = seed;
        c.validate(problem.dimension);
        cells.push_back({problem, region, c});
      }
    }
  }

  std::vector<BenchCell> results(cells.size());
  const std::size_t jobs = static_cast<std::size_t>(std::max(1, args.jobs));
  for (std::size_t start = 0; start < cells.size(); start += jobs) {
    std::vector<std::future<BenchCell>> running;
    for (std::size_t i = start; i < std::min(cells.size(), start + jobs); ++i) {
      running.push_back(std::async(std::launch::async, [&cell = cells[i]] {
        return run_bench_cell(cell.problem, cell.region, cell.config);
      }));
    }
    for (std::size_t i = 0; i < running.size(); ++i) results[start + i] = running[i].get();
  }

  std::ostringstream csv;
  write_bench_csv(csv, results, args.timing);
  if (args.out.empty()) {
    std::cout << csv.str();
  } else {
    write_text(args.out, csv.str());
    fmt::print("{} cells written to {}\n", results.size(), args.out);
  }
  return kOk;
}

/// Fills options of cmd that were not given on the command line from a
/// key = value file. CLI11 only reads config files on the root app, so
/// subcommands load theirs here.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  if (!fs::exists(path)) throw std::invalid_argument(fmt::format("config file {} not found", path));
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty()) {
      throw std::invalid_argument(fmt::format("config file {}: sections are not supported", path));
    }
    CLI::Option* opt = cmd->get_option_no_throw("--" + item.name);
    if (opt == nullptr || item.name == "config") {
      throw std::invalid_argument(fmt::format("config file {}: unknown key '{}'", path, item.name));
    }
    if (opt->count() > 0) continue;  // the command line wins
    for (const auto& value : item.inputs) opt->add_result(value);
    opt->run_callback();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derivative-free optimization over convex sets"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Run the trust-region solver on a registered problem");
  std::string solve_config;
  solve_cmd->add_option("--config", solve_config, "key = value file; command-line flags take precedence");
  solve_cmd->add_option("--problem", solve_args.problem, "Registered problem name (required)");
  solve_cmd->add_option("--region", solve_args.region, "Region spec (default: the problem's own)");
  solve_cmd->add_option("--model", solve_args.model, "linreg or mfn");
  solve_cmd->add_option("--out", solve_args.out, "Output directory (default: $CDFO_OUT_DIR or .)");
  add_solver_flags(solve_cmd, solve_args.config);

  PoisednessArgs pargs;
  auto* poised_cmd = app.add_subcommand("poisedness", "Check or improve the geometry of a point set");
  poised_cmd->require_subcommand(1);
  auto add_common = [&pargs](CLI::App* cmd) {
    cmd->add_option("--set", pargs.set_path, "Point set JSON")->required();
    cmd->add_option("--region", pargs.region, "Region spec")->required();
    cmd->add_option("--lambda", pargs.lambda, "Poisedness constant (>= 1)");
    cmd->add_option("--model", pargs.model, "linreg, mfn or auto");
    cmd->add_option("--seed", pargs.seed, "Seed for random maximizer starts");
  };
  auto* check_cmd = poised_cmd->add_subcommand("check", "Certify lambda-poisedness");
  add_common(check_cmd);
  check_cmd->add_option("--beta", pargs.beta, "Radius multiplier for the geometry test");
  auto* improve_cmd = poised_cmd->add_subcommand("improve", "Swap points until lambda-poised");
  add_common(improve_cmd);
  improve_cmd->add_option("--out", pargs.out, "Repaired set JSON");
  improve_cmd->add_option("--swap-log", pargs.swap_log, "Swap log JSON (default: <out stem>.swaps.json)");

  BoundsArgs bargs;
  auto* bounds_cmd = app.add_subcommand("bounds", "Sample model errors against the fully-linear bounds");
  bounds_cmd->add_option("--problem", bargs.suite.problem, "Registered problem name")->required();
  bounds_cmd->add_option("--region", bargs.suite.region, "Region spec (default: the problem's own)");
  bounds_cmd->add_option("--model", bargs.model, "linreg or mfn");
  bounds_cmd->add_option("--sets", bargs.suite.sets, "Number of random sets");
  bounds_cmd->add_option("--samples", bargs.suite.samples, "Samples per set");
  bounds_cmd->add_option("--seed", bargs.suite.seed);
  bounds_cmd->add_option("--lambda", bargs.suite.lambda, "Lambda used to build poised sets");
  bounds_cmd->add_option("--lipschitz", bargs.lipschitz, "Override the gradient Lipschitz constant");
  bounds_cmd->add_option("--lipschitz-scale", bargs.suite.lipschitz_scale, "Multiply the Lipschitz constant");
  bounds_cmd->add_option("--out", bargs.out, "Report CSV (default: $CDFO_OUT_DIR/bounds.csv)");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Solve a grid of problems, models and seeds");
  std::string bench_config;
  bench_cmd->add_option("--config", bench_config, "key = value file; command-line flags take precedence");
  bench_cmd->add_option("--problems", bench_args.problems, "Problems (default: all)")->delimiter(',');
  bench_cmd->add_option("--models", bench_args.models, "Model kinds")->delimiter(',');
  bench_cmd->add_option("--seeds", bench_args.seeds, "Seeds")->delimiter(',');
  bench_cmd->add_option("--out", bench_args.out, "Report CSV (default: stdout)");
  bench_cmd->add_flag("--timing", bench_args.timing, "Add a wall_seconds column");
  bench_cmd->add_option("--jobs", bench_args.jobs, "Cells solved concurrently");
  add_solver_flags(bench_cmd, bench_args.config);

  auto* problems_cmd = app.add_subcommand("problems", "List registered problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*solve_cmd) {
      apply_config_file(solve_cmd, solve_config);
      if (solve_args.problem.empty()) throw std::invalid_argument("--problem is required");
      return run_solve(solve_args);
    }
    if (*check_cmd) return run_check(pargs);
    if (*improve_cmd) return run_improve(pargs);
    if (*bounds_cmd) return run_bounds(bargs);
    if (*bench_cmd) {
      apply_config_file(bench_cmd, bench_config);
      return run_bench(bench_args);
    }
    if (*problems_cmd) {
      for (const auto& name : problem_names()) {
        const Problem p = make_problem(name);
        fmt::print("{:<12} n={} objective={} region={}\n", p.name, p.dimension, p.objective, p.region);
      }
      return kOk;
    }
  } catch (const SolverFailure& e) {
    fmt::print(stderr, "solver failure: {}\n", e.what());
    return kSolverFailure;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kConfigError;
  }
  return kConfigError;
}
