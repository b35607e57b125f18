#include <cdfo/poisedness.hpp>
#include <cdfo/solver.hpp>
#include <cdfo/subproblems.hpp>

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

namespace {

using namespace cdfo;

ConvexRegion unit_box(int n) {
  return ConvexRegion::box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0));
}

std::vector<Vector> random_points(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Vector> out;
  for (int i = 0; i < count; ++i) {
    Vector y(n);
    for (int j = 0; j < n; ++j) y(j) = 2.0 * normal(rng);
    out.push_back(y);
  }
  return out;
}

void BM_ProjectBox(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConvexRegion region = unit_box(n);
  const auto ys = random_points(n, 64, 1);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(project(region, ys[i++ % ys.size()]));
}
BENCHMARK(BM_ProjectBox)->Arg(2)->Arg(5)->Arg(20);

void BM_ProjectBoxBall(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConvexRegion region = unit_box(n);
  const auto ys = random_points(n, 64, 2);
  const Vector center = Vector::Constant(n, 0.5);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_onto_ball_intersection(region, center, 0.7, ys[i++ % ys.size()]));
  }
}
BENCHMARK(BM_ProjectBoxBall)->Arg(2)->Arg(5)->Arg(20);

void BM_ProjectDykstra(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<ConvexRegion::Halfspace> hs;
  for (int j = 0; j < n; ++j) {
    Vector a = Vector::Ones(n);
    a(j) = -1.0;
    hs.push_back({a, 1.0});
  }
  const ConvexRegion region =
      ConvexRegion::intersect({ConvexRegion::halfspaces(hs), ConvexRegion::ball(Vector::Zero(n), 1.5)});
  const auto ys = random_points(n, 64, 3);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(project(region, ys[i++ % ys.size()]));
}
BENCHMARK(BM_ProjectDykstra)->Arg(2)->Arg(5);

void BM_Criticality(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConvexRegion region = unit_box(n);
  const Vector x = Vector::Constant(n, 0.9);
  const Vector g = Vector::LinSpaced(n, -1.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(criticality_measure(g, x, region, 1.0));
}
BENCHMARK(BM_Criticality)->Arg(2)->Arg(5)->Arg(20);

void BM_AssembleMfn(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const InterpolationSet set = initial_invertible_set(unit_box(n), Vector::Zero(n), 0.5,
                                                      full_quadratic_size(n))
                                   .set;
  for (auto _ : state) benchmark::DoNotOptimize(LagrangeBasis::build(set, ModelKind::MfnQuadratic));
}
BENCHMARK(BM_AssembleMfn)->Arg(2)->Arg(5)->Arg(10);

void BM_MaximizeLagrange(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConvexRegion region = unit_box(n);
  const Vector x = Vector::Constant(n, 0.8);
  const InterpolationSet set = initial_invertible_set(region, x, 0.5, 2 * n + 1).set;
  const LagrangeBasis basis = LagrangeBasis::build(set, ModelKind::MfnQuadratic);
  for (auto _ : state) {
    benchmark::DoNotOptimize(maximize_abs_lagrange(basis, 1, region, x, 0.5, std::nullopt));
  }
}
BENCHMARK(BM_MaximizeLagrange)->Arg(2)->Arg(5);

void BM_ImproveToPoised(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConvexRegion region = ConvexRegion::ball(Vector::Zero(n), 1.0);
  const Vector x = Vector::Constant(n, 0.5 / std::sqrt(n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        improve_to_poised(std::nullopt, region, x, 0.3, 2 * n + 1, 2.0, ModelKind::MfnQuadratic));
  }
}
BENCHMARK(BM_ImproveToPoised)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_SolveQuadratic(benchmark::State& state) {
  const ConvexRegion region = unit_box(2);
  const Objective f = [](const Vector& y) {
    const double a = y(0) - 0.3, b = y(1) + 0.2;
    return 1.5 * a * a + a * b + b * b;
  };
  SolverConfig config;
  config.model_kind = state.range(0) == 0 ? ModelKind::LinearRegression : ModelKind::MfnQuadratic;
  for (auto _ : state) benchmark::DoNotOptimize(solve(f, region, Vector{{-0.8, 0.7}}, config));
}
BENCHMARK(BM_SolveQuadratic)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
