#include <cdfo/fully_linear.hpp>
#include <cdfo/subproblems.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace cdfo {

namespace {

/// Uniform samples on B(x, r) ∩ C by rejection; points that never land in C
/// are projected instead.
std::vector<Vector> sample_feasible_ball(const ConvexRegion& region, const Vector& x, double r,
                                         int count, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const auto n = x.size();
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Vector y(n);
    bool hit = false;
    for (int attempt = 0; attempt < 200 && !hit; ++attempt) {
      Vector dir(n);
      for (Eigen::Index i = 0; i < n; ++i) dir(i) = normal(rng);
      y = x + dir.normalized() * (r * std::pow(uniform(rng), 1.0 / static_cast<double>(n)));
      hit = contains(region, y);
    }
    if (!hit) y = project_onto_ball_intersection(region, x, r, y).point;
    out.push_back(std::move(y));
  }
  return out;
}

}  // namespace

FullyLinearConstants regression_constants(int p, double lambda, double lipschitz, double beta) {
  FullyLinearConstants k;
  k.kappa_eg = p * lambda * lipschitz * beta * beta;
  k.kappa_ef = k.kappa_eg + 0.5 * lipschitz;
  return k;
}

double mfn_hessian_constant(int p, double lambda, double lipschitz, double beta) {
  return lipschitz * p * (8.0 * lambda * beta * beta + 36.0 * lambda * beta + 58.0 * lambda + 6.0);
}

FullyLinearConstants mfn_constants(int p, double lambda, double lipschitz, double beta) {
  FullyLinearConstants k;
  k.kappa_h = mfn_hessian_constant(p, lambda, lipschitz, beta);
  const double p32 = std::pow(static_cast<double>(p), 1.5);
  const double b2 = beta * beta;
  k.kappa_eg = p32 * lambda * (lipschitz + k.kappa_h) * b2;
  k.kappa_ef = 0.5 * lipschitz + 1.5 * p32 * lambda * (lipschitz + k.kappa_h) * b2 +
               0.5 * p * lambda * lambda * k.kappa_h * b2;
  return k;
}

FullyLinearConstants fully_linear_constants(ModelKind kind, int p, double lambda, double lipschitz,
                                            double beta) {
  return kind == ModelKind::LinearRegression ? regression_constants(p, lambda, lipschitz, beta)
                                             : mfn_constants(p, lambda, lipschitz, beta);
}

BoundReport check_fully_linear_bounds(const InterpolationSet& set, ModelKind kind,
                                      const ConvexRegion& region, const TestFunction& f,
                                      double lipschitz, double lambda, double beta,
                                      const BoundCheckOptions& options) {
  validate(set);
  if (!(lipschitz >= 0.0)) throw std::invalid_argument("check_fully_linear_bounds: negative Lipschitz constant");
  if (!contains(region, set.base)) throw std::invalid_argument("check_fully_linear_bounds: x is infeasible");
  const Vector& x = set.base;
  const double delta = set.radius;
  const int p = set.size();

  std::vector<double> values = set.values;
  if (values.empty()) {
    for (const auto& y : set.points) values.push_back(f.value(y));
  }
  const LagrangeBasis basis = LagrangeBasis::build(set, kind);
  const QuadraticModel model = basis.fit(values);

  BoundReport report;
  report.constants = fully_linear_constants(kind, p, lambda, lipschitz, beta);

  std::mt19937_64 rng(options.seed);
  for (const auto& y : sample_feasible_ball(region, x, delta, options.samples, rng)) {
    report.max_f_error = std::max(report.max_f_error, std::abs(f.value(y) - model(y)));
  }

  const Vector grad_error = f.gradient(x) - model.gradient(x);
  for (const auto& y : sample_feasible_ball(region, x, 1.0, options.samples, rng)) {
    report.max_g_error = std::max(report.max_g_error, std::abs(grad_error.dot(y - x)));
  }
  report.max_g_error = std::max({report.max_g_error, criticality_measure(grad_error, x, region).value,
                                 criticality_measure(-grad_error, x, region).value});
  report.samples_used = 2 * options.samples;

  // Errors at rounding level count as zero, so exact reproduction (L = 0)
  // reports ratio 0 rather than 0/0.
  double f_scale = 1.0;
  for (const double v : values) f_scale = std::max(f_scale, std::abs(v));
  const double noise = 1e-9 * f_scale;
  const double r_sample = std::min(delta, 1.0);
  auto ratio = [](double observed, double bound, double floor) {
    if (observed <= floor) return 0.0;
    return bound > 0.0 ? observed / bound : std::numeric_limits<double>::infinity();
  };
  report.ratio_f = ratio(report.max_f_error, report.constants.kappa_ef * delta * delta, noise);
  report.ratio_g = ratio(report.max_g_error, report.constants.kappa_eg * delta, noise / r_sample);

  if (kind == ModelKind::MfnQuadratic) {
    const double r = r_sample;
    for (int s = 0; s < p; ++s) {
      const Vector ds = set.points[static_cast<std::size_t>(s)] - x;
      for (int t = s; t < p; ++t) {
        const Vector dt = set.points[static_cast<std::size_t>(t)] - x;
        report.max_rayleigh = std::max(report.max_rayleigh, std::abs(ds.dot(model.H * dt)));
      }
    }
    report.ratio_h = ratio(report.max_rayleigh, report.constants.kappa_h * beta * beta * r * r, noise);
  }
  return report;
}

}  // namespace cdfo
