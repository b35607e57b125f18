#include <cdfo/subproblems.hpp>

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdfo {

namespace {

constexpr double kArcGrowthLimit = 1e12;
constexpr int kArcBisections = 200;

double model_decrease(const QuadraticModel& m, const Vector& x, const Vector& s) {
  const Vector gx = m.gradient(x);
  return -(gx.dot(s) + 0.5 * s.dot(m.H * s));
}

}  // namespace

CriticalityResult criticality_measure(const Vector& g, const Vector& x, const ConvexRegion& region,
                                      double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("criticality_measure: radius must be positive");
  if (!contains(region, x)) throw std::invalid_argument("criticality_measure: x is infeasible");
  const auto n = x.size();
  CriticalityResult result;
  result.minimizer = Vector::Zero(n);
  const double gnorm = g.norm();
  if (gnorm == 0.0) return result;

  const Vector direction = g / gnorm;
  if (region.is_whole_space()) {
    result.minimizer = -radius * direction;
    result.value = radius * gnorm;
    return result;
  }

  auto arc = [&](double t) {
    ++result.iterations;
    return Vector(project(region, x - t * direction).point - x);
  };

  double t_lo = 0.0;
  Vector d_lo = Vector::Zero(n);
  double t_hi = radius;
  Vector d_hi = arc(t_hi);
  // Once -g lies in the normal cone at x + d the arc has stopped moving; that
  // point then minimizes g^T d over C and the ball is inactive.
  auto arc_stopped = [&](const Vector& d, double t) {
    const Vector p = x + d;
    return (project(region, p - t * direction).point - p).norm() <= 1e-9 * radius;
  };
  while (d_hi.norm() < radius && t_hi < kArcGrowthLimit * radius && !arc_stopped(d_hi, t_hi)) {
    t_lo = t_hi;
    d_lo = d_hi;
    t_hi *= 2.0;
    d_hi = arc(t_hi);
  }

  Vector best;
  if (d_hi.norm() < radius) {
    // Ball constraint inactive all along the arc.
    best = d_hi;
  } else {
    for (int i = 0; i < kArcBisections && t_hi - t_lo > 1e-15 * t_hi; ++i) {
      const double mid = 0.5 * (t_lo + t_hi);
      Vector d_mid = arc(mid);
      if (d_mid.norm() < radius) {
        t_lo = mid;
        d_lo = std::move(d_mid);
      } else {
        t_hi = mid;
        d_hi = std::move(d_mid);
      }
    }
    // Shrinking d_hi onto the sphere stays feasible by convexity.
    const Vector d_hi_scaled = d_hi * (radius / d_hi.norm());
    const double lo_obj = direction.dot(d_lo);
    const double hi_obj = direction.dot(d_hi_scaled);
    best = hi_obj <= lo_obj ? d_hi_scaled : d_lo;
    result.gap_estimate = std::abs(hi_obj - lo_obj) * gnorm;
  }

  const double objective = g.dot(best);
  if (objective >= 0.0) return result;
  result.minimizer = std::move(best);
  result.value = -objective;
  return result;
}

TrustRegionStep solve_trust_region_step(const QuadraticModel& model, const Vector& x,
                                        const ConvexRegion& region, double delta,
                                        const TrustRegionOptions& options) {
  if (!(delta > 0.0)) throw std::invalid_argument("solve_trust_region_step: delta must be positive");
  const auto n = x.size();
  TrustRegionStep out;
  out.cauchy_constant_used = options.c1;
  out.step = Vector::Zero(n);

  const Vector g = model.gradient(x);
  const CriticalityResult crit = criticality_measure(g, x, region, 1.0);
  out.criticality = crit.value;
  out.hessian_norm = spectral_norm(model.H);
  if (crit.value == 0.0) {
    out.satisfied_cauchy = true;
    return out;
  }
  const double pi = crit.value;
  out.cauchy_target = options.c1 * pi * std::min({pi / (1.0 + out.hessian_norm), delta, 1.0});

  // Pulling a rounding overshoot back onto the sphere keeps feasibility by convexity.
  auto project_step = [&](const Vector& s) {
    Vector d = project_onto_ball_intersection(region, x, delta, x + s).point - x;
    const double norm = d.norm();
    if (norm > delta) d *= delta / norm;
    return d;
  };

  Vector best = Vector::Zero(n);
  double best_red = 0.0;
  auto consider = [&](const Vector& s) {
    const double red = model_decrease(model, x, s);
    if (red > best_red) {
      best_red = red;
      best = s;
    }
  };

  // Criticality minimizer scaled along its segment.
  {
    const Vector& d = crit.minimizer;
    const double cap = std::min(delta, 1.0);
    const double curvature = d.dot(model.H * d);
    double tau = cap;
    if (curvature > 0.0) tau = std::min(pi / curvature, cap);
    consider(tau * d);
  }

  // Backtracking along the projected-gradient path.
  {
    const double gnorm = g.norm();
    double gamma = delta / gnorm;
    for (int i = 0; i <= options.cauchy_halvings; ++i) {
      const Vector s = project_step(-gamma * g);
      consider(s);
      if (model_decrease(model, x, s) >= out.cauchy_target) break;
      gamma *= 0.5;
    }
  }

  // Newton candidate for positive definite H.
  if (n > 0) {
    Eigen::LLT<Matrix> llt(model.H);
    if (llt.info() == Eigen::Success) {
      const Vector newton = llt.solve(-g);
      if (newton.allFinite()) consider(project_step(newton));
    }
  }

  // Projected-gradient refinement with Barzilai-Borwein steps.
  {
    Vector s = best;
    double value = best_red;
    Vector grad = g + model.H * s;
    double alpha = out.hessian_norm > 0.0 ? 1.0 / out.hessian_norm : delta / grad.norm();
    for (int it = 0; it < options.refinement_steps; ++it) {
      if (grad.norm() == 0.0) break;
      bool accepted = false;
      for (int bt = 0; bt < 30; ++bt) {
        const Vector trial = project_step(s - alpha * grad);
        const double red = model_decrease(model, x, trial);
        if (red > value) {
          const Vector ds = trial - s;
          const Vector new_grad = g + model.H * trial;
          const double curv = ds.dot(new_grad - grad);
          s = trial;
          value = red;
          grad = new_grad;
          alpha = curv > 0.0 ? ds.squaredNorm() / curv : 2.0 * alpha;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
    }
    consider(s);
  }

  out.step = best;
  out.predicted_reduction = best_red;
  out.satisfied_cauchy = best_red >= out.cauchy_target * (1.0 - 1e-12);
  return out;
}

}  // namespace cdfo
