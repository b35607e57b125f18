#include <cdfo/poisedness.hpp>
#include <cdfo/subproblems.hpp>

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace cdfo {

namespace {

constexpr double kReplacementThreshold = 1e-8;
constexpr int kArmijoHalvings = 40;
constexpr int kRejectionTries = 100;

// Relative slack plus a few ulps of |x|, which is all x + r e_i can promise when r is tiny.
bool within_radius(const Vector& y, const Vector& x, double radius) {
  return (y - x).norm() <= radius * (1.0 + 1e-9) + 1e-14 * (1.0 + x.norm());
}

class Maximizer {
 public:
  Maximizer(const LagrangePolynomial& poly, const ConvexRegion& region, const Vector& x, double r,
            std::optional<double> early, const MaximizerOptions& options)
      : poly_(poly), region_(region), x_(x), r_(r), early_(early), options_(options) {}

  Vector project(const Vector& y) const {
    Vector z = project_onto_ball_intersection(region_, x_, r_, y).point;
    // Iterative projections may overshoot the sphere slightly; pulling back
    // toward x keeps feasibility.
    const double len = (z - x_).norm();
    if (len > r_) z = x_ + (r_ / len) * (z - x_);
    return z;
  }

  /// Returns true when the early-exit threshold was crossed.
  bool record(const Vector& y, double v) {
    if (std::abs(v) > best_.value || best_.point.size() == 0) {
      best_.value = std::abs(v);
      best_.signed_value = v;
      best_.point = y;
    }
    if (early_ && std::abs(v) > *early_) {
      best_.early_exit = true;
      return true;
    }
    return false;
  }

  bool ascend(Vector y, double sign) {
    double h = sign * poly_(y);
    Vector grad = sign * poly_.gradient(y);
    double alpha = -1.0;
    for (int it = 0; it < options_.max_iterations; ++it) {
      const double gnorm = grad.norm();
      if (gnorm == 0.0) break;
      const Vector probe = project(y + (r_ * r_) * grad);
      if ((probe - y).norm() / r_ <= options_.stationarity_tolerance) break;
      if (alpha <= 0.0) alpha = r_ / gnorm;
      // The feasible set has diameter 2r; longer steps only cost projection accuracy.
      alpha = std::min(alpha, 4.0 * r_ / gnorm);

      bool accepted = false;
      for (int bt = 0; bt < kArmijoHalvings; ++bt) {
        const Vector trial = project(y + alpha * grad);
        const double h_trial = sign * poly_(trial);
        if (h_trial > h && h_trial >= h + 1e-4 * grad.dot(trial - y)) {
          const Vector new_grad = sign * poly_.gradient(trial);
          const Vector step = trial - y;
          // Barzilai-Borwein length for the next step (ascent: curvature is -s^T dg).
          const double curvature = -step.dot(new_grad - grad);
          alpha = curvature > 0.0 ? step.squaredNorm() / curvature : 2.0 * alpha;
          y = trial;
          h = h_trial;
          grad = new_grad;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
      if (record(y, sign * h)) return true;
    }
    return false;
  }

  LagrangeMaximum& best() { return best_; }

 private:
  const LagrangePolynomial& poly_;
  const ConvexRegion& region_;
  const Vector& x_;
  double r_;
  std::optional<double> early_;
  const MaximizerOptions& options_;
  LagrangeMaximum best_;
};

std::vector<Vector> random_feasible_points(const ConvexRegion& region, const Vector& x, double r,
                                           int count, std::uint64_t seed, int t) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const auto n = x.size();
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Vector y(n);
    for (int attempt = 0; attempt < kRejectionTries; ++attempt) {
      Vector dir(n);
      for (Eigen::Index i = 0; i < n; ++i) dir(i) = normal(rng);
      const double len = r * std::pow(uniform(rng), 1.0 / static_cast<double>(n));
      y = x + dir.normalized() * len;
      if (contains(region, y)) break;
    }
    Vector z = project_onto_ball_intersection(region, x, r, y).point;
    const double len = (z - x).norm();
    if (len > r) z = x + (r / len) * (z - x);
    out.push_back(std::move(z));
  }
  return out;
}

LagrangeMaximum maximize_linear(const LagrangePolynomial& poly, const ConvexRegion& region,
                                const Vector& x, double r, std::optional<double> early) {
  const Vector grad = poly.gradient(x);
  const double at_x = poly(x);
  const CriticalityResult up = criticality_measure(-grad, x, region, r);
  const CriticalityResult down = criticality_measure(grad, x, region, r);
  const double hi = at_x + up.value;
  const double lo = at_x - down.value;
  LagrangeMaximum out;
  out.starts_used = 2;
  if (std::abs(hi) >= std::abs(lo)) {
    out.signed_value = hi;
    out.point = x + up.minimizer;
  } else {
    out.signed_value = lo;
    out.point = x + down.minimizer;
  }
  out.value = std::abs(out.signed_value);
  out.early_exit = early && out.value > *early;
  return out;
}

SignedLogDet scaled(const SignedLogDet& det, double ratio) {
  SignedLogDet out;
  if (det.is_zero() || ratio == 0.0) return out;
  out.sign = det.sign * (ratio > 0.0 ? 1 : -1);
  out.log_abs = det.log_abs + std::log(std::abs(ratio));
  return out;
}

}  // namespace

LagrangeMaximum maximize_abs_lagrange(const LagrangeBasis& basis, int t, const ConvexRegion& region,
                                      const Vector& x, double delta,
                                      std::optional<double> early_exit_at,
                                      const MaximizerOptions& options) {
  if (t < 0 || t >= basis.size()) throw std::out_of_range("maximize_abs_lagrange: index out of range");
  if (!(delta > 0.0)) throw std::invalid_argument("maximize_abs_lagrange: delta must be positive");
  const double r = std::min(delta, 1.0);
  const LagrangePolynomial& poly = basis.polynomial(t);
  if (poly.is_linear()) return maximize_linear(poly, region, x, r, early_exit_at);

  Maximizer search(poly, region, x, r, early_exit_at, options);
  std::vector<Vector> starts;
  const auto n = x.size();
  starts.reserve(basis.points().size() + 2 * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(options.random_starts));
  for (const auto& y : basis.points()) starts.push_back(search.project(y));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (double sgn : {1.0, -1.0}) {
      Vector y = x;
      y(i) += sgn * r;
      starts.push_back(search.project(y));
    }
  }
  for (auto& y : random_feasible_points(region, x, r, options.random_starts, options.seed, t)) {
    starts.push_back(std::move(y));
  }

  LagrangeMaximum& best = search.best();
  for (const auto& y : starts) {
    ++best.starts_used;
    if (search.record(y, poly(y))) return best;
  }
  for (const auto& y : starts) {
    for (double sign : {1.0, -1.0}) {
      if (search.ascend(y, sign)) return best;
    }
  }
  return best;
}

PoisednessCertificate check_poisedness(const LagrangeBasis& basis, const ConvexRegion& region,
                                       const Vector& x, double delta, double lambda, double beta,
                                       const MaximizerOptions& options) {
  if (!(lambda >= 1.0)) throw std::invalid_argument("check_poisedness: lambda must be at least 1");
  if (!(beta > 0.0)) throw std::invalid_argument("check_poisedness: beta must be positive");
  PoisednessCertificate cert;
  const double r = std::min(delta, 1.0);
  const auto& points = basis.points();

  cert.geometry_ok = true;
  for (std::size_t t = 0; t < points.size(); ++t) {
    const bool feasible = contains(region, points[t]);
    if (!feasible || !within_radius(points[t], x, beta * r)) {
      cert.geometry_ok = false;
      cert.witness_index = static_cast<int>(t);
      cert.witness_point = points[t];
      cert.reason = feasible ? fmt::format("point {} lies outside B(x, {} * {})", t, beta, r)
                             : fmt::format("point {} is infeasible", t);
      return cert;
    }
  }

  cert.best_values.assign(points.size(), std::numeric_limits<double>::quiet_NaN());
  for (int t = 0; t < basis.size(); ++t) {
    const LagrangeMaximum m = maximize_abs_lagrange(basis, t, region, x, delta, lambda, options);
    cert.best_values[static_cast<std::size_t>(t)] = m.value;
    cert.starts_used += m.starts_used;
    if (cert.witness_index < 0 || m.value > cert.lambda_observed) {
      cert.lambda_observed = m.value;
      cert.witness_index = t;
      cert.witness_point = m.point;
    }
    if (m.value > lambda) {
      cert.reason = fmt::format("|l_{}| reaches {:.6g} > {}", t, m.value, lambda);
      return cert;
    }
  }
  cert.verified = true;
  return cert;
}

PoisednessCertificate check_poisedness(const InterpolationSet& set, ModelKind kind,
                                       const ConvexRegion& region, double lambda, double beta,
                                       const MaximizerOptions& options) {
  validate(set);
  try {
    const LagrangeBasis basis = LagrangeBasis::build(set, kind);
    return check_poisedness(basis, region, set.base, set.radius, lambda, beta, options);
  } catch (const DegenerateGeometry& e) {
    PoisednessCertificate cert;
    cert.lambda_observed = std::numeric_limits<double>::infinity();
    cert.reason = e.what();
    return cert;
  } catch (const SingularGeometry& e) {
    PoisednessCertificate cert;
    cert.lambda_observed = std::numeric_limits<double>::infinity();
    cert.reason = e.what();
    // Point the witness at the member of the closest pair with the larger index.
    double closest = std::numeric_limits<double>::infinity();
    for (int s = 0; s < set.size(); ++s) {
      for (int t = s + 1; t < set.size(); ++t) {
        const double d = (set.points[static_cast<std::size_t>(s)] - set.points[static_cast<std::size_t>(t)]).norm();
        if (d < closest) {
          closest = d;
          cert.witness_index = t;
        }
      }
    }
    if (cert.witness_index >= 0) cert.witness_point = set.points[static_cast<std::size_t>(cert.witness_index)];
    return cert;
  }
}

InterpolationSet structured_initial_set(const Vector& x, double delta, int p) {
  const int n = static_cast<int>(x.size());
  if (n < 1) throw std::invalid_argument("structured_initial_set: empty base point");
  if (p < 1 || p > full_quadratic_size(n)) {
    throw std::invalid_argument(
        fmt::format("structured_initial_set: p = {} outside [1, {}]", p, full_quadratic_size(n)));
  }
  if (!(delta > 0.0)) throw std::invalid_argument("structured_initial_set: delta must be positive");
  const double r = std::min(delta, 1.0);
  InterpolationSet set;
  set.base = x;
  set.radius = delta;
  set.points.push_back(x);
  for (int i = 0; i < n && set.size() < p; ++i) {
    Vector y = x;
    y(i) += r;
    set.points.push_back(std::move(y));
  }
  for (int i = 0; i < n && set.size() < p; ++i) {
    Vector y = x;
    y(i) -= r;
    set.points.push_back(std::move(y));
  }
  const double diag = r / std::sqrt(2.0);
  for (int s = 0; s < n && set.size() < p; ++s) {
    for (int t = s + 1; t < n && set.size() < p; ++t) {
      Vector y = x;
      y(s) += diag;
      y(t) += diag;
      set.points.push_back(std::move(y));
    }
  }
  return set;
}

InitialSetResult initial_invertible_set(const ConvexRegion& region, const Vector& x, double delta,
                                        int p, ModelKind kind, const MaximizerOptions& options) {
  const int n = static_cast<int>(x.size());
  if (n != region.dimension()) throw std::invalid_argument("initial_invertible_set: dimension mismatch");
  if (!contains(region, x)) throw std::invalid_argument("initial_invertible_set: x is infeasible");
  if (p < min_points(kind, n) || p > full_quadratic_size(n)) {
    throw std::invalid_argument(fmt::format("initial_invertible_set: p = {} outside [{}, {}] for {}", p,
                                            min_points(kind, n), full_quadratic_size(n),
                                            to_string(kind)));
  }
  InitialSetResult out;
  out.set = structured_initial_set(x, delta, p);
  for (int t = 0; t < p; ++t) {
    auto& y = out.set.points[static_cast<std::size_t>(t)];
    if (contains(region, y)) continue;
    const LagrangeBasis basis = LagrangeBasis::build(out.set, kind);
    const LagrangeMaximum m = maximize_abs_lagrange(basis, t, region, x, delta, std::nullopt, options);
    if (!(m.value > kReplacementThreshold)) {
      throw RegionTooThin(fmt::format(
          "region too thin for invertible geometry: best |l_{}| = {:.3g} near x", t, m.value));
    }
    y = m.point;
    ++out.replacements;
  }
  return out;
}

ImprovementResult improve_to_poised(const std::optional<InterpolationSet>& set,
                                    const ConvexRegion& region, const Vector& x, double delta,
                                    int p, double lambda, ModelKind kind,
                                    const MaximizerOptions& options) {
  if (!(lambda > 1.0)) throw std::invalid_argument("improve_to_poised: lambda must exceed 1");
  if (!(delta > 0.0)) throw std::invalid_argument("improve_to_poised: delta must be positive");
  if (!contains(region, x)) throw std::invalid_argument("improve_to_poised: x is infeasible");
  const double r = std::min(delta, 1.0);

  ImprovementResult out;
  InterpolationSet work;
  std::optional<LagrangeBasis> basis;
  bool usable = set.has_value() && set->size() == p && set->dimension() == x.size();
  if (usable) {
    work = *set;
    work.base = x;
    work.radius = delta;
    for (const auto& y : work.points) {
      if (y.size() != x.size() || !contains(region, y) || !within_radius(y, x, r)) {
        usable = false;
        break;
      }
    }
  }
  if (usable) {
    try {
      basis = LagrangeBasis::build(work, kind);
    } catch (const DegenerateGeometry&) {
      usable = false;
    } catch (const SingularGeometry&) {
      usable = false;
    }
  }
  if (!usable) {
    InitialSetResult init = initial_invertible_set(region, x, delta, p, kind, options);
    work = std::move(init.set);
    out.reinitialized = true;
    out.initial_replacements = init.replacements;
    basis = LagrangeBasis::build(work, kind);
  }

  const std::size_t cap = 100 * static_cast<std::size_t>(p);
  for (;;) {
    std::vector<LagrangeMaximum> maxima;
    maxima.reserve(static_cast<std::size_t>(p));
    int worst = 0;
    for (int t = 0; t < p; ++t) {
      maxima.push_back(maximize_abs_lagrange(*basis, t, region, x, delta, std::nullopt, options));
      if (maxima.back().value > maxima[static_cast<std::size_t>(worst)].value) worst = t;
    }
    const LagrangeMaximum& top = maxima[static_cast<std::size_t>(worst)];
    if (top.value <= lambda) {
      PoisednessCertificate& cert = out.certificate;
      cert.lambda_observed = top.value;
      cert.witness_index = worst;
      cert.witness_point = top.point;
      cert.geometry_ok = std::all_of(work.points.begin(), work.points.end(), [&](const Vector& y) {
        return contains(region, y) && within_radius(y, x, r);
      });
      cert.verified = cert.geometry_ok;
      if (!cert.geometry_ok) cert.reason = "returned points violate the geometry bounds";
      for (const auto& m : maxima) {
        cert.best_values.push_back(m.value);
        cert.starts_used += m.starts_used;
      }
      break;
    }
    if (out.swaps.size() >= cap) {
      throw ImprovementCapExceeded(
          fmt::format("improve_to_poised: no lambda-poised set after {} swaps", cap),
          std::move(out.swaps));
    }
    SwapRecord rec;
    rec.index = worst;
    rec.old_point = work.points[static_cast<std::size_t>(worst)];
    rec.new_point = top.point;
    rec.lagrange_value = top.signed_value;
    rec.det_before = basis->log_det();
    rec.det_predicted = scaled(rec.det_before, basis->swap_determinant_ratio(worst, top.point));
    work.points[static_cast<std::size_t>(worst)] = top.point;
    basis = LagrangeBasis::build(work, kind);
    rec.det_actual = basis->log_det();
    out.swaps.push_back(std::move(rec));
  }

  if (out.reinitialized || !out.swaps.empty()) work.values.clear();
  out.set = std::move(work);
  return out;
}

}  // namespace cdfo
