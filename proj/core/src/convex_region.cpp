#include <cdfo/convex_region.hpp>

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace cdfo {

namespace {

constexpr double kDykstraTolerance = 1e-10;
constexpr int kDykstraMaxSweeps = 10000;
constexpr double kEps = std::numeric_limits<double>::epsilon();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dimension(const Vector& v, int n, const char* what) {
  if (v.size() != n) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (expected " +
                                std::to_string(n) + ", got " + std::to_string(v.size()) + ")");
  }
}

Vector project_box(const ConvexRegion::Box& b, const Vector& y) {
  return y.cwiseMax(b.lower).cwiseMin(b.upper);
}

Vector project_ball(const ConvexRegion::Ball& b, const Vector& y) {
  const Vector d = y - b.center;
  const double norm = d.norm();
  if (norm <= b.radius) return y;
  return b.center + (b.radius / norm) * d;
}

Vector project_halfspace(const ConvexRegion::Halfspace& h, const Vector& y) {
  const double violation = h.normal.dot(y) - h.offset;
  if (violation <= 0.0) return y;
  return y - (violation / h.normal.squaredNorm()) * h.normal;
}

double primitive_distance(const ConvexRegion::Primitive& set, const Vector& y) {
  return std::visit(
      Overloaded{
          [&](const ConvexRegion::Box& b) { return (y - project_box(b, y)).norm(); },
          [&](const ConvexRegion::Ball& b) {
            return std::max(0.0, (y - b.center).norm() - b.radius);
          },
          [&](const ConvexRegion::Halfspace& h) {
            return std::max(0.0, (h.normal.dot(y) - h.offset) / h.normal.norm());
          },
      },
      set);
}

Vector project_primitive(const ConvexRegion::Primitive& set, const Vector& y) {
  return std::visit(Overloaded{
                        [&](const ConvexRegion::Box& b) { return project_box(b, y); },
                        [&](const ConvexRegion::Ball& b) { return project_ball(b, y); },
                        [&](const ConvexRegion::Halfspace& h) { return project_halfspace(h, y); },
                    },
                    set);
}

// KKT: z(tau) = clamp((1 - tau) y + tau c) with |z(tau) - c| = r, and the
// distance is nonincreasing in tau. Between consecutive clamp breakpoints the
// active set is fixed and |z - c|^2 = F + (1 - tau)^2 S, solved in closed form.
ProjectionResult project_box_ball(const ConvexRegion::Box& box, const ConvexRegion::Ball& ball,
                                  const Vector& y) {
  Vector z = project_box(box, y);
  const double r = ball.radius;
  if ((z - ball.center).norm() <= r) return {std::move(z), 0, 0.0};

  const Vector& c = ball.center;
  const Vector at_center = project_box(box, c);
  const double gap = (at_center - c).norm() - r;
  if (gap > 1e-12 * (1.0 + r)) {
    throw ProjectionError("box and ball do not intersect", gap);
  }

  const auto n = y.size();
  std::vector<double> breaks{0.0, 1.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double slope = c(i) - y(i);
    if (slope == 0.0) continue;
    for (double bound : {box.lower(i), box.upper(i)}) {
      const double tau = (bound - y(i)) / slope;
      if (tau > 0.0 && tau < 1.0) breaks.push_back(tau);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  auto dist_at = [&](double tau) { return (project_box(box, (1.0 - tau) * y + tau * c) - c).norm(); };

  int iterations = 0;
  double tau = 1.0;
  for (std::size_t j = 1; j < breaks.size(); ++j) {
    ++iterations;
    if (dist_at(breaks[j]) > r) continue;
    const double a = breaks[j - 1];
    const double b = breaks[j];
    const double mid = 0.5 * (a + b);
    const Vector w = (1.0 - mid) * y + mid * c;
    double fixed = 0.0;
    double free = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w(i) < box.lower(i)) {
        fixed += (box.lower(i) - c(i)) * (box.lower(i) - c(i));
      } else if (w(i) > box.upper(i)) {
        fixed += (box.upper(i) - c(i)) * (box.upper(i) - c(i));
      } else {
        free += (y(i) - c(i)) * (y(i) - c(i));
      }
    }
    tau = b;
    if (free > 0.0 && r * r > fixed) tau = std::clamp(1.0 - std::sqrt((r * r - fixed) / free), a, b);
    break;
  }
  Vector result = project_box(box, (1.0 - tau) * y + tau * c);
  // Guard against the last ulp landing just outside the sphere.
  const double norm = (result - c).norm();
  if (norm > r) result = c + (r / norm) * (result - c);
  return {std::move(result), iterations, 0.0};
}

// If neither single projection is feasible for the other ball, both
// constraints are active and the answer is the nearest point of the
// (n-2)-sphere where the two boundary spheres meet.
ProjectionResult project_ball_ball(const ConvexRegion::Ball& a, const ConvexRegion::Ball& b,
                                   const Vector& y) {
  const double tol = 1e-14;
  if ((y - a.center).norm() <= a.radius && (y - b.center).norm() <= b.radius) return {y, 0, 0.0};
  Vector pa = project_ball(a, y);
  if ((pa - b.center).norm() <= b.radius * (1.0 + tol)) return {std::move(pa), 0, 0.0};
  Vector pb = project_ball(b, y);
  if ((pb - a.center).norm() <= a.radius * (1.0 + tol)) return {std::move(pb), 0, 0.0};

  // Work from the smaller ball; factored differences keep rho accurate when
  // the small ball sits on the boundary of a much larger one.
  const bool a_small = a.radius <= b.radius;
  const ConvexRegion::Ball& small = a_small ? a : b;
  const ConvexRegion::Ball& large = a_small ? b : a;
  const Vector axis = large.center - small.center;
  const double dist = axis.norm();
  if (dist == 0.0 || dist > a.radius + b.radius) {
    throw ProjectionError("balls do not intersect", dist - a.radius - b.radius);
  }
  const Vector u = axis / dist;
  const double along =
      ((dist - large.radius) * (dist + large.radius) + small.radius * small.radius) / (2.0 * dist);
  const double rho = std::sqrt(std::max(0.0, (small.radius - along) * (small.radius + along)));
  const Vector mid = small.center + along * u;
  Vector v = (y - mid) - (y - mid).dot(u) * u;
  double vnorm = v.norm();
  if (vnorm <= 1e-300) {
    // y on the axis: every point of the circle is equidistant.
    Eigen::Index k = 0;
    u.cwiseAbs().minCoeff(&k);
    v = Vector::Unit(y.size(), k) - u(k) * u;
    vnorm = v.norm();
  }
  return {mid + (rho / vnorm) * v, 0, 0.0};
}

/// Projection onto box ∩ balls ∩ halfspaces through its dual. Each ball
/// contributes g = (|x - c|^2 - r^2)/2, each halfspace g = a^T x - b; for fixed
/// multipliers the Lagrangian minimizer over the box is a clamp, and the dual
/// Hessian is -G_F^T G_F / (1 + sum of ball multipliers) with G_F the constraint
/// gradients restricted to unclamped coordinates. Projected Newton on the
/// multipliers; nullopt when it fails to certify, so the caller can fall back.
std::optional<ProjectionResult> dual_newton(const std::vector<const ConvexRegion::Primitive*>& sets,
                                            const Vector& y) {
  const auto n = y.size();
  Vector lower = Vector::Constant(n, -std::numeric_limits<double>::infinity());
  Vector upper = Vector::Constant(n, std::numeric_limits<double>::infinity());
  std::vector<const ConvexRegion::Primitive*> cons;
  for (const auto* set : sets) {
    if (const auto* b = std::get_if<ConvexRegion::Box>(set)) {
      lower = lower.cwiseMax(b->lower);
      upper = upper.cwiseMin(b->upper);
    } else {
      cons.push_back(set);
    }
  }
  if ((lower.array() > upper.array()).any()) return std::nullopt;
  const auto m = static_cast<Eigen::Index>(cons.size());
  // Newton converges fast, so ask for accuracy relative to the smallest ball.
  double scale = 1.0;
  for (const auto* set : cons) {
    if (const auto* b = std::get_if<ConvexRegion::Ball>(set)) scale = std::min(scale, b->radius);
  }
  const double tol = 1e-12 * scale + 16.0 * kEps * y.norm();

  Vector lambda = Vector::Zero(m);
  Vector x(n), g(m);
  Matrix grads(n, m);
  double ball_sum = 0.0;
  auto evaluate = [&](const Vector& lam) {
    Vector num = y;
    ball_sum = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (const auto* b = std::get_if<ConvexRegion::Ball>(cons[static_cast<std::size_t>(j)])) {
        num += lam(j) * b->center;
        ball_sum += lam(j);
      } else {
        num -= lam(j) * std::get<ConvexRegion::Halfspace>(*cons[static_cast<std::size_t>(j)]).normal;
      }
    }
    x = (num / (1.0 + ball_sum)).cwiseMax(lower).cwiseMin(upper);
    double q = 0.5 * (x - y).squaredNorm();
    for (Eigen::Index j = 0; j < m; ++j) {
      if (const auto* b = std::get_if<ConvexRegion::Ball>(cons[static_cast<std::size_t>(j)])) {
        grads.col(j) = x - b->center;
        g(j) = 0.5 * (grads.col(j).squaredNorm() - b->radius * b->radius);
      } else {
        const auto& h = std::get<ConvexRegion::Halfspace>(*cons[static_cast<std::size_t>(j)]);
        grads.col(j) = h.normal;
        g(j) = h.normal.dot(x) - h.offset;
      }
      q += lam(j) * g(j);
    }
    return q;
  };
  // Constraint values rescaled to distances, so tolerances match Dykstra's.
  auto slack = [&](Eigen::Index j) {
    if (const auto* b = std::get_if<ConvexRegion::Ball>(cons[static_cast<std::size_t>(j)])) {
      return (x - b->center).norm() - b->radius;
    }
    return g(j) / grads.col(j).norm();
  };

  auto kkt_residual = [&](const Vector& lam) {
    double r = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double s = slack(j);
      r = std::max(r, lam(j) > 0.0 ? std::abs(s) : std::max(s, 0.0));
    }
    return r;
  };

  double q = evaluate(lambda);
  double residual = kkt_residual(lambda);
  for (int it = 1; it <= 200; ++it) {
    if (residual <= tol) return ProjectionResult{x, it, residual};

    std::vector<Eigen::Index> work;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (lambda(j) > 0.0 || g(j) > 0.0) work.push_back(j);
    }
    const auto w = static_cast<Eigen::Index>(work.size());
    Matrix gf = Matrix::Zero(n, w);
    for (Eigen::Index k = 0; k < w; ++k) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (x(i) > lower(i) && x(i) < upper(i)) gf(i, k) = grads(i, work[static_cast<std::size_t>(k)]);
      }
    }
    Matrix hess = gf.transpose() * gf / (1.0 + ball_sum);
    const double reg = 1e-12 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
    hess.diagonal().array() += reg;
    Vector gw(w);
    for (Eigen::Index k = 0; k < w; ++k) gw(k) = g(work[static_cast<std::size_t>(k)]);
    const Vector dir = hess.ldlt().solve(gw);
    if (!dir.allFinite()) return std::nullopt;

    const Vector base = lambda;
    const double q0 = q;
    const double r0 = residual;
    const Vector g0 = g;
    bool accepted = false;
    // Near the solution q is flat to rounding, so a full step that shrinks the
    // KKT residual is taken if q stays level within rounding.
    for (double alpha = 1.0; alpha > 1e-20; alpha *= 0.5) {
      Vector trial = base;
      for (Eigen::Index k = 0; k < w; ++k) {
        const Eigen::Index j = work[static_cast<std::size_t>(k)];
        trial(j) = std::max(0.0, base(j) + alpha * dir(k));
      }
      const double qt = evaluate(trial);
      const double rt = kkt_residual(trial);
      if (qt >= q0 + 1e-4 * g0.dot(trial - base) || (alpha == 1.0 && rt < 0.5 * r0 &&
                                                         qt >= q0 - 64.0 * kEps * std::abs(q0))) {
        lambda = std::move(trial);
        q = qt;
        residual = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) return std::nullopt;
  }
  return std::nullopt;
}

ProjectionResult dykstra(const std::vector<const ConvexRegion::Primitive*>& sets,
                         const Vector& y) {
  const std::size_t m = sets.size();
  std::vector<Vector> increments(m, Vector::Zero(y.size()));
  Vector x = y;
  // Rounding in x scales with |y|, so the tolerance does too.
  const double tolerance = kDykstraTolerance + 16.0 * kEps * y.norm();
  double residual = 0.0;
  for (int sweep = 1; sweep <= kDykstraMaxSweeps; ++sweep) {
    const Vector previous = x;
    for (std::size_t i = 0; i < m; ++i) {
      const Vector z = x + increments[i];
      x = project_primitive(*sets[i], z);
      increments[i] = z - x;
    }
    double infeasibility = 0.0;
    for (const auto* set : sets) infeasibility = std::max(infeasibility, primitive_distance(*set, x));
    residual = std::max((x - previous).norm(), infeasibility);
    if (residual <= tolerance) return {std::move(x), sweep, residual};
  }
  throw ProjectionError("Dykstra projection did not converge within " +
                            std::to_string(kDykstraMaxSweeps) + " sweeps (residual " +
                            std::to_string(residual) + ")",
                        residual);
}

void flatten(const ConvexRegion::Kind& kind, std::vector<ConvexRegion::Primitive>& out) {
  std::visit(Overloaded{
                 [](const ConvexRegion::WholeSpace&) {},
                 [&](const ConvexRegion::Box& b) { out.emplace_back(b); },
                 [&](const ConvexRegion::Ball& b) { out.emplace_back(b); },
                 [&](const ConvexRegion::Halfspaces& hs) {
                   for (const auto& h : hs.list) out.emplace_back(h);
                 },
                 [&](const ConvexRegion::Intersection& in) {
                   for (const auto& member : in.members) flatten(member.kind(), out);
                 },
             },
             kind);
}

}  // namespace

ConvexRegion::ConvexRegion(int dimension, Kind kind) : dimension_(dimension), kind_(std::move(kind)) {
  std::vector<Primitive> flat;
  flatten(kind_, flat);
  // Merge all boxes into one so the closed-form pairs apply more often.
  std::optional<Box> merged;
  for (const auto& p : flat) {
    if (const auto* b = std::get_if<Box>(&p)) {
      if (!merged) {
        merged = *b;
      } else {
        merged->lower = merged->lower.cwiseMax(b->lower);
        merged->upper = merged->upper.cwiseMin(b->upper);
      }
    }
  }
  if (merged) {
    if ((merged->lower.array() > merged->upper.array()).any()) {
      throw std::invalid_argument("intersection of boxes is empty");
    }
    primitives_.emplace_back(*merged);
  }
  for (auto& p : flat) {
    if (!std::holds_alternative<Box>(p)) primitives_.push_back(std::move(p));
  }
}

ConvexRegion ConvexRegion::whole_space(int dimension) {
  if (dimension <= 0) throw std::invalid_argument("whole_space: dimension must be positive");
  return ConvexRegion(dimension, WholeSpace{});
}

ConvexRegion ConvexRegion::box(Vector lower, Vector upper) {
  const auto n = static_cast<int>(lower.size());
  if (n == 0) throw std::invalid_argument("box: empty bounds");
  require_dimension(upper, n, "box");
  if ((lower.array() > upper.array()).any()) {
    throw std::invalid_argument("box: lower bound exceeds upper bound");
  }
  if (!(lower.array() < upper.array()).any()) {
    throw std::invalid_argument("box: needs strict inequality in at least one component");
  }
  return ConvexRegion(n, Box{std::move(lower), std::move(upper)});
}

ConvexRegion ConvexRegion::ball(Vector center, double radius) {
  if (center.size() == 0) throw std::invalid_argument("ball: empty center");
  if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be positive");
  const auto n = static_cast<int>(center.size());
  return ConvexRegion(n, Ball{std::move(center), radius});
}

ConvexRegion ConvexRegion::halfspace(Vector normal, double offset) {
  return halfspaces({Halfspace{std::move(normal), offset}});
}

ConvexRegion ConvexRegion::halfspaces(std::vector<Halfspace> list) {
  if (list.empty()) throw std::invalid_argument("halfspaces: empty list");
  const auto n = static_cast<int>(list.front().normal.size());
  if (n == 0) throw std::invalid_argument("halfspaces: empty normal");
  for (const auto& h : list) {
    require_dimension(h.normal, n, "halfspaces");
    if (h.normal.norm() == 0.0) throw std::invalid_argument("halfspaces: zero normal");
  }
  return ConvexRegion(n, Halfspaces{std::move(list)});
}

ConvexRegion ConvexRegion::intersect(std::vector<ConvexRegion> members) {
  if (members.empty()) throw std::invalid_argument("intersect: no members");
  const int n = members.front().dimension();
  for (const auto& m : members) {
    if (m.dimension() != n) throw std::invalid_argument("intersect: members differ in dimension");
  }
  return ConvexRegion(n, Intersection{std::move(members)});
}

namespace detail {

ProjectionResult project_primitives(const std::vector<const ConvexRegion::Primitive*>& sets,
                                    const Vector& y) {
  if (sets.empty()) return {y, 0, 0.0};
  if (sets.size() == 1) return {project_primitive(*sets[0], y), 0, 0.0};
  if (sets.size() == 2) {
    const auto* box0 = std::get_if<ConvexRegion::Box>(sets[0]);
    const auto* box1 = std::get_if<ConvexRegion::Box>(sets[1]);
    const auto* ball0 = std::get_if<ConvexRegion::Ball>(sets[0]);
    const auto* ball1 = std::get_if<ConvexRegion::Ball>(sets[1]);
    if (box0 && ball1) return project_box_ball(*box0, *ball1, y);
    if (box1 && ball0) return project_box_ball(*box1, *ball0, y);
    if (ball0 && ball1) return project_ball_ball(*ball0, *ball1, y);
  }
  if (auto exact = dual_newton(sets, y)) return *std::move(exact);
  return dykstra(sets, y);
}

}  // namespace detail

ProjectionResult project(const ConvexRegion& region, const Vector& y) {
  require_dimension(y, region.dimension(), "project");
  std::vector<const ConvexRegion::Primitive*> sets;
  sets.reserve(region.primitives().size());
  for (const auto& p : region.primitives()) sets.push_back(&p);
  return detail::project_primitives(sets, y);
}

ProjectionResult project_onto_ball_intersection(const ConvexRegion& region, const Vector& center,
                                                double radius, const Vector& y) {
  require_dimension(y, region.dimension(), "project_onto_ball_intersection");
  require_dimension(center, region.dimension(), "project_onto_ball_intersection");
  if (!(radius > 0.0)) throw std::invalid_argument("project_onto_ball_intersection: radius <= 0");
  const ConvexRegion::Primitive ball = ConvexRegion::Ball{center, radius};
  std::vector<const ConvexRegion::Primitive*> sets;
  sets.reserve(region.primitives().size() + 1);
  for (const auto& p : region.primitives()) sets.push_back(&p);
  sets.push_back(&ball);
  return detail::project_primitives(sets, y);
}

double distance(const ConvexRegion& region, const Vector& y) {
  require_dimension(y, region.dimension(), "distance");
  const auto& prims = region.primitives();
  if (prims.empty()) return 0.0;
  if (prims.size() == 1) return primitive_distance(prims.front(), y);
  double worst = 0.0;
  for (const auto& p : prims) worst = std::max(worst, primitive_distance(p, y));
  if (worst == 0.0) return 0.0;
  return (y - project(region, y).point).norm();
}

bool contains(const ConvexRegion& region, const Vector& y, double tol) {
  require_dimension(y, region.dimension(), "contains");
  const auto& prims = region.primitives();
  double worst = 0.0;
  for (const auto& p : prims) {
    const double d = primitive_distance(p, y);
    // The distance to an intersection is at least the distance to any member.
    if (d > tol) return false;
    worst = std::max(worst, d);
  }
  if (worst == 0.0 || prims.size() == 1) return true;
  return (y - project(region, y).point).norm() <= tol;
}

}  // namespace cdfo
