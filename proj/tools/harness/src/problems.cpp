#include <cdfo/harness/problems.hpp>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <Eigen/Eigenvalues>


namespace cdfo::harness {

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// f(y) = 1/2 (y - a)^T A (y - a)
Problem quadratic(std::string name, Matrix A, Vector a, std::string region, Vector x0) {
  Problem p;
  p.name = std::move(name);
  p.objective = "quadratic";
  p.dimension = static_cast<int>(a.size());
  p.region = std::move(region);
  p.x0 = std::move(x0);
  p.reference = a;
  p.lipschitz = Eigen::SelfAdjointEigenSolver<Matrix>(A).eigenvalues().cwiseAbs().maxCoeff();
  p.function.value = [A, a](const Vector& y) { return 0.5 * (y - a).dot(A * (y - a)); };
  p.function.gradient = [A, a](const Vector& y) -> Vector { return A * (y - a); };
  return p;
}

Problem cossum(std::string name, int n) {
  Problem p;
  p.name = std::move(name);
  p.objective = "cossum";
  p.dimension = n;
  p.region = fmt::format("ball(2)^{}", n);
  p.x0 = Vector::Constant(n, 0.3);
  p.lipschitz = 1.0;
  p.function.value = [](const Vector& y) { return y.array().cos().sum(); };
  p.function.gradient = [](const Vector& y) -> Vector { return -y.array().sin().matrix(); };
  return p;
}

}  // namespace

std::vector<std::string> problem_names() {
  return {"quad2d", "quad5d", "affine2d", "rosenbrock", "cossum2d", "cossum5d"};
}

Problem make_problem(std::string_view name) {
  if (name == "quad2d") {
    Matrix A(2, 2);
    A << 3.0, 1.0, 1.0, 2.0;
    return quadratic("quad2d", A, vec({0.3, -0.2}), "box(-1, 1)^2", vec({-0.8, 0.7}));
  }
  if (name == "quad5d") {
    Matrix A = Matrix::Zero(5, 5);
    for (int i = 0; i < 5; ++i) {
      A(i, i) = 1.0 + i;
      if (i + 1 < 5) A(i, i + 1) = A(i + 1, i) = 0.5;
    }
    return quadratic("quad5d", A, vec({0.2, -0.1, 0.3, -0.25, 0.15}), "box(-1, 1)^5",
                     vec({-0.8, 0.8, -0.8, 0.8, -0.8}));
  }
  if (name == "affine2d") {
    Problem p;
    p.name = "affine2d";
    p.objective = "affine";
    p.dimension = 2;
    p.region = "box(-1, 1)^2";
    p.x0 = vec({0.5, -0.5});
    p.reference = vec({-1.0, 1.0});
    p.lipschitz = 0.0;
    p.function.value = [](const Vector& y) { return 1.0 + 2.0 * y(0) - 3.0 * y(1); };
    p.function.gradient = [](const Vector&) -> Vector { return vec({2.0, -3.0}); };
    return p;
  }
  if (name == "rosenbrock") {
    Problem p;
    p.name = "rosenbrock";
    p.objective = "rosenbrock";
    p.dimension = 2;
    p.region = "ball(center=[0, 0], radius=1)";
    p.x0 = vec({-0.5, 0.5});
    p.reference = vec({0.78641515419, 0.61769831250});
    // sup of |Hessian| over the unit ball is about 1368.8
    p.lipschitz = 1400.0;
    p.function.value = [](const Vector& y) {
      const double a = y(1) - y(0) * y(0);
      const double b = 1.0 - y(0);
      return 100.0 * a * a + b * b;
    };
    p.function.gradient = [](const Vector& y) -> Vector {
      const double a = y(1) - y(0) * y(0);
      return vec({-400.0 * y(0) * a - 2.0 * (1.0 - y(0)), 200.0 * a});
    };
    return p;
  }
  if (name == "cossum2d") return cossum("cossum2d", 2);
  if (name == "cossum5d") return cossum("cossum5d", 5);
  throw UnknownProblem(fmt::format("unknown problem '{}'; registry: {}", name,
                                   fmt::join(problem_names(), ", ")));
}

}  // namespace cdfo::harness
