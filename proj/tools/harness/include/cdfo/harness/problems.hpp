#pragma once

#include <cdfo/fully_linear.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cdfo::harness {

/// A registered test problem. The gradient is for validation only and is
/// never handed to the solver.
struct Problem {
  std::string name;
  std::string objective;  ///< quadratic, affine, rosenbrock or cossum
  int dimension = 0;
  std::string region;     ///< default region spec
  Vector x0;
  std::optional<Vector> reference;
  /// Lipschitz constant of the gradient on the default region.
  double lipschitz = 0.0;
  TestFunction function;
};

class UnknownProblem : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> problem_names();

/// Throws UnknownProblem naming the registry.
Problem make_problem(std::string_view name);

}  // namespace cdfo::harness
