#include <cdfo/lagrange_basis.hpp>

#include <stdexcept>
#include <string>

namespace cdfo {

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::LinearRegression ? "linreg" : "mfn";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "linreg" || text == "linear-regression") return ModelKind::LinearRegression;
  if (text == "mfn" || text == "mfn-quadratic") return ModelKind::MfnQuadratic;
  throw std::invalid_argument("unknown model kind '" + std::string(text) +
                              "' (expected linreg or mfn)");
}

LagrangeBasis LagrangeBasis::build(const InterpolationSet& set, ModelKind kind) {
  LagrangeBasis basis;
  basis.kind_ = kind;
  basis.base_ = set.base;
  basis.points_ = set.points;
  if (kind == ModelKind::LinearRegression) {
    auto reg = RegressionBasis::build(set);
    for (int t = 0; t < reg.size(); ++t) basis.polynomials_.push_back(reg.lagrange_polynomial(t));
    basis.impl_ = std::move(reg);
  } else {
    auto sys = MfnSystem::assemble(set);
    for (int t = 0; t < sys.size(); ++t) basis.polynomials_.push_back(sys.lagrange_polynomial(t));
    basis.impl_ = std::move(sys);
  }
  return basis;
}

Vector LagrangeBasis::values(const Vector& y) const {
  if (const auto* reg = regression()) return reg->lagrange_values(y);
  return mfn()->lagrange_values(y);
}

SignedLogDet LagrangeBasis::log_det() const {
  if (const auto* reg = regression()) return reg->gram_log_det();
  return mfn()->log_det();
}

double LagrangeBasis::swap_determinant_ratio(int t, const Vector& y) const {
  if (const auto* reg = regression()) return reg->swap_determinant_ratio(t, y);
  return mfn()->swap_determinant_ratio(t, y);
}

QuadraticModel LagrangeBasis::fit(std::span<const double> values) const {
  if (const auto* reg = regression()) {
    return QuadraticModel::from_linear(fit_regression_model(*reg, values).model);
  }
  return mfn()->fit(values);
}

}  // namespace cdfo
