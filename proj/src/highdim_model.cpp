#include "cdtrade/highdim_model.hpp"

#include "cdtrade/error.hpp"

#include <algorithm>
#include <cmath>

namespace cdtrade {

namespace {

constexpr double kSharpTol = 1e-12;
constexpr double kDegenerateTol = 1e-12;

ComplexVector normalized_or_throw(const ComplexVector& v) {
  if (v.size() < 2) throw Error(ErrorCode::InvalidDim, "dimension must be at least 2");
  const double n = v.norm();
  if (n == 0.0) throw Error(ErrorCode::InvalidArgument, "zero projector direction");
  return v / n;
}

}  // namespace

RandomizedDichotomic::RandomizedDichotomic(const ComplexVector& direction, double gamma)
    : vector_(normalized_or_throw(direction)),
      gamma_(gamma),
      projector_(vector_ * vector_.adjoint()) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw Error(ErrorCode::InvalidMeasurement, "gamma must lie in [0,1]");
  }
}

Povm RandomizedDichotomic::to_povm() const {
  const auto d = static_cast<Eigen::Index>(dim());
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const ComplexMatrix plus = gamma_ * projector_.matrix() + 0.5 * (1.0 - gamma_) * id;
  return Povm({Effect(plus), Effect(id - plus)}, {1.0, -1.0});
}

OverlapGeometry overlap(const RandomizedDichotomic& probe, const RandomizedDichotomic& target) {
  if (probe.dim() != target.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "probe and target dimensions differ");
  }
  if (std::abs(probe.gamma() - 1.0) > kSharpTol) {
    throw Error(ErrorCode::ProbeNotSharp, "closed form needs a sharp probe");
  }
  const ComplexVector& va = probe.vector();
  const ComplexVector& vb = target.vector();
  const Complex inner = va.dot(vb);  // <v_a|v_b>
  OverlapGeometry g;
  g.c_squared = std::clamp(std::norm(inner), 0.0, 1.0);
  g.lambda = 2.0 * std::sqrt((1.0 - g.c_squared) * g.c_squared);

  const ComplexVector residual = vb - inner * va;
  const double s = residual.norm();
  if (s < kDegenerateTol || std::abs(inner) < kDegenerateTol) {
    g.psi_plus = va;
    return g;
  }
  // v_b = |c| (phase * v_a) + s w with w orthogonal to v_a; rephasing v_a makes
  // both coefficients real and positive, so psi_+ = (phase v_a + w) / sqrt(2).
  const Complex phase = inner / std::abs(inner);
  const ComplexVector w = residual / s;
  g.psi_plus = (phase * va + w) / std::sqrt(2.0);
  return g;
}

CdValue cd_highdim(const RandomizedDichotomic& probe, const RandomizedDichotomic& target) {
  const auto g = overlap(probe, target);
  return {target.gamma() * (2.0 * g.c_squared - 1.0), target.gamma() * g.lambda};
}

double bloch_length(double gamma, int dim) {
  if (dim < 2) throw Error(ErrorCode::InvalidDim, "dimension must be at least 2");
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "gamma must lie in [0,1]");
  }
  return gamma * std::sqrt(static_cast<double>(dim - 1));
}

}  // namespace cdtrade
