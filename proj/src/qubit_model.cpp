#include "cdtrade/qubit_model.hpp"

#include "cdtrade/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cdtrade {

namespace {

constexpr double kParallelTol = 1e-12;

double unsharpness(double a_alpha, double sharpness) {
  return std::sqrt(std::max(a_alpha * a_alpha - sharpness * sharpness, 0.0));
}

}  // namespace

void QubitMeasurement::validate() const {
  if (!std::isfinite(bias) || !bloch.allFinite()) {
    throw Error(ErrorCode::InvalidMeasurement, "non-finite measurement parameters");
  }
  if (std::abs(bias) + bloch.norm() > 1.0 + tol::kPsd) {
    throw Error(ErrorCode::InvalidMeasurement, "positivity requires |b0| + |b| <= 1");
  }
}

Povm QubitMeasurement::to_povm() const {
  validate();
  const ComplexMatrix id = pauli::identity();
  const ComplexMatrix bs = pauli::dot(bloch);
  return Povm({Effect(0.5 * ((1.0 + bias) * id + bs)), Effect(0.5 * ((1.0 - bias) * id - bs))},
              {1.0, -1.0});
}

void ConvexPovmSpec::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw Error(ErrorCode::InvalidMeasurement, "gamma must lie in [0,1]");
  }
  if (std::abs(bias_b0) > 1.0 - gamma + tol::kPsd) {
    throw Error(ErrorCode::InvalidBias, "|b0| must not exceed 1 - gamma");
  }
}

QubitMeasurement ConvexPovmSpec::to_measurement() const {
  validate();
  return {bias_b0, gamma * Vec3(std::cos(theta), 0.0, std::sin(theta))};
}

Povm to_povm(const ConvexPovmSpec& spec) {
  spec.validate();
  const ComplexMatrix id = pauli::identity();
  const Vec3 axis(std::cos(spec.theta), 0.0, std::sin(spec.theta));
  const ComplexMatrix pi_plus = 0.5 * (id + pauli::dot(axis));
  const ComplexMatrix pi_minus = 0.5 * (id - pauli::dot(axis));
  const double noise_weight = 1.0 - spec.gamma;
  // (1 - gamma) N_{+-} = (1 - gamma +- b0) I / 2, well defined at gamma = 1 too.
  const ComplexMatrix noise_plus = 0.5 * (noise_weight + spec.bias_b0) * id;
  const ComplexMatrix noise_minus = 0.5 * (noise_weight - spec.bias_b0) * id;
  return Povm({Effect(spec.gamma * pi_plus + noise_plus), Effect(spec.gamma * pi_minus + noise_minus)},
              {1.0, -1.0});
}

EllipseCharacter ellipse_character(const QubitMeasurement& probe) {
  probe.validate();
  EllipseCharacter c;
  c.probe_sharpness = probe.sharpness();
  c.probe_bias = probe.bias;
  c.u_plus = unsharpness(1.0 + probe.bias, c.probe_sharpness);
  c.u_minus = unsharpness(1.0 - probe.bias, c.probe_sharpness);
  c.squeeze = 1.0 - 0.5 * (c.u_plus + c.u_minus);
  c.shear = 0.5 * (c.u_plus - c.u_minus);
  return c;
}

CdValue cd_parametric(const QubitMeasurement& probe, double target_gamma, double target_bias,
                      double theta) {
  QubitMeasurement{target_bias, Vec3(target_gamma, 0.0, 0.0)}.validate();
  if (target_gamma < 0.0) throw Error(ErrorCode::InvalidMeasurement, "negative target gamma");
  if (theta < -1e-12 || theta > std::numbers::pi + 1e-12) {
    throw Error(ErrorCode::InvalidAngle, "theta must lie in [0, pi]");
  }
  const auto ch = ellipse_character(probe);
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  return {ch.shift(target_bias) + ch.scale_major(target_gamma) * cos_t +
              ch.shear * target_gamma * sin_t,
          ch.scale_minor(target_gamma) * sin_t};
}

Vec3 optimal_bloch(const Vec3& probe_bloch, const Vec3& target_bloch) {
  if (probe_bloch.norm() == 0.0 || target_bloch.norm() == 0.0) {
    throw Error(ErrorCode::ZeroBloch, "optimal state needs nonzero Bloch vectors");
  }
  const Vec3 a = probe_bloch.normalized();
  const Vec3 b = target_bloch.normalized();
  const Vec3 perp = -a.cross(a.cross(b));
  if (perp.norm() > kParallelTol) return perp.normalized();
  for (int i = 0; i < 3; ++i) {
    const Vec3 e = Vec3::Unit(i);
    const Vec3 c = a.cross(e);
    if (c.norm() > kParallelTol) return c.normalized();
  }
  return Vec3::UnitZ();  // unreachable for a unit vector
}

DensityMatrix optimal_state(const QubitMeasurement& probe, const QubitMeasurement& target) {
  return DensityMatrix::from_bloch(optimal_bloch(probe.bloch, target.bloch));
}

AmplitudePhase amplitude_phase_form(const EllipseCharacter& character, double target_gamma) {
  if (character.probe_sharpness <= 0.0) {
    throw Error(ErrorCode::ZeroBloch, "phase undefined for a trivial probe");
  }
  return {target_gamma * std::hypot(character.probe_sharpness, character.shear),
          std::atan2(character.shear, character.probe_sharpness)};
}

double angle_between(const Vec3& a, const Vec3& b) {
  if (a.norm() == 0.0 || b.norm() == 0.0) {
    throw Error(ErrorCode::ZeroBloch, "angle needs nonzero vectors");
  }
  return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0));
}

}  // namespace cdtrade
