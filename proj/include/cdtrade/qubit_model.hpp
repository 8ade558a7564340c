#pragma once

// Closed-form qubit machinery.
//
// A two-outcome qubit POVM is written E_{+-} = ((1 +- b0) I +- b.sigma) / 2,
// with bias b0 and Bloch vector b (sharpness |b|). For a probe (a0, a) the
// outcome-dependent unsharpness u_{+-} = sqrt((1 +- a0)^2 - |a|^2) gives
//   squeeze  s     = 1 - (u_+ + u_-) / 2
//   shear    delta = (u_+ - u_-) / 2
// and on the optimal state the pair (C, D) traces the sheared ellipse
//   C = a0 b0 + |a||b| cos(theta) + delta |b| sin(theta)
//   D = s |b| sin(theta)
// with theta = arccos(a_hat . b_hat) in [0, pi].

#include "cdtrade/cd_measures.hpp"
#include "cdtrade/linalg.hpp"
#include "cdtrade/quantum_core.hpp"

namespace cdtrade {

struct QubitMeasurement {
  double bias = 0.0;
  Vec3 bloch = Vec3::Zero();

  /// Throws InvalidMeasurement unless |b0| + |b| <= 1.
  void validate() const;
  double sharpness() const { return bloch.norm(); }
  Povm to_povm() const;
  LuedersInstrument instrument() const { return LuedersInstrument(to_povm()); }
};

/// Randomized projective measurement along (cos t, 0, sin t):
///   E_{+-} = gamma Pi_{+-}(t) + (1 - gamma) N_{+-}(b0),
///   N_{+-}(b0) = (1 +- b0 / (1 - gamma)) I / 2.
struct ConvexPovmSpec {
  double theta = 0.0;
  double gamma = 1.0;
  double bias_b0 = 0.0;

  /// Throws InvalidBias unless |b0| <= 1 - gamma.
  void validate() const;
  QubitMeasurement to_measurement() const;
};

/// Builds the POVM from its convex decomposition (projector part plus
/// biased dummy part), not from the Bloch form.
Povm to_povm(const ConvexPovmSpec& spec);

/// Probe-side ellipse parameters. Target-dependent quantities are methods.
struct EllipseCharacter {
  double probe_sharpness = 0.0;  // |a|
  double probe_bias = 0.0;       // a0
  double squeeze = 0.0;          // s
  double shear = 0.0;            // delta
  double u_plus = 0.0;
  double u_minus = 0.0;

  double shift(double target_bias) const { return probe_bias * target_bias; }
  double scale_major(double target_gamma) const { return probe_sharpness * target_gamma; }
  double scale_minor(double target_gamma) const { return squeeze * target_gamma; }
};

EllipseCharacter ellipse_character(const QubitMeasurement& probe);

/// Closed-form (C, D) on the optimal state; theta in [0, pi].
CdValue cd_parametric(const QubitMeasurement& probe, double target_gamma, double target_bias,
                      double theta);

/// Unit Bloch vector -a_hat x (a_hat x b_hat). When a_hat || b_hat the
/// direction is normalize(a_hat x e) with e the first basis vector not
/// parallel to a_hat (D vanishes for every state then).
Vec3 optimal_bloch(const Vec3& probe_bloch, const Vec3& target_bloch);

DensityMatrix optimal_state(const QubitMeasurement& probe, const QubitMeasurement& target);

struct AmplitudePhase {
  double amplitude = 0.0;  // R = |b| sqrt(|a|^2 + delta^2)
  double phase = 0.0;      // tan(phi) = delta / |a|
};

/// C - a0 b0 = R cos(theta - phi).
AmplitudePhase amplitude_phase_form(const EllipseCharacter& character, double target_gamma);

/// arccos(a_hat . b_hat), clamped to [0, pi].
double angle_between(const Vec3& a, const Vec3& b);

}  // namespace cdtrade
