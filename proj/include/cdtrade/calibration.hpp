#pragma once

// Inversion of measured (C, D) scans into device parameters.
//
// A scan alone identifies only the combinations
//   center_shift = a0 b0,  strength_product = |a||b|,
//   shear_term = delta |b|,  squeeze_term = s |b|.
// Separating the probe from the target needs |b|, which a sharp-probe run
// provides through the circle law C^2 + D^2 = |b|^2. Given |b| the probe
// follows from u_{+-} = (1 - s) +- delta, so a0 = (1 - s) delta.

#include "cdtrade/detector_model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace cdtrade {

struct CdPoint {
  std::optional<double> theta;  // radians; empty when the setting is unknown
  double c = 0.0;
  double d = 0.0;
  double c_err = 0.0;
  double d_err = 0.0;
};

struct CdScan {
  std::vector<CdPoint> points;
};

struct CircleFit {
  double strength = 0.0;      // |b|
  double strength_err = 0.0;  // 1 sigma
  double residual_rms = 0.0;  // rms of sqrt(C^2 + D^2) - |b|
};

CircleFit fit_circle_sharp_probe(const CdScan& scan);

enum class Identifiability { Full, CombosOnly };

struct DeviceCharacter {
  double center_shift = 0.0;
  double strength_product = 0.0;
  double shear_term = 0.0;
  double squeeze_term = 0.0;
  double shear_ratio = 0.0;  // delta / s
  Identifiability identifiability = Identifiability::CombosOnly;

  // Filled when identifiability == Full.
  std::optional<double> probe_sharpness;
  std::optional<double> probe_bias;
  std::optional<double> squeeze;
  std::optional<double> shear;
  std::optional<double> target_strength;
  std::optional<double> target_bias;  // empty when a0 vanishes
  double consistency = 0.0;           // | |a|^2 - ((1 + a0)^2 - u_+^2) |

  // Known theta: rms point distance in the (C, D) plane. Unknown theta: rms of
  // x^2 + y^2 - 1 in the unit-circle coordinates of the fitted ellipse.
  double residual_rms = 0.0;
  double center_offset_d = 0.0;  // conic fits only: D coordinate of the center
};

struct FitOptions {
  std::optional<double> target_strength;  // |b| from a reference run
};

/// Linear least squares of C = c0 + P cos t + Q sin t, D = S sin t.
DeviceCharacter fit_ellipse_known_theta(const CdScan& scan, const FitOptions& options = {});

/// Direct least-squares ellipse fit, theta not needed.
DeviceCharacter fit_ellipse_unknown_theta(const CdScan& scan);

enum class FitMethod { Circle, KnownTheta, UnknownTheta };

struct BootstrapResult {
  std::vector<double> stddev;  // one per parameter
  std::size_t used = 0;
  std::size_t failed = 0;
};

/// Parameter vector used by the bootstrap:
/// {center_shift, strength_product, shear_term, squeeze_term, shear_ratio}
std::vector<double> character_vector(const DeviceCharacter& ch);

/// Nonparametric bootstrap over scan points; resample k uses stream seed ^ k.
/// Circle fits report a single parameter (|b|).
BootstrapResult bootstrap(const CdScan& scan, FitMethod method, const FitOptions& options,
                          std::size_t resamples, std::uint64_t seed);

struct DetectorEstimate {
  DetectorNoise noise;
  double eta_err = 0.0;
  double nu_err = 0.0;
};

/// First-order propagation of independent errors on D1 and C2.
DetectorEstimate estimate_detector(double d1, double c2, double d1_err, double c2_err);

}  // namespace cdtrade
