#pragma once

// Forward generation of (theta, C, D) scans by full simulation, used to
// round-trip the calibration fits.

#include "cdtrade/calibration.hpp"
#include "cdtrade/qubit_model.hpp"
#include "cdtrade/shot_sampler.hpp"

#include "support/generators.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace cdtrade::prop {

struct Device {
  double a0 = 0.0;  // probe bias
  double a = 1.0;   // probe sharpness
  double b0 = 0.0;  // target bias
  double b = 1.0;   // target strength
};

inline Device random_device(Gen& gen, double lo = 0.2, double hi = 1.0) {
  Device dev;
  dev.a = gen.uniform(lo, hi);
  dev.a0 = gen.uniform(-(1.0 - dev.a), 1.0 - dev.a);
  dev.b = gen.uniform(lo, hi);
  dev.b0 = gen.uniform(-(1.0 - dev.b), 1.0 - dev.b);
  return dev;
}

/// {center_shift, strength_product, shear_term, squeeze_term, shear_ratio}
inline std::vector<double> truth_vector(const Device& dev) {
  const auto ch = ellipse_character({dev.a0, Vec3(dev.a, 0.0, 0.0)});
  return {dev.a0 * dev.b0, dev.a * dev.b, ch.shear * dev.b, ch.squeeze * dev.b, ch.shear / ch.squeeze};
}

inline std::vector<double> midpoint_grid(int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(M_PI * (k + 0.5) / n);
  return out;
}

/// Probe along rot * x, target along rot * (cos t, 0, sin t), optimal input state.
/// Exact when shots is empty; otherwise point k is sampled with stream seed ^ k.
inline CdScan forward_scan(const Device& dev, const std::vector<double>& thetas,
                           std::optional<std::uint64_t> shots = std::nullopt, std::uint64_t seed = 0,
                           const Eigen::Matrix3d& rot = Eigen::Matrix3d::Identity()) {
  const QubitMeasurement probe{dev.a0, rot * Vec3(dev.a, 0.0, 0.0)};
  CdScan scan;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const double t = thetas[k];
    const QubitMeasurement target{dev.b0, rot * (dev.b * Vec3(std::cos(t), 0.0, std::sin(t)))};
    const auto rho = optimal_state(probe, target);
    CdPoint p;
    p.theta = t;
    if (!shots) {
      const auto v = cd_from_scenario(rho, probe.instrument(), target.to_povm());
      p.c = v.correlation;
      p.d = v.disturbance;
    } else {
      const auto model = experiment_model(rho, probe.instrument(), target.to_povm());
      const auto est = estimate_cd(sample(model, *shots, *shots, stream_seed(seed, k)));
      p.c = est.c_hat;
      p.d = est.d_hat;
      p.c_err = est.c_err;
      p.d_err = est.d_err;
    }
    scan.points.push_back(p);
  }
  return scan;
}

inline CdScan without_theta(CdScan scan) {
  for (auto& p : scan.points) p.theta.reset();
  return scan;
}

}  // namespace cdtrade::prop
