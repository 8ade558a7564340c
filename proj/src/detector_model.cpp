#include "cdtrade/detector_model.hpp"

#include "cdtrade/error.hpp"

#include <cmath>
#include <string>

namespace cdtrade {

namespace {

constexpr Eigen::Index kVac = 0;
constexpr Eigen::Index kH = 1;
constexpr Eigen::Index kV = 2;
constexpr double kDomainTol = 1e-12;

ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

}  // namespace

void DetectorNoise::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorCode::InvalidNoise, "eta must lie in [0,1]");
  if (!(nu >= 0.0) || !std::isfinite(nu)) {
    throw Error(ErrorCode::InvalidNoise, "nu must be finite and non-negative");
  }
}

FockState FockState::vacuum() {
  FockState s{ComplexVector::Zero(3)};
  s.amplitudes[kVac] = 1.0;
  return s;
}

FockState FockState::one_horizontal() {
  FockState s{ComplexVector::Zero(3)};
  s.amplitudes[kH] = 1.0;
  return s;
}

FockState FockState::one_vertical() {
  FockState s{ComplexVector::Zero(3)};
  s.amplitudes[kV] = 1.0;
  return s;
}

FockState FockState::one_diagonal() {
  FockState s{ComplexVector::Zero(3)};
  s.amplitudes[kH] = 1.0 / std::sqrt(2.0);
  s.amplitudes[kV] = 1.0 / std::sqrt(2.0);
  return s;
}

DensityMatrix FockState::density() const {
  if (amplitudes.size() != 3) {
    throw Error(ErrorCode::DimensionMismatch, "truncated Fock space has three states");
  }
  if (std::abs(amplitudes.norm() - 1.0) > tol::kProb) {
    throw Error(ErrorCode::NotNormalized, "Fock state not normalized");
  }
  return DensityMatrix(projector(amplitudes));
}

Povm DetectorPovm::to_povm() const { return Povm({e_off, e_on}, {1.0, -1.0}); }

DetectorPovm detector_povm(const DetectorNoise& noise, int cutoff) {
  noise.validate();
  if (cutoff < 1) throw Error(ErrorCode::InvalidArgument, "cutoff must be at least 1");
  const Eigen::Index n = cutoff + 1;
  ComplexMatrix off = ComplexMatrix::Zero(n, n);
  const double dark = std::exp(-noise.nu);
  for (Eigen::Index k = 0; k < n; ++k) {
    off(k, k) = dark * std::pow(1.0 - noise.eta, static_cast<double>(k));
  }
  const ComplexMatrix on = ComplexMatrix::Identity(n, n) - off;
  return {Effect(off), Effect(on)};
}

DetectorScenario detector_scenario(const DetectorNoise& noise, DetectorReference reference) {
  const DetectorPovm single_mode = detector_povm(noise, 1);
  const double off0 = single_mode.e_off.matrix()(0, 0).real();
  const double off1 = single_mode.e_off.matrix()(1, 1).real();

  // Photon number of the diagonal mode is |1_D><1_D| inside the one-photon sector.
  const ComplexMatrix id = ComplexMatrix::Identity(3, 3);
  const ComplexMatrix n_diag = projector(FockState::one_diagonal().amplitudes);
  const ComplexMatrix e_off = off0 * (id - n_diag) + off1 * n_diag;
  Povm target({Effect(e_off), Effect(id - e_off)}, {1.0, -1.0});

  const ComplexMatrix click_v = projector(FockState::one_vertical().amplitudes);
  if (reference == DetectorReference::Sharp) {
    Povm probe({Effect(id - click_v), Effect(click_v)}, {-1.0, 1.0});
    return {FockState::one_diagonal().density(), LuedersInstrument(std::move(probe)),
            std::move(target)};
  }
  Povm probe({Effect(ComplexMatrix::Zero(3, 3)), Effect(id)}, {-1.0, 1.0});
  return {FockState::one_horizontal().density(), LuedersInstrument(std::move(probe)),
          std::move(target)};
}

CdValue scenario_cd(const DetectorNoise& noise, DetectorReference reference) {
  const auto s = detector_scenario(noise, reference);
  return cd_from_scenario(s.state, s.probe, s.target);
}

DetectorNoise estimate_noise(double d1, double c2) {
  if (!std::isfinite(d1) || !std::isfinite(c2)) {
    throw Error(ErrorCode::OutOfDomain, "non-finite input");
  }
  if (d1 <= 0.0 || d1 > 1.0 + kDomainTol) {
    throw Error(ErrorCode::OutOfDomain, "D1 must lie in (0,1], got " + std::to_string(d1));
  }
  if (c2 <= -1.0 || c2 > 1.0 + kDomainTol) {
    throw Error(ErrorCode::OutOfDomain, "C2 must lie in (-1,1], got " + std::to_string(c2));
  }
  const double sum = c2 + d1 + 1.0;
  if (sum <= 0.0) throw Error(ErrorCode::OutOfDomain, "C2 + D1 + 1 must be positive");
  const double dark = 0.5 * sum;  // e^{-nu}
  if (dark > 1.0 + kDomainTol) {
    throw Error(ErrorCode::OutOfDomain, "implied e^{-nu} exceeds one");
  }
  const double eta = 2.0 * d1 / sum;
  if (eta > 1.0 + kDomainTol) throw Error(ErrorCode::OutOfDomain, "implied eta exceeds one");
  DetectorNoise out{std::min(eta, 1.0), std::max(-std::log(dark), 0.0)};
  return out;
}

}  // namespace cdtrade
