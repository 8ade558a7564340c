#pragma once

// On-off single-photon detector with efficiency eta and dark-count parameter
// nu:  E_off = e^{-nu} sum_n (1 - eta)^n |n><n|,  E_on = I - E_off.
//
// The self-calibration protocol probes the detector with a single photon in
// the truncated two-mode space {|0,0>, |1_H,0>, |0,1_V>}:
//   sharp reference   -> D1 = e^{-nu} eta,          C1 = 0
//   biased reference  -> C2 = e^{-nu} (2 - eta) - 1, D2 = 0
// and inverts  e^{-nu} = (C2 + D1 + 1) / 2,  eta = 2 D1 / (C2 + D1 + 1).
//
// Model used for the first-principles evaluation:
//   * probe: ideal polarization detector. A click means V (label +1); no click,
//     including vacuum, means H (label -1). Lueders update.
//   * target: the on-off detector counting photons in the diagonal mode
//     |1_D> = (|1_H> + |1_V>)/sqrt(2). Labels off = +1, on = -1.
//   * sharp reference: input |1_D>.
//   * fully biased reference: the probe reports V for every photon (E_V = I),
//     input |1_H>.

#include "cdtrade/cd_measures.hpp"
#include "cdtrade/linalg.hpp"
#include "cdtrade/quantum_core.hpp"

namespace cdtrade {

struct DetectorNoise {
  double eta = 1.0;  // efficiency, [0, 1]
  double nu = 0.0;   // dark-count exponent, >= 0

  void validate() const;
};

/// Single-photon sector amplitudes over {|0,0>, |1_H,0>, |0,1_V>}.
struct FockState {
  ComplexVector amplitudes;

  static FockState vacuum();
  static FockState one_horizontal();
  static FockState one_vertical();
  static FockState one_diagonal();

  DensityMatrix density() const;
};

/// Single-mode detector effects on photon numbers 0..cutoff.
struct DetectorPovm {
  Effect e_off;
  Effect e_on;

  /// Labels (off = +1, on = -1).
  Povm to_povm() const;
};

DetectorPovm detector_povm(const DetectorNoise& noise, int cutoff);

enum class DetectorReference { Sharp, FullyBiased };

/// Probe, target and input state of one reference configuration.
struct DetectorScenario {
  DensityMatrix state;
  LuedersInstrument probe;
  Povm target;
};

DetectorScenario detector_scenario(const DetectorNoise& noise, DetectorReference reference);

/// Evaluated through quantum_core / cd_measures on the truncated space.
CdValue scenario_cd(const DetectorNoise& noise, DetectorReference reference);

/// Inverts (D1, C2) into (eta, nu). Throws OutOfDomain when no valid pair exists.
DetectorNoise estimate_noise(double d1, double c2);

}  // namespace cdtrade
