#pragma once

// Seeded Monte Carlo emulation of the two-arm experiment.
//
// The joint arm draws (alpha, beta) pairs from p(alpha, beta); the alone arm
// draws beta from tr(rho E_beta) with the probe switched off. Every record is
// produced by one std::mt19937_64 stream (the 64-bit Mersenne Twister, whose
// output sequence is fixed by the C++ standard). Uniform variates are formed
// as (engine() >> 11) * 2^-53 and mapped to outcomes by inverse CDF over the
// cells in row-major order; the joint arm is drawn first, then the alone arm.
// Scan point k uses the stream seeded with seed ^ k.

#include "cdtrade/cd_measures.hpp"
#include "cdtrade/quantum_core.hpp"
#include "cdtrade/qubit_model.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace cdtrade {

/// Post-measurement state of the probe.
///   Lueders:    K rho K / p
///   Eigenstate: eigenstate of the probe axis, Bloch +-a_hat
///   Mixed:      Bloch +-|a| a_hat
enum class InstrumentPolicy { Lueders, Eigenstate, Mixed };

std::string_view to_string(InstrumentPolicy policy) noexcept;
InstrumentPolicy parse_policy(std::string_view name);

/// Outcome 0 is '+', 1 is '-' (QubitMeasurement::to_povm order).
DensityMatrix policy_update(InstrumentPolicy policy, const QubitMeasurement& probe,
                            const DensityMatrix& rho, std::size_t outcome);

/// Exact outcome distributions of both arms.
struct ExperimentModel {
  Eigen::MatrixXd joint;
  std::vector<double> alone;
  std::vector<double> labels_a;
  std::vector<double> labels_b;
};

ExperimentModel experiment_model(const DensityMatrix& rho, const LuedersInstrument& inst_a,
                                 const Povm& povm_b);

ExperimentModel experiment_model(const DensityMatrix& rho, const QubitMeasurement& probe,
                                 InstrumentPolicy policy, const Povm& povm_b);

CdValue exact_cd(const ExperimentModel& model);

struct ShotRecord {
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  std::vector<std::uint64_t> joint_counts;  // row-major n_a x n_b
  std::vector<std::uint64_t> alone_counts;
  std::vector<double> labels_a;
  std::vector<double> labels_b;
  std::uint64_t shots_joint = 0;
  std::uint64_t shots_alone = 0;
  std::uint64_t seed = 0;

  std::uint64_t joint(std::size_t a, std::size_t b) const { return joint_counts.at(a * n_b + b); }

  bool operator==(const ShotRecord&) const = default;
};

struct CdEstimate {
  double c_hat = 0.0;
  double d_hat = 0.0;
  double c_err = 0.0;  // 1 sigma
  double d_err = 0.0;  // 1 sigma
};

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) { return seed ^ index; }

ShotRecord sample(const ExperimentModel& model, std::uint64_t shots_joint,
                  std::uint64_t shots_alone, std::uint64_t seed);

ShotRecord sample(const DensityMatrix& rho, const LuedersInstrument& inst_a, const Povm& povm_b,
                  std::uint64_t shots_joint, std::uint64_t shots_alone, std::uint64_t seed);

/// Plug-in estimators with delta-method 1-sigma errors: multinomial for C,
/// independent arms added in quadrature for D.
CdEstimate estimate_cd(const ShotRecord& record);

}  // namespace cdtrade
