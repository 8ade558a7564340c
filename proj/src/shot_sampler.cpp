#include "cdtrade/shot_sampler.hpp"

#include "cdtrade/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace cdtrade {

namespace {

constexpr double kZeroProb = 1e-15;

double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

void draw(std::mt19937_64& engine, const std::vector<double>& probs, std::uint64_t shots,
          std::vector<std::uint64_t>& counts) {
  std::vector<double> cumulative(probs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    total += std::max(probs[i], 0.0);
    cumulative[i] = total;
  }
  if (total <= 0.0) throw Error(ErrorCode::NotNormalized, "nothing to sample from");
  counts.assign(probs.size(), 0);
  const std::size_t last = probs.size() - 1;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = uniform01(engine) * total;
    std::size_t i = 0;
    while (i < last && !(u < cumulative[i])) ++i;
    // Skip trailing zero-probability cells reached only through rounding.
    while (i > 0 && probs[i] <= 0.0) --i;
    ++counts[i];
  }
}

void require_axis(const QubitMeasurement& probe) {
  if (probe.sharpness() == 0.0) {
    throw Error(ErrorCode::ZeroBloch, "policy needs a probe axis");
  }
}

}  // namespace

std::string_view to_string(InstrumentPolicy policy) noexcept {
  switch (policy) {
    case InstrumentPolicy::Lueders: return "lueders";
    case InstrumentPolicy::Eigenstate: return "eigenstate";
    case InstrumentPolicy::Mixed: return "mixed";
  }
  return "lueders";
}

InstrumentPolicy parse_policy(std::string_view name) {
  if (name == "lueders") return InstrumentPolicy::Lueders;
  if (name == "eigenstate") return InstrumentPolicy::Eigenstate;
  if (name == "mixed") return InstrumentPolicy::Mixed;
  throw Error(ErrorCode::InvalidArgument, "unknown policy '" + std::string(name) + "'");
}

DensityMatrix policy_update(InstrumentPolicy policy, const QubitMeasurement& probe,
                            const DensityMatrix& rho, std::size_t outcome) {
  if (rho.dim() != 2) throw Error(ErrorCode::NonQubit, "policies are defined for qubits");
  if (outcome > 1) throw Error(ErrorCode::InvalidArgument, "outcome index out of range");
  const double sign = outcome == 0 ? 1.0 : -1.0;
  switch (policy) {
    case InstrumentPolicy::Lueders: {
      const auto branch = apply_instrument(probe.instrument(), rho, outcome);
      if (branch.probability < kZeroProb) {
        throw Error(ErrorCode::ZeroProbability, "outcome has zero probability");
      }
      const ComplexMatrix m = branch.state / branch.probability;
      return DensityMatrix(0.5 * (m + m.adjoint()));
    }
    case InstrumentPolicy::Eigenstate:
      require_axis(probe);
      return DensityMatrix::from_bloch(sign * probe.bloch.normalized());
    case InstrumentPolicy::Mixed:
      require_axis(probe);
      return DensityMatrix::from_bloch(sign * probe.bloch);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown policy");
}

ExperimentModel experiment_model(const DensityMatrix& rho, const LuedersInstrument& inst_a,
                                 const Povm& povm_b) {
  return {joint_probabilities(inst_a, povm_b, rho), outcome_probabilities(povm_b, rho),
          inst_a.povm().labels(), povm_b.labels()};
}

ExperimentModel experiment_model(const DensityMatrix& rho, const QubitMeasurement& probe,
                                 InstrumentPolicy policy, const Povm& povm_b) {
  if (policy == InstrumentPolicy::Lueders) {
    return experiment_model(rho, probe.instrument(), povm_b);
  }
  if (rho.dim() != 2 || povm_b.dim() != 2) {
    throw Error(ErrorCode::NonQubit, "policies are defined for qubits");
  }
  const Povm probe_povm = probe.to_povm();
  const auto p_a = outcome_probabilities(probe_povm, rho);
  ExperimentModel m;
  m.joint = Eigen::MatrixXd::Zero(2, static_cast<Eigen::Index>(povm_b.size()));
  for (std::size_t a = 0; a < 2; ++a) {
    if (p_a[a] < kZeroProb) continue;
    const auto post = policy_update(policy, probe, rho, a);
    const auto p_b = outcome_probabilities(povm_b, post);
    for (std::size_t b = 0; b < p_b.size(); ++b) {
      m.joint(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = p_a[a] * p_b[b];
    }
  }
  m.alone = outcome_probabilities(povm_b, rho);
  m.labels_a = probe_povm.labels();
  m.labels_b = povm_b.labels();
  return m;
}

CdValue exact_cd(const ExperimentModel& model) {
  OutcomeDistribution alone{model.alone, model.labels_b};
  OutcomeDistribution tilde{std::vector<double>(model.labels_b.size()), model.labels_b};
  for (std::size_t b = 0; b < model.labels_b.size(); ++b) {
    tilde.probs[b] = model.joint.col(static_cast<Eigen::Index>(b)).sum();
  }
  return {correlation(model.joint, model.labels_a, model.labels_b), disturbance(alone, tilde)};
}

ShotRecord sample(const ExperimentModel& model, std::uint64_t shots_joint,
                  std::uint64_t shots_alone, std::uint64_t seed) {
  if (shots_joint == 0 || shots_alone == 0) {
    throw Error(ErrorCode::InvalidShots, "shot counts must be positive");
  }
  ShotRecord rec;
  rec.n_a = static_cast<std::size_t>(model.joint.rows());
  rec.n_b = static_cast<std::size_t>(model.joint.cols());
  rec.labels_a = model.labels_a;
  rec.labels_b = model.labels_b;
  rec.shots_joint = shots_joint;
  rec.shots_alone = shots_alone;
  rec.seed = seed;

  std::vector<double> flat(rec.n_a * rec.n_b);
  for (std::size_t a = 0; a < rec.n_a; ++a) {
    for (std::size_t b = 0; b < rec.n_b; ++b) {
      flat[a * rec.n_b + b] =
          model.joint(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  std::mt19937_64 engine(seed);
  draw(engine, flat, shots_joint, rec.joint_counts);
  draw(engine, model.alone, shots_alone, rec.alone_counts);
  return rec;
}

ShotRecord sample(const DensityMatrix& rho, const LuedersInstrument& inst_a, const Povm& povm_b,
                  std::uint64_t shots_joint, std::uint64_t shots_alone, std::uint64_t seed) {
  return sample(experiment_model(rho, inst_a, povm_b), shots_joint, shots_alone, seed);
}

CdEstimate estimate_cd(const ShotRecord& rec) {
  if (rec.n_a == 0 || rec.n_b == 0 || rec.joint_counts.size() != rec.n_a * rec.n_b ||
      rec.alone_counts.size() != rec.n_b) {
    throw Error(ErrorCode::EmptyRecord, "record shape is inconsistent");
  }
  const auto n_joint = std::accumulate(rec.joint_counts.begin(), rec.joint_counts.end(),
                                       std::uint64_t{0});
  const auto n_alone = std::accumulate(rec.alone_counts.begin(), rec.alone_counts.end(),
                                       std::uint64_t{0});
  if (n_joint == 0 || n_alone == 0) throw Error(ErrorCode::EmptyRecord, "no counts recorded");
  if (rec.n_a != rec.n_b) {
    throw Error(ErrorCode::LabelMismatch, "probe and target outcome counts differ");
  }

  const double nj = static_cast<double>(n_joint);
  const double na = static_cast<double>(n_alone);
  const double n = static_cast<double>(rec.n_b);

  Eigen::MatrixXd freq(static_cast<Eigen::Index>(rec.n_a), static_cast<Eigen::Index>(rec.n_b));
  for (std::size_t a = 0; a < rec.n_a; ++a) {
    for (std::size_t b = 0; b < rec.n_b; ++b) {
      freq(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          static_cast<double>(rec.joint(a, b)) / nj;
    }
  }
  // correlation() validates the label sets.
  CdEstimate est;
  est.c_hat = correlation(freq, rec.labels_a, rec.labels_b);
  const double match = (est.c_hat * (n - 1.0) / n) + 1.0 / n;
  est.c_err = n / (n - 1.0) * std::sqrt(std::max(match * (1.0 - match), 0.0) / nj);

  Eigen::VectorXd p_alone(static_cast<Eigen::Index>(rec.n_b));
  Eigen::VectorXd p_tilde(static_cast<Eigen::Index>(rec.n_b));
  for (std::size_t b = 0; b < rec.n_b; ++b) {
    p_alone[static_cast<Eigen::Index>(b)] = static_cast<double>(rec.alone_counts[b]) / na;
    p_tilde[static_cast<Eigen::Index>(b)] = freq.col(static_cast<Eigen::Index>(b)).sum();
  }
  const Eigen::VectorXd delta = p_alone - p_tilde;
  const double scale = std::sqrt(n / (n - 1.0));
  est.d_hat = scale * delta.norm();

  // Multinomial covariance (diag(p) - p p^T) / N of each arm.
  const Eigen::MatrixXd cov_alone =
      (Eigen::MatrixXd(p_alone.asDiagonal()) - p_alone * p_alone.transpose()) / na;
  const Eigen::MatrixXd cov_tilde =
      (Eigen::MatrixXd(p_tilde.asDiagonal()) - p_tilde * p_tilde.transpose()) / nj;
  if (rec.n_b == 2) {
    est.d_err = 2.0 * std::sqrt(cov_alone(0, 0) + cov_tilde(0, 0));
  } else if (delta.norm() > 0.0) {
    const Eigen::VectorXd u = delta / delta.norm();
    est.d_err = scale * std::sqrt(std::max(u.dot((cov_alone + cov_tilde) * u), 0.0));
  } else {
    est.d_err = scale * std::sqrt(cov_alone.trace() + cov_tilde.trace());
  }
  return est;
}

}  // namespace cdtrade
