#include "cdtrade/cd_measures.hpp"

#include "cdtrade/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace cdtrade {

namespace {

std::set<double> label_set(const std::vector<double>& labels) {
  std::set<double> s(labels.begin(), labels.end());
  if (s.size() != labels.size()) {
    throw Error(ErrorCode::LabelMismatch, "duplicate outcome labels");
  }
  return s;
}

void require_normalized(const std::vector<double>& p, const char* what) {
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  if (std::abs(sum - 1.0) > tol::kProb) {
    throw Error(ErrorCode::NotNormalized, std::string(what) + " sums to " + std::to_string(sum));
  }
  for (double v : p) {
    if (v < -tol::kProb || v > 1.0 + tol::kProb) {
      throw Error(ErrorCode::NotNormalized, std::string(what) + " has entry outside [0,1]");
    }
  }
}

void require_same_dim(const LuedersInstrument& inst, const ComplexMatrix& op) {
  if (!is_square(op) || static_cast<std::size_t>(op.rows()) != inst.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "observable dimension does not match probe");
  }
}

}  // namespace

double correlation(const Eigen::MatrixXd& joint, const std::vector<double>& labels_a,
                   const std::vector<double>& labels_b) {
  if (static_cast<std::size_t>(joint.rows()) != labels_a.size() ||
      static_cast<std::size_t>(joint.cols()) != labels_b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "joint table shape does not match labels");
  }
  if (label_set(labels_a) != label_set(labels_b)) {
    throw Error(ErrorCode::LabelMismatch, "probe and target label sets differ");
  }
  if (std::abs(joint.sum() - 1.0) > tol::kProb) {
    throw Error(ErrorCode::NotNormalized, "joint probabilities do not sum to one");
  }
  const double n = static_cast<double>(labels_a.size());
  double match = 0.0;
  for (std::size_t a = 0; a < labels_a.size(); ++a) {
    for (std::size_t b = 0; b < labels_b.size(); ++b) {
      if (labels_a[a] == labels_b[b]) {
        match += joint(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      }
    }
  }
  return n / (n - 1.0) * (match - 1.0 / n);
}

double disturbance(const OutcomeDistribution& p_alone, const OutcomeDistribution& p_tilde) {
  if (p_alone.labels != p_tilde.labels || p_alone.probs.size() != p_alone.labels.size() ||
      p_tilde.probs.size() != p_tilde.labels.size()) {
    throw Error(ErrorCode::LabelMismatch, "distributions over different outcomes");
  }
  if (p_alone.probs.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "need at least two outcomes");
  }
  require_normalized(p_alone.probs, "p_alone");
  require_normalized(p_tilde.probs, "p_tilde");
  const double n = static_cast<double>(p_alone.probs.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < p_alone.probs.size(); ++i) {
    const double diff = p_alone.probs[i] - p_tilde.probs[i];
    sq += diff * diff;
  }
  return std::sqrt(n / (n - 1.0)) * std::sqrt(sq);
}

ScenarioStatistics scenario_statistics(const DensityMatrix& rho, const LuedersInstrument& inst_a,
                                       const Povm& povm_b) {
  ScenarioStatistics s;
  s.joint = joint_probabilities(inst_a, povm_b, rho);
  s.alone = {outcome_probabilities(povm_b, rho), povm_b.labels()};
  s.tilde.labels = povm_b.labels();
  s.tilde.probs.resize(povm_b.size());
  for (std::size_t b = 0; b < povm_b.size(); ++b) {
    s.tilde.probs[b] = s.joint.col(static_cast<Eigen::Index>(b)).sum();
  }
  return s;
}

CdValue cd_from_scenario(const DensityMatrix& rho, const LuedersInstrument& inst_a,
                         const Povm& povm_b) {
  const auto s = scenario_statistics(rho, inst_a, povm_b);
  return {correlation(s.joint, inst_a.povm().labels(), povm_b.labels()),
          disturbance(s.alone, s.tilde)};
}

double signed_disturbance(const DensityMatrix& rho, const LuedersInstrument& inst_a,
                          const Povm& povm_b) {
  const auto s = scenario_statistics(rho, inst_a, povm_b);
  double d = 0.0;
  for (std::size_t b = 0; b < povm_b.size(); ++b) {
    d += povm_b.labels()[b] * (s.alone.probs[b] - s.tilde.probs[b]);
  }
  return d;
}

ComplexMatrix disturbance_operator(const LuedersInstrument& inst_a,
                                   const ComplexMatrix& observable_b) {
  require_same_dim(inst_a, observable_b);
  return observable_b - dual_channel(inst_a, observable_b);
}

ComplexMatrix correlation_operator(const LuedersInstrument& inst_a,
                                   const ComplexMatrix& observable_b) {
  require_same_dim(inst_a, observable_b);
  const auto& labels = inst_a.povm().labels();
  if (inst_a.size() != 2 || label_set(labels) != std::set<double>{-1.0, 1.0}) {
    throw Error(ErrorCode::NotDichotomic, "correlation operator needs a +-1 two-outcome probe");
  }
  const std::size_t plus = labels[0] > 0 ? 0 : 1;
  const std::size_t minus = 1 - plus;
  const ComplexMatrix m_a = inst_a.povm().observable();
  return 0.5 * anticommutator(m_a, observable_b) -
         (dissipator(inst_a.kraus(plus), observable_b) -
          dissipator(inst_a.kraus(minus), observable_b));
}

ComplexMatrix dissipator(const ComplexMatrix& effect_sqrt, const ComplexMatrix& target) {
  if (!is_square(effect_sqrt) || effect_sqrt.rows() != target.rows() ||
      effect_sqrt.cols() != target.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "dissipator operands differ in shape");
  }
  return 0.5 * commutator(effect_sqrt, commutator(effect_sqrt, target));
}

double max_disturbance(const LuedersInstrument& inst_a, const ComplexMatrix& observable_b) {
  return spectral_norm_hermitian(disturbance_operator(inst_a, observable_b));
}

}  // namespace cdtrade
