#pragma once

// Correlation C and disturbance D of a probe/target measurement pair, their
// operator forms, and helpers for checking C^2 + D^2 <= 1.
//
// For n outcomes with a common label set:
//   C = n/(n-1) * (p(alpha == beta) - 1/n)
//   D = sqrt(n/(n-1)) * || p(beta|b) - p~(beta|b) ||_2
// where p is the target alone and p~ the target after the unregistered probe.
// With labels +-1 these reduce to C = 2 p(alpha==beta) - 1 and
// D = 2 |p(+|b) - p~(+|b)|.
//
// D is a norm (non-negative). The operator picture gives a signed value
// <d_hat>_rho with d_hat = M_b - I*_a(M_b); signed_disturbance() exposes it
// and D == |signed_disturbance| for dichotomic +-1 scenarios. On the optimal
// state the signed value is non-negative.

#include "cdtrade/linalg.hpp"
#include "cdtrade/quantum_core.hpp"

#include <vector>

namespace cdtrade {

struct CdValue {
  double correlation = 0.0;
  double disturbance = 0.0;

  double norm_squared() const { return correlation * correlation + disturbance * disturbance; }
};

struct OutcomeDistribution {
  std::vector<double> probs;
  std::vector<double> labels;
};

/// Statistics of one (state, probe, target) triple.
struct ScenarioStatistics {
  Eigen::MatrixXd joint;      // p(alpha, beta)
  OutcomeDistribution alone;  // target with the probe switched off
  OutcomeDistribution tilde;  // target after the unregistered probe
};

double correlation(const Eigen::MatrixXd& joint, const std::vector<double>& labels_a,
                   const std::vector<double>& labels_b);

double disturbance(const OutcomeDistribution& p_alone, const OutcomeDistribution& p_tilde);

ScenarioStatistics scenario_statistics(const DensityMatrix& rho, const LuedersInstrument& inst_a,
                                       const Povm& povm_b);

CdValue cd_from_scenario(const DensityMatrix& rho, const LuedersInstrument& inst_a,
                         const Povm& povm_b);

/// sum_beta beta (p(beta) - p~(beta)) = <d_hat>_rho.
double signed_disturbance(const DensityMatrix& rho, const LuedersInstrument& inst_a,
                          const Povm& povm_b);

/// d_hat = M_b - I*_a(M_b)
ComplexMatrix disturbance_operator(const LuedersInstrument& inst_a, const ComplexMatrix& observable_b);

/// C_hat = 1/2 {M_a, M_b} - (L*_+ - L*_-)(M_b); needs a +-1 labelled two-outcome probe.
ComplexMatrix correlation_operator(const LuedersInstrument& inst_a, const ComplexMatrix& observable_b);

/// L*(M) = 1/2 [K, [K, M]] for K = E^{1/2}.
ComplexMatrix dissipator(const ComplexMatrix& effect_sqrt, const ComplexMatrix& target);

/// sup_rho |<d_hat>_rho|: the largest-magnitude eigenvalue of d_hat.
double max_disturbance(const LuedersInstrument& inst_a, const ComplexMatrix& observable_b);

}  // namespace cdtrade
