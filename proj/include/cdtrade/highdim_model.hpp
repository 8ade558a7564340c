#pragma once

// Two-outcome randomized measurements in dimension d:
//   E_+ = gamma Pi_+ + (1 - gamma) I / 2,  E_- = I - E_+,
// with Pi_+ = |v><v| a rank-one projector. For a sharp probe and overlap
// c^2 = tr(Pi_a Pi_b) the optimal state |psi_+> gives
//   D = 2 gamma sqrt((1 - c^2) c^2),  C = gamma (2 c^2 - 1),  C^2 + D^2 = gamma^2.

#include "cdtrade/cd_measures.hpp"
#include "cdtrade/linalg.hpp"
#include "cdtrade/quantum_core.hpp"

#include <cstddef>

namespace cdtrade {

class RandomizedDichotomic {
 public:
  RandomizedDichotomic(const ComplexVector& direction, double gamma);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(vector_.size()); }
  double gamma() const noexcept { return gamma_; }
  const ComplexVector& vector() const noexcept { return vector_; }
  const Effect& projector_plus() const noexcept { return projector_; }

  /// Labels (+1, -1).
  Povm to_povm() const;

 private:
  ComplexVector vector_;
  double gamma_;
  Effect projector_;
};

struct OverlapGeometry {
  double c_squared = 0.0;
  double lambda = 0.0;    // 2 sqrt((1 - c^2) c^2)
  ComplexVector psi_plus; // optimal state, eigenvector of d_hat for +gamma*lambda
};

/// Requires a sharp probe. At c^2 in {0, 1} psi_plus is the probe vector.
OverlapGeometry overlap(const RandomizedDichotomic& probe, const RandomizedDichotomic& target);

CdValue cd_highdim(const RandomizedDichotomic& probe, const RandomizedDichotomic& target);

/// Generalized Bloch length gamma sqrt(d - 1).
double bloch_length(double gamma, int dim);

}  // namespace cdtrade
