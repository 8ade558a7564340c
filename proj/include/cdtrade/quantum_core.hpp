#pragma once

// States, effects, POVMs and Lueders instruments in finite dimension, plus the
// joint sequential-outcome probability rule
//
//   p(alpha, beta) = tr[ K_alpha rho K_alpha^dagger E_beta ],  K_alpha = E_alpha^{1/2}.
//
// Validation happens once, at construction. The operations assume valid
// inputs and only check dimensions.

#include "cdtrade/linalg.hpp"

#include <cstddef>
#include <vector>

namespace cdtrade {

/// Unit-trace, Hermitian, positive semidefinite matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m);

  static DensityMatrix from_pure(const ComplexVector& ket);
  static DensityMatrix from_bloch(const Vec3& r);
  static DensityMatrix maximally_mixed(std::size_t dim);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  double purity() const { return (m_ * m_).trace().real(); }

 private:
  ComplexMatrix m_;
};

/// Hermitian matrix with spectrum in [0, 1].
class Effect {
 public:
  explicit Effect(ComplexMatrix m);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }

 private:
  ComplexMatrix m_;
};

/// Ordered effects summing to identity, each with a real outcome label.
class Povm {
 public:
  Povm(std::vector<Effect> effects, std::vector<double> labels);

  const std::vector<Effect>& effects() const noexcept { return effects_; }
  const Effect& effect(std::size_t i) const { return effects_.at(i); }
  const std::vector<double>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return effects_.size(); }
  std::size_t dim() const noexcept { return effects_.front().dim(); }

  /// M = sum_alpha alpha E_alpha
  ComplexMatrix observable() const;

 private:
  std::vector<Effect> effects_;
  std::vector<double> labels_;
};

/// The Lueders instrument of a POVM: Kraus operators K_alpha = E_alpha^{1/2}.
class LuedersInstrument {
 public:
  explicit LuedersInstrument(Povm povm);

  const Povm& povm() const noexcept { return povm_; }
  const std::vector<ComplexMatrix>& kraus() const noexcept { return kraus_; }
  const ComplexMatrix& kraus(std::size_t i) const { return kraus_.at(i); }
  std::size_t size() const noexcept { return kraus_.size(); }
  std::size_t dim() const noexcept { return povm_.dim(); }

 private:
  Povm povm_;
  std::vector<ComplexMatrix> kraus_;
};

/// Unnormalized post-measurement state and its probability.
struct InstrumentBranch {
  ComplexMatrix state;
  double probability = 0.0;
};

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// [-tol::kPsd, tol::kRootFloor * max(1, |m|)] are set to zero; anything more
/// negative is an error.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

InstrumentBranch apply_instrument(const LuedersInstrument& inst, const DensityMatrix& rho,
                                  std::size_t outcome);

/// Measure and forget: sum_alpha K_alpha rho K_alpha^dagger.
DensityMatrix unregistered_channel(const LuedersInstrument& inst, const DensityMatrix& rho);

/// Row alpha (probe outcome), column beta (target outcome).
Eigen::MatrixXd joint_probabilities(const LuedersInstrument& inst_a, const Povm& povm_b,
                                    const DensityMatrix& rho);

/// Heisenberg-picture channel sum_alpha K_alpha op K_alpha; unital.
ComplexMatrix dual_channel(const LuedersInstrument& inst_a, const ComplexMatrix& op);

/// tr(rho E_i) for every effect.
std::vector<double> outcome_probabilities(const Povm& povm, const DensityMatrix& rho);

}  // namespace cdtrade
