#include "cdtrade/quantum_core.hpp"

#include "cdtrade/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cdtrade {

namespace {

void require_hermitian(const ComplexMatrix& m, const char* what) {
  if (!is_square(m)) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " must be square");
  }
  if (!is_hermitian(m, tol::kHermitian)) {
    throw Error(ErrorCode::NotHermitian, std::string(what) + " is not Hermitian");
  }
}

void require_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  require_hermitian(m_, "density matrix");
  const double trace = m_.trace().real();
  if (std::abs(trace - 1.0) > tol::kTrace) {
    throw Error(ErrorCode::NotNormalized, "density matrix trace " + std::to_string(trace));
  }
  const auto eig = hermitian_eigen(m_);
  if (eig.values.minCoeff() < -tol::kPsd) {
    throw Error(ErrorCode::NotPsd, "density matrix has eigenvalue " +
                                       std::to_string(eig.values.minCoeff()));
  }
}

DensityMatrix DensityMatrix::from_pure(const ComplexVector& ket) {
  const double norm = ket.norm();
  if (norm == 0.0) throw Error(ErrorCode::InvalidArgument, "zero ket");
  const ComplexVector v = ket / norm;
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::from_bloch(const Vec3& r) {
  if (r.norm() > 1.0 + tol::kPsd) {
    throw Error(ErrorCode::NotPsd, "Bloch vector longer than one");
  }
  return DensityMatrix(0.5 * (pauli::identity() + pauli::dot(r)));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::InvalidDim, "dimension must be positive");
  const auto d = static_cast<Eigen::Index>(dim);
  return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(dim));
}

Effect::Effect(ComplexMatrix m) : m_(std::move(m)) {
  require_hermitian(m_, "effect");
  const auto eig = hermitian_eigen(m_);
  if (eig.values.minCoeff() < -tol::kPsd || eig.values.maxCoeff() > 1.0 + tol::kPsd) {
    throw Error(ErrorCode::NotPsd, "effect spectrum outside [0,1]");
  }
}

Povm::Povm(std::vector<Effect> effects, std::vector<double> labels)
    : effects_(std::move(effects)), labels_(std::move(labels)) {
  if (effects_.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "a POVM needs at least two effects");
  }
  if (effects_.size() != labels_.size()) {
    throw Error(ErrorCode::LabelMismatch, "one label per effect required");
  }
  const std::size_t d = effects_.front().dim();
  ComplexMatrix sum = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (const auto& e : effects_) {
    require_dim(e.dim(), d, "POVM effect dimension");
    sum += e.matrix();
  }
  const auto id = ComplexMatrix::Identity(sum.rows(), sum.cols());
  if (max_abs_entry(sum - id) > tol::kComplete) {
    throw Error(ErrorCode::NotNormalized, "POVM effects do not sum to identity");
  }
}

ComplexMatrix Povm::observable() const {
  ComplexMatrix m = ComplexMatrix::Zero(effects_.front().matrix().rows(),
                                        effects_.front().matrix().cols());
  for (std::size_t i = 0; i < effects_.size(); ++i) m += labels_[i] * effects_[i].matrix();
  return m;
}

LuedersInstrument::LuedersInstrument(Povm povm) : povm_(std::move(povm)) {
  kraus_.reserve(povm_.size());
  for (const auto& e : povm_.effects()) {
    ComplexMatrix k = psd_sqrt(e.matrix());
    if (max_abs_entry(k.adjoint() * k - e.matrix()) > tol::kKraus) {
      throw Error(ErrorCode::NotPsd, "Kraus operator does not reproduce its effect");
    }
    kraus_.push_back(std::move(k));
  }
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  require_hermitian(m, "psd_sqrt input");
  const auto eig = hermitian_eigen(m);
  Eigen::VectorXd roots(eig.values.size());
  const double floor = tol::kRootFloor * std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double v = eig.values[i];
    if (v < -tol::kPsd) {
      throw Error(ErrorCode::NotPsd, "eigenvalue " + std::to_string(v) + " below tolerance");
    }
    roots[i] = v <= floor ? 0.0 : std::sqrt(v);
  }
  ComplexMatrix r = eig.vectors * roots.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return 0.5 * (r + r.adjoint());
}

InstrumentBranch apply_instrument(const LuedersInstrument& inst, const DensityMatrix& rho,
                                  std::size_t outcome) {
  require_dim(inst.dim(), rho.dim(), "apply_instrument");
  if (outcome >= inst.size()) {
    throw Error(ErrorCode::InvalidArgument, "outcome index out of range");
  }
  const ComplexMatrix& k = inst.kraus(outcome);
  ComplexMatrix out = k * rho.matrix() * k.adjoint();
  const double p = out.trace().real();
  return {std::move(out), p};
}

DensityMatrix unregistered_channel(const LuedersInstrument& inst, const DensityMatrix& rho) {
  require_dim(inst.dim(), rho.dim(), "unregistered_channel");
  ComplexMatrix out = ComplexMatrix::Zero(rho.matrix().rows(), rho.matrix().cols());
  for (const auto& k : inst.kraus()) out += k * rho.matrix() * k.adjoint();
  return DensityMatrix(0.5 * (out + out.adjoint()));
}

Eigen::MatrixXd joint_probabilities(const LuedersInstrument& inst_a, const Povm& povm_b,
                                    const DensityMatrix& rho) {
  require_dim(inst_a.dim(), rho.dim(), "joint_probabilities (probe)");
  require_dim(povm_b.dim(), rho.dim(), "joint_probabilities (target)");
  Eigen::MatrixXd p(static_cast<Eigen::Index>(inst_a.size()),
                    static_cast<Eigen::Index>(povm_b.size()));
  for (std::size_t a = 0; a < inst_a.size(); ++a) {
    const ComplexMatrix& k = inst_a.kraus(a);
    const ComplexMatrix post = k * rho.matrix() * k.adjoint();
    for (std::size_t b = 0; b < povm_b.size(); ++b) {
      p(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          (post * povm_b.effect(b).matrix()).trace().real();
    }
  }
  return p;
}

ComplexMatrix dual_channel(const LuedersInstrument& inst_a, const ComplexMatrix& op) {
  if (!is_square(op) || static_cast<std::size_t>(op.rows()) != inst_a.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "dual_channel operand dimension");
  }
  ComplexMatrix out = ComplexMatrix::Zero(op.rows(), op.cols());
  for (const auto& k : inst_a.kraus()) out += k * op * k;
  return out;
}

std::vector<double> outcome_probabilities(const Povm& povm, const DensityMatrix& rho) {
  require_dim(povm.dim(), rho.dim(), "outcome_probabilities");
  std::vector<double> p;
  p.reserve(povm.size());
  for (const auto& e : povm.effects()) p.push_back((rho.matrix() * e.matrix()).trace().real());
  return p;
}

}  // namespace cdtrade
