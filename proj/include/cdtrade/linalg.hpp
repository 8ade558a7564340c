#pragma once

// Small dense complex linear algebra shared by every module. Matrices are
// at most ~8x8, so everything is dynamic-size Eigen.

#include <Eigen/Dense>

#include <complex>

namespace cdtrade {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Vec3 = Eigen::Vector3d;

namespace tol {
inline constexpr double kHermitian = 1e-9;
inline constexpr double kPsd = 1e-9;
inline constexpr double kTrace = 1e-9;
inline constexpr double kKraus = 1e-9;
inline constexpr double kProb = 1e-9;
inline constexpr double kComplete = 1e-9;
inline constexpr double kIneq = 1e-9;
// Eigenvalues below this (relative to the spectral radius) are roundoff of an
// exact zero; their square roots (~1e-8) would otherwise leak into Kraus operators.
inline constexpr double kRootFloor = 1e-14;
}  // namespace tol

struct HermitianEigen {
  Eigen::VectorXd values;   // ascending
  ComplexMatrix vectors;    // columns
};

bool is_square(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tolerance = tol::kHermitian);

// Hermitian eigendecomposition (symmetrizes the input first).
HermitianEigen hermitian_eigen(const ComplexMatrix& m);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// Largest |eigenvalue| of a Hermitian matrix.
double spectral_norm_hermitian(const ComplexMatrix& m);

double max_abs_entry(const ComplexMatrix& m);

namespace pauli {
ComplexMatrix identity();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
/// v . sigma
ComplexMatrix dot(const Vec3& v);
}  // namespace pauli

/// Bloch components tr(m sigma_i) / tr-normalized: for m = (c0 I + v.sigma) returns v.
Vec3 bloch_components(const ComplexMatrix& m);

}  // namespace cdtrade
