#include "cdtrade/linalg.hpp"

#include "cdtrade/error.hpp"

#include <algorithm>
#include <cmath>

namespace cdtrade {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::NotDichotomic: return "NotDichotomic";
    case ErrorCode::InvalidMeasurement: return "InvalidMeasurement";
    case ErrorCode::InvalidBias: return "InvalidBias";
    case ErrorCode::ZeroBloch: return "ZeroBloch";
    case ErrorCode::InvalidAngle: return "InvalidAngle";
    case ErrorCode::ProbeNotSharp: return "ProbeNotSharp";
    case ErrorCode::InvalidDim: return "InvalidDim";
    case ErrorCode::InvalidNoise: return "InvalidNoise";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NonQubit: return "NonQubit";
    case ErrorCode::ZeroProbability: return "ZeroProbability";
    case ErrorCode::InvalidShots: return "InvalidShots";
    case ErrorCode::EmptyRecord: return "EmptyRecord";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NotAnEllipse: return "NotAnEllipse";
  }
  return "Unknown";
}

bool is_square(const ComplexMatrix& m) { return m.rows() == m.cols() && m.rows() > 0; }

bool is_hermitian(const ComplexMatrix& m, double tolerance) {
  if (!is_square(m)) return false;
  return max_abs_entry(m - m.adjoint()) <= tolerance;
}

HermitianEigen hermitian_eigen(const ComplexMatrix& m) {
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidArgument, "Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b + b * a;
}

double spectral_norm_hermitian(const ComplexMatrix& m) {
  const auto eig = hermitian_eigen(m);
  return std::max(std::abs(eig.values.minCoeff()), std::abs(eig.values.maxCoeff()));
}

double max_abs_entry(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

namespace pauli {

ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

ComplexMatrix dot(const Vec3& v) { return v.x() * x() + v.y() * y() + v.z() * z(); }

}  // namespace pauli

Vec3 bloch_components(const ComplexMatrix& m) {
  if (m.rows() != 2 || m.cols() != 2) {
    throw Error(ErrorCode::NonQubit, "Bloch components need a 2x2 matrix");
  }
  return {0.5 * (m * pauli::x()).trace().real(), 0.5 * (m * pauli::y()).trace().real(),
          0.5 * (m * pauli::z()).trace().real()};
}

}  // namespace cdtrade
