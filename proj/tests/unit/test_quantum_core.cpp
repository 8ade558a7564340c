#include "cdtrade/error.hpp"
#include "cdtrade/quantum_core.hpp"
#include "cdtrade/qubit_model.hpp"

#include "support/errors.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace cdtrade;
using cdtrade::prop::code_of;

namespace {

ComplexMatrix diag(double a, double b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Povm sharp(const Vec3& axis) { return QubitMeasurement{0.0, axis}.to_povm(); }

}  // namespace

TEST(Linalg, HermitianEigenMatchesGeneralSolver) {
  prop::Gen gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = gen.integer(1, 8);
    const ComplexMatrix g = gen.ginibre(d, d);
    const ComplexMatrix h = g + g.adjoint();
    const auto eig = hermitian_eigen(h);
    Eigen::ComplexEigenSolver<ComplexMatrix> ref(h);
    std::vector<double> expected;
    for (Eigen::Index i = 0; i < d; ++i) expected.push_back(ref.eigenvalues()[i].real());
    std::sort(expected.begin(), expected.end());
    for (Eigen::Index i = 0; i < d; ++i) {
      EXPECT_NEAR(eig.values[i], expected[static_cast<std::size_t>(i)], 1e-11);
    }
    const ComplexMatrix rebuilt =
        eig.vectors * eig.values.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    EXPECT_LT(max_abs_entry(rebuilt - h), 1e-11);
  }
}

TEST(Linalg, PauliAlgebra) {
  EXPECT_LT(max_abs_entry(pauli::x() * pauli::y() - Complex(0, 1) * pauli::z()), 1e-15);
  EXPECT_LT(max_abs_entry(anticommutator(pauli::x(), pauli::z())), 1e-15);
  EXPECT_LT(max_abs_entry(commutator(pauli::z(), pauli::x()) - Complex(0, 2) * pauli::y()), 1e-15);
  const Vec3 v(0.3, -0.2, 0.5);
  EXPECT_LT((bloch_components(pauli::dot(v)) - v).norm(), 1e-15);
  EXPECT_EQ(code_of([] { bloch_components(ComplexMatrix::Identity(3, 3)); }), ErrorCode::NonQubit);
  EXPECT_NEAR(spectral_norm_hermitian(pauli::dot(v)), v.norm(), 1e-14);
}

TEST(DensityMatrix, ValidatesAtConstruction) {
  ComplexMatrix nh = diag(0.5, 0.5);
  nh(0, 1) = 0.1;
  EXPECT_EQ(code_of([&] { DensityMatrix{nh}; }), ErrorCode::NotHermitian);
  EXPECT_EQ(code_of([] { DensityMatrix{diag(0.6, 0.6)}; }), ErrorCode::NotNormalized);
  EXPECT_EQ(code_of([] { DensityMatrix{diag(1.2, -0.2)}; }), ErrorCode::NotPsd);
  EXPECT_EQ(code_of([] { DensityMatrix{ComplexMatrix::Zero(2, 3)}; }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { DensityMatrix::from_bloch(Vec3(1.0, 0.1, 0.0)); }), ErrorCode::NotPsd);
  EXPECT_NO_THROW(DensityMatrix{diag(1.0 + 5e-10, -5e-10)});
  EXPECT_NEAR(DensityMatrix::maximally_mixed(4).purity(), 0.25, 1e-15);
}

TEST(Povm, ValidatesEffectsAndCompleteness) {
  EXPECT_EQ(code_of([] { Effect{diag(1.5, 0.0)}; }), ErrorCode::NotPsd);
  EXPECT_EQ(code_of([] { Povm({Effect(diag(1, 1))}, {1.0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { Povm({Effect(diag(1, 0)), Effect(diag(0, 0.9))}, {1.0, -1.0}); }),
            ErrorCode::NotNormalized);
  EXPECT_EQ(code_of([] { Povm({Effect(diag(1, 0)), Effect(diag(0, 1))}, {1.0}); }),
            ErrorCode::LabelMismatch);
  EXPECT_EQ(code_of([] {
              Povm({Effect(diag(1, 0)), Effect(ComplexMatrix::Identity(3, 3))}, {1.0, -1.0});
            }),
            ErrorCode::DimensionMismatch);
}

TEST(PsdSqrt, Examples) {
  EXPECT_LT(max_abs_entry(psd_sqrt(ComplexMatrix::Identity(2, 2)) - ComplexMatrix::Identity(2, 2)),
            1e-15);
  EXPECT_LT(max_abs_entry(psd_sqrt(diag(0.25, 1.0)) - diag(0.5, 1.0)), 1e-15);
  const ComplexMatrix e = oracle::qubit_effect(0.0, Vec3(0.5, 0.0, 0.0));
  const ComplexMatrix r = psd_sqrt(e);
  EXPECT_LT(max_abs_entry(oracle::mul(r, r) - e), 1e-10);
  EXPECT_LT(max_abs_entry(r - oracle::sqrt_psd(e)), 1e-10);
}

TEST(PsdSqrt, ClampsTinyNegativesRejectsLarger) {
  EXPECT_LT(max_abs_entry(psd_sqrt(diag(-5e-10, 1.0)) - diag(0.0, 1.0)), 1e-15);
  EXPECT_EQ(code_of([] { psd_sqrt(diag(-1e-6, 1.0)); }), ErrorCode::NotPsd);
}

TEST(PsdSqrt, SquaresBackOnRandomPsd) {
  prop::Gen gen(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const ComplexMatrix m = gen.psd(gen.integer(1, 6));
    const ComplexMatrix r = psd_sqrt(m);
    EXPECT_LT(max_abs_entry(r * r - m), 1e-9 * std::max(1.0, max_abs_entry(m)));
  }
}

TEST(ApplyInstrument, SharpAndUnsharpExamples) {
  const auto zero = DensityMatrix::from_bloch(Vec3::UnitZ());
  const auto bz = apply_instrument(LuedersInstrument(sharp(Vec3::UnitZ())), zero, 0);
  EXPECT_NEAR(bz.probability, 1.0, 1e-15);
  EXPECT_LT(max_abs_entry(bz.state - diag(1, 0)), 1e-15);

  const auto bx = apply_instrument(LuedersInstrument(sharp(Vec3::UnitX())), zero, 0);
  EXPECT_NEAR(bx.probability, 0.5, 1e-15);
  EXPECT_LT(max_abs_entry(bx.state - 0.5 * oracle::qubit_state(Vec3::UnitX())), 1e-15);

  const ComplexMatrix e_plus = oracle::qubit_effect(0.0, Vec3(0.5, 0, 0));
  const auto bu = apply_instrument(LuedersInstrument(QubitMeasurement{0.0, Vec3(0.5, 0, 0)}.to_povm()),
                                   zero, 0);
  EXPECT_NEAR(bu.probability, 0.5, 1e-15);
  const ComplexMatrix k = oracle::sqrt_psd(e_plus);
  EXPECT_LT(max_abs_entry(bu.state - oracle::mul(oracle::mul(k, zero.matrix()), k)), 1e-12);
  EXPECT_EQ(code_of([&] { apply_instrument(LuedersInstrument(sharp(Vec3::UnitZ())), zero, 2); }),
            ErrorCode::InvalidArgument);
}

TEST(UnregisteredChannel, Examples) {
  const auto mixed = DensityMatrix::maximally_mixed(2);
  EXPECT_LT(max_abs_entry(unregistered_channel(LuedersInstrument(sharp(Vec3::UnitZ())), mixed).matrix() -
                          mixed.matrix()),
            1e-15);
  const auto zero = DensityMatrix::from_bloch(Vec3::UnitZ());
  EXPECT_LT(max_abs_entry(unregistered_channel(LuedersInstrument(sharp(Vec3::UnitX())), zero).matrix() -
                          diag(0.5, 0.5)),
            1e-15);
  const auto out = unregistered_channel(
      LuedersInstrument(QubitMeasurement{0.0, Vec3(0.5, 0, 0)}.to_povm()), zero);
  EXPECT_LT((2.0 * bloch_components(out.matrix()) - Vec3(0, 0, std::sqrt(3.0) / 2.0)).norm(), 1e-12);
}

TEST(UnregisteredChannel, PreservesTraceAndPositivity) {
  prop::Gen gen(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto d = gen.integer(2, 4);
    const LuedersInstrument inst(gen.uniform() < 0.5 ? gen.dichotomic(d) : gen.povm(d, gen.integer(2, 4)));
    const auto rho = gen.state(d);
    const auto out = unregistered_channel(inst, rho);  // constructor validates trace and PSD
    EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-9);
    EXPECT_GE(hermitian_eigen(out.matrix()).values.minCoeff(), -1e-9);
  }
}

TEST(JointProbabilities, Examples) {
  const auto zero = DensityMatrix::from_bloch(Vec3::UnitZ());
  const LuedersInstrument z(sharp(Vec3::UnitZ()));
  const LuedersInstrument x(sharp(Vec3::UnitX()));
  const auto pzz = joint_probabilities(z, sharp(Vec3::UnitZ()), zero);
  EXPECT_NEAR(pzz(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(pzz.sum() - pzz(0, 0), 0.0, 1e-15);
  const auto pxz = joint_probabilities(x, sharp(Vec3::UnitZ()), zero);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(pxz(i, j), 0.25, 1e-15);

  const Povm b = sharp(Vec3(std::cos(M_PI / 4), 0, std::sin(M_PI / 4)));
  const auto p = joint_probabilities(x, b, zero);
  std::vector<ComplexMatrix> ea, eb;
  for (const auto& e : x.povm().effects()) ea.push_back(e.matrix());
  for (const auto& e : b.effects()) eb.push_back(e.matrix());
  const auto ref = oracle::joint(ea, eb, zero.matrix());
  EXPECT_LT((p - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(JointProbabilities, NormalizedWithCorrectMarginals) {
  prop::Gen gen(14);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto d = gen.integer(2, 4);
    const Povm pa = gen.povm(d, gen.integer(2, 4));
    const Povm pb = gen.povm(d, gen.integer(2, 4));
    const auto rho = gen.state(d);
    const auto p = joint_probabilities(LuedersInstrument(pa), pb, rho);
    EXPECT_NEAR(p.sum(), 1.0, 1e-9);
    std::vector<ComplexMatrix> ea;
    for (const auto& e : pa.effects()) ea.push_back(e.matrix());
    const auto marg = oracle::marginal(ea, rho.matrix());
    for (Eigen::Index a = 0; a < p.rows(); ++a) {
      EXPECT_NEAR(p.row(a).sum(), marg[static_cast<std::size_t>(a)], 1e-9);
    }
    if (trial % 50 == 0) {
      std::vector<ComplexMatrix> eb;
      for (const auto& e : pb.effects()) eb.push_back(e.matrix());
      EXPECT_LT((p - oracle::joint(ea, eb, rho.matrix())).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(DualChannel, Examples) {
  const LuedersInstrument x(sharp(Vec3::UnitX()));
  EXPECT_LT(max_abs_entry(dual_channel(x, pauli::z())), 1e-15);
  const LuedersInstrument xu(QubitMeasurement{0.0, Vec3(0.5, 0, 0)}.to_povm());
  EXPECT_LT(max_abs_entry(dual_channel(xu, pauli::z()) - std::sqrt(0.75) * pauli::z()), 1e-12);
  EXPECT_EQ(code_of([&] { dual_channel(x, ComplexMatrix::Identity(3, 3)); }),
            ErrorCode::DimensionMismatch);
}

TEST(DualChannel, UnitalForRandomInstruments) {
  prop::Gen gen(15);
  for (int trial = 0; trial < 300; ++trial) {
    const auto d = gen.integer(2, 5);
    const LuedersInstrument inst(gen.povm(d, gen.integer(2, 4)));
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    EXPECT_LT(max_abs_entry(dual_channel(inst, id) - id), 1e-9);
    for (std::size_t a = 0; a < inst.size(); ++a) {
      EXPECT_LT(max_abs_entry(inst.kraus(a).adjoint() * inst.kraus(a) - inst.povm().effect(a).matrix()),
                1e-9);
      EXPECT_TRUE(is_hermitian(inst.kraus(a)));
    }
  }
}
