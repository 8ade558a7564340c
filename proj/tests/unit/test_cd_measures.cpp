#include "cdtrade/cd_measures.hpp"
#include "cdtrade/highdim_model.hpp"
#include "cdtrade/qubit_model.hpp"

#include "support/errors.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace cdtrade;
using cdtrade::prop::code_of;

namespace {

QubitMeasurement axis(double theta, double gamma = 1.0, double bias = 0.0) {
  return ConvexPovmSpec{theta, gamma, bias}.to_measurement();
}

std::vector<ComplexMatrix> effects_of(const Povm& p) {
  std::vector<ComplexMatrix> out;
  for (const auto& e : p.effects()) out.push_back(e.matrix());
  return out;
}

}  // namespace

TEST(Correlation, Examples) {
  Eigen::MatrixXd perfect(2, 2);
  perfect << 0.5, 0.0, 0.0, 0.5;
  EXPECT_DOUBLE_EQ(correlation(perfect, {1, -1}, {1, -1}), 1.0);
  const Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(2, 2, 0.25);
  EXPECT_NEAR(correlation(uniform, {1, -1}, {1, -1}), 0.0, 1e-15);

  const auto probe = axis(0.0);
  const auto target = axis(M_PI / 3);
  const auto rho = optimal_state(probe, target);
  const auto joint = oracle::joint(effects_of(probe.to_povm()), effects_of(target.to_povm()),
                                   rho.matrix());
  EXPECT_NEAR(oracle::dichotomic_c(joint), 0.5, 1e-12);
  EXPECT_NEAR(cd_from_scenario(rho, probe.instrument(), target.to_povm()).correlation, 0.5, 1e-12);
}

TEST(Correlation, Errors) {
  const Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(2, 2, 0.25);
  EXPECT_EQ(code_of([&] { correlation(uniform, {1, -1}, {1, 2}); }), ErrorCode::LabelMismatch);
  EXPECT_EQ(code_of([&] { correlation(uniform, {1, -1, 0}, {1, -1}); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] { correlation(0.5 * uniform, {1, -1}, {1, -1}); }), ErrorCode::NotNormalized);
  // Permuted label order is fine: matching goes by label value.
  Eigen::MatrixXd anti(2, 2);
  anti << 0.0, 0.5, 0.5, 0.0;
  EXPECT_DOUBLE_EQ(correlation(anti, {1, -1}, {-1, 1}), 1.0);
}

TEST(Disturbance, Examples) {
  const OutcomeDistribution p{{0.3, 0.7}, {1, -1}};
  EXPECT_DOUBLE_EQ(disturbance(p, p), 0.0);
  EXPECT_DOUBLE_EQ(disturbance({{1.0, 0.0}, {1, -1}}, {{0.5, 0.5}, {1, -1}}), 1.0);

  const auto probe = axis(0.0);
  const auto target = axis(M_PI / 3);
  const auto rho = optimal_state(probe, target);
  const auto tilde = unregistered_channel(probe.instrument(), rho);
  const auto eb = effects_of(target.to_povm());
  const double alone = oracle::trace_product(rho.matrix(), eb[0]);
  const double after = oracle::trace_product(tilde.matrix(), eb[0]);
  EXPECT_NEAR(2.0 * std::abs(alone - after), std::sin(M_PI / 3), 1e-12);
  EXPECT_NEAR(cd_from_scenario(rho, probe.instrument(), target.to_povm()).disturbance,
              std::sin(M_PI / 3), 1e-12);
}

TEST(Disturbance, Errors) {
  EXPECT_EQ(code_of([] { disturbance({{1.0, 0.0}, {1, -1}}, {{1.0, 0.0}, {1, 2}}); }),
            ErrorCode::LabelMismatch);
  EXPECT_EQ(code_of([] { disturbance({{1.0}, {1}}, {{1.0}, {1}}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { disturbance({{0.7, 0.7}, {1, -1}}, {{0.5, 0.5}, {1, -1}}); }),
            ErrorCode::NotNormalized);
}

TEST(CdFromScenario, CompatibleAndComplementary) {
  const auto x = axis(0.0);
  const auto same = cd_from_scenario(optimal_state(x, x), x.instrument(), x.to_povm());
  EXPECT_NEAR(same.correlation, 1.0, 1e-12);
  EXPECT_NEAR(same.disturbance, 0.0, 1e-12);
  const auto z = axis(M_PI / 2);
  const auto comp = cd_from_scenario(optimal_state(x, z), x.instrument(), z.to_povm());
  EXPECT_NEAR(comp.correlation, 0.0, 1e-12);
  EXPECT_NEAR(comp.disturbance, 1.0, 1e-12);
}

TEST(CdFromScenario, SharpProbeCircleAtFig3Strength) {
  const auto probe = axis(0.0);
  for (int k = 0; k < 32; ++k) {
    const double theta = M_PI * k / 31.0;
    const auto target = axis(theta, 0.485);
    const auto v = cd_from_scenario(optimal_state(probe, target), probe.instrument(), target.to_povm());
    EXPECT_NEAR(v.norm_squared(), 0.485 * 0.485, 1e-9) << theta;
  }
}

TEST(CdFromScenario, NOutcomeFormulaReducesToDichotomicForms) {
  prop::Gen gen(21);
  for (int trial = 0; trial < 500; ++trial) {
    const auto d = gen.integer(2, 4);
    const Povm pa = gen.dichotomic(d);
    const Povm pb = gen.dichotomic(d);
    const auto rho = gen.state(d);
    const auto s = scenario_statistics(rho, LuedersInstrument(pa), pb);
    const auto v = cd_from_scenario(rho, LuedersInstrument(pa), pb);
    EXPECT_NEAR(v.correlation, 2.0 * (s.joint(0, 0) + s.joint(1, 1)) - 1.0, 1e-12);
    EXPECT_NEAR(v.disturbance, 2.0 * std::abs(s.alone.probs[0] - s.tilde.probs[0]), 1e-12);
  }
}

TEST(CdFromScenario, TradeoffHoldsForRandomScenarios) {
  prop::Gen gen(22);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto d = gen.integer(2, 4);
    const auto rho = gen.pure_state(d);
    const auto v = cd_from_scenario(rho, LuedersInstrument(gen.dichotomic(d)), gen.dichotomic(d));
    worst = std::max(worst, v.norm_squared());
  }
  EXPECT_LE(worst, 1.0 + 1e-9);
}

TEST(CdFromScenario, TradeoffHoldsForMultiOutcome) {
  prop::Gen gen(23);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto d = gen.integer(2, 4);
    const int n = gen.integer(2, 4);
    const auto v = cd_from_scenario(gen.state(d), LuedersInstrument(gen.povm(d, n)), gen.povm(d, n));
    EXPECT_LE(v.norm_squared(), 1.0 + 1e-9);
  }
}

TEST(DisturbanceOperator, Examples) {
  const auto x = axis(0.0);
  EXPECT_LT(max_abs_entry(disturbance_operator(x.instrument(), pauli::x())), 1e-12);
  EXPECT_LT(max_abs_entry(disturbance_operator(x.instrument(), pauli::z()) - pauli::z()), 1e-12);

  // Rank-one projectors in d = 4 with overlap c^2 = 0.8.
  ComplexVector va = ComplexVector::Zero(4), vb = ComplexVector::Zero(4);
  va[0] = 1.0;
  vb[0] = std::sqrt(0.8);
  vb[2] = std::sqrt(0.2);
  const RandomizedDichotomic pa(va, 1.0), pb(vb, 1.0);
  const auto eig = hermitian_eigen(disturbance_operator(LuedersInstrument(pa.to_povm()),
                                                        pb.to_povm().observable()));
  EXPECT_NEAR(eig.values[0], -0.8, 1e-12);
  EXPECT_NEAR(eig.values[3], 0.8, 1e-12);
  EXPECT_NEAR(eig.values[1], 0.0, 1e-12);
  EXPECT_NEAR(eig.values[2], 0.0, 1e-12);
  EXPECT_EQ(code_of([&] { disturbance_operator(x.instrument(), ComplexMatrix::Identity(3, 3)); }),
            ErrorCode::DimensionMismatch);
}

TEST(CorrelationOperator, Examples) {
  const auto z = axis(M_PI / 2);
  EXPECT_LT(max_abs_entry(correlation_operator(z.instrument(), pauli::z()) -
                          ComplexMatrix::Identity(2, 2)),
            1e-12);
  const auto x = axis(0.0);
  EXPECT_LT(max_abs_entry(correlation_operator(x.instrument(), pauli::z())), 1e-12);
  prop::Gen gen(24);
  const LuedersInstrument three(gen.povm(2, 3));
  EXPECT_EQ(code_of([&] { correlation_operator(three, pauli::z()); }), ErrorCode::NotDichotomic);
}

TEST(CorrelationOperator, MatchesStatisticsOnRandomUnsharpQubits) {
  prop::Gen gen(25);
  const auto probe = gen.qubit_measurement();
  const auto target = gen.qubit_measurement();
  const auto c_op = correlation_operator(probe.instrument(), target.to_povm().observable());
  for (int trial = 0; trial < 100; ++trial) {
    const auto rho = DensityMatrix::from_bloch(gen.ball3());
    const double stat = cd_from_scenario(rho, probe.instrument(), target.to_povm()).correlation;
    EXPECT_NEAR((rho.matrix() * c_op).trace().real(), stat, 1e-9);
  }
}

TEST(OperatorConsistency, RandomDichotomicScenarios) {
  prop::Gen gen(26);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto d = gen.integer(2, 4);
    const Povm pa = gen.dichotomic(d);
    const Povm pb = gen.dichotomic(d);
    const LuedersInstrument inst(pa);
    const auto rho = gen.state(d);
    const ComplexMatrix m_b = pb.observable();
    const auto joint = oracle::joint(effects_of(pa), effects_of(pb), rho.matrix());
    const auto alone = oracle::marginal(effects_of(pb), rho.matrix());
    EXPECT_NEAR((rho.matrix() * correlation_operator(inst, m_b)).trace().real(),
                oracle::dichotomic_c(joint), 1e-9);
    EXPECT_NEAR((rho.matrix() * disturbance_operator(inst, m_b)).trace().real(),
                oracle::dichotomic_signed_d(joint, alone), 1e-9);
    EXPECT_NEAR(signed_disturbance(rho, inst, pb), oracle::dichotomic_signed_d(joint, alone), 1e-9);
  }
}

TEST(Dissipator, Examples) {
  prop::Gen gen(27);
  const ComplexMatrix k = psd_sqrt(gen.dichotomic(3).effect(0).matrix());
  EXPECT_LT(max_abs_entry(dissipator(k, ComplexMatrix::Identity(3, 3))), 1e-12);

  const auto x = axis(0.0);
  const auto inst = x.instrument();
  ComplexMatrix sum = ComplexMatrix::Zero(2, 2);
  for (std::size_t a = 0; a < 2; ++a) {
    const ComplexMatrix l = dissipator(inst.kraus(a), pauli::z());
    EXPECT_LT(max_abs_entry(l - 0.5 * pauli::z()), 1e-12);
    sum += l;
  }
  EXPECT_LT(max_abs_entry(sum - disturbance_operator(inst, pauli::z())), 1e-12);
  EXPECT_EQ(code_of([&] { dissipator(k, pauli::z()); }), ErrorCode::DimensionMismatch);
}

TEST(Dissipator, LuedersDecompositionIdentity) {
  prop::Gen gen(28);
  for (int trial = 0; trial < 500; ++trial) {
    const auto d = gen.integer(2, 5);
    const LuedersInstrument inst(gen.povm(d, gen.integer(2, 3)));
    const ComplexMatrix g = gen.ginibre(d, d);
    const ComplexMatrix m = g + g.adjoint();
    for (std::size_t a = 0; a < inst.size(); ++a) {
      const ComplexMatrix& k = inst.kraus(a);
      const ComplexMatrix& e = inst.povm().effect(a).matrix();
      const ComplexMatrix lhs = oracle::mul(oracle::mul(k, m), k);
      const ComplexMatrix rhs = 0.5 * (e * m + m * e) - dissipator(k, m);
      EXPECT_LT(max_abs_entry(lhs - rhs), 1e-10);
    }
  }
}

TEST(MaxDisturbance, BoundsEveryStateAndIsAttained) {
  prop::Gen gen(29);
  for (int trial = 0; trial < 200; ++trial) {
    const auto probe = gen.qubit_measurement();
    const auto target = gen.qubit_measurement();
    const auto inst = probe.instrument();
    const double bound = max_disturbance(inst, target.to_povm().observable());
    EXPECT_LE(bound, 1.0 + 1e-9);
    const auto d_opt = cd_from_scenario(optimal_state(probe, target), inst, target.to_povm()).disturbance;
    EXPECT_NEAR(d_opt, bound, 1e-9);
    for (int s = 0; s < 10; ++s) {
      const auto rho = DensityMatrix::from_bloch(gen.ball3());
      EXPECT_LE(cd_from_scenario(rho, inst, target.to_povm()).disturbance, bound + 1e-9);
    }
  }
}
