// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <numbers>

#include "test_helpers.hpp"
#include "wstate/random.hpp"
#include "wstate/subroutines.hpp"

namespace wstate {
namespace {

using testing::dens;
using testing::joint;
using testing::mat2;
using testing::MatrixNear;
using testing::pure;
using testing::reg;

WeightedState ws(const ComplexMatrix& m, const std::string& label = "x") {
  return WeightedState(m, reg(label, testing::qubits_of(m.rows())));
}

ComplexMatrix plus_density(std::size_t d) {
  return ComplexMatrix::Constant(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d), 1.0 / static_cast<double>(d));
}

TEST(Qhp, PlusWithPlus) {
  const auto r = qhp(ws(plus_density(2)), ws(plus_density(2)));
  EXPECT_TRUE(MatrixNear(r.matrix(), ComplexMatrix::Constant(2, 2, 0.25), 1e-15));
  EXPECT_NEAR(r.matrix().trace().real(), 0.5, 1e-15);
}

TEST(Qhp, PlusReweightsUniformly) {
  Random rng(1);
  const ComplexMatrix rho = rng.density(2);
  EXPECT_TRUE(MatrixNear(qhp(ws(rho), ws(plus_density(2))).matrix(), rho / 2.0, 1e-15));
}

TEST(Qhp, Symmetric) {
  Random rng(2);
  const ComplexMatrix a = rng.matrix(4), b = rng.matrix(4);
  EXPECT_TRUE(MatrixNear(qhp(ws(a), ws(b)).matrix(), qhp(ws(b), ws(a)).matrix(), 0.0));
  EXPECT_THROW(qhp(ws(a), ws(identity(2))), ValidationError);
}

TEST(QhpInstrument, SmallCases) {
  const auto inst = build_qhp_instrument(1);
  const ComplexVector plus = testing::vec({1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
  const auto phi = apply_exact_vector(inst, kron(plus, plus));
  ASSERT_TRUE(phi.has_value());
  EXPECT_NEAR(std::abs((*phi)(0)), 0.5, 1e-15);
  EXPECT_NEAR(std::abs((*phi)(1)), 0.5, 1e-15);
  EXPECT_THROW(build_qhp_instrument(0), ValidationError);
}

TEST(QhpInstrument, MatchesOracleOnRandomInputs) {
  Random rng(3);
  for (int t = 0; t < 100; ++t) {
    const bool density = t % 2 == 0;
    const int n = density ? 1 + t % 3 : 1 + (t / 2) % 6;
    const auto d = std::size_t{1} << n;
    const auto inst = build_qhp_instrument(n);
    const auto a = density ? dens(rng.density(d), "in0") : pure(rng.state(d), "in0");
    const auto b = density ? dens(rng.density(d), "in1") : pure(rng.state(d), "in1");
    const auto tau = apply_exact(inst, joint(inst, a, b));
    const auto ref = qhp(WeightedState::from_state(a), WeightedState::from_state(b));
    EXPECT_TRUE(MatrixNear(tau.matrix(), ref.matrix(), 1e-10)) << "instance " << t;
  }
}

TEST(PowerState, PlusCubed) {
  const ComplexVector plus = testing::vec({1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
  const ComplexVector p = power_state(plus, 3);
  EXPECT_NEAR(p(0).real(), std::pow(2.0, -1.5), 1e-15);
  EXPECT_NEAR(p.squaredNorm(), 0.25, 1e-15);
}

TEST(PowerState, BasisStateIsFixed) {
  const ComplexVector e = basis_vector(8, 5);
  for (int k = 1; k <= 5; ++k) EXPECT_TRUE(MatrixNear(power_state(e, k), e, 0.0));
  EXPECT_THROW(power_state(e, 0), ValidationError);
}

TEST(PowerState, PowersCompose) {
  Random rng(4);
  const ComplexVector psi = rng.state(8);
  EXPECT_TRUE(MatrixNear(power_state(power_state(psi, 2), 2), power_state(psi, 4), 1e-15));
}

TEST(PowerState, SinFamilyPipelineMatchesDirect) {
  ComplexVector psi(64);
  for (int j = 0; j < 64; ++j) psi(j) = std::sin(j + 1.0);
  psi.normalize();
  const double trace_tau[] = {1.0, 0.023253204986225445, 0.0006022930364577518};
  const double first_amp2[] = {0.02191670172837584, 0.0004803418146505925, 1.0527508279363828e-05};
  for (int k = 1; k <= 10; ++k) {
    std::vector<ComplexVector> inputs{k == 1 ? psi : kron(psi, psi)};
    for (int i = 2; i < k; ++i) inputs.push_back(psi);
    const auto phi = build_power_pipeline(6, k).evaluate_vector(inputs);
    ASSERT_TRUE(phi.has_value());
    const ComplexVector direct = power_state(psi, k);
    EXPECT_LE(max_abs(outer(*phi, *phi) - outer(direct, direct)), 1e-10 * std::max(1.0, direct.squaredNorm()));
    if (k <= 3) {
      EXPECT_NEAR(phi->squaredNorm(), trace_tau[k - 1], 1e-15);
      EXPECT_NEAR(std::norm((*phi)(0)) / phi->squaredNorm() * trace_tau[k - 1], first_amp2[k - 1], 1e-16);
    }
  }
  EXPECT_NEAR(power_state(psi, 10).squaredNorm(), 9.427962029147554e-15, 1e-27);
}

TEST(Gqt, PlusAncillaTransposesOverD) {
  Random rng(5);
  const ComplexMatrix rho = rng.density(2);
  EXPECT_TRUE(MatrixNear(gqt(ws(plus_density(2)), ws(rho)).matrix(), rho.transpose() / 2.0, 1e-15));
}

TEST(Gqt, RealSymmetricInput) {
  Random rng(6);
  const ComplexMatrix r = rng.hermitian(4).real().cast<Complex>();
  const ComplexMatrix sym = 0.5 * (r + r.transpose());
  const ComplexMatrix sigma = rng.density(4);
  EXPECT_TRUE(MatrixNear(gqt(ws(sigma), ws(sym)).matrix(), sigma.cwiseProduct(sym), 1e-15));
}

TEST(Gqt, EntrywiseDefinition) {
  Random rng(7);
  const ComplexMatrix s = rng.matrix(4), r = rng.matrix(4);
  const ComplexMatrix g = gqt(ws(s), ws(r)).matrix();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(g(i, j), s(i, j) * r(j, i));
}

TEST(GqtInstrument, BellEigenvalueMap) {
  EXPECT_EQ(gqt_bell_eigenvalue(0b00, 0b11), 1);
  EXPECT_EQ(gqt_bell_eigenvalue(0b01, 0b01), -1);
  EXPECT_EQ(gqt_bell_eigenvalue(0b11, 0b11), 1);
  EXPECT_EQ(gqt_bell_eigenvalue(0b111, 0b101), 1);
  EXPECT_EQ(gqt_bell_eigenvalue(0b110, 0b111), 1);
  EXPECT_EQ(gqt_bell_eigenvalue(0b100, 0b111), -1);
}

TEST(GqtInstrument, ReadoutCircuitDiagonalisesSwap) {
  for (int n = 1; n <= 2; ++n) {
    const ComplexMatrix r = gqt_bell_readout_circuit(n).dense();
    const ComplexMatrix d = r * swap_operator(n) * r.adjoint();
    const std::size_t dim = std::size_t{1} << (2 * n);
    for (std::size_t a = 0; a < dim; ++a) {
      const int expected = gqt_bell_eigenvalue(a >> n, a & ((std::size_t{1} << n) - 1));
      EXPECT_NEAR(d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real(), expected, 1e-13);
    }
    EXPECT_TRUE(MatrixNear(dephase(d), d, 1e-13));
  }
}

TEST(GqtInstrument, DiagonalStateIsTransposeInvariant) {
  const auto inst = build_gqt_instrument(1);
  const auto tau = apply_exact(inst, joint(inst, dens(plus_density(2), "sigma"), dens(mat2(1, 0, 0, 0), "rho")));
  EXPECT_TRUE(MatrixNear(tau.matrix(), mat2(0.5, 0, 0, 0), 1e-15));
}

TEST(GqtInstrument, MatchesOracleOnRandomInputs) {
  Random rng(8);
  for (int t = 0; t < 100; ++t) {
    const bool density = t % 2 == 0;
    const int n = density ? 1 + t % 2 : 1 + (t / 2) % 3;
    const auto d = std::size_t{1} << n;
    const auto inst = build_gqt_instrument(n);
    const auto s = density ? dens(rng.density(d), "sigma") : pure(rng.state(d), "sigma");
    const auto r = density ? dens(rng.density(d), "rho") : pure(rng.state(d), "rho");
    const auto tau = apply_exact(inst, joint(inst, s, r));
    const auto ref = gqt(WeightedState::from_state(s), WeightedState::from_state(r));
    EXPECT_TRUE(MatrixNear(tau.matrix(), ref.matrix(), 1e-10)) << "instance " << t;
  }
}

TEST(TransposeInstrument, GivesTranspose) {
  Random rng(9);
  const ComplexMatrix rho = rng.density(4);
  const auto tau = apply_exact(build_transpose_instrument(2), dens(rho, "rho"));
  EXPECT_TRUE(MatrixNear(tau.matrix(), rho.transpose(), 1e-13));
}

TEST(QspOracle, MixtureFromDiagonalAlpha) {
  Random rng(10);
  const ComplexMatrix r0 = rng.density(2), r1 = rng.density(2);
  const double p = 0.3;
  const auto r = qsp_oracle(ws(r0), ws(r1), mat2(p, 0, 0, 1 - p));
  EXPECT_TRUE(MatrixNear(r.matrix(), p * r0 + (1 - p) * r1, 1e-15));
}

TEST(QspOracle, AnticommutatorWithIdenticalInputs) {
  Random rng(11);
  const ComplexMatrix rho = rng.density(4);
  EXPECT_TRUE(MatrixNear(qsp_oracle(ws(rho), ws(rho), mat2(0, 1, 1, 0)).matrix(), 2.0 * rho * rho, 1e-15));
}

TEST(QspOracle, CommutatorOfCommutingInputsVanishes) {
  const ComplexMatrix a = mat2(0.3, 0, 0, 0.7), b = mat2(0.9, 0, 0, 0.1);
  EXPECT_TRUE(MatrixNear(qsp_oracle(ws(a), ws(b), mat2(0, 1, -1, 0)).matrix(), ComplexMatrix::Zero(2, 2), 1e-16));
}

TEST(QspOracle, TraceIdentity) {
  Random rng(12);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix r0 = rng.matrix(4), r1 = rng.matrix(4), a = rng.matrix(2);
    const Complex lhs = qsp_oracle(ws(r0), ws(r1), a).matrix().trace();
    const Complex rhs = a(0, 0) * r0.trace() + a(1, 1) * r1.trace() + (a(0, 1) + a(1, 0)) * (r0 * r1).trace();
    EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-12);
  }
}

TEST(QspInstrument, AlphaForSpecialCases) {
  const ComplexMatrix plus = plus_density(2);
  EXPECT_TRUE(MatrixNear(alpha_of(plus, 2.0 * pauli::X(), gamma_in()), mat2(0, 1, 1, 0), 1e-15));
  // Explicit commutator operator [[0,-2],[2,0]].
  EXPECT_TRUE(MatrixNear(alpha_of(plus, mat2(0, -2, 2, 0), gamma_in()), mat2(0, 1, -1, 0), 1e-15));
  const ComplexMatrix g = gamma_in(0.25, 0.5);
  EXPECT_EQ(g(0, 0), Complex(0.5));
  EXPECT_EQ(g(1, 1), Complex(0.25));
  EXPECT_EQ(g(0, 1), Complex(1.0));
  EXPECT_EQ(g(1, 0), Complex(1.0));
}

TEST(QspInstrument, MatchesOracleOnRandomInputs) {
  Random rng(13);
  for (int t = 0; t < 100; ++t) {
    const bool density = t % 2 == 0;
    const int n = density ? 1 + t % 2 : 1 + (t / 2) % 4;
    const auto d = std::size_t{1} << n;
    const ComplexMatrix sigma = rng.density(2);
    const ComplexMatrix m = t % 3 == 0 ? testing::random_normal2(rng) : rng.hermitian(2);
    const auto inst = build_qsp_instrument(dens(sigma, "anc"), MeasurementOperator(m), n);
    const auto r0 = density ? dens(rng.density(d), "in0") : pure(rng.state(d), "in0");
    const auto r1 = density ? dens(rng.density(d), "in1") : pure(rng.state(d), "in1");
    const auto tau = apply_exact(inst, joint(inst, r0, r1));
    const auto ref = qsp_oracle(WeightedState::from_state(r0), WeightedState::from_state(r1),
                                alpha_of(sigma, m, gamma_in()));
    EXPECT_TRUE(MatrixNear(tau.matrix(), ref.matrix(), 1e-10)) << "instance " << t;
  }
}

TEST(Lincombo, SingleTermIsDiagonal) {
  const ComplexVector beta = testing::vec({0.6, 0.8});
  const auto m = lincombo_pair_M(0.7, 0.0, beta, identity(2));
  EXPECT_EQ(m.matrix()(0, 1), Complex(0.0));
  EXPECT_EQ(m.matrix()(1, 0), Complex(0.0));
  Random rng(14);
  const ComplexVector p0 = rng.state(2), p1 = rng.state(2);
  ComplexMatrix gram(2, 2);
  gram << 1.0, p0.dot(p1), p1.dot(p0), 1.0;
  const auto m2 = lincombo_pair_M(0.7, 0.0, beta, gram);
  const auto tau = qsp_oracle(ws(outer(p0, p0)), ws(outer(p1, p1)),
                              alpha_of(outer(beta, beta), m2.matrix(), gamma_in()));
  EXPECT_TRUE(MatrixNear(tau.matrix(), 0.49 * outer(p0, p0), 1e-14));
}

TEST(Lincombo, PlusAndZeroExample) {
  const double h = 1.0 / std::sqrt(2.0);
  const ComplexVector p0 = testing::vec({h, h}), p1 = testing::vec({1.0, 0.0});
  const ComplexVector beta = testing::vec({h, h});
  ComplexMatrix gram(2, 2);
  gram << 1.0, p0.dot(p1), p1.dot(p0), 1.0;
  const auto m = lincombo_pair_M(h, h, beta, gram);
  const auto tau = qsp_oracle(ws(outer(p0, p0)), ws(outer(p1, p1)), alpha_of(outer(beta, beta), m.matrix(), gamma_in()));
  const ComplexVector psi = testing::vec({1.2071067811865475, 0.5});
  EXPECT_TRUE(MatrixNear(tau.matrix(), outer(psi, psi), 1e-14));
}

TEST(Lincombo, RandomInputsHermitianAndCorrect) {
  Random rng(15);
  for (int t = 0; t < 50; ++t) {
    const ComplexVector p0 = rng.state(4), p1 = rng.state(4);
    if (std::abs(p0.dot(p1)) < 1e-3) continue;
    ComplexMatrix gram(2, 2);
    gram << 1.0, p0.dot(p1), p1.dot(p0), 1.0;
    const Complex a0 = rng.complex_normal(), a1 = rng.complex_normal();
    const ComplexVector beta = rng.state(2);
    const auto m = lincombo_pair_M(a0, a1, beta, gram);
    EXPECT_LE(max_abs(m.matrix() - m.matrix().adjoint()), 1e-12);
    const auto inst = build_qsp_instrument(beta_state(beta), m, 2);
    const auto tau = apply_exact(inst, joint(inst, pure(p0, "in0"), pure(p1, "in1")));
    const ComplexVector psi = a0 * p0 + a1 * p1;
    EXPECT_LE(max_abs(tau.matrix() - outer(psi, psi)), 1e-9);
  }
}

TEST(Lincombo, Preconditions) {
  const ComplexVector beta = testing::vec({0.6, 0.8});
  EXPECT_THROW(lincombo_pair_M(1.0, 1.0, beta, identity(2)), OrthogonalInputs);
  EXPECT_THROW(lincombo_pair_M(1.0, 1.0, testing::vec({0.0, 1.0}), identity(2)), ZeroBeta);
  EXPECT_THROW(lincombo_pair_M(1.0, 1.0, testing::vec({1.0, 0.0}), identity(2)), ZeroBeta);
}

TEST(Polynomial, LinearTermIsIdentity) {
  Random rng(16);
  const ComplexVector psi = rng.state(4);
  const auto r = polynomial_pipeline(psi, {{{1, 0, 1.0}}});
  EXPECT_TRUE(MatrixNear(r.exact, psi, 0.0));
  EXPECT_TRUE(MatrixNear(r.pipeline.evaluate().matrix(), outer(psi, psi), 1e-14));
}

TEST(Polynomial, SquareIsPowerState) {
  Random rng(17);
  const ComplexVector psi = rng.state(4);
  const auto r = polynomial_pipeline(psi, {{{2, 0, 1.0}}});
  EXPECT_TRUE(MatrixNear(r.exact, power_state(psi, 2), 0.0));
  EXPECT_TRUE(MatrixNear(r.pipeline.evaluate().matrix(), outer(r.exact, r.exact), 1e-14));
}

TEST(Polynomial, TanhOrderThree) {
  Random rng(18);
  ComplexVector psi = rng.state(8);
  const PolySpec spec{{{1, 0, 1.0}, {3, 0, -1.0 / 3.0}}};
  const auto r = polynomial_pipeline(psi, spec);
  for (int i = 0; i < 8; ++i) {
    const Complex x = psi(i);
    EXPECT_NEAR(std::abs(r.exact(i) - (x - x * x * x / 3.0)), 0.0, 1e-15);
  }
  EXPECT_LE(max_abs(r.pipeline.evaluate().matrix() - outer(r.exact, r.exact)), 1e-10);
}

TEST(Polynomial, ConjugateTermsAndGateScaling) {
  Random rng(19);
  for (int n = 1; n <= 3; ++n) {
    const ComplexVector psi = rng.state(std::size_t{1} << n);
    const PolySpec spec{{{1, 0, 0.5}, {2, 1, Complex(0.2, 0.1)}, {1, 2, -0.3}}};
    const auto r = polynomial_pipeline(psi, spec);
    EXPECT_LE(max_abs(r.pipeline.evaluate().matrix() - outer(r.exact, r.exact)), 1e-10);
    const int chi = poly_chi(spec);
    EXPECT_EQ(chi, 2);
    EXPECT_LE(r.pipeline.two_qubit_gates(), 64L * n * chi * chi);
  }
}

TEST(Polynomial, OrthogonalIntermediateIsReported) {
  // psi = (1, -1)/sqrt2 has psi^2 = (1, 1)/2, orthogonal to psi.
  const double h = 1.0 / std::sqrt(2.0);
  const ComplexVector psi = testing::vec({h, -h});
  try {
    polynomial_pipeline(psi, {{{1, 0, 1.0}, {2, 0, 1.0}}});
  } catch (const OrthogonalIntermediate& e) {
    EXPECT_EQ(e.first, "psi");
    EXPECT_EQ(e.second, "psi^2");
    return;
  }
  FAIL() << "expected OrthogonalIntermediate";
}

TEST(Polynomial, InvalidSpec) {
  Random rng(20);
  const ComplexVector psi = rng.state(2);
  EXPECT_THROW(polynomial_pipeline(psi, {{{1, 0, 0.0}}}), ValidationError);
  EXPECT_THROW(polynomial_pipeline(psi, {{{0, 0, 1.0}}}), ValidationError);
  EXPECT_THROW(polynomial_pipeline(psi, {}), ValidationError);
}

TEST(Teleport, IdentityMapIsStandardTeleportation) {
  Random rng(21);
  const ComplexMatrix rho = rng.density(2);
  const MapPair id{{identity(2), identity(2)}};
  const auto closed = teleport_map(ws(plus_density(2), "sigma"), id, ws(rho, "rho"));
  EXPECT_TRUE(MatrixNear(closed.matrix(), rho / 4.0, 1e-15));
  const auto circuit = teleport_map_circuit(ws(plus_density(2), "sigma"), id, ws(rho, "rho"));
  EXPECT_TRUE(MatrixNear(circuit.matrix(), rho / 4.0, 1e-12));
}

TEST(Teleport, ScaledTransposeIsGqt) {
  Random rng(22);
  for (int n = 1; n <= 2; ++n) {
    const std::size_t d = std::size_t{1} << n;
    MapPair maps;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const ComplexMatrix e = outer(basis_vector(d, i), basis_vector(d, j));
        maps.push_back({std::sqrt(static_cast<double>(d)) * e, std::sqrt(static_cast<double>(d)) * e});
      }
    EXPECT_TRUE(MatrixNear(teleport_measurement(maps), swap_operator(n), 1e-13));
    const ComplexMatrix sigma = rng.density(d), rho = rng.density(d);
    const auto ref = gqt(ws(sigma), ws(rho));
    EXPECT_TRUE(MatrixNear(teleport_map(ws(sigma, "sigma"), maps, ws(rho, "rho")).matrix(), ref.matrix(), 1e-14));
    EXPECT_TRUE(MatrixNear(teleport_map_circuit(ws(sigma, "sigma"), maps, ws(rho, "rho")).matrix(), ref.matrix(), 1e-11));
  }
}

TEST(Teleport, RowSwap) {
  Random rng(23);
  const ComplexMatrix rho = rng.density(2);
  const MapPair swap_rows{{identity(2), pauli::X()}};
  const ComplexMatrix m = teleport_measurement(swap_rows);
  EXPECT_FALSE(is_normal(m));
  const auto closed = teleport_map(ws(plus_density(2), "sigma"), swap_rows, ws(rho, "rho"));
  ComplexMatrix swapped = rho;
  swapped.row(0) = rho.row(1);
  swapped.row(1) = rho.row(0);
  EXPECT_TRUE(MatrixNear(closed.matrix(), swapped / 4.0, 1e-15));
  const auto circuit = teleport_map_circuit(ws(plus_density(2), "sigma"), swap_rows, ws(rho, "rho"));
  EXPECT_TRUE(MatrixNear(circuit.matrix(), swapped / 4.0, 1e-12));
}

TEST(Teleport, RandomMapsCircuitMatchesClosedForm) {
  Random rng(24);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 2;
    const std::size_t d = std::size_t{1} << n;
    MapPair maps{{rng.matrix(d), rng.matrix(d)}, {rng.matrix(d), rng.matrix(d)}};
    const ComplexMatrix sigma = rng.density(d), rho = rng.density(d);
    const auto closed = teleport_map(ws(sigma, "sigma"), maps, ws(rho, "rho"));
    const auto circuit = teleport_map_circuit(ws(sigma, "sigma"), maps, ws(rho, "rho"));
    EXPECT_LE(max_abs(closed.matrix() - circuit.matrix()), 1e-10 * std::max(1.0, max_abs(closed.matrix())));
  }
}

}  // namespace
}  // namespace wstate
