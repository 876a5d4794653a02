// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#include "wstate/subroutines.hpp"

#include <bit>
#include <cmath>

namespace wstate {

namespace {

void require_same_dims(const WeightedState& a, const WeightedState& b, const char* what) {
  if (a.dim() != b.dim()) throw ValidationError(std::string(what) + ": dimension mismatch");
}

RegisterLayout reg(const std::string& label, int n) { return RegisterLayout::single(label, n); }

std::vector<int> range(int start, int count) {
  std::vector<int> w(count);
  for (int i = 0; i < count; ++i) w[i] = start + i;
  return w;
}

QuantumState zero_state(const std::string& label, int n) {
  return QuantumState::from_vector(basis_vector(std::size_t{1} << n, 0), reg(label, n));
}

QuantumState plus_state(const std::string& label, int n) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  ComplexVector v = ComplexVector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
  return QuantumState::from_vector(v, reg(label, n));
}

}  // namespace

WeightedState qhp(const WeightedState& a, const WeightedState& b) {
  require_same_dims(a, b, "qhp");
  return WeightedState(a.matrix().cwiseProduct(b.matrix()), a.layout());
}

WeightedState gqt(const WeightedState& sigma, const WeightedState& rho) {
  require_same_dims(sigma, rho, "gqt");
  return WeightedState(sigma.matrix().cwiseProduct(rho.matrix().transpose()), sigma.layout());
}

WeightedState qsp_oracle(const WeightedState& rho0, const WeightedState& rho1,
                         const ComplexMatrix& alpha) {
  require_same_dims(rho0, rho1, "qsp_oracle");
  if (alpha.rows() != 2 || alpha.cols() != 2) throw ValidationError("qsp_oracle: alpha must be 2x2");
  const auto& a = rho0.matrix();
  const auto& b = rho1.matrix();
  ComplexMatrix out = alpha(0, 0) * a + alpha(1, 1) * b + alpha(0, 1) * (a * b) +
                      alpha(1, 0) * (b * a);
  return WeightedState(std::move(out), rho0.layout());
}

ComplexVector power_state(const ComplexVector& psi, int k) {
  if (k < 1) throw ValidationError("power_state: k must be at least 1");
  ComplexVector out(psi.size());
  for (Eigen::Index i = 0; i < psi.size(); ++i) out(i) = std::pow(psi(i), k);
  return out;
}

QuantumInstrument build_qhp_instrument(int n) {
  if (n < 1) throw ValidationError("build_qhp_instrument: n must be at least 1");
  Circuit u(2 * n);
  for (int i = 0; i < n; ++i) u.cnot(i, n + i);
  const auto d = std::size_t{1} << n;
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  m(0, 0) = 1.0;
  return QuantumInstrument(QuantumState::empty(), reg("in0", n).concat(reg("in1", n)), std::move(u),
                           MeasurementOperator(m),
                           {{"out", Role::system, range(0, n)}, {"env", Role::environment, range(n, n)}},
                           n);
}

Pipeline build_power_pipeline(int n, int k) {
  if (k < 1) throw ValidationError("build_power_pipeline: k must be at least 1");
  if (k == 1) return Pipeline(identity_instrument(reg("in0", n)));
  const auto q = build_qhp_instrument(n);
  Pipeline p(q);
  for (int i = 2; i < k; ++i) p = p.then(q, {{"out", "in0"}});
  return p;
}

namespace {

QuantumInstrument gqt_like(QuantumState ancilla, RegisterLayout inputs, int n, double scale) {
  // Composite wires: copy (0..n-1), sigma (n..2n-1), rho (2n..3n-1).
  Circuit u(3 * n);
  for (int i = 0; i < n; ++i) u.cnot(n + i, i);
  return QuantumInstrument(std::move(ancilla), std::move(inputs), std::move(u),
                           MeasurementOperator(scale * swap_operator(n)),
                           {{"out", Role::system, range(n, n)},
                            {"copy", Role::environment, range(0, n)},
                            {"rho", Role::environment, range(2 * n, n)}},
                           3L * n);
}

}  // namespace

QuantumInstrument build_gqt_instrument(int n) {
  if (n < 1) throw ValidationError("build_gqt_instrument: n must be at least 1");
  return gqt_like(zero_state("copy", n), reg("sigma", n).concat(reg("rho", n)), n, 1.0);
}

QuantumInstrument build_gqt_instrument(const QuantumState& sigma, double scale) {
  const int n = sigma.layout().num_qubits();
  if (n < 1) throw ValidationError("build_gqt_instrument: sigma must have at least one qubit");
  auto anc = QuantumState::tensor(zero_state("copy", n), sigma.relabeled(reg("sigma", n)));
  return gqt_like(std::move(anc), reg("rho", n), n, scale);
}

QuantumInstrument build_transpose_instrument(int n) {
  return build_gqt_instrument(plus_state("sigma", n), static_cast<double>(std::size_t{1} << n));
}

Circuit gqt_bell_readout_circuit(int n) {
  Circuit c(2 * n);
  for (int i = 0; i < n; ++i) c.cnot(i, n + i);
  for (int i = 0; i < n; ++i) c.h(i);
  return c;
}

int gqt_bell_eigenvalue(std::uint64_t x, std::uint64_t y) {
  return (std::popcount(x & y) % 2) ? -1 : 1;
}

QuantumInstrument build_qsp_instrument(const QuantumState& sigma, const MeasurementOperator& m,
                                       int n) {
  if (sigma.dim() != 2) throw ValidationError("build_qsp_instrument: sigma must be one qubit");
  if (m.dim() != 2) throw ValidationError("build_qsp_instrument: M must be 2x2");
  if (n < 1) throw ValidationError("build_qsp_instrument: n must be at least 1");
  Circuit u(2 * n + 1);
  for (int i = 0; i < n; ++i) u.cswap(0, 1 + i, 1 + n + i);
  return QuantumInstrument(sigma.relabeled(reg("anc", 1)), reg("in0", n).concat(reg("in1", n)),
                           std::move(u), m,
                           {{"out", Role::system, range(1, n)},
                            {"anc", Role::environment, {0}},
                            {"rest", Role::garbage, range(1 + n, n)}},
                           18L * n);
}

ComplexMatrix gamma_in(Complex trace_rho0, Complex trace_rho1) {
  ComplexMatrix g(2, 2);
  g << trace_rho1, 1.0, 1.0, trace_rho0;
  return g;
}

ComplexMatrix alpha_of(const ComplexMatrix& sigma, const ComplexMatrix& m,
                       const ComplexMatrix& gamma) {
  if (sigma.rows() != 2 || m.rows() != 2 || gamma.rows() != 2 || sigma.cols() != 2 ||
      m.cols() != 2 || gamma.cols() != 2)
    throw ValidationError("alpha_of: expected 2x2 matrices");
  return sigma.cwiseProduct(m.transpose()).cwiseProduct(gamma);
}

MeasurementOperator lincombo_pair_M(Complex alpha0, Complex alpha1, const ComplexVector& beta,
                                    const ComplexMatrix& gram) {
  if (beta.size() != 2 || gram.rows() != 2 || gram.cols() != 2)
    throw ValidationError("lincombo_pair_M: expected two amplitudes and a 2x2 Gram matrix");
  if (std::abs(beta(0)) < 1e-12) throw ZeroBeta(0);
  if (std::abs(beta(1)) < 1e-12) throw ZeroBeta(1);
  const double n0 = gram(0, 0).real();
  const double n1 = gram(1, 1).real();
  if (n0 <= 0.0 || n1 <= 0.0) throw ValidationError("lincombo_pair_M: Gram diagonal must be positive");
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = std::norm(alpha0) / (std::norm(beta(0)) * n1);
  m(1, 1) = std::norm(alpha1) / (std::norm(beta(1)) * n0);
  if (alpha0 != 0.0 && alpha1 != 0.0) {
    const double overlap = std::abs(gram(0, 1)) / std::sqrt(n0 * n1);
    if (overlap < kOrthogonalityTol) throw OrthogonalInputs(overlap);
    m(1, 0) = alpha0 * std::conj(alpha1) / (beta(0) * std::conj(beta(1)) * gram(0, 1));
    m(0, 1) = std::conj(m(1, 0));
  }
  return MeasurementOperator(m);
}

QuantumState beta_state(const ComplexVector& beta) {
  return QuantumState::from_vector(beta / beta.norm(), reg("anc", 1));
}

WeightedState teleport_map(const WeightedState& sigma, const MapPair& maps,
                           const WeightedState& rho) {
  require_same_dims(sigma, rho, "teleport_map");
  const auto d = static_cast<Eigen::Index>(rho.dim());
  ComplexMatrix e = ComplexMatrix::Zero(d, d);
  for (const auto& [j, k] : maps) {
    if (j.rows() != d || j.cols() != d || k.rows() != d || k.cols() != d)
      throw ValidationError("teleport_map: map dimension mismatch");
    e += k * rho.matrix() * j;
  }
  return WeightedState(sigma.matrix().cwiseProduct(e) / static_cast<double>(d), sigma.layout());
}

ComplexMatrix teleport_measurement(const MapPair& maps) {
  if (maps.empty()) throw ValidationError("teleport: empty map list");
  const auto d = maps.front().first.rows();
  ComplexVector phi = ComplexVector::Zero(d * d);
  for (Eigen::Index a = 0; a < d; ++a) phi(a * d + a) = 1.0 / std::sqrt(static_cast<double>(d));
  const ComplexMatrix id = identity(static_cast<std::size_t>(d));
  ComplexMatrix m = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& [j, k] : maps) {
    if (j.rows() != d || j.cols() != d || k.rows() != d || k.cols() != d)
      throw ValidationError("teleport: map dimension mismatch");
    const ComplexVector left = kron(j, id) * phi;
    const ComplexVector right = kron(k, id).adjoint() * phi;
    m += left * right.adjoint();
  }
  return m;
}

QuantumInstrument build_teleport_instrument(int n, const MapPair& maps) {
  if (n < 1) throw ValidationError("build_teleport_instrument: n must be at least 1");
  if (maps.empty() || maps.front().first.rows() != static_cast<Eigen::Index>(std::size_t{1} << n))
    throw ValidationError("build_teleport_instrument: map dimension mismatch");
  // Composite wires: copy (0..n-1), sigma (n..2n-1), rho (2n..3n-1).
  Circuit u(3 * n);
  for (int i = 0; i < n; ++i) u.cnot(n + i, i);
  QuantumInstrument inst(zero_state("copy", n), reg("sigma", n).concat(reg("rho", n)), std::move(u),
                         MeasurementOperator::with_default_decomposition(teleport_measurement(maps)),
                         {{"out", Role::system, range(0, n)},
                          {"rho", Role::environment, range(2 * n, n)},
                          {"sigma", Role::environment, range(n, n)}},
                         3L * n);
  return emulate_nonnormal(inst);
}

WeightedState teleport_map_circuit(const WeightedState& sigma, const MapPair& maps,
                                   const WeightedState& rho) {
  require_same_dims(sigma, rho, "teleport_map");
  const int n = sigma.layout().num_qubits() > 0 ? sigma.layout().num_qubits()
                                                 : log2_exact(sigma.dim());
  const auto inst = build_teleport_instrument(n, maps);
  const WeightedState joint(kron(sigma.matrix(), rho.matrix()), inst.input_layout());
  const auto tau = apply_exact(inst, joint);
  return WeightedState(tau.matrix(), sigma.layout());
}

}  // namespace wstate
