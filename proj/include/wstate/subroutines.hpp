// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wstate/instrument.hpp"

namespace wstate {

// Closed forms.
WeightedState qhp(const WeightedState& a, const WeightedState& b);
WeightedState gqt(const WeightedState& sigma, const WeightedState& rho);
// a00 rho0 + a11 rho1 + a01 rho0 rho1 + a10 rho1 rho0.
WeightedState qsp_oracle(const WeightedState& rho0, const WeightedState& rho1,
                         const ComplexMatrix& alpha);
ComplexVector power_state(const ComplexVector& psi, int k);

// Quantum Hadamard product: inputs in0, in1; CNOT in0[i] -> in1[i]; S = out
// (the in0 wires), E = env (the in1 wires), M = |0..0><0..0|.
QuantumInstrument build_qhp_instrument(int n);
// k - 1 chained QHP instruments; stage i takes the previous output and a fresh copy.
Pipeline build_power_pipeline(int n, int k);

// Generalised quantum transpose: ancilla copy = |0..0>, inputs sigma, rho;
// CNOT sigma[i] -> copy[i]; S = out (sigma wires), E = (copy, rho), M = SWAP.
QuantumInstrument build_gqt_instrument(int n);
// Same circuit with sigma held in the ancilla and M = scale * SWAP; input rho.
QuantumInstrument build_gqt_instrument(const QuantumState& sigma, double scale = 1.0);
// sigma = |+..+><+..+| and M = d SWAP: tau = rho^T.
QuantumInstrument build_transpose_instrument(int n);
// Bell-basis SWAP readout on registers a (wires 0..n-1) and b (n..2n-1):
// CNOT a[i] -> b[i], then H on a[i]; outcome bits (x, y) have eigenvalue (-1)^{x.y}.
Circuit gqt_bell_readout_circuit(int n);
int gqt_bell_eigenvalue(std::uint64_t x, std::uint64_t y);

// Quantum state polynomial: ancilla anc = sigma (one qubit), inputs in0, in1;
// controlled SWAP of in0 and in1; S = out (in0 wires), E = anc, G = rest (in1 wires).
QuantumInstrument build_qsp_instrument(const QuantumState& sigma, const MeasurementOperator& m,
                                       int n);
// gamma00 = Tr rho1, gamma11 = Tr rho0, off-diagonal entries 1.
ComplexMatrix gamma_in(Complex trace_rho0 = 1.0, Complex trace_rho1 = 1.0);
// alpha = sigma (.) M^T (.) gamma.
ComplexMatrix alpha_of(const ComplexMatrix& sigma, const ComplexMatrix& m,
                       const ComplexMatrix& gamma);

inline constexpr double kOrthogonalityTol = 1e-6;

// 2x2 Hermitian M such that QSP with sigma = |beta><beta| gives
// |psi><psi|, psi = alpha0 psi0 + alpha1 psi1. gram(i, j) = <psi_i|psi_j>.
MeasurementOperator lincombo_pair_M(Complex alpha0, Complex alpha1, const ComplexVector& beta,
                                    const ComplexMatrix& gram);
QuantumState beta_state(const ComplexVector& beta);

// Teleportation view: E(X) = sum_i K_i X J_i and tau = sigma (.) E(rho) / d.
using MapPair = std::vector<std::pair<ComplexMatrix, ComplexMatrix>>;  // (J, K)
WeightedState teleport_map(const WeightedState& sigma, const MapPair& maps,
                           const WeightedState& rho);
// Measurement sum_i (J_i (x) I)|Phi+><Phi+|(K_i (x) I) on registers (rho, sigma).
ComplexMatrix teleport_measurement(const MapPair& maps);
// Inputs sigma, rho; ancilla copy = |0..0>; CNOT sigma[i] -> copy[i];
// S = out (copy wires), E = (rho, sigma). Non-normal measurements are emulated.
QuantumInstrument build_teleport_instrument(int n, const MapPair& maps);
WeightedState teleport_map_circuit(const WeightedState& sigma, const MapPair& maps,
                                   const WeightedState& rho);

struct PolyTerm {
  int k = 1;
  int l = 0;
  Complex coefficient;
};
struct PolySpec {
  std::vector<PolyTerm> terms;
};

ComplexVector polynomial_exact(const ComplexVector& psi, const PolySpec& spec);

// DAG of instruments built from powers (QHP), conjugation (transpose GQT),
// products (QHP) and pairwise linear combinations (QSP with lincombo M).
class PolynomialPipeline {
 public:
  enum class Kind { leaf, qhp, transpose, combine, scale };
  struct Node {
    Kind kind;
    std::string name;
    std::vector<int> inputs;
    std::optional<QuantumInstrument> instrument;
    ComplexVector intended;
  };

  int add_node(Node node);
  const std::vector<Node>& nodes() const { return nodes_; }
  int output() const { return static_cast<int>(nodes_.size()) - 1; }
  WeightedState evaluate() const;
  long two_qubit_gates() const;
  int num_qubits() const { return n_; }
  void set_leaf_state(ComplexVector psi, int n);

 private:
  std::vector<Node> nodes_;
  ComplexVector psi_;
  int n_ = 0;
};

struct PolynomialResult {
  ComplexVector exact;
  PolynomialPipeline pipeline;
};
PolynomialResult polynomial_pipeline(const ComplexVector& psi, const PolySpec& spec);
int poly_chi(const PolySpec& spec);
// Vector v with m = v v^dagger, for a rank-one positive m.
ComplexVector rank_one_vector(const ComplexMatrix& m);

enum class QspCase { diagonal, case1, case2, not_realizable };
const char* to_string(QspCase c);

struct QspSolution {
  // Ancilla |sigma> = cos(theta/2)|0> + sin(theta/2)|1>.
  double theta;
  ComplexMatrix sigma;
  ComplexMatrix m;
};

struct QspSolverResult {
  bool realizable = false;
  QspCase kind = QspCase::not_realizable;
  std::vector<QspSolution> solutions;
  std::string note;
};

// Pure sigma and normal M with sigma (.) M^T = alpha (unit input traces).
QspSolverResult solve_qsp_realizable(const ComplexMatrix& alpha);
ComplexMatrix sigma_from_theta(double theta);

}  // namespace wstate
