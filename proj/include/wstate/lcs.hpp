// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "wstate/estimator.hpp"
#include "wstate/instrument.hpp"

namespace wstate {

// |Phi> = sum_l alpha_l |phi_l>, with |phi_l> = W_l |0>.
struct LcsProblem {
  std::vector<ComplexVector> states;
  std::vector<ComplexMatrix> preparations;
  std::vector<Complex> coefficients;
  // gram(l, l') = <phi_l|phi_l'>.
  ComplexMatrix gram;
  // Set when the Gram matrix is an estimate; entries are standard errors.
  std::optional<ComplexMatrix> gram_uncertainty;

  std::size_t size() const { return states.size(); }
  std::size_t dim() const { return states.empty() ? 0 : static_cast<std::size_t>(states[0].size()); }
  ComplexVector target() const;
  double target_norm() const;
};

LcsProblem make_lcs_problem(std::vector<ComplexVector> states, std::vector<Complex> coefficients);
LcsProblem make_lcs_problem_from_unitaries(std::vector<ComplexMatrix> preparations,
                                           std::vector<Complex> coefficients);
// Unitary whose first column is the given unit vector (Householder reflection).
ComplexMatrix preparation_unitary(const ComplexVector& state);

struct PauliTerm {
  Complex coefficient;
  ComplexMatrix unitary;
};
struct PauliDecomposition {
  std::vector<PauliTerm> terms;
  ComplexMatrix observable() const;
};
// Real Pauli expansion of a Hermitian observable with signs folded into the
// unitaries, so every coefficient is non-negative.
PauliDecomposition pauli_decompose(const ComplexMatrix& obs, double drop_tol = 1e-14);
ComplexMatrix pauli_string(std::uint64_t code, int n);

using Permutation = std::vector<int>;
// pi_l(k) = (k + l) mod (L + 1).
std::vector<Permutation> cyclic_permutations(std::size_t count);

MeasurementOperator all_at_once_M(const LcsProblem& problem, const ComplexVector& beta,
                                  const std::vector<Permutation>& perms);
QuantumInstrument build_all_at_once_instrument(const LcsProblem& problem, const ComplexVector& beta,
                                               const std::vector<Permutation>& perms);
WeightedState all_at_once_apply(const LcsProblem& problem, const ComplexVector& beta,
                                const std::vector<Permutation>& perms);

enum class HadamardPart { real, imaginary };
// Probability of ancilla outcome 0 in the simulated one-ancilla circuit.
double hadamard_test_probability(const ComplexMatrix& u_total, HadamardPart part);
double hadamard_test(const ComplexMatrix& u_total, HadamardPart part, std::uint64_t shots,
                     std::uint64_t seed, int workers = 1);

// One circuit of the incoherent method: its estimate is prefactor * E[outcome].
struct IncoherentTerm {
  enum class Kind { direct, hadamard_real, hadamard_imaginary };
  Kind kind;
  double prefactor;
  std::size_t l = 0, lp = 0, pauli = 0;
  // Exact mean and per-shot variance of the outcome.
  double mean = 0.0;
  double variance = 0.0;
  // Bound on the per-shot outcome second moment.
  double bound = 1.0;
};
std::vector<IncoherentTerm> incoherent_terms(const LcsProblem& problem, const ComplexMatrix& v,
                                             const PauliDecomposition& obs);
Complex incoherent_exact(const LcsProblem& problem, const ComplexMatrix& v,
                         const PauliDecomposition& obs);
EstimatorReport incoherent_estimate(const LcsProblem& problem, const ComplexMatrix& v,
                                    const PauliDecomposition& obs, std::uint64_t shots,
                                    std::uint64_t seed, int workers = 1);

struct LcuResult {
  ComplexVector normalized_state;
  double success_probability;
  double norm;
  // Post-selected system branch from the statevector simulation, renormalised.
  ComplexVector simulated_state;
  double simulated_probability;
};
LcuResult lcu_prepare(const LcsProblem& problem);

}  // namespace wstate
