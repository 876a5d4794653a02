// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "wstate/estimator.hpp"
#include "wstate/instrument.hpp"
#include "wstate/lcs.hpp"

namespace wstate {

// Joint outcome distribution of (O on S, M on E) for one instrument and input.
struct OutcomeDistribution {
  std::vector<Complex> values;  // lambda_b * mu_a
  std::vector<double> probabilities;
};
OutcomeDistribution outcome_distribution(const QuantumInstrument& inst, const QuantumState& input,
                                         const ComplexMatrix& obs);

struct SampleOptions {
  int workers = 1;
  // Pick a decomposition term per shot instead of emulating with an extra ancilla.
  bool randomized = false;
};

EstimatorReport sample_estimate(const QuantumInstrument& inst, const QuantumState& input,
                                const ComplexMatrix& obs, std::uint64_t shots, std::uint64_t seed,
                                const SampleOptions& options = {});
EstimatorReport sample_distribution(const OutcomeDistribution& dist, std::uint64_t shots,
                                    std::uint64_t seed, int workers = 1);

// Per-shot variance Tr[rho_out (O O^dag (x) M M^dag (x) I)] - |Tr tau O|^2.
double variance_exact(const QuantumInstrument& inst, const QuantumState& input,
                      const ComplexMatrix& obs);

struct VarianceBounds {
  double b1;  // ||O||^2 <M M^dag>
  double b2;  // ||O||^2 ||M||^2
};
VarianceBounds variance_bound(const QuantumInstrument& inst, const QuantumState& input,
                              double obs_norm);

double variance_qhp(const WeightedState& tau, const ComplexMatrix& obs, std::uint64_t shots);
double relative_error_qhp(const WeightedState& tau, const ComplexMatrix& obs, std::uint64_t shots);
// scale multiplies the SWAP measurement (d for the plain transpose).
double variance_gqt(const WeightedState& sigma, const WeightedState& rho, const ComplexMatrix& obs,
                    std::uint64_t shots, double scale = 1.0);
double variance_qsp(const ComplexMatrix& sigma, const ComplexMatrix& m, const WeightedState& rho0,
                    const WeightedState& rho1, const ComplexMatrix& obs, std::uint64_t shots);
// beta = (beta0, sqrt(1 - |beta0|^2)).
double variance_lincombo(Complex alpha0, Complex alpha1, Complex beta0, const ComplexVector& psi0,
                         const ComplexVector& psi1, const ComplexMatrix& obs, std::uint64_t shots);

// f(p, q, r) = A/q + B/(1-q) with A = p^2 + p(1-p)/r and B = (1-p)^2 + p(1-p)/r.
double lincombo_bound_f(double p, double q, double r);
// Coherence term of <M^2> that f leaves out (zero when Re(a0 a1* <psi1|psi0>) = 0).
double lincombo_bound_cross(Complex alpha0, Complex alpha1, double q, Complex overlap01);

struct BetaDesign {
  double p;
  double r;
  double q_opt;
  double bound_at_opt;
};
BetaDesign optimal_beta(double p, double r);
double optimal_beta_h(double p, double r);

std::uint64_t hoeffding_shots(double epsilon, double delta, double obs_norm, double m_norm);

double variance_postprocessing(const LcsProblem& problem, const PauliDecomposition& obs,
                               std::uint64_t total_shots);
double variance_postprocessing(const LcsProblem& problem, const ComplexMatrix& v,
                               const PauliDecomposition& obs, std::uint64_t total_shots);
// Continuous allocation s_i = |mu_i| s~ with s~ = total / sum |mu|.
double variance_postprocessing_approx(const LcsProblem& problem, const ComplexMatrix& v,
                                      const PauliDecomposition& obs, std::uint64_t total_shots);

struct ConcatComparison {
  double var_direct;
  double var_concat;
  // Tr(D(rho0) O^2).
  double dephased_term;
  WeightedState tau_direct;
  WeightedState tau_concat;
};
// sigma (.) rho^T with sigma = rho0, rho = rho1: GQT with rho0 as ancilla versus
// transposing rho1 and taking the QHP with rho0. Both variances are per shot and
// computed with variance_exact on the actual instruments.
ConcatComparison compare_concat_vs_direct(const ComplexMatrix& rho0, const ComplexMatrix& rho1,
                                          const ComplexMatrix& obs);
Pipeline build_transpose_then_qhp(int n);

// Per-shot variances for |psi^k> by iterated QHP and by the GQT route, and
// their difference D = <psi^k|O^2|psi^k> - Tr(D(|psi><psi|) O^2).
double power_variance_qhp(const ComplexVector& psi, const ComplexMatrix& obs, int k);
double power_variance_gqt(const ComplexVector& psi, const ComplexMatrix& obs, int k);
double qhp_gqt_power_difference(const ComplexVector& psi, const ComplexMatrix& obs, int k);

}  // namespace wstate
