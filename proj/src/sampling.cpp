// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#include "wstate/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <Eigen/Eigenvalues>

#include "wstate/random.hpp"
#include "wstate/subroutines.hpp"

namespace wstate {

std::vector<std::uint64_t> allocate_shots(const std::vector<double>& weights, std::uint64_t total) {
  if (weights.empty()) throw ValidationError("allocate_shots: no weights");
  double sum = 0.0;
  std::size_t nonzero = 0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("allocate_shots: weights must be finite and non-negative");
    sum += w;
    if (w > 0.0) ++nonzero;
  }
  if (nonzero == 0) throw ValidationError("allocate_shots: all weights are zero");
  if (total < nonzero) throw ValidationError("allocate_shots: fewer shots than non-zero weights");
  const std::size_t n = weights.size();
  std::vector<double> exact(n);
  std::vector<std::uint64_t> out(n);
  std::uint64_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    exact[i] = weights[i] / sum * static_cast<double>(total);
    out[i] = static_cast<std::uint64_t>(std::floor(exact[i]));
    used += out[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return exact[a] - std::floor(exact[a]) > exact[b] - std::floor(exact[b]);
  });
  for (std::size_t j = 0; used < total; j = (j + 1) % n) {
    if (weights[order[j]] == 0.0) continue;
    ++out[order[j]];
    ++used;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] == 0.0 || out[i] > 0) continue;
    std::size_t donor = n;
    double surplus = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k)
      if (out[k] >= 2 && static_cast<double>(out[k]) - exact[k] > surplus) {
        surplus = static_cast<double>(out[k]) - exact[k];
        donor = k;
      }
    --out[donor];
    out[i] = 1;
  }
  return out;
}

std::vector<std::uint64_t> sample_counts(const std::vector<double>& probs, std::uint64_t shots,
                                         std::uint64_t seed, std::uint64_t stream, int workers) {
  if (probs.empty()) throw ValidationError("sample_counts: empty distribution");
  if (workers < 1) throw ValidationError("workers must be at least 1");
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0)) throw ValidationError("sample_counts: negative probability");
    acc += probs[i];
    cdf[i] = acc;
  }
  if (!(acc > 0.0)) throw ValidationError("sample_counts: distribution has zero mass");
  for (auto& c : cdf) c /= acc;
  cdf.back() = 1.0;
  auto run = [&](std::uint64_t begin, std::uint64_t end, std::vector<std::uint64_t>& counts) {
    for (std::uint64_t i = begin; i < end; ++i) {
      const double u = counter_uniform(seed, stream, i);
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      ++counts[std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1)];
    }
  };
  const auto w = static_cast<std::uint64_t>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(shots, 1)));
  std::vector<std::vector<std::uint64_t>> partial(w, std::vector<std::uint64_t>(probs.size(), 0));
  if (w == 1) {
    run(0, shots, partial[0]);
  } else {
    std::vector<std::thread> threads;
    for (std::uint64_t t = 0; t < w; ++t)
      threads.emplace_back(run, shots * t / w, shots * (t + 1) / w, std::ref(partial[t]));
    for (auto& th : threads) th.join();
  }
  std::vector<std::uint64_t> counts(probs.size(), 0);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < p.size(); ++i) counts[i] += p[i];
  return counts;
}

namespace {

void require_observable(const QuantumInstrument& inst, const ComplexMatrix& obs) {
  if (!is_square(obs) || static_cast<std::size_t>(obs.rows()) != inst.system_layout().dim())
    throw ValidationError("observable dimension mismatch");
  require_finite(obs, "observable");
  if (!is_hermitian(obs)) throw ValidationError("observable is not Hermitian");
}

QuantumInstrument normal_instrument(const QuantumInstrument& inst) {
  return inst.measurement().is_normal() && !inst.measurement().decomposition() ? inst
                                                                               : emulate_nonnormal(inst);
}

void check_input(const QuantumInstrument& inst, const QuantumState& input) {
  if (input.dim() != inst.input_layout().dim()) throw ValidationError("instrument input dimension mismatch");
}

// Joint distribution of (O eigenvalue, N eigenvalue) for a normal N on E.
void accumulate_distribution(const QuantumInstrument& inst, const QuantumState& input,
                             const ComplexMatrix& n, const ComplexMatrix& obs, Complex scale,
                             double weight, OutcomeDistribution& dist) {
  const auto out = evolve(inst, ensemble_of(input));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (obs + obs.adjoint()));
  const Eigenbasis mb = normal_eigenbasis(n);
  const auto dS = static_cast<Eigen::Index>(out.dS);
  const auto dE = static_cast<Eigen::Index>(out.dE);
  const ComplexMatrix vo = es.eigenvectors().adjoint();
  const ComplexMatrix vm = mb.vectors.conjugate();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dS, dE);
  using Block = Eigen::Map<const ComplexMatrix>;
  for (const auto& t : out.terms) {
    const double w = t.weight.real();
    for (std::size_t g = 0; g < out.dG; ++g) {
      Block k(t.ket.data() + g * out.dS * out.dE, dS, dE);
      p += w * (vo * k * vm).cwiseAbs2();
    }
  }
  double total = 0.0;
  for (Eigen::Index a = 0; a < dS; ++a)
    for (Eigen::Index b = 0; b < dE; ++b) {
      p(a, b) = std::max(p(a, b), 0.0);
      total += p(a, b);
    }
  if (total <= 0.0) throw PreconditionError("outcome distribution has zero mass");
  for (Eigen::Index a = 0; a < dS; ++a)
    for (Eigen::Index b = 0; b < dE; ++b) {
      dist.values.push_back(scale * es.eigenvalues()(a) * mb.values[static_cast<std::size_t>(b)]);
      dist.probabilities.push_back(weight * p(a, b) / total);
    }
}

}  // namespace

OutcomeDistribution outcome_distribution(const QuantumInstrument& inst, const QuantumState& input,
                                         const ComplexMatrix& obs) {
  check_input(inst, input);
  require_observable(inst, obs);
  const auto normal = normal_instrument(inst);
  OutcomeDistribution dist;
  accumulate_distribution(normal, input, normal.measurement().matrix(), obs, 1.0, 1.0, dist);
  return dist;
}

EstimatorReport sample_distribution(const OutcomeDistribution& dist, std::uint64_t shots,
                                    std::uint64_t seed, int workers) {
  if (shots == 0) throw ValidationError("shots must be positive");
  const auto counts = sample_counts(dist.probabilities, shots, seed, 0, workers);
  EstimatorReport r;
  r.shots = shots;
  r.seed = seed;
  Complex m1{0.0, 0.0}, am{0.0, 0.0};
  double m2 = 0.0, a2 = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double c = static_cast<double>(counts[i]);
    m1 += c * dist.values[i];
    m2 += c * std::norm(dist.values[i]);
    am += dist.probabilities[i] * dist.values[i];
    a2 += dist.probabilities[i] * std::norm(dist.values[i]);
  }
  const double s = static_cast<double>(shots);
  r.sample_mean = m1 / s;
  r.sample_variance = std::max(m2 / s - std::norm(r.sample_mean), 0.0);
  r.analytic_mean = am;
  r.analytic_variance = std::max(a2 - std::norm(am), 0.0);
  r.variance_bound = a2;
  return r;
}

EstimatorReport sample_estimate(const QuantumInstrument& inst, const QuantumState& input,
                                const ComplexMatrix& obs, std::uint64_t shots, std::uint64_t seed,
                                const SampleOptions& options) {
  check_input(inst, input);
  require_observable(inst, obs);
  OutcomeDistribution dist;
  const auto& m = inst.measurement();
  if (options.randomized && m.decomposition()) {
    // Each shot draws term k with probability q_k and reweights by c_k / q_k.
    double norm1 = 0.0;
    for (const auto& t : *m.decomposition()) norm1 += std::abs(t.coefficient);
    for (const auto& t : *m.decomposition()) {
      const double q = std::abs(t.coefficient) / norm1;
      if (q == 0.0) continue;
      accumulate_distribution(inst, input, t.op, obs, t.coefficient / q, q, dist);
    }
  } else {
    dist = outcome_distribution(inst, input, obs);
  }
  auto r = sample_distribution(dist, shots, seed, options.workers);
  r.analytic_mean = expectation(apply_exact(inst, input), obs);
  r.analytic_variance = variance_exact(inst, input, obs);
  r.variance_bound = variance_bound(inst, input, operator_norm(obs)).b1;
  return r;
}

double variance_exact(const QuantumInstrument& inst, const QuantumState& input,
                      const ComplexMatrix& obs) {
  check_input(inst, input);
  require_observable(inst, obs);
  const auto normal = normal_instrument(inst);
  const auto out = evolve(normal, ensemble_of(input));
  const ComplexMatrix& m = normal.measurement().matrix();
  const Complex mean = expectation(WeightedState(contract_environment(out, m), normal.system_layout()), obs);
  const double second = expectation_product(out, obs * obs.adjoint(), m * m.adjoint()).real();
  return std::max(second - std::norm(mean), 0.0);
}

VarianceBounds variance_bound(const QuantumInstrument& inst, const QuantumState& input,
                              double obs_norm) {
  check_input(inst, input);
  if (!(obs_norm >= 0.0)) throw ValidationError("obs_norm must be non-negative");
  const auto normal = normal_instrument(inst);
  const auto out = evolve(normal, ensemble_of(input));
  const ComplexMatrix& m = normal.measurement().matrix();
  const double o2 = obs_norm * obs_norm;
  const double mm = expectation_product(out, identity(out.dS), m * m.adjoint()).real();
  const double mnorm = operator_norm(m);
  return {o2 * mm, o2 * mnorm * mnorm};
}

namespace {

std::uint64_t require_shots(std::uint64_t shots) {
  if (shots == 0) throw ValidationError("shots must be positive");
  return shots;
}

void require_obs(const WeightedState& tau, const ComplexMatrix& obs) {
  if (!is_square(obs) || static_cast<std::size_t>(obs.rows()) != tau.dim())
    throw ValidationError("observable dimension mismatch");
}

Complex tr_prod(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

}  // namespace

double variance_qhp(const WeightedState& tau, const ComplexMatrix& obs, std::uint64_t shots) {
  require_obs(tau, obs);
  const double s = static_cast<double>(require_shots(shots));
  const double second = tr_prod(tau.matrix(), obs * obs).real();
  return (second - std::norm(tr_prod(tau.matrix(), obs))) / s;
}

double relative_error_qhp(const WeightedState& tau, const ComplexMatrix& obs, std::uint64_t shots) {
  const double var = variance_qhp(tau, obs, shots);
  return std::sqrt(std::max(var, 0.0)) / std::abs(tr_prod(tau.matrix(), obs));
}

double variance_gqt(const WeightedState& sigma, const WeightedState& rho, const ComplexMatrix& obs,
                    std::uint64_t shots, double scale) {
  require_obs(sigma, obs);
  if (sigma.dim() != rho.dim()) throw ValidationError("gqt: dimension mismatch");
  const double s = static_cast<double>(require_shots(shots));
  const double second =
      (scale * scale * tr_prod(dephase(sigma.matrix()), obs * obs) * trace(rho.matrix())).real();
  const Complex mean = scale * tr_prod(gqt(sigma, rho).matrix(), obs);
  return (second - std::norm(mean)) / s;
}

double variance_qsp(const ComplexMatrix& sigma, const ComplexMatrix& m, const WeightedState& rho0,
                    const WeightedState& rho1, const ComplexMatrix& obs, std::uint64_t shots) {
  require_obs(rho0, obs);
  if (sigma.rows() != 2 || m.rows() != 2) throw ValidationError("qsp: sigma and M must be 2x2");
  const double s = static_cast<double>(require_shots(shots));
  const ComplexMatrix gamma = gamma_in(trace(rho0.matrix()), trace(rho1.matrix()));
  const Complex mean = tr_prod(qsp_oracle(rho0, rho1, alpha_of(sigma, m, gamma)).matrix(), obs);
  const ComplexMatrix second_alpha = alpha_of(sigma, m * m.adjoint(), gamma);
  const double second = tr_prod(qsp_oracle(rho0, rho1, second_alpha).matrix(), obs * obs).real();
  return (second - std::norm(mean)) / s;
}

double variance_lincombo(Complex alpha0, Complex alpha1, Complex beta0, const ComplexVector& psi0,
                         const ComplexVector& psi1, const ComplexMatrix& obs, std::uint64_t shots) {
  if (psi0.size() != psi1.size() || obs.rows() != psi0.size())
    throw ValidationError("lincombo: dimension mismatch");
  const double s = static_cast<double>(require_shots(shots));
  if (std::abs(beta0) > 1.0) throw ValidationError("lincombo: |beta0| must not exceed 1");
  ComplexVector beta(2);
  beta << beta0, std::sqrt(1.0 - std::norm(beta0));
  ComplexMatrix gram(2, 2);
  gram << psi0.squaredNorm(), psi0.dot(psi1), psi1.dot(psi0), psi1.squaredNorm();
  const ComplexMatrix m = lincombo_pair_M(alpha0, alpha1, beta, gram).matrix();
  const ComplexMatrix w = m * m.adjoint();
  const ComplexMatrix o2 = obs * obs;
  const double n0 = gram(0, 0).real(), n1 = gram(1, 1).real();
  // E|X|^2 = Tr[Q(rho0, rho1; sigma (.) (M M^dag)^T (.) gamma) O^2] for rho_i = |psi_i><psi_i|.
  const Complex o2_00 = psi0.dot(o2 * psi0);
  const Complex o2_11 = psi1.dot(o2 * psi1);
  const Complex o2_10 = psi1.dot(o2 * psi0);  // <psi1|O^2|psi0>
  const double b0 = std::norm(beta(0)), b1 = std::norm(beta(1));
  const Complex c01 = beta(0) * std::conj(beta(1)) * w(1, 0);  // alpha'_01
  double second = (b0 * w(0, 0) * n1 * o2_00 + b1 * w(1, 1) * n0 * o2_11).real();
  second += 2.0 * (c01 * gram(0, 1) * o2_10).real();
  const ComplexVector psi = alpha0 * psi0 + alpha1 * psi1;
  const double mean = psi.dot(obs * psi).real();
  return (second - mean * mean) / s;
}

double lincombo_bound_f(double p, double q, double r) {
  const double a = p * p + p * (1 - p) / r;
  const double b = (1 - p) * (1 - p) + p * (1 - p) / r;
  return a / q + b / (1 - q);
}

double lincombo_bound_cross(Complex alpha0, Complex alpha1, double q, Complex overlap01) {
  const double m00 = std::norm(alpha0) / q;
  const double m11 = std::norm(alpha1) / (1 - q);
  return 2.0 * (m00 + m11) * (alpha0 * std::conj(alpha1) * std::conj(overlap01)).real();
}

double optimal_beta_h(double p, double r) {
  const double h2 = (p * p - p) * (-p + p * p - r + 2 * p * r - 2 * p * p * r - p * r * r + p * p * r * r);
  return std::sqrt(std::max(h2, 0.0));
}

BetaDesign optimal_beta(double p, double r) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("optimal_beta: p must lie in (0, 1)");
  if (!(r > 0.0 && r <= 1.0)) throw ValidationError("optimal_beta: r must lie in (0, 1]");
  const double h = optimal_beta_h(p, r);
  const double q = (p - p * p + p * p * r + h) /
                   (2 * p - 2 * p * p + r - 2 * p * r + 2 * p * p * r + 2 * h);
  return {p, r, q, lincombo_bound_f(p, q, r)};
}

std::uint64_t hoeffding_shots(double epsilon, double delta, double obs_norm, double m_norm) {
  if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0) || !(obs_norm > 0.0) || !(m_norm > 0.0))
    throw ValidationError("hoeffding_shots: epsilon, norms must be positive and delta in (0, 1)");
  const double n = 2.0 * obs_norm * obs_norm * m_norm * m_norm * std::log(2.0 / delta) /
                   (epsilon * epsilon);
  return static_cast<std::uint64_t>(std::ceil(n - 1e-9));
}

double variance_postprocessing(const LcsProblem& problem, const ComplexMatrix& v,
                               const PauliDecomposition& obs, std::uint64_t total_shots) {
  const auto terms = incoherent_terms(problem, v, obs);
  std::vector<double> weights;
  for (const auto& t : terms) weights.push_back(std::abs(t.prefactor));
  const auto alloc = allocate_shots(weights, total_shots);
  double var = 0.0;
  for (std::size_t j = 0; j < terms.size(); ++j)
    if (alloc[j] > 0)
      var += terms[j].prefactor * terms[j].prefactor * terms[j].variance / static_cast<double>(alloc[j]);
  return var;
}

double variance_postprocessing(const LcsProblem& problem, const PauliDecomposition& obs,
                               std::uint64_t total_shots) {
  return variance_postprocessing(problem, identity(problem.dim()), obs, total_shots);
}

double variance_postprocessing_approx(const LcsProblem& problem, const ComplexMatrix& v,
                                      const PauliDecomposition& obs, std::uint64_t total_shots) {
  const auto terms = incoherent_terms(problem, v, obs);
  double l1 = 0.0, acc = 0.0;
  for (const auto& t : terms) {
    l1 += std::abs(t.prefactor);
    acc += std::abs(t.prefactor) * t.variance;
  }
  return l1 / static_cast<double>(require_shots(total_shots)) * acc;
}

Pipeline build_transpose_then_qhp(int n) {
  return concatenate(build_transpose_instrument(n), build_qhp_instrument(n), {{"out", "in1"}});
}

ConcatComparison compare_concat_vs_direct(const ComplexMatrix& rho0, const ComplexMatrix& rho1,
                                          const ComplexMatrix& obs) {
  if (rho0.rows() != rho1.rows()) throw ValidationError("concat: dimension mismatch");
  const int n = log2_exact(static_cast<std::size_t>(rho0.rows()));
  const auto s0 = QuantumState::from_density(rho0, RegisterLayout::single("sigma", n));
  const auto s1 = QuantumState::from_density(rho1, RegisterLayout::single("rho", n));
  const auto direct = build_gqt_instrument(s0);
  const auto pipe = build_transpose_then_qhp(n);
  const auto in_t = s1.relabeled(pipe.stage(0).input_layout());
  const auto in_q = s0.relabeled(pipe.fresh_layout(1));
  const auto flat_in = pipe.flattened_input({in_t, in_q});
  ConcatComparison c{variance_exact(direct, s1, obs),
                     variance_exact(pipe.flattened(), flat_in, obs),
                     tr_prod(dephase(rho0), obs * obs).real(),
                     apply_exact(direct, s1),
                     pipe.evaluate(std::vector<QuantumState>{in_t, in_q})};
  return c;
}

double power_variance_qhp(const ComplexVector& psi, const ComplexMatrix& obs, int k) {
  const ComplexVector pk = power_state(psi, k);
  const double m = pk.dot(obs * pk).real();
  return pk.dot(obs * obs * pk).real() - m * m;
}

double power_variance_gqt(const ComplexVector& psi, const ComplexMatrix& obs, int k) {
  const ComplexVector pk = power_state(psi, k);
  const double m = pk.dot(obs * pk).real();
  return tr_prod(dephase(outer(psi, psi)), obs * obs).real() - m * m;
}

double qhp_gqt_power_difference(const ComplexVector& psi, const ComplexMatrix& obs, int k) {
  return power_variance_qhp(psi, obs, k) - power_variance_gqt(psi, obs, k);
}

}  // namespace wstate
