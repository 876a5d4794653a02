// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#include "wstate/lcs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "wstate/random.hpp"

namespace wstate {

namespace {

int ancilla_qubits(std::size_t count) {
  int a = 1;
  while ((std::size_t{1} << a) < count) ++a;
  return a;
}

void validate_coefficients(const LcsProblem& p) {
  if (p.states.empty()) throw ValidationError("LcsProblem: no states");
  if (p.coefficients.size() != p.states.size())
    throw ValidationError("LcsProblem: one coefficient per state is required");
}

}  // namespace

ComplexVector LcsProblem::target() const {
  ComplexVector phi = ComplexVector::Zero(static_cast<Eigen::Index>(dim()));
  for (std::size_t l = 0; l < states.size(); ++l) phi += coefficients[l] * states[l];
  return phi;
}

double LcsProblem::target_norm() const {
  Complex acc{0.0, 0.0};
  for (std::size_t l = 0; l < size(); ++l)
    for (std::size_t lp = 0; lp < size(); ++lp)
      acc += std::conj(coefficients[l]) * coefficients[lp] *
             gram(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(lp));
  return std::sqrt(std::max(acc.real(), 0.0));
}

ComplexMatrix preparation_unitary(const ComplexVector& state) {
  const auto d = state.size();
  if (std::abs(state.norm() - 1.0) > kStateTol) throw ValidationError("preparation: state is not normalised");
  const Complex phase = std::abs(state(0)) > 0.0 ? state(0) / std::abs(state(0)) : Complex(1.0, 0.0);
  const ComplexVector v = state / phase;
  ComplexVector w = -v;
  w(0) += 1.0;
  ComplexMatrix u = identity(static_cast<std::size_t>(d));
  const double wn = w.squaredNorm();
  if (wn > 1e-30) u -= (2.0 / wn) * (w * w.adjoint());
  return phase * u;
}

LcsProblem make_lcs_problem(std::vector<ComplexVector> states, std::vector<Complex> coefficients) {
  LcsProblem p;
  p.states = std::move(states);
  p.coefficients = std::move(coefficients);
  validate_coefficients(p);
  const auto d = p.states[0].size();
  if (!is_power_of_two(static_cast<std::size_t>(d))) throw ValidationError("LcsProblem: dimension is not a power of two");
  for (const auto& s : p.states) {
    if (s.size() != d) throw ValidationError("LcsProblem: states differ in dimension");
    p.preparations.push_back(preparation_unitary(s));
  }
  const auto n = static_cast<Eigen::Index>(p.states.size());
  p.gram.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) p.gram(i, j) = p.states[i].dot(p.states[j]);
  return p;
}

LcsProblem make_lcs_problem_from_unitaries(std::vector<ComplexMatrix> preparations,
                                           std::vector<Complex> coefficients) {
  std::vector<ComplexVector> states;
  for (const auto& w : preparations) {
    if (!is_unitary(w)) throw ValidationError("LcsProblem: preparation is not unitary");
    states.push_back(w.col(0));
  }
  auto p = make_lcs_problem(std::move(states), std::move(coefficients));
  p.preparations = std::move(preparations);
  return p;
}

ComplexMatrix pauli_string(std::uint64_t code, int n) {
  ComplexMatrix m = ComplexMatrix::Ones(1, 1);
  for (int q = 0; q < n; ++q) {
    switch ((code >> (2 * (n - 1 - q))) & 3U) {
      case 0: m = kron(m, pauli::I()); break;
      case 1: m = kron(m, pauli::X()); break;
      case 2: m = kron(m, pauli::Y()); break;
      default: m = kron(m, pauli::Z()); break;
    }
  }
  return m;
}

ComplexMatrix PauliDecomposition::observable() const {
  if (terms.empty()) throw ValidationError("Pauli decomposition is empty");
  ComplexMatrix o = ComplexMatrix::Zero(terms[0].unitary.rows(), terms[0].unitary.cols());
  for (const auto& t : terms) o += t.coefficient * t.unitary;
  return o;
}

PauliDecomposition pauli_decompose(const ComplexMatrix& obs, double drop_tol) {
  if (!is_hermitian(obs)) throw ValidationError("pauli_decompose: observable is not Hermitian");
  const int n = log2_exact(static_cast<std::size_t>(obs.rows()));
  const double d = static_cast<double>(obs.rows());
  PauliDecomposition out;
  const std::uint64_t count = std::uint64_t{1} << (2 * n);
  for (std::uint64_t code = 0; code < count; ++code) {
    ComplexMatrix p = pauli_string(code, n);
    const double c = (p.cwiseProduct(obs.transpose())).sum().real() / d;
    if (std::abs(c) <= drop_tol) continue;
    if (c < 0) p = -p;
    out.terms.push_back({std::abs(c), std::move(p)});
  }
  if (out.terms.empty()) out.terms.push_back({0.0, identity(obs.rows())});
  return out;
}

std::vector<Permutation> cyclic_permutations(std::size_t count) {
  std::vector<Permutation> perms(count, Permutation(count));
  for (std::size_t l = 0; l < count; ++l)
    for (std::size_t k = 0; k < count; ++k) perms[l][k] = static_cast<int>((k + l) % count);
  return perms;
}

namespace {

void validate_all_at_once(const LcsProblem& problem, const ComplexVector& beta,
                          const std::vector<Permutation>& perms) {
  validate_coefficients(problem);
  const std::size_t count = problem.size();
  if (static_cast<std::size_t>(beta.size()) != count)
    throw ValidationError("all_at_once: beta must have one amplitude per state");
  if (perms.size() != count) throw ValidationError("all_at_once: one permutation per state is required");
  for (std::size_t l = 0; l < count; ++l) {
    Permutation sorted = perms[l];
    if (sorted.size() != count) throw ValidationError("all_at_once: permutation has the wrong length");
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < count; ++k)
      if (sorted[k] != static_cast<int>(k)) throw ValidationError("all_at_once: not a permutation");
    if (perms[l][0] != static_cast<int>(l)) throw ValidationError("all_at_once: pi_l(0) must equal l");
  }
  for (std::size_t l = 0; l < count; ++l)
    if (std::abs(beta(static_cast<Eigen::Index>(l))) < 1e-12) throw ZeroBeta(static_cast<int>(l));
}

}  // namespace

MeasurementOperator all_at_once_M(const LcsProblem& problem, const ComplexVector& beta,
                                  const std::vector<Permutation>& perms) {
  validate_all_at_once(problem, beta, perms);
  const std::size_t count = problem.size();
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << ancilla_qubits(count));
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  const auto& a = problem.coefficients;
  for (std::size_t l = 0; l < count; ++l)
    for (std::size_t lp = 0; lp <= l; ++lp) {
      Complex prod{1.0, 0.0};
      double smallest = std::numeric_limits<double>::infinity();
      std::size_t worst = 1;
      for (std::size_t k = 1; k < count; ++k) {
        const Complex g = problem.gram(perms[lp][k], perms[l][k]);
        if (std::abs(g) < smallest) {
          smallest = std::abs(g);
          worst = k;
        }
        prod *= g;
      }
      if (std::abs(prod) < 1e-9)
        throw VanishingOverlapProduct(static_cast<int>(l), static_cast<int>(lp), static_cast<int>(worst),
                                      std::abs(prod));
      const auto li = static_cast<Eigen::Index>(l), lpi = static_cast<Eigen::Index>(lp);
      const Complex entry = a[l] * std::conj(a[lp]) / (beta(li) * std::conj(beta(lpi)) * prod);
      if (l == lp) {
        m(li, li) = entry.real();
      } else {
        m(lpi, li) = entry;
        m(li, lpi) = std::conj(entry);
      }
    }
  return MeasurementOperator(m);
}

QuantumInstrument build_all_at_once_instrument(const LcsProblem& problem, const ComplexVector& beta,
                                               const std::vector<Permutation>& perms) {
  auto m = all_at_once_M(problem, beta, perms);
  if (std::abs(beta.norm() - 1.0) > kStateTol) throw ValidationError("all_at_once: beta is not normalised");
  const std::size_t count = problem.size();
  const int a = ancilla_qubits(count);
  const int n = log2_exact(problem.dim());
  const int regs = static_cast<int>(count);
  const int total = a + regs * n;
  if (total > 14) throw ValidationError("all_at_once: circuit too large for dense simulation");

  ComplexVector anc = ComplexVector::Zero(static_cast<Eigen::Index>(std::size_t{1} << a));
  anc.head(beta.size()) = beta;
  std::vector<Register> in;
  for (int r = 0; r < regs; ++r) in.push_back({"r" + std::to_string(r), n});

  // Controlled permutation: for ancilla value l, register k receives register pi_l(k).
  const std::size_t dsys = std::size_t{1} << (regs * n);
  const std::size_t dreg = std::size_t{1} << n;
  const auto dtot = static_cast<Eigen::Index>(dsys << a);
  ComplexMatrix u = ComplexMatrix::Zero(dtot, dtot);
  std::vector<std::size_t> digits(regs);
  for (std::size_t l = 0; l < (std::size_t{1} << a); ++l)
    for (std::size_t x = 0; x < dsys; ++x) {
      std::size_t rest = x;
      for (int r = regs - 1; r >= 0; --r) {
        digits[r] = rest % dreg;
        rest /= dreg;
      }
      std::size_t y = x;
      if (l < count) {
        y = 0;
        for (int k = 0; k < regs; ++k) y = y * dreg + digits[perms[l][k]];
      }
      u(static_cast<Eigen::Index>(l * dsys + y), static_cast<Eigen::Index>(l * dsys + x)) = 1.0;
    }
  Circuit c(total);
  std::vector<int> all(total);
  std::iota(all.begin(), all.end(), 0);
  c.unitary(u, all, "C-PERM");

  std::vector<OutputRegister> outs;
  std::vector<int> w0(n), wa(a);
  std::iota(w0.begin(), w0.end(), a);
  std::iota(wa.begin(), wa.end(), 0);
  outs.push_back({"r0", Role::system, w0});
  outs.push_back({"ctl", Role::environment, wa});
  for (int r = 1; r < regs; ++r) {
    std::vector<int> w(n);
    std::iota(w.begin(), w.end(), a + r * n);
    outs.push_back({"r" + std::to_string(r), Role::garbage, w});
  }
  return QuantumInstrument(QuantumState::from_vector(anc, RegisterLayout::single("ctl", a)),
                           RegisterLayout(in), std::move(c), std::move(m), std::move(outs),
                           18L * n * (regs - 1) * static_cast<long>(count));
}

WeightedState all_at_once_apply(const LcsProblem& problem, const ComplexVector& beta,
                                const std::vector<Permutation>& perms) {
  const auto inst = build_all_at_once_instrument(problem, beta, perms);
  ComplexVector joint = ComplexVector::Ones(1);
  for (const auto& s : problem.states) joint = kron(joint, s);
  return apply_exact(inst, QuantumState::from_vector(joint, inst.input_layout()));
}

double hadamard_test_probability(const ComplexMatrix& u_total, HadamardPart part) {
  if (!is_unitary(u_total)) throw ValidationError("hadamard_test: operator is not unitary");
  const int n = log2_exact(static_cast<std::size_t>(u_total.rows()));
  Circuit c(n + 1);
  std::vector<int> targets(n);
  std::iota(targets.begin(), targets.end(), 1);
  c.h(0);
  if (n > 0) c.controlled(0, u_total, targets);
  else {
    ComplexMatrix phase = identity(2);
    phase(1, 1) = u_total(0, 0);
    c.unitary(phase, {0});
  }
  if (part == HadamardPart::imaginary) c.s_dagger(0);
  c.h(0);
  ComplexVector v = basis_vector(std::size_t{1} << (n + 1), 0);
  c.apply(v);
  const auto half = v.size() / 2;
  return std::clamp(v.head(half).squaredNorm(), 0.0, 1.0);
}

double hadamard_test(const ComplexMatrix& u_total, HadamardPart part, std::uint64_t shots,
                     std::uint64_t seed, int workers) {
  if (shots == 0) throw ValidationError("hadamard_test: shots must be positive");
  const double p0 = hadamard_test_probability(u_total, part);
  const auto counts = sample_counts({p0, 1.0 - p0}, shots, seed, 0, workers);
  return (static_cast<double>(counts[0]) - static_cast<double>(counts[1])) / static_cast<double>(shots);
}

namespace {

struct DirectDistribution {
  std::vector<double> values;
  std::vector<double> probs;
};

DirectDistribution direct_distribution(const ComplexMatrix& obs, const ComplexVector& state) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (obs + obs.adjoint()));
  const ComplexVector amp = es.eigenvectors().adjoint() * state;
  DirectDistribution d;
  for (Eigen::Index i = 0; i < amp.size(); ++i) {
    d.values.push_back(es.eigenvalues()(i));
    d.probs.push_back(std::norm(amp(i)));
  }
  return d;
}

}  // namespace

std::vector<IncoherentTerm> incoherent_terms(const LcsProblem& problem, const ComplexMatrix& v,
                                             const PauliDecomposition& obs) {
  validate_coefficients(problem);
  if (obs.terms.empty()) throw ValidationError("incoherent_estimate: empty observable decomposition");
  if (!is_unitary(v)) throw ValidationError("incoherent_estimate: V is not unitary");
  const ComplexMatrix o = obs.observable();
  if (!is_hermitian(o)) throw ValidationError("incoherent_estimate: observable is not Hermitian");
  if (o.rows() != v.rows() || static_cast<std::size_t>(v.rows()) != problem.dim())
    throw ValidationError("incoherent_estimate: dimension mismatch");
  const ComplexMatrix o_eff = v.adjoint() * o * v;
  const ComplexMatrix o2_eff = v.adjoint() * o * o * v;
  const double onorm2 = std::pow(operator_norm(o), 2);
  std::vector<IncoherentTerm> terms;
  const auto& a = problem.coefficients;
  for (std::size_t l = 0; l < problem.size(); ++l) {
    if (a[l] == 0.0) continue;
    const auto& phi = problem.states[l];
    IncoherentTerm t{IncoherentTerm::Kind::direct, std::norm(a[l]), l, l, 0};
    t.mean = phi.dot(o_eff * phi).real();
    t.variance = std::max(phi.dot(o2_eff * phi).real() - t.mean * t.mean, 0.0);
    t.bound = onorm2;
    terms.push_back(t);
  }
  for (std::size_t l = 0; l < problem.size(); ++l)
    for (std::size_t lp = l + 1; lp < problem.size(); ++lp) {
      for (std::size_t i = 0; i < obs.terms.size(); ++i) {
        // 2 Re(z <phi_lp|V^dag U_i V|phi_l>) with z = eta_i alpha_l alpha_lp^*.
        const Complex z = obs.terms[i].coefficient * a[l] * std::conj(a[lp]);
        const ComplexMatrix u = problem.preparations[lp].adjoint() * v.adjoint() *
                                obs.terms[i].unitary * v * problem.preparations[l];
        const Complex w = u(0, 0);
        if (z.real() != 0.0) {
          IncoherentTerm t{IncoherentTerm::Kind::hadamard_real, 2.0 * z.real(), l, lp, i};
          t.mean = w.real();
          t.variance = std::max(1.0 - t.mean * t.mean, 0.0);
          terms.push_back(t);
        }
        if (z.imag() != 0.0) {
          IncoherentTerm t{IncoherentTerm::Kind::hadamard_imaginary, -2.0 * z.imag(), l, lp, i};
          t.mean = w.imag();
          t.variance = std::max(1.0 - t.mean * t.mean, 0.0);
          terms.push_back(t);
        }
      }
    }
  return terms;
}

Complex incoherent_exact(const LcsProblem& problem, const ComplexMatrix& v,
                         const PauliDecomposition& obs) {
  double acc = 0.0;
  for (const auto& t : incoherent_terms(problem, v, obs)) acc += t.prefactor * t.mean;
  return acc;
}

EstimatorReport incoherent_estimate(const LcsProblem& problem, const ComplexMatrix& v,
                                    const PauliDecomposition& obs, std::uint64_t shots,
                                    std::uint64_t seed, int workers) {
  const auto terms = incoherent_terms(problem, v, obs);
  std::vector<double> weights;
  for (const auto& t : terms) weights.push_back(std::abs(t.prefactor));
  const auto alloc = allocate_shots(weights, shots);
  const ComplexMatrix o = obs.observable();
  EstimatorReport r;
  r.shots = shots;
  r.seed = seed;
  double estimate = 0.0, exact = 0.0, var = 0.0, svar = 0.0, bound = 0.0;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const auto& t = terms[j];
    const double mu2 = t.prefactor * t.prefactor;
    exact += t.prefactor * t.mean;
    if (alloc[j] == 0) continue;
    const double sj = static_cast<double>(alloc[j]);
    var += mu2 * t.variance / sj;
    bound += mu2 * t.bound / sj;
    std::vector<double> values, probs;
    if (t.kind == IncoherentTerm::Kind::direct) {
      const auto dd = direct_distribution(o, v * problem.states[t.l]);
      values = dd.values;
      probs = dd.probs;
    } else {
      const ComplexMatrix u = problem.preparations[t.lp].adjoint() * v.adjoint() *
                              obs.terms[t.pauli].unitary * v * problem.preparations[t.l];
      const double p0 = hadamard_test_probability(
          u, t.kind == IncoherentTerm::Kind::hadamard_real ? HadamardPart::real : HadamardPart::imaginary);
      values = {1.0, -1.0};
      probs = {p0, 1.0 - p0};
    }
    const auto counts = sample_counts(probs, alloc[j], seed, j, workers);
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      const double c = static_cast<double>(counts[k]);
      m1 += c * values[k];
      m2 += c * values[k] * values[k];
    }
    m1 /= sj;
    m2 /= sj;
    estimate += t.prefactor * m1;
    svar += mu2 * std::max(m2 - m1 * m1, 0.0) / sj;
  }
  const double s = static_cast<double>(shots);
  r.sample_mean = estimate;
  r.analytic_mean = exact;
  r.analytic_variance = s * var;
  r.sample_variance = s * svar;
  r.variance_bound = s * bound;
  return r;
}

LcuResult lcu_prepare(const LcsProblem& problem) {
  validate_coefficients(problem);
  const std::size_t count = problem.size();
  double l1 = 0.0;
  for (const auto& c : problem.coefficients) l1 += std::abs(c);
  const double norm = problem.target_norm();
  if (l1 == 0.0 || norm < 1e-12) throw PreconditionError("lcu_prepare: the combination vanishes");
  LcuResult r;
  r.norm = norm;
  r.success_probability = (norm / l1) * (norm / l1);
  r.normalized_state = problem.target() / norm;

  const int a = ancilla_qubits(count);
  const int n = log2_exact(problem.dim());
  if (a + n > 14) throw ValidationError("lcu_prepare: circuit too large for dense simulation");
  ComplexVector amp = ComplexVector::Zero(static_cast<Eigen::Index>(std::size_t{1} << a));
  for (std::size_t l = 0; l < count; ++l)
    amp(static_cast<Eigen::Index>(l)) = std::sqrt(std::abs(problem.coefficients[l]) / l1);
  const ComplexMatrix prep = preparation_unitary(amp);
  const auto ds = static_cast<Eigen::Index>(problem.dim());
  const auto da = amp.size();
  ComplexMatrix select = identity(static_cast<std::size_t>(ds * da));
  for (std::size_t l = 0; l < count; ++l) {
    const Complex c = problem.coefficients[l];
    const Complex phase = std::abs(c) > 0.0 ? c / std::abs(c) : Complex(1.0, 0.0);
    const auto li = static_cast<Eigen::Index>(l);
    select.block(li * ds, li * ds, ds, ds) = phase * problem.preparations[l];
  }
  std::vector<int> anc(a), all(a + n);
  std::iota(anc.begin(), anc.end(), 0);
  std::iota(all.begin(), all.end(), 0);
  Circuit c(a + n);
  c.unitary(prep, anc, "PREP");
  c.unitary(select, all, "SELECT");
  c.unitary(prep.adjoint(), anc, "PREP^dag");
  ComplexVector v = basis_vector(std::size_t{1} << (a + n), 0);
  c.apply(v);
  const ComplexVector branch = v.head(ds);
  r.simulated_probability = branch.squaredNorm();
  r.simulated_state = branch / std::sqrt(r.simulated_probability);
  return r;
}

}  // namespace wstate
