// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "wstate/experiments.hpp"
#include "wstate/lcs.hpp"
#include "wstate/random.hpp"
#include "wstate/sampling.hpp"
#include "wstate/subroutines.hpp"

using namespace wstate;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

RegisterLayout reg(const std::string& label, int n) { return RegisterLayout::single(label, n); }

QuantumState dens(const ComplexMatrix& m, const std::string& label) {
  return QuantumState::from_density(m, reg(label, log2_exact(static_cast<std::size_t>(m.rows()))));
}

QuantumState pure(const ComplexVector& v, const std::string& label) {
  return QuantumState::from_vector(v, reg(label, log2_exact(static_cast<std::size_t>(v.size()))));
}

QuantumState pair_input(const QuantumInstrument& inst, const QuantumState& a, const QuantumState& b) {
  return QuantumState::tensor(a, b).relabeled(inst.input_layout());
}

// Random normal 2x2 matrix V diag(l) V^dag.
ComplexMatrix random_normal2(Random& rng) {
  const ComplexMatrix v = rng.unitary(2);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = rng.complex_normal();
  d(1, 1) = rng.complex_normal();
  return v * d * v.adjoint();
}

MapPair random_maps(std::size_t dim, Random& rng) {
  MapPair maps;
  for (int i = 0; i < 2; ++i) maps.push_back({rng.unitary(dim), rng.unitary(dim)});
  return maps;
}

// Instances alternate density inputs (n <= 3) and pure inputs (n <= pure_max).
Outcome criterion1() {
  const auto start = std::chrono::steady_clock::now();
  Random rng(101);
  double worst[4] = {0, 0, 0, 0};
  const char* names[4] = {"QHP", "GQT", "QSP", "teleport"};
  for (int i = 0; i < 100; ++i) {
    const bool density = i % 2 == 0;
    {
      const int n = density ? 1 + i % 3 : 1 + (i / 2) % 6;
      const auto d = std::size_t{1} << n;
      const auto inst = build_qhp_instrument(n);
      QuantumState a = density ? dens(rng.density(d), "in0") : pure(rng.state(d), "in0");
      QuantumState b = density ? dens(rng.density(d), "in1") : pure(rng.state(d), "in1");
      const auto tau = apply_exact(inst, pair_input(inst, a, b));
      const auto ref = qhp(WeightedState::from_state(a), WeightedState::from_state(b));
      worst[0] = std::max(worst[0], max_abs(tau.matrix() - ref.matrix()));
    }
    {
      const int n = density ? 1 + i % 3 : 1 + (i / 2) % 4;
      const auto d = std::size_t{1} << n;
      const auto inst = build_gqt_instrument(n);
      QuantumState s = density ? dens(rng.density(d), "sigma") : pure(rng.state(d), "sigma");
      QuantumState r = density ? dens(rng.density(d), "rho") : pure(rng.state(d), "rho");
      const auto tau = apply_exact(inst, pair_input(inst, s, r));
      const auto ref = gqt(WeightedState::from_state(s), WeightedState::from_state(r));
      worst[1] = std::max(worst[1], max_abs(tau.matrix() - ref.matrix()));
    }
    {
      const int n = density ? 1 + i % 3 : 1 + (i / 2) % 6;
      const auto d = std::size_t{1} << n;
      const ComplexMatrix sigma = rng.density(2);
      const ComplexMatrix m = random_normal2(rng);
      const auto inst = build_qsp_instrument(dens(sigma, "anc"), MeasurementOperator(m), n);
      QuantumState a = density ? dens(rng.density(d), "in0") : pure(rng.state(d), "in0");
      QuantumState b = density ? dens(rng.density(d), "in1") : pure(rng.state(d), "in1");
      const auto tau = apply_exact(inst, pair_input(inst, a, b));
      const auto ref = qsp_oracle(WeightedState::from_state(a), WeightedState::from_state(b),
                                  alpha_of(sigma, m, gamma_in()));
      worst[2] = std::max(worst[2], max_abs(tau.matrix() - ref.matrix()));
    }
    {
      const int n = density ? 1 + i % 3 : 1 + (i / 2) % 4;
      const auto d = std::size_t{1} << n;
      const auto maps = random_maps(d, rng);
      const auto inst = build_teleport_instrument(n, maps);
      QuantumState s = density ? dens(rng.density(d), "sigma") : pure(rng.state(d), "sigma");
      QuantumState r = density ? dens(rng.density(d), "rho") : pure(rng.state(d), "rho");
      const auto tau = apply_exact(inst, pair_input(inst, s, r));
      const auto ref = teleport_map(WeightedState::from_state(s), maps, WeightedState::from_state(r));
      worst[3] = std::max(worst[3], max_abs(tau.matrix() - ref.matrix()));
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool ok = secs < 60.0;
  std::string detail;
  for (int k = 0; k < 4; ++k) {
    ok = ok && worst[k] <= 1e-10;
    detail += std::string(names[k]) + " " + fmt("%.2e", worst[k]) + "; ";
  }
  detail += fmt("%.1f s", secs);
  return {ok, detail};
}

Outcome criterion2() {
  Random rng(202);
  double worst = 0.0, purity_err = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int n = 1 + i % 3;
    const auto d = std::size_t{1} << n;
    const ComplexMatrix r0 = rng.density(d), r1 = rng.density(d);
    const auto a = dens(r0, "in0"), b = dens(r1, "in1");
    const double p = rng.uniform(0.05, 0.95);
    ComplexMatrix mix_sigma = ComplexMatrix::Zero(2, 2);
    mix_sigma(0, 0) = p;
    mix_sigma(1, 1) = 1 - p;
    const ComplexMatrix plus = ComplexMatrix::Constant(2, 2, 0.5);
    const auto run = [&](const ComplexMatrix& sigma, const ComplexMatrix& m, const QuantumState& x,
                         const QuantumState& y) {
      const auto inst = build_qsp_instrument(dens(sigma, "anc"), MeasurementOperator(m), n);
      return apply_exact(inst, pair_input(inst, x, y)).matrix();
    };
    worst = std::max(worst, max_abs(run(mix_sigma, identity(2), a, b) - (p * r0 + (1 - p) * r1)));
    worst = std::max(worst, max_abs(run(plus, 2.0 * pauli::X(), a, b) - (r0 * r1 + r1 * r0)));
    ComplexMatrix comm_m(2, 2);
    comm_m << 0.0, -2.0, 2.0, 0.0;
    worst = std::max(worst, max_abs(run(plus, comm_m, a, b) - (r0 * r1 - r1 * r0)));
    const auto b0 = dens(r0, "in1");
    const ComplexMatrix sq = 0.5 * run(plus, 2.0 * pauli::X(), a, b0);
    worst = std::max(worst, max_abs(sq - r0 * r0));
    purity_err = std::max(purity_err, std::abs(trace(sq) - (r0 * r0).trace()));
    purity_err = std::max(purity_err, std::abs(trace(sq).real() - r0.squaredNorm()));
  }
  return {worst <= 1e-10 && purity_err <= 1e-10,
          "max error " + fmt("%.2e", worst) + ", purity error " + fmt("%.2e", purity_err)};
}

struct Config {
  QuantumInstrument inst;
  QuantumState input;
  ComplexMatrix obs;
};

std::vector<Config> random_configs(int count, Random& rng) {
  std::vector<Config> out;
  for (int i = 0; i < count; ++i) {
    const int kind = i % 4;
    const int n = 1 + (i / 4) % 2;
    const auto d = std::size_t{1} << n;
    const ComplexMatrix obs = rng.hermitian(d);
    if (kind == 0) {
      auto inst = build_qhp_instrument(n);
      auto in = pair_input(inst, dens(rng.density(d), "in0"), dens(rng.density(d), "in1"));
      out.push_back({inst, in, obs});
    } else if (kind == 1) {
      auto inst = build_gqt_instrument(n);
      auto in = pair_input(inst, dens(rng.density(d), "sigma"), dens(rng.density(d), "rho"));
      out.push_back({inst, in, obs});
    } else if (kind == 2) {
      auto inst = build_qsp_instrument(dens(rng.density(2), "anc"), MeasurementOperator(random_normal2(rng)), n);
      auto in = pair_input(inst, dens(rng.density(d), "in0"), dens(rng.density(d), "in1"));
      out.push_back({inst, in, obs});
    } else {
      auto inst = build_teleport_instrument(n, random_maps(d, rng));
      auto in = pair_input(inst, dens(rng.density(d), "sigma"), dens(rng.density(d), "rho"));
      out.push_back({inst, in, obs});
    }
  }
  return out;
}

Outcome criterion3() {
  Random rng(303);
  const auto configs = random_configs(20, rng);
  const std::uint64_t shots = 100000;
  int worst_mean_ok = 100, worst_var_ok = 100;
  double worst_rel = 0.0;
  for (const auto& c : configs) {
    const auto dist = outcome_distribution(c.inst, c.input, c.obs);
    const Complex mean = expectation(apply_exact(c.inst, c.input), c.obs);
    const double var = variance_exact(c.inst, c.input, c.obs);
    const double se = std::sqrt(var / static_cast<double>(shots));
    int mean_ok = 0, var_ok = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto r = sample_distribution(dist, shots, seed);
      if (std::abs(r.sample_mean - mean) <= 5.0 * se) ++mean_ok;
      const double rel = std::abs(r.sample_variance - var) / var;
      worst_rel = std::max(worst_rel, rel);
      if (rel <= 0.05) ++var_ok;
    }
    worst_mean_ok = std::min(worst_mean_ok, mean_ok);
    worst_var_ok = std::min(worst_var_ok, var_ok);
  }
  return {worst_mean_ok >= 99 && worst_var_ok >= 99,
          "worst config: mean within 5 SE for " + std::to_string(worst_mean_ok) +
              "/100 seeds, variance within 5% for " + std::to_string(worst_var_ok) +
              "/100 seeds (largest relative deviation " + fmt("%.3f", worst_rel) + ")"};
}

Outcome criterion4() {
  Random rng(404);
  double w[4] = {0, 0, 0, 0};
  for (int i = 0; i < 10; ++i) {
    const int n = 1 + i % 3;
    const auto d = std::size_t{1} << n;
    const ComplexMatrix obs = rng.hermitian(d);
    const ComplexMatrix r0 = rng.density(d), r1 = rng.density(d);
    {
      const auto inst = build_qhp_instrument(n);
      const auto in = pair_input(inst, dens(r0, "in0"), dens(r1, "in1"));
      const auto tau = qhp(WeightedState(r0, reg("a", n)), WeightedState(r1, reg("a", n)));
      w[0] = std::max(w[0], std::abs(variance_qhp(tau, obs, 1) - variance_exact(inst, in, obs)));
    }
    {
      const auto inst = build_gqt_instrument(n);
      const auto in = pair_input(inst, dens(r0, "sigma"), dens(r1, "rho"));
      const double v = variance_gqt(WeightedState(r0, reg("a", n)), WeightedState(r1, reg("a", n)), obs, 1);
      w[1] = std::max(w[1], std::abs(v - variance_exact(inst, in, obs)));
    }
    {
      const ComplexMatrix sigma = rng.density(2);
      const ComplexMatrix m = random_normal2(rng);
      const auto inst = build_qsp_instrument(dens(sigma, "anc"), MeasurementOperator(m), n);
      const auto in = pair_input(inst, dens(r0, "in0"), dens(r1, "in1"));
      const double v = variance_qsp(sigma, m, WeightedState(r0, reg("a", n)), WeightedState(r1, reg("a", n)), obs, 1);
      w[2] = std::max(w[2], std::abs(v - variance_exact(inst, in, obs)));
    }
    {
      const auto [psi0, psi1] = random_pair_with_overlap(d, rng.uniform(0.1, 0.9), rng);
      const double a0 = rng.uniform(0.1, 0.9);
      const Complex alpha0 = a0 * std::exp(Complex(0, rng.uniform(0, 6.28)));
      const Complex alpha1 = std::sqrt(1 - a0 * a0) * std::exp(Complex(0, rng.uniform(0, 6.28)));
      const double q = rng.uniform(0.1, 0.9);
      ComplexVector beta(2);
      beta << std::sqrt(q), std::sqrt(1 - q);
      ComplexMatrix gram(2, 2);
      gram << psi0.dot(psi0), psi0.dot(psi1), psi1.dot(psi0), psi1.dot(psi1);
      const auto m = lincombo_pair_M(alpha0, alpha1, beta, gram);
      const auto inst = build_qsp_instrument(beta_state(beta), m, n);
      const auto in = pair_input(inst, pure(psi0, "in0"), pure(psi1, "in1"));
      const double v = variance_lincombo(alpha0, alpha1, std::sqrt(q), psi0, psi1, obs, 1);
      w[3] = std::max(w[3], std::abs(v - variance_exact(inst, in, obs)));
    }
  }
  const bool ok = w[0] <= 1e-10 && w[1] <= 1e-10 && w[2] <= 1e-10 && w[3] <= 1e-10;
  return {ok, "qhp " + fmt("%.2e", w[0]) + ", gqt " + fmt("%.2e", w[1]) + ", qsp " + fmt("%.2e", w[2]) +
                  ", lincombo " + fmt("%.2e", w[3])};
}

// Independent golden-section minimizer of the bound A/q + B/(1-q).
double golden_min(double p, double r) {
  const auto f = [&](double q) {
    const double a = p * p + p * (1 - p) / r, b = (1 - p) * (1 - p) + p * (1 - p) / r;
    return a / q + b / (1 - q);
  };
  const double g = 0.6180339887498949;
  double lo = 1e-9, hi = 1 - 1e-9;
  while (hi - lo > 1e-12) {
    const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    if (f(x1) < f(x2)) hi = x2;
    else lo = x1;
  }
  return 0.5 * (lo + hi);
}

Outcome criterion5() {
  double grid = 0.0, small_r = 0.0, sym = 0.0;
  for (int i = 1; i <= 9; ++i)
    for (int j = 1; j <= 9; ++j) {
      const double p = 0.1 * i, r = 0.1 * j;
      grid = std::max(grid, std::abs(optimal_beta(p, r).q_opt - golden_min(p, r)));
    }
  for (int i = 1; i <= 9; ++i) small_r = std::max(small_r, std::abs(optimal_beta(0.1 * i, 1e-6).q_opt - 0.5));
  for (int j = 1; j <= 10; ++j) sym = std::max(sym, std::abs(optimal_beta(0.5, 0.1 * j).q_opt - 0.5));
  return {grid <= 1e-6 && small_r <= 1e-3 && sym <= 1e-9,
          "grid " + fmt("%.2e", grid) + ", r=1e-6 " + fmt("%.2e", small_r) + ", p=0.5 " + fmt("%.2e", sym)};
}

Outcome criterion6() {
  ExperimentSpec pe{"power-error", Json{{"n", 6}, {"shots", 1000}, {"family", "sin"}, {"k_max", 10}}, ""};
  const auto t = run_experiment(pe);
  const auto tr = t.values("trace_tau");
  const auto rel = t.values("relative_error");
  bool mono = true;
  for (std::size_t i = 1; i < tr.size(); ++i) mono = mono && tr[i] < tr[i - 1] && rel[i] > rel[i - 1];
  ExperimentSpec lv{"lincombo-variance", Json{{"n", 6}, {"shots", 100}}, ""};
  const auto l = run_experiment(lv);
  double worst = 0.0;
  for (const auto& a : l.metadata["argmins"])
    worst = std::max(worst, std::abs(a["q_exact_min"].get<double>() - a["q_bound_min"].get<double>()));
  return {mono && worst <= 0.05, std::string("power-error monotone: ") + (mono ? "yes" : "no") +
                                     ", largest argmin gap " + fmt("%.4f", worst)};
}

Outcome criterion7() {
  Random rng(707);
  int ok = 0, case2 = 0, case2_two = 0, other = 0;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double theta = rng.uniform(0.05, 3.09);
    const ComplexMatrix sigma = sigma_from_theta(theta);
    const ComplexMatrix m = random_normal2(rng);
    const ComplexMatrix alpha = alpha_of(sigma, m, gamma_in());
    const auto r = solve_qsp_realizable(alpha);
    if (!r.realizable || r.solutions.empty()) continue;
    double res = 0.0;
    bool normal = true;
    for (const auto& s : r.solutions) {
      res = std::max(res, max_abs(alpha_of(s.sigma, s.m, gamma_in()) - alpha));
      normal = normal && is_normal(s.m, 1e-8);
    }
    worst = std::max(worst, res);
    if (res <= 1e-8 && normal) ++ok;
    if (r.kind == QspCase::case2) {
      ++case2;
      if (r.solutions.size() == 2) ++case2_two;
    } else {
      ++other;
    }
  }
  ComplexVector u(2), v(2);
  u << 1.0, 0.5;
  v << 0.3, Complex(0.2, 0.7);
  const auto prod = solve_qsp_realizable(u * v.adjoint());
  const auto x = solve_qsp_realizable(pauli::X());
  bool x_ok = x.realizable && x.kind == QspCase::case1 && !x.solutions.empty();
  for (const auto& s : x.solutions) x_ok = x_ok && max_abs(alpha_of(s.sigma, s.m, gamma_in()) - pauli::X()) <= 1e-8;
  const bool pass = ok == 200 && case2 == case2_two && !prod.realizable && x_ok;
  return {pass, std::to_string(ok) + "/200 round trips (worst " + fmt("%.2e", worst) + "), case 2 with two solutions " +
                    std::to_string(case2_two) + "/" + std::to_string(case2) + ", other cases " +
                    std::to_string(other) + ", product alpha " + (prod.realizable ? "realizable" : "not realizable") +
                    ", X " + (x_ok ? "case 1" : "wrong")};
}

Outcome criterion8() {
  Random rng(808);
  double worst = 0.0, worst_alt = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const double d = static_cast<double>(1 << n);
    for (int i = 0; i < 3; ++i) {
      const ComplexMatrix r0 = rng.density(std::size_t{1} << n), r1 = rng.density(std::size_t{1} << n);
      const ComplexMatrix obs = rng.hermitian(std::size_t{1} << n);
      const auto c = compare_concat_vs_direct(r0, r1, obs);
      const double diff = c.var_concat - c.var_direct;
      worst = std::max(worst, std::abs(diff - (d * d - 1) * c.dephased_term));
      worst_alt = std::max(worst_alt, std::abs(diff - (d - 1) * c.dephased_term));
    }
  }
  return {worst <= 1e-10, "residual against (d^2-1) Tr(D(rho0) O^2): " + fmt("%.3e", worst) +
                              "; residual against (d-1) Tr(D(rho0) O^2): " + fmt("%.3e", worst_alt)};
}

Outcome criterion9() {
  Random rng(909);
  const int n = 2;
  const auto d = std::size_t{1} << n;
  const ComplexMatrix plus = ComplexMatrix::Constant(2, 2, 0.5);
  const auto inst = build_qsp_instrument(dens(plus, "anc"), MeasurementOperator(2.0 * pauli::X()), n);
  const auto in = pair_input(inst, dens(rng.density(d), "in0"), dens(rng.density(d), "in1"));
  ComplexMatrix obs = rng.hermitian(d);
  obs /= operator_norm(obs);
  const std::uint64_t shots = hoeffding_shots(0.1, 0.05, operator_norm(obs), operator_norm(inst.measurement().matrix()));
  const auto dist = outcome_distribution(inst, in, obs);
  const Complex exact = expectation(apply_exact(inst, in), obs);
  int failures = 0;
  for (std::uint64_t trial = 0; trial < 1000; ++trial)
    if (std::abs(sample_distribution(dist, shots, 90000 + trial).sample_mean - exact) > 0.1) ++failures;
  const double rate = failures / 1000.0;
  // Binomial(1000, 0.05) has standard deviation 6.9; the check uses the rate itself.
  return {rate <= 0.05, "N = " + std::to_string(shots) + ", failure rate " + fmt("%.3f", rate)};
}

Outcome criterion10() {
  Random rng(1010);
  double worst = 0.0, prob = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int n = 1 + i % 3;
    const auto d = std::size_t{1} << n;
    const auto [psi0, psi1] = random_pair_with_overlap(d, rng.uniform(0.05, 0.95), rng);
    const auto problem = make_lcs_problem({psi0, psi1}, {rng.complex_normal(), rng.complex_normal()});
    const ComplexMatrix obs = rng.hermitian(d);
    ComplexVector beta(2);
    beta << std::sqrt(0.5), std::sqrt(0.5);
    const Complex aao = expectation(all_at_once_apply(problem, beta, cyclic_permutations(2)), obs);
    const Complex inc = incoherent_exact(problem, identity(d), pauli_decompose(obs));
    const auto lcu = lcu_prepare(problem);
    const Complex lcu_e = lcu.norm * lcu.norm * lcu.simulated_state.dot(obs * lcu.simulated_state);
    worst = std::max({worst, std::abs(aao - inc), std::abs(aao - lcu_e), std::abs(inc - lcu_e)});
    prob = std::max(prob, std::abs(lcu.simulated_probability - lcu.success_probability));
    double l1 = std::abs(problem.coefficients[0]) + std::abs(problem.coefficients[1]);
    prob = std::max(prob, std::abs(lcu.success_probability - std::pow(problem.target().norm() / l1, 2)));
  }
  ComplexVector e0 = basis_vector(4, 0), e1 = basis_vector(4, 3);
  const auto orth = make_lcs_problem({e0, e1}, {0.6, 0.8});
  bool qsp_raises = false;
  try {
    ComplexVector beta(2);
    beta << std::sqrt(0.5), std::sqrt(0.5);
    lincombo_pair_M(0.6, 0.8, beta, orth.gram);
  } catch (const OrthogonalInputs&) {
    qsp_raises = true;
  }
  const auto lo = lcu_prepare(orth);
  const double orth_err = (lo.simulated_state - orth.target()).norm();
  const double orth_p = std::abs(lo.simulated_probability - std::pow(1.0 / 1.4, 2));
  prob = std::max(prob, orth_p);
  return {worst <= 1e-9 && prob <= 1e-12 && qsp_raises && orth_err <= 1e-9,
          "method spread " + fmt("%.2e", worst) + ", success probability error " + fmt("%.2e", prob) +
              ", orthogonal pair: QSP " + (qsp_raises ? "raises OrthogonalInputs" : "does not raise") +
              ", LCU state error " + fmt("%.2e", orth_err)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle equivalence", criterion1},     {"special-case catalog", criterion2},
      {"estimator statistics", criterion3},   {"variance formula closure", criterion4},
      {"optimal beta", criterion5},           {"figure-level properties", criterion6},
      {"alpha solver", criterion7},           {"concatenation cost", criterion8},
      {"Hoeffding shot count", criterion9},   {"LCS method agreement", criterion10}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
