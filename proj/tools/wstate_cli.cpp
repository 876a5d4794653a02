// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

// wstate: weighted-state estimators, variances and experiment sweeps.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical precondition failure.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wstate/experiments.hpp"
#include "wstate/json_io.hpp"
#include "wstate/lcs.hpp"
#include "wstate/sampling.hpp"
#include "wstate/subroutines.hpp"

namespace {

using namespace wstate;

constexpr int kExitValidation = 2;
constexpr int kExitPrecondition = 3;

struct Options {
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shots;
  int workers = 1;
};

Json load_spec(const Options& o) {
  if (o.spec.empty()) throw ValidationError("--spec is required");
  return read_json_file(o.spec);
}

void emit(const Options& o, const Json& j) {
  if (o.out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json_file(o.out, j);
  }
}

std::uint64_t shots_of(const Options& o, const Json& spec) {
  if (o.shots) return *o.shots;
  if (spec.contains("shots")) return static_cast<std::uint64_t>(integer_field(spec, "shots", ""));
  return 1000;
}

std::uint64_t seed_of(const Options& o, const Json& spec) {
  if (o.seed) return *o.seed;
  if (spec.contains("seed")) return static_cast<std::uint64_t>(integer_field(spec, "seed", ""));
  return 0;
}

// Either a serialized instrument or {"builtin": name, "n": qubits, ...}.
QuantumInstrument instrument_of(const Json& j) {
  if (!j.contains("builtin")) return instrument_from_json(j, "instrument");
  const auto& name = require_field(j, "builtin", "instrument");
  if (!name.is_string()) throw ValidationError("instrument.builtin: expected a string");
  const std::string b = name.get<std::string>();
  const int n = static_cast<int>(integer_field(j, "n", "instrument"));
  if (n < 1 || n > 8) throw ValidationError("instrument.n: must lie in [1, 8]");
  if (b == "qhp") return build_qhp_instrument(n);
  if (b == "gqt") return build_gqt_instrument(n);
  if (b == "transpose") return build_transpose_instrument(n);
  if (b == "qsp") {
    const auto sigma = state_from_json(require_field(j, "sigma", "instrument"), "instrument.sigma");
    const auto m = measurement_from_json(require_field(j, "measurement", "instrument"), "instrument.measurement");
    return build_qsp_instrument(sigma, m, n);
  }
  throw ValidationError("instrument.builtin: unknown instrument \"" + b + "\"");
}

struct Problem {
  QuantumInstrument inst;
  QuantumState input;
  ComplexMatrix obs;
};

Problem problem_of(const Json& spec) {
  auto inst = instrument_of(require_field(spec, "instrument", ""));
  const auto input = state_from_json(require_field(spec, "input", ""), "input");
  if (input.dim() != inst.input_layout().dim()) throw ValidationError("input: dimension mismatch with the instrument");
  ComplexMatrix obs = spec.contains("observable") ? matrix_from_json(spec["observable"], "observable")
                                                  : identity(inst.system_layout().dim());
  auto relabeled = input.relabeled(inst.input_layout());
  return {std::move(inst), std::move(relabeled), std::move(obs)};
}

int cmd_estimate(const Options& o, bool randomized) {
  const Json spec = load_spec(o);
  const auto p = problem_of(spec);
  SampleOptions so;
  so.workers = o.workers;
  so.randomized = randomized;
  const auto r = sample_estimate(p.inst, p.input, p.obs, shots_of(o, spec), seed_of(o, spec), so);
  Json j = to_json(r);
  j["standard_error"] = std::sqrt(r.analytic_variance / static_cast<double>(r.shots));
  emit(o, j);
  return 0;
}

int cmd_variance(const Options& o) {
  const Json spec = load_spec(o);
  const auto p = problem_of(spec);
  const auto shots = shots_of(o, spec);
  const double v = variance_exact(p.inst, p.input, p.obs);
  emit(o, {{"shots", shots},
           {"per_shot_variance", v},
           {"variance", v / static_cast<double>(shots)},
           {"mean", complex_to_json(expectation(apply_exact(p.inst, p.input), p.obs))}});
  return 0;
}

int cmd_bound(const Options& o) {
  const Json spec = load_spec(o);
  const auto p = problem_of(spec);
  const auto shots = static_cast<double>(shots_of(o, spec));
  const double onorm = spec.contains("obs_norm") ? number_field(spec, "obs_norm", "") : operator_norm(p.obs);
  const auto b = variance_bound(p.inst, p.input, onorm);
  emit(o, {{"obs_norm", onorm},
           {"b1", b.b1},
           {"b2", b.b2},
           {"variance_bound_b1", b.b1 / shots},
           {"variance_bound_b2", b.b2 / shots}});
  return 0;
}

int cmd_apply(const Options& o) {
  const Json spec = load_spec(o);
  const auto p = problem_of(spec);
  const auto tau = apply_exact(p.inst, p.input);
  emit(o, {{"weighted_state", to_json(tau)}, {"expectation", complex_to_json(expectation(tau, p.obs))}});
  return 0;
}

int cmd_design_beta(const Options& o, std::optional<double> p, std::optional<double> r) {
  if (!o.spec.empty()) {
    const Json spec = load_spec(o);
    if (!p) p = number_field(spec, "p", "");
    if (!r) r = number_field(spec, "r", "");
  }
  if (!p || !r) throw ValidationError("design-beta needs --p and --r (or a spec with p and r)");
  const auto d = optimal_beta(*p, *r);
  emit(o, {{"p", d.p}, {"r", d.r}, {"q_opt", d.q_opt}, {"beta0", std::sqrt(d.q_opt)},
           {"beta1", std::sqrt(1.0 - d.q_opt)}, {"bound_at_opt", d.bound_at_opt}});
  return 0;
}

int cmd_hoeffding(const Options& o, double eps, double delta, double onorm, double mnorm) {
  emit(o, {{"epsilon", eps}, {"delta", delta}, {"obs_norm", onorm}, {"m_norm", mnorm},
           {"shots", hoeffding_shots(eps, delta, onorm, mnorm)}});
  return 0;
}

int cmd_solve_alpha(const Options& o) {
  const Json spec = load_spec(o);
  const auto alpha = matrix_from_json(require_field(spec, "alpha", ""), "alpha");
  const auto r = solve_qsp_realizable(alpha);
  Json sols = Json::array();
  for (const auto& s : r.solutions)
    sols.push_back({{"theta", s.theta}, {"sigma", to_json(s.sigma)}, {"measurement", to_json(s.m)}});
  emit(o, {{"realizable", r.realizable}, {"case", to_string(r.kind)}, {"solutions", sols}, {"note", r.note}});
  return 0;
}

int cmd_lcs(const Options& o, const std::string& method) {
  const Json spec = load_spec(o);
  const auto problem = lcs_problem_from_json(require_field(spec, "problem", ""), "problem");
  const auto d = problem.dim();
  const ComplexMatrix obs = spec.contains("observable") ? matrix_from_json(spec["observable"], "observable")
                                                        : identity(d);
  if (static_cast<std::size_t>(obs.rows()) != d) throw ValidationError("observable: dimension mismatch");
  Json j{{"method", method}, {"norm", problem.target_norm()}};
  const ComplexVector phi = problem.target();
  j["exact"] = complex_to_json(phi.dot(obs * phi));
  if (method == "all-at-once") {
    ComplexVector beta;
    if (spec.contains("beta")) {
      beta = vector_from_json(spec["beta"], "beta");
    } else {
      beta = ComplexVector::Constant(static_cast<Eigen::Index>(problem.size()),
                                     1.0 / std::sqrt(static_cast<double>(problem.size())));
    }
    const auto perms = cyclic_permutations(problem.size());
    const auto tau = all_at_once_apply(problem, beta, perms);
    j["expectation"] = complex_to_json(expectation(tau, obs));
    j["measurement"] = to_json(all_at_once_M(problem, beta, perms));
  } else if (method == "incoherent") {
    const auto decomposition = pauli_decompose(obs);
    const ComplexMatrix v = identity(d);
    j["expectation"] = complex_to_json(incoherent_exact(problem, v, decomposition));
    j["report"] = to_json(incoherent_estimate(problem, v, decomposition, shots_of(o, spec), seed_of(o, spec), o.workers));
    j["variance_postprocessing"] = variance_postprocessing(problem, decomposition, shots_of(o, spec));
  } else if (method == "lcu") {
    const auto r = lcu_prepare(problem);
    j["success_probability"] = r.success_probability;
    j["simulated_probability"] = r.simulated_probability;
    j["expectation"] = complex_to_json(r.norm * r.norm * r.simulated_state.dot(obs * r.simulated_state));
    j["state"] = vector_to_json(r.normalized_state);
  } else {
    throw ValidationError("lcs: unknown method \"" + method + "\"");
  }
  emit(o, j);
  return 0;
}

int cmd_experiment(const Options& o) {
  auto spec = experiment_spec_from_json(load_spec(o), "");
  if (o.seed) spec.parameters["seed"] = *o.seed;
  if (o.shots) spec.parameters["shots"] = *o.shots;
  const auto table = run_experiment(spec, o.workers);
  const std::string out = !o.out.empty() ? o.out : spec.output;
  if (out.empty()) {
    std::cout << table.csv();
  } else {
    table.write_csv(out);
  }
  return 0;
}

void add_common(CLI::App* cmd, Options& o, bool needs_spec) {
  auto* spec = cmd->add_option("--spec", o.spec, "JSON spec file");
  if (needs_spec) spec->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output file (default: stdout)");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--shots", o.shots, "Number of shots")->check(CLI::PositiveNumber);
  cmd->add_option("--workers", o.workers, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted-state estimators, variances and experiment sweeps"};
  app.require_subcommand(1);
  Options o;

  auto* estimate = app.add_subcommand("estimate", "Sample an estimator and report mean and variance");
  add_common(estimate, o, true);
  bool randomized = false;
  estimate->add_flag("--randomized", randomized, "Sample non-normal decompositions term by term");

  auto* variance = app.add_subcommand("variance", "Exact estimator variance");
  add_common(variance, o, true);
  auto* bound = app.add_subcommand("bound", "Variance bounds B1 and B2");
  add_common(bound, o, true);
  auto* apply = app.add_subcommand("apply", "Exact weighted state produced by an instrument");
  add_common(apply, o, true);

  auto* design = app.add_subcommand("design-beta", "Bound-optimal ancilla amplitude for a linear combination");
  add_common(design, o, false);
  std::optional<double> p, r;
  design->add_option("--p", p, "|alpha0|^2");
  design->add_option("--r", r, "|<psi0|psi1>|^2");

  auto* hoeff = app.add_subcommand("hoeffding", "Shots for an (epsilon, delta) guarantee");
  add_common(hoeff, o, false);
  double eps = 0.1, delta = 0.05, onorm = 1.0, mnorm = 1.0;
  hoeff->add_option("--epsilon", eps, "Additive error")->capture_default_str();
  hoeff->add_option("--delta", delta, "Failure probability")->capture_default_str();
  hoeff->add_option("--obs-norm", onorm, "Operator norm of O")->capture_default_str();
  hoeff->add_option("--m-norm", mnorm, "Operator norm of M")->capture_default_str();

  auto* solve = app.add_subcommand("solve-alpha", "Find sigma and M realizing a 2x2 alpha");
  add_common(solve, o, true);

  auto* lcs = app.add_subcommand("lcs", "Linear combination of states");
  add_common(lcs, o, true);
  std::string method;
  lcs->add_option("method", method, "all-at-once | incoherent | lcu")
      ->required()
      ->check(CLI::IsMember({"all-at-once", "incoherent", "lcu"}));

  auto* experiment = app.add_subcommand("experiment", "Run an experiment sweep and write CSV");
  add_common(experiment, o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*estimate) return cmd_estimate(o, randomized);
    if (*variance) return cmd_variance(o);
    if (*bound) return cmd_bound(o);
    if (*apply) return cmd_apply(o);
    if (*design) return cmd_design_beta(o, p, r);
    if (*hoeff) return cmd_hoeffding(o, eps, delta, onorm, mnorm);
    if (*solve) return cmd_solve_alpha(o);
    if (*lcs) return cmd_lcs(o, method);
    if (*experiment) return cmd_experiment(o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return kExitPrecondition;
  }
  return 0;
}
