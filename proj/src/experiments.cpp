// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#include "wstate/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "wstate/sampling.hpp"
#include "wstate/subroutines.hpp"

namespace wstate {

namespace {

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Reads a parameter with a default and records the value used.
class Params {
 public:
  explicit Params(const Json& given) : given_(given) {
    if (!given_.is_object()) throw ValidationError("parameters: expected an object");
  }

  long integer(const std::string& key, long fallback, long lo, long hi) {
    long v = fallback;
    if (given_.contains(key)) {
      const auto& x = given_[key];
      if (!x.is_number_integer()) throw ValidationError("parameters." + key + ": expected an integer");
      v = x.get<long>();
    }
    if (v < lo || v > hi)
      throw ValidationError("parameters." + key + ": must lie in [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
    used_[key] = v;
    return v;
  }

  double number(const std::string& key, double fallback) {
    double v = fallback;
    if (given_.contains(key)) v = number_field(given_, key, "parameters");
    used_[key] = v;
    return v;
  }

  std::string string(const std::string& key, const std::string& fallback) {
    std::string v = fallback;
    if (given_.contains(key)) {
      if (!given_[key].is_string()) throw ValidationError("parameters." + key + ": expected a string");
      v = given_[key].get<std::string>();
    }
    used_[key] = v;
    return v;
  }

  bool boolean(const std::string& key, bool fallback) {
    bool v = fallback;
    if (given_.contains(key)) {
      if (!given_[key].is_boolean()) throw ValidationError("parameters." + key + ": expected a boolean");
      v = given_[key].get<bool>();
    }
    used_[key] = v;
    return v;
  }

  // Either a list of numbers or {"start", "stop", "count"}; values must lie in [lo, hi].
  std::vector<double> grid(const std::string& key, std::vector<double> fallback, double lo, double hi,
                           bool open_lo, bool open_hi) {
    std::vector<double> v = std::move(fallback);
    const std::string path = "parameters." + key;
    if (given_.contains(key)) {
      const auto& g = given_[key];
      v.clear();
      if (g.is_array()) {
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (!g[i].is_number()) throw ValidationError(path + "[" + std::to_string(i) + "]: expected a number");
          v.push_back(g[i].get<double>());
        }
      } else if (g.is_object()) {
        const double start = number_field(g, "start", path);
        const double stop = number_field(g, "stop", path);
        const long count = integer_field(g, "count", path);
        if (count < 1) throw ValidationError(path + ".count: must be at least 1");
        for (long i = 0; i < count; ++i)
          v.push_back(count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1));
      } else {
        throw ValidationError(path + ": expected a list or {start, stop, count}");
      }
    }
    if (v.empty()) throw ValidationError(path + ": empty grid");
    for (double x : v) {
      const bool ok = std::isfinite(x) && (open_lo ? x > lo : x >= lo) && (open_hi ? x < hi : x <= hi);
      if (!ok) throw ValidationError(path + ": grid value out of range");
    }
    used_[key] = v;
    return v;
  }

  const Json& used() const { return used_; }

 private:
  const Json& given_;
  Json used_ = Json::object();
};

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> v;
  for (int i = 0; i < count; ++i) v.push_back(a + (b - a) * i / (count - 1));
  return v;
}

ComplexMatrix zero_projector(int n) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  ComplexMatrix o = ComplexMatrix::Zero(d, d);
  o(0, 0) = 1.0;
  return o;
}

std::vector<ComplexVector> power_inputs(const ComplexVector& psi, int k) {
  if (k == 1) return {psi};
  std::vector<ComplexVector> in{kron(psi, psi)};
  for (int i = 2; i < k; ++i) in.push_back(psi);
  return in;
}

ResultTable power_error(Params& prm, int workers) {
  const int n = static_cast<int>(prm.integer("n", 6, 1, 10));
  const int kmax = static_cast<int>(prm.integer("k_max", 10, 1, 64));
  const auto shots = static_cast<std::uint64_t>(prm.integer("shots", 1000, 1, 1L << 40));
  const std::string family = prm.string("family", "sin");
  const double decay = prm.number("decay", 0.5);
  const auto seed = static_cast<std::uint64_t>(prm.integer("seed", 1, 0, std::numeric_limits<long>::max()));
  const bool mc = prm.boolean("monte_carlo", true);
  const ComplexVector psi = family_state(family, n, decay);
  const ComplexMatrix obs = zero_projector(n);

  ResultTable t;
  t.columns = {"k", "trace_tau", "mean", "std", "relative_error", "bound_std"};
  if (mc) {
    t.columns.push_back("mc_mean");
    t.columns.push_back("mc_std");
  }
  t.rows.resize(static_cast<std::size_t>(kmax));
  parallel_for(t.rows.size(), workers, [&](std::size_t i) {
    const int k = static_cast<int>(i) + 1;
    const auto phi = build_power_pipeline(n, k).evaluate_vector(power_inputs(psi, k));
    const WeightedState tau(outer(*phi, *phi), RegisterLayout::single("out", n));
    const double tr = phi->squaredNorm();
    const double mean = expectation(tau, obs).real();
    const double var = variance_qhp(tau, obs, shots);
    // The all-zero projector on E gives <M M^dag> = Tr tau.
    const double onorm = operator_norm(obs);
    std::vector<double> row{static_cast<double>(k), tr, mean, std::sqrt(std::max(var, 0.0)),
                            relative_error_qhp(tau, obs, shots),
                            std::sqrt(onorm * onorm * tr / static_cast<double>(shots))};
    if (mc) {
      // Shot value 1 when both the E post-selection and O = |0><0| succeed, else 0.
      const double p1 = std::clamp(mean, 0.0, 1.0);
      const auto r = sample_distribution({{1.0, 0.0}, {p1, 1.0 - p1}}, shots, splitmix64(seed ^ static_cast<std::uint64_t>(k)));
      row.push_back(r.sample_mean.real());
      row.push_back(std::sqrt(r.sample_variance / static_cast<double>(shots)));
    }
    t.rows[i] = std::move(row);
  });
  t.metadata["family_formula"] = family_formula(family, decay);
  t.metadata["observable"] = "|0...0><0...0|";
  return t;
}

ResultTable opt_beta_surface(Params& prm, int /*workers*/) {
  const auto ps = prm.grid("p", linspace(0.05, 0.95, 19), 0.0, 1.0, true, true);
  const auto rs = prm.grid("r", {1e-6, 0.01, 0.067, 0.2, 0.4, 0.58, 0.8, 0.95, 1.0}, 0.0, 1.0, true, false);
  ResultTable t;
  t.columns = {"r", "p", "q_opt", "beta0", "bound"};
  for (double r : rs)
    for (double p : ps) {
      const auto b = optimal_beta(p, r);
      t.rows.push_back({r, p, b.q_opt, std::sqrt(b.q_opt), b.bound_at_opt});
    }
  return t;
}

struct LincomboCase {
  double r;
  double alpha0;
  ComplexVector psi0, psi1;
  ComplexMatrix obs;
};

ResultTable lincombo_variance(Params& prm, int workers) {
  const int n = static_cast<int>(prm.integer("n", 6, 1, 10));
  const auto shots = static_cast<std::uint64_t>(prm.integer("shots", 100, 1, 1L << 40));
  const auto seed = static_cast<std::uint64_t>(prm.integer("seed", 7, 0, std::numeric_limits<long>::max()));
  const auto rs = prm.grid("r", {0.067, 0.58, 0.95}, 0.0, 1.0, true, false);
  const auto alphas = prm.grid("alpha0", {0.25, 0.5, 0.95}, 0.0, 1.0, true, true);
  const auto qs = prm.grid("q", linspace(0.02, 0.98, 49), 0.0, 1.0, true, true);
  const double s = static_cast<double>(shots);

  std::vector<LincomboCase> cases;
  for (std::size_t ri = 0; ri < rs.size(); ++ri) {
    Random rng(splitmix64(seed + ri));
    auto [psi0, psi1] = random_pair_with_overlap(std::size_t{1} << n, rs[ri], rng);
    const ComplexMatrix obs = random_separable_observable(n, rng);
    for (double a : alphas) cases.push_back({rs[ri], a, psi0, psi1, obs});
  }

  ResultTable t;
  t.columns = {"r", "alpha0", "q", "std_exact", "std_bound"};
  t.rows.resize(cases.size() * qs.size());
  Json argmins = Json::array();
  std::vector<std::pair<double, double>> minima(cases.size());
  parallel_for(cases.size(), workers, [&](std::size_t c) {
    const auto& cs = cases[c];
    const Complex a0 = cs.alpha0, a1 = std::sqrt(1.0 - cs.alpha0 * cs.alpha0);
    const double p = cs.alpha0 * cs.alpha0;
    auto exact = [&](double q) {
      return variance_lincombo(a0, a1, std::sqrt(q), cs.psi0, cs.psi1, cs.obs, shots);
    };
    for (std::size_t qi = 0; qi < qs.size(); ++qi)
      t.rows[c * qs.size() + qi] = {cs.r, cs.alpha0, qs[qi], std::sqrt(std::max(exact(qs[qi]), 0.0)),
                                    std::sqrt(lincombo_bound_f(p, qs[qi], cs.r) / s)};
    minima[c] = {minimize_on_interval(exact, 1e-4, 1.0 - 1e-4), optimal_beta(p, cs.r).q_opt};
  });
  for (std::size_t c = 0; c < cases.size(); ++c)
    argmins.push_back({{"r", cases[c].r},
                       {"alpha0", cases[c].alpha0},
                       {"q_exact_min", minima[c].first},
                       {"q_bound_min", minima[c].second}});
  t.metadata["argmins"] = std::move(argmins);
  t.metadata["observable"] = "random separable: tensor product of u.sigma with random unit u";
  t.metadata["states"] = "Haar psi0; psi1 = sqrt(r) psi0 + sqrt(1-r) psi_perp";
  t.metadata["alpha1"] = "sqrt(1 - alpha0^2)";
  return t;
}

PauliDecomposition many_term_observable(int n, std::size_t terms, Random& rng) {
  const std::uint64_t count = std::uint64_t{1} << (2 * n);
  PauliDecomposition d;
  std::vector<std::uint64_t> picked;
  while (picked.size() < std::min<std::uint64_t>(terms, count - 1)) {
    const auto code = 1 + static_cast<std::uint64_t>(rng.integer(0, static_cast<int>(count - 2)));
    if (std::find(picked.begin(), picked.end(), code) != picked.end()) continue;
    picked.push_back(code);
  }
  double l1 = 0.0;
  std::vector<double> w;
  for (std::size_t i = 0; i < picked.size(); ++i) {
    w.push_back(rng.uniform(0.1, 1.0));
    l1 += w.back();
  }
  for (std::size_t i = 0; i < picked.size(); ++i) {
    ComplexMatrix p = pauli_string(picked[i], n);
    if (rng.uniform() < 0.5) p = -p;
    d.terms.push_back({w[i] / l1, std::move(p)});
  }
  return d;
}

ResultTable method_comparison(Params& prm, int workers) {
  const int n = static_cast<int>(prm.integer("n", 4, 1, 8));
  const auto shots = static_cast<std::uint64_t>(prm.integer("shots", 100, 1, 1L << 40));
  const auto seed = static_cast<std::uint64_t>(prm.integer("seed", 11, 0, std::numeric_limits<long>::max()));
  const auto rs = prm.grid("r", {0.067, 0.58, 0.95}, 0.0, 1.0, true, false);
  const auto alphas = prm.grid("alpha0", linspace(0.05, 0.95, 19), 0.0, 1.0, true, true);

  struct Setup {
    LcsProblem problem;
    double r;
    PauliDecomposition simple, complex;
  };
  std::vector<Setup> setups;
  for (std::size_t ri = 0; ri < rs.size(); ++ri) {
    Random rng(splitmix64(seed + ri));
    auto [psi0, psi1] = random_pair_with_overlap(std::size_t{1} << n, rs[ri], rng);
    PauliDecomposition simple;
    simple.terms.push_back({1.0, pauli_string(3ULL << (2 * (n - 1)), n)});
    auto complex = many_term_observable(n, static_cast<std::size_t>(n * n), rng);
    setups.push_back({make_lcs_problem({psi0, psi1}, {1.0, 0.0}), rs[ri], std::move(simple), std::move(complex)});
  }
  ResultTable t;
  t.columns = {"r", "alpha0", "std_weighted_simple", "std_post_simple", "std_weighted_complex",
               "std_post_complex"};
  t.rows.resize(setups.size() * alphas.size());
  parallel_for(t.rows.size(), workers, [&](std::size_t i) {
    const auto& st = setups[i / alphas.size()];
    const double a0 = alphas[i % alphas.size()];
    const double a1 = std::sqrt(1.0 - a0 * a0);
    auto problem = st.problem;
    problem.coefficients = {a0, a1};
    const double q = optimal_beta(a0 * a0, st.r).q_opt;
    auto weighted = [&](const PauliDecomposition& d) {
      return std::sqrt(std::max(variance_lincombo(a0, a1, std::sqrt(q), problem.states[0], problem.states[1],
                                                  d.observable(), shots), 0.0));
    };
    auto post = [&](const PauliDecomposition& d) {
      return std::sqrt(variance_postprocessing(problem, d, shots));
    };
    t.rows[i] = {st.r, a0, weighted(st.simple), post(st.simple), weighted(st.complex), post(st.complex)};
  });
  t.metadata["simple_observable"] = "Z on qubit 0";
  t.metadata["complex_observable"] = "n^2 random signed Pauli strings, weights uniform in [0.1, 1] normalised to sum 1";
  t.metadata["beta"] = "|beta0|^2 = q_opt(|alpha0|^2, r)";
  return t;
}

ResultTable qhp_vs_gqt(Params& prm, int workers) {
  const int n = static_cast<int>(prm.integer("n", 6, 1, 10));
  const int kmax = static_cast<int>(prm.integer("k_max", 10, 1, 64));
  const auto shots = static_cast<std::uint64_t>(prm.integer("shots", 1000, 1, 1L << 40));
  const std::string family = prm.string("family", "sin");
  const double decay = prm.number("decay", 0.5);
  const ComplexVector psi = family_state(family, n, decay);
  const ComplexMatrix obs = zero_projector(n);
  const double s = static_cast<double>(shots);
  ResultTable t;
  t.columns = {"k", "mean", "var_qhp", "var_gqt", "D", "std_qhp", "std_gqt", "rel_qhp", "rel_gqt"};
  t.rows.resize(static_cast<std::size_t>(kmax));
  parallel_for(t.rows.size(), workers, [&](std::size_t i) {
    const int k = static_cast<int>(i) + 1;
    const ComplexVector pk = power_state(psi, k);
    const double mean = pk.dot(obs * pk).real();
    const double vq = power_variance_qhp(psi, obs, k);
    const double vg = power_variance_gqt(psi, obs, k);
    const double sq = std::sqrt(std::max(vq, 0.0) / s), sg = std::sqrt(std::max(vg, 0.0) / s);
    t.rows[i] = {static_cast<double>(k), mean, vq, vg, qhp_gqt_power_difference(psi, obs, k), sq, sg,
                 sq / std::abs(mean), sg / std::abs(mean)};
  });
  t.metadata["family_formula"] = family_formula(family, decay);
  t.metadata["observable"] = "|0...0><0...0|";
  t.metadata["variances"] = "per shot";
  return t;
}

}  // namespace

ExperimentSpec experiment_spec_from_json(const Json& j, const std::string& path) {
  ExperimentSpec spec;
  const auto& name = require_field(j, "name", path);
  if (!name.is_string()) throw ValidationError((path.empty() ? "" : path + ".") + "name: expected a string");
  spec.name = name.get<std::string>();
  if (j.contains("parameters")) {
    if (!j["parameters"].is_object())
      throw ValidationError((path.empty() ? "" : path + ".") + "parameters: expected an object");
    spec.parameters = j["parameters"];
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ValidationError((path.empty() ? "" : path + ".") + "output: expected a string");
    spec.output = j["output"].get<std::string>();
  }
  return spec;
}

Json to_json(const ExperimentSpec& spec) {
  Json j{{"name", spec.name}, {"parameters", spec.parameters}};
  if (!spec.output.empty()) j["output"] = spec.output;
  return j;
}

std::size_t ResultTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ValidationError("unknown column \"" + name + "\"");
}

std::vector<double> ResultTable::values(const std::string& name) const {
  const auto c = column(name);
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r[c]);
  return v;
}

std::string ResultTable::csv() const {
  Json meta = metadata;
  meta["timestamp"] = iso_timestamp();
  std::string out = "# " + meta.dump() + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  char buf[40];
  for (const auto& r : rows) {
    if (r.size() != columns.size()) throw ValidationError("result table is not rectangular");
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!std::isfinite(r[i])) throw PreconditionError("result table holds a non-finite value");
      std::snprintf(buf, sizeof buf, "%.17g", r[i]);
      if (i) out += ",";
      out += buf;
    }
    out += "\n";
  }
  return out;
}

void ResultTable::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot write file");
  out << csv();
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"power-error", "opt-beta-surface", "lincombo-variance",
                                              "method-comparison", "qhp-vs-gqt"};
  return names;
}

ResultTable run_experiment(const ExperimentSpec& spec, int workers) {
  if (workers < 1) throw ValidationError("workers must be at least 1");
  Params prm(spec.parameters);
  ResultTable t;
  if (spec.name == "power-error") t = power_error(prm, workers);
  else if (spec.name == "opt-beta-surface") t = opt_beta_surface(prm, workers);
  else if (spec.name == "lincombo-variance") t = lincombo_variance(prm, workers);
  else if (spec.name == "method-comparison") t = method_comparison(prm, workers);
  else if (spec.name == "qhp-vs-gqt") t = qhp_vs_gqt(prm, workers);
  else throw ValidationError("unknown experiment \"" + spec.name + "\"");
  for (const auto& [key, _] : spec.parameters.items())
    if (!prm.used().contains(key)) throw ValidationError("parameters." + key + ": unknown parameter");
  t.metadata["experiment"] = spec.name;
  t.metadata["parameters"] = prm.used();
  return t;
}

ComplexVector family_state(const std::string& family, int n, double decay) {
  if (n < 1 || n > 20) throw ValidationError("family_state: n out of range");
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  ComplexVector v(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double x = static_cast<double>(j);
    if (family == "sin") v(j) = std::sin(x + 1.0);
    else if (family == "exp") v(j) = std::exp(-decay * x);
    else if (family == "linear") v(j) = x + 1.0;
    else if (family == "uniform") v(j) = 1.0;
    else throw ValidationError("unknown state family \"" + family + "\"");
  }
  return v / v.norm();
}

std::string family_formula(const std::string& family, double decay) {
  if (family == "sin") return "psi_j ~ sin(j+1)";
  if (family == "exp") {
    char buf[64];
    std::snprintf(buf, sizeof buf, "psi_j ~ exp(-%.17g j)", decay);
    return buf;
  }
  if (family == "linear") return "psi_j ~ j+1";
  if (family == "uniform") return "psi_j ~ 1";
  throw ValidationError("unknown state family \"" + family + "\"");
}

std::pair<ComplexVector, ComplexVector> random_pair_with_overlap(std::size_t dim, double r,
                                                                 Random& rng) {
  if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("overlap must lie in [0, 1]");
  if (dim < 2) throw ValidationError("random pair needs dimension at least 2");
  const ComplexVector psi0 = rng.state(dim);
  ComplexVector perp = rng.state(dim);
  perp -= psi0.dot(perp) * psi0;
  perp.normalize();
  ComplexVector psi1 = std::sqrt(r) * psi0 + std::sqrt(1.0 - r) * perp;
  psi1.normalize();
  return {psi0, psi1};
}

ComplexMatrix random_separable_observable(int n, Random& rng) {
  ComplexMatrix o = ComplexMatrix::Ones(1, 1);
  for (int q = 0; q < n; ++q) {
    Eigen::Vector3d u(rng.normal(), rng.normal(), rng.normal());
    u.normalize();
    o = kron(o, ComplexMatrix(u(0) * pauli::X() + u(1) * pauli::Y() + u(2) * pauli::Z()));
  }
  return o;
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double minimize_on_interval(const std::function<double(double)>& f, double lo, double hi, int grid,
                            double tol) {
  if (grid < 2 || !(hi > lo)) throw ValidationError("minimize_on_interval: invalid interval");
  int best = 0;
  double fbest = f(lo);
  for (int i = 1; i <= grid; ++i) {
    const double v = f(lo + (hi - lo) * i / grid);
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  const double step = (hi - lo) / grid;
  return golden_section_minimize(f, std::max(lo, lo + (best - 1) * step), std::min(hi, lo + (best + 1) * step), tol);
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers < 1) throw ValidationError("workers must be at least 1");
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  if (w <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < w; ++t)
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace wstate
