// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#include "wstate/json_io.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace wstate {

namespace {

std::string at(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string at(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

const Json& require_array(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

double finite_number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(path, "value is not finite");
  return x;
}

long nonneg_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  const long v = j.get<long>();
  if (v < 0) fail(path, "expected a non-negative integer");
  return v;
}

std::vector<int> int_list(const Json& j, const std::string& path) {
  std::vector<int> out;
  std::size_t i = 0;
  for (const auto& x : require_array(j, path)) out.push_back(static_cast<int>(nonneg_integer(x, at(path, i++))));
  return out;
}

Role role_at(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  try {
    return role_from_string(j.get<std::string>());
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
}

}  // namespace

const Json& require_field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(at(path, key), "missing field");
  return *it;
}

double number_field(const Json& j, const std::string& key, const std::string& path) {
  return finite_number(require_field(j, key, path), at(path, key));
}

long integer_field(const Json& j, const std::string& key, const std::string& path) {
  return nonneg_integer(require_field(j, key, path), at(path, key));
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return {finite_number(j, path), 0.0};
  if (!j.is_array() || j.size() != 2) fail(path, "expected [re, im]");
  return {finite_number(j[0], at(path, 0)), finite_number(j[1], at(path, 1))};
}

Json to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(complex_to_json(m(r, c)));
  return {{"dims", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

Json vector_to_json(const ComplexVector& v) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) data.push_back(complex_to_json(v(i)));
  return {{"dims", {v.size()}}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& path) {
  const auto dims = int_list(require_field(j, "dims", path), at(path, "dims"));
  if (dims.size() != 2) fail(at(path, "dims"), "expected [rows, cols]");
  const auto& data = require_array(require_field(j, "data", path), at(path, "data"));
  const std::size_t count = static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]);
  if (data.size() != count) fail(at(path, "data"), "expected " + std::to_string(count) + " entries");
  ComplexMatrix m(dims[0], dims[1]);
  for (std::size_t i = 0; i < count; ++i)
    m(static_cast<Eigen::Index>(i / dims[1]), static_cast<Eigen::Index>(i % dims[1])) =
        complex_from_json(data[i], at(at(path, "data"), i));
  return m;
}

ComplexVector vector_from_json(const Json& j, const std::string& path) {
  const auto dims = int_list(require_field(j, "dims", path), at(path, "dims"));
  if (dims.size() == 2 && dims[1] == 1) return matrix_from_json(j, path).col(0);
  if (dims.size() != 1) fail(at(path, "dims"), "expected [n]");
  const auto& data = require_array(require_field(j, "data", path), at(path, "data"));
  if (data.size() != static_cast<std::size_t>(dims[0]))
    fail(at(path, "data"), "expected " + std::to_string(dims[0]) + " entries");
  ComplexVector v(dims[0]);
  for (std::size_t i = 0; i < data.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = complex_from_json(data[i], at(at(path, "data"), i));
  return v;
}

Json to_json(const RegisterLayout& layout) {
  Json regs = Json::array();
  for (const auto& r : layout.registers()) regs.push_back({{"label", r.label}, {"qubits", r.qubits}});
  return {{"registers", std::move(regs)}};
}

RegisterLayout layout_from_json(const Json& j, const std::string& path) {
  const std::string rp = at(path, "registers");
  std::vector<Register> regs;
  std::size_t i = 0;
  for (const auto& r : require_array(require_field(j, "registers", path), rp)) {
    const std::string p = at(rp, i++);
    const auto& label = require_field(r, "label", p);
    if (!label.is_string()) fail(at(p, "label"), "expected a string");
    regs.push_back({label.get<std::string>(), static_cast<int>(integer_field(r, "qubits", p))});
  }
  try {
    return RegisterLayout(std::move(regs));
  } catch (const ValidationError& e) {
    fail(rp, e.what());
  }
}

Json to_json(const QuantumState& s) {
  Json j{{"layout", to_json(s.layout())}};
  if (s.is_pure()) j["vector"] = vector_to_json(s.vector());
  else j["matrix"] = to_json(s.density());
  return j;
}

QuantumState state_from_json(const Json& j, const std::string& path) {
  const auto layout = layout_from_json(require_field(j, "layout", path), at(path, "layout"));
  try {
    if (j.contains("vector"))
      return QuantumState::from_vector(vector_from_json(j["vector"], at(path, "vector")), layout);
    if (j.contains("matrix"))
      return QuantumState::from_density(matrix_from_json(j["matrix"], at(path, "matrix")), layout);
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0 && !path.empty()) throw;
    fail(path, what);
  }
  fail(path, "expected a \"vector\" or \"matrix\" field");
}

Json to_json(const WeightedState& w) {
  return {{"layout", to_json(w.layout())}, {"matrix", to_json(w.matrix())}};
}

Json to_json(const MeasurementOperator& m) {
  Json j{{"matrix", to_json(m.matrix())}, {"kind", to_string(m.kind())}};
  if (m.decomposition()) {
    Json terms = Json::array();
    for (const auto& t : *m.decomposition())
      terms.push_back({{"coefficient", complex_to_json(t.coefficient)}, {"matrix", to_json(t.op)}});
    j["decomposition"] = std::move(terms);
  }
  return j;
}

MeasurementOperator measurement_from_json(const Json& j, const std::string& path) {
  const ComplexMatrix m = matrix_from_json(require_field(j, "matrix", path), at(path, "matrix"));
  std::optional<MeasurementOperator> op;
  try {
    if (j.contains("decomposition")) {
      const std::string dp = at(path, "decomposition");
      std::vector<NormalTerm> terms;
      std::size_t i = 0;
      for (const auto& t : require_array(j["decomposition"], dp)) {
        const std::string p = at(dp, i++);
        terms.push_back({complex_from_json(require_field(t, "coefficient", p), at(p, "coefficient")),
                         matrix_from_json(require_field(t, "matrix", p), at(p, "matrix"))});
      }
      op.emplace(m, std::move(terms));
    } else {
      op.emplace(m);
    }
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0 && !path.empty()) throw;
    fail(path, what);
  }
  if (j.contains("kind")) {
    const std::string kp = at(path, "kind");
    if (!j["kind"].is_string()) fail(kp, "expected a string");
    MeasurementKind kind;
    try {
      kind = measurement_kind_from_string(j["kind"].get<std::string>());
    } catch (const ValidationError& e) {
      fail(kp, e.what());
    }
    if (kind != op->kind())
      fail(kp, std::string("declared ") + to_string(kind) + " but the matrix is " + to_string(op->kind()));
  }
  return *op;
}

Json to_json(const QuantumInstrument& inst) {
  Json regs = Json::array();
  for (const auto& o : inst.outputs())
    regs.push_back({{"label", o.label}, {"qubits", o.wires.size()}, {"role", to_string(o.role)}, {"wires", o.wires}});
  return {{"ancilla", to_json(inst.ancilla())},
          {"input_layout", to_json(inst.input_layout())},
          {"unitary", to_json(inst.unitary().dense())},
          {"measurement", to_json(inst.measurement())},
          {"layout", {{"registers", std::move(regs)}}},
          {"two_qubit_gates", inst.two_qubit_gates()}};
}

QuantumInstrument instrument_from_json(const Json& j, const std::string& path) {
  const auto ancilla = j.contains("ancilla") ? state_from_json(j["ancilla"], at(path, "ancilla"))
                                             : QuantumState::empty();
  const auto inputs = layout_from_json(require_field(j, "input_layout", path), at(path, "input_layout"));
  const auto composite = ancilla.layout().concat(inputs);
  const int nq = composite.num_qubits();
  const std::string up = at(path, "unitary");
  const ComplexMatrix u = matrix_from_json(require_field(j, "unitary", path), up);
  if (u.rows() != static_cast<Eigen::Index>(composite.dim()) || u.cols() != u.rows())
    fail(up, "expected a " + std::to_string(composite.dim()) + "x" + std::to_string(composite.dim()) + " matrix");
  Circuit c(nq);
  std::vector<int> all(nq);
  std::iota(all.begin(), all.end(), 0);
  try {
    if (nq > 0) c.unitary(u, all, "U");
  } catch (const ValidationError& e) {
    fail(up, e.what());
  }
  const auto m = measurement_from_json(require_field(j, "measurement", path), at(path, "measurement"));

  const std::string rp = at(at(path, "layout"), "registers");
  std::vector<OutputRegister> outs;
  std::size_t i = 0;
  for (const auto& r : require_array(require_field(require_field(j, "layout", path), "registers", at(path, "layout")), rp)) {
    const std::string p = at(rp, i++);
    const auto& label = require_field(r, "label", p);
    if (!label.is_string()) fail(at(p, "label"), "expected a string");
    OutputRegister o{label.get<std::string>(), role_at(require_field(r, "role", p), at(p, "role")), {}};
    if (r.contains("wires")) {
      o.wires = int_list(r["wires"], at(p, "wires"));
    } else {
      const auto& from = require_field(r, "from", p);
      if (!from.is_string()) fail(at(p, "from"), "expected a string");
      const auto src = from.get<std::string>();
      if (!composite.contains(src)) fail(at(p, "from"), "unknown register label \"" + src + "\"");
      o.wires = composite.qubits_of(src);
    }
    if (r.contains("qubits") && integer_field(r, "qubits", p) != static_cast<long>(o.wires.size()))
      fail(at(p, "qubits"), "does not match the number of wires");
    outs.push_back(std::move(o));
  }
  const long gates = j.contains("two_qubit_gates") ? integer_field(j, "two_qubit_gates", path) : 0;
  try {
    return QuantumInstrument(ancilla, inputs, std::move(c), m, std::move(outs), gates);
  } catch (const ValidationError& e) {
    fail(path.empty() ? "instrument" : path, e.what());
  }
}

Json to_json(const PolySpec& spec) {
  Json terms = Json::array();
  for (const auto& t : spec.terms)
    terms.push_back({{"k", t.k}, {"l", t.l}, {"re", t.coefficient.real()}, {"im", t.coefficient.imag()}});
  return {{"terms", std::move(terms)}};
}

PolySpec polyspec_from_json(const Json& j, const std::string& path) {
  PolySpec spec;
  const std::string tp = at(path, "terms");
  std::size_t i = 0;
  for (const auto& t : require_array(require_field(j, "terms", path), tp)) {
    const std::string p = at(tp, i++);
    PolyTerm term;
    term.k = static_cast<int>(integer_field(t, "k", p));
    term.l = t.contains("l") ? static_cast<int>(integer_field(t, "l", p)) : 0;
    term.coefficient = {number_field(t, "re", p), t.contains("im") ? number_field(t, "im", p) : 0.0};
    spec.terms.push_back(term);
  }
  if (spec.terms.empty()) fail(tp, "at least one term is required");
  return spec;
}

Json to_json(const LcsProblem& p) {
  // Vectors when every preparation is the derived one, so parsing rebuilds it exactly.
  bool derived = true;
  for (std::size_t i = 0; i < p.size() && derived; ++i)
    derived = (p.preparations[i].array() == preparation_unitary(p.states[i]).array()).all();
  Json states = Json::array();
  for (std::size_t i = 0; i < p.size(); ++i)
    states.push_back(derived ? vector_to_json(p.states[i]) : Json{{"unitary", to_json(p.preparations[i])}});
  Json coeffs = Json::array();
  for (const auto& c : p.coefficients) coeffs.push_back(complex_to_json(c));
  return {{"states", std::move(states)}, {"coefficients", std::move(coeffs)}};
}

LcsProblem lcs_problem_from_json(const Json& j, const std::string& path) {
  const std::string sp = at(path, "states");
  const std::string cp = at(path, "coefficients");
  std::vector<Complex> coeffs;
  std::size_t i = 0;
  for (const auto& c : require_array(require_field(j, "coefficients", path), cp))
    coeffs.push_back(complex_from_json(c, at(cp, i++)));
  const auto& states = require_array(require_field(j, "states", path), sp);
  bool from_zero = false;
  if (j.contains("prepares_from_zero")) {
    if (!j["prepares_from_zero"].is_boolean()) fail(at(path, "prepares_from_zero"), "expected a boolean");
    from_zero = j["prepares_from_zero"].get<bool>();
  }
  bool unitaries = false, vectors = false;
  std::vector<ComplexVector> vs;
  std::vector<ComplexMatrix> us;
  i = 0;
  for (const auto& s : states) {
    const std::string p = at(sp, i++);
    if (from_zero) {
      unitaries = true;
      us.push_back(matrix_from_json(s, p));
    } else if (s.contains("unitary")) {
      unitaries = true;
      us.push_back(matrix_from_json(s["unitary"], at(p, "unitary")));
    } else {
      vectors = true;
      vs.push_back(vector_from_json(s, p));
    }
  }
  if (unitaries && vectors) fail(sp, "mix of vectors and unitaries");
  try {
    return unitaries ? make_lcs_problem_from_unitaries(std::move(us), std::move(coeffs))
                     : make_lcs_problem(std::move(vs), std::move(coeffs));
  } catch (const ValidationError& e) {
    fail(path.empty() ? "problem" : path, e.what());
  }
}

Json to_json(const EstimatorReport& r) {
  return {{"shots", r.shots},
          {"sample_mean", complex_to_json(r.sample_mean)},
          {"sample_variance", r.sample_variance},
          {"analytic_mean", complex_to_json(r.analytic_mean)},
          {"analytic_variance", r.analytic_variance},
          {"variance_bound", r.variance_bound},
          {"seed", r.seed}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < pos; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": invalid JSON");
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot write file");
  out << j.dump(2) << '\n';
}

}  // namespace wstate
