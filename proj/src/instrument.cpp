// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#include "wstate/instrument.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace wstate {

namespace {

void check_vector_finite(const ComplexVector& v, std::string_view what) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag()))
      throw ValidationError(std::string(what) + ": non-finite entry");
}

const ComplexVector& bra_of(const EnsembleTerm& t) { return t.bra.size() ? t.bra : t.ket; }

}  // namespace

QuantumState QuantumState::from_vector(ComplexVector v, RegisterLayout layout) {
  if (static_cast<std::size_t>(v.size()) != layout.dim())
    throw ValidationError("state vector dimension does not match layout");
  check_vector_finite(v, "state vector");
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > kStateTol)
    throw ValidationError("state vector is not normalised (norm " + std::to_string(norm) + ")");
  QuantumState s;
  s.pure_ = true;
  s.vector_ = std::move(v);
  s.layout_ = std::move(layout);
  return s;
}

QuantumState QuantumState::from_density(ComplexMatrix m, RegisterLayout layout) {
  if (!is_square(m) || static_cast<std::size_t>(m.rows()) != layout.dim())
    throw ValidationError("density matrix dimension does not match layout");
  require_finite(m, "density matrix");
  if (!is_hermitian(m, kStateTol)) throw ValidationError("density matrix is not Hermitian");
  const Complex tr = m.trace();
  if (std::abs(tr - 1.0) > kStateTol)
    throw ValidationError("density matrix trace is " + std::to_string(tr.real()) + ", not 1");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kStateTol)
    throw ValidationError("density matrix has a negative eigenvalue");
  QuantumState s;
  s.pure_ = false;
  s.matrix_ = std::move(m);
  s.layout_ = std::move(layout);
  return s;
}

QuantumState QuantumState::empty() {
  QuantumState s;
  s.pure_ = true;
  s.vector_ = ComplexVector::Ones(1);
  return s;
}

QuantumState QuantumState::tensor(const QuantumState& a, const QuantumState& b) {
  QuantumState s;
  s.layout_ = a.layout_.concat(b.layout_);
  if (a.pure_ && b.pure_) {
    s.pure_ = true;
    s.vector_ = kron(a.vector_, b.vector_);
  } else {
    s.pure_ = false;
    s.matrix_ = kron(a.density(), b.density());
  }
  return s;
}

const ComplexVector& QuantumState::vector() const {
  if (!pure_) throw ValidationError("state is not in pure-vector form");
  return vector_;
}

ComplexMatrix QuantumState::density() const {
  return pure_ ? ComplexMatrix(vector_ * vector_.adjoint()) : matrix_;
}

QuantumState QuantumState::relabeled(RegisterLayout layout) const {
  if (layout.dim() != layout_.dim()) throw ValidationError("relabel: dimension mismatch");
  QuantumState s = *this;
  s.layout_ = std::move(layout);
  return s;
}

WeightedState::WeightedState(ComplexMatrix m, RegisterLayout layout)
    : matrix_(std::move(m)), layout_(std::move(layout)) {
  if (matrix_.rows() != matrix_.cols() ||
      static_cast<std::size_t>(matrix_.rows()) != layout_.dim())
    throw ValidationError("weighted state dimension does not match layout");
  require_finite(matrix_, "weighted state");
}

WeightedState WeightedState::from_state(const QuantumState& s) {
  return WeightedState(s.density(), s.layout());
}

const char* to_string(MeasurementKind kind) {
  switch (kind) {
    case MeasurementKind::hermitian: return "hermitian";
    case MeasurementKind::normal: return "normal";
    case MeasurementKind::nonnormal: return "nonnormal";
  }
  return "";
}

MeasurementKind measurement_kind_from_string(const std::string& s) {
  if (s == "hermitian") return MeasurementKind::hermitian;
  if (s == "normal") return MeasurementKind::normal;
  if (s == "nonnormal") return MeasurementKind::nonnormal;
  throw ValidationError("unknown measurement kind '" + s + "'");
}

namespace {

MeasurementKind classify(const ComplexMatrix& m) {
  if (is_hermitian(m)) return MeasurementKind::hermitian;
  if (is_normal(m)) return MeasurementKind::normal;
  return MeasurementKind::nonnormal;
}

}  // namespace

MeasurementOperator::MeasurementOperator(ComplexMatrix m) : matrix_(std::move(m)) {
  require_square(matrix_, "measurement operator");
  require_finite(matrix_, "measurement operator");
  if (!is_power_of_two(static_cast<std::size_t>(matrix_.rows())))
    throw ValidationError("measurement operator dimension is not a power of two");
  kind_ = classify(matrix_);
}

MeasurementOperator::MeasurementOperator(ComplexMatrix m, std::vector<NormalTerm> decomposition)
    : MeasurementOperator(std::move(m)) {
  if (decomposition.empty()) throw ValidationError("measurement decomposition is empty");
  ComplexMatrix sum = ComplexMatrix::Zero(matrix_.rows(), matrix_.cols());
  for (const auto& t : decomposition) {
    if (t.op.rows() != matrix_.rows() || t.op.cols() != matrix_.cols())
      throw ValidationError("measurement decomposition term has the wrong dimension");
    if (!wstate::is_normal(t.op)) throw ValidationError("measurement decomposition term is not normal");
    sum += t.coefficient * t.op;
  }
  if (max_abs(sum - matrix_) > kNormalityTol)
    throw ValidationError("measurement decomposition does not sum to the matrix");
  decomposition_ = std::move(decomposition);
}

MeasurementOperator MeasurementOperator::with_default_decomposition(ComplexMatrix m) {
  MeasurementOperator op(m);
  if (op.is_normal()) return op;
  const ComplexMatrix md = m.adjoint();
  std::vector<NormalTerm> terms{{0.5, m + md}, {0.5, m - md}};
  return MeasurementOperator(std::move(m), std::move(terms));
}

MeasurementOperator kron(const MeasurementOperator& a, const MeasurementOperator& b) {
  ComplexMatrix m = kron(a.matrix(), b.matrix());
  if (a.is_normal() && b.is_normal() && !a.decomposition() && !b.decomposition())
    return MeasurementOperator(std::move(m));
  auto terms_of = [](const MeasurementOperator& op) {
    if (op.decomposition()) return *op.decomposition();
    if (!op.is_normal()) throw ValidationError("non-normal measurement without decomposition");
    return std::vector<NormalTerm>{{1.0, op.matrix()}};
  };
  std::vector<NormalTerm> terms;
  for (const auto& ta : terms_of(a))
    for (const auto& tb : terms_of(b))
      terms.push_back({ta.coefficient * tb.coefficient, kron(ta.op, tb.op)});
  return MeasurementOperator(std::move(m), std::move(terms));
}

const char* to_string(Role role) {
  switch (role) {
    case Role::system: return "S";
    case Role::environment: return "E";
    case Role::garbage: return "G";
  }
  return "";
}

Role role_from_string(const std::string& s) {
  if (s == "S") return Role::system;
  if (s == "E") return Role::environment;
  if (s == "G") return Role::garbage;
  throw ValidationError("unknown register role '" + s + "'");
}

QuantumInstrument::QuantumInstrument(QuantumState ancilla, RegisterLayout input_layout,
                                     Circuit unitary, MeasurementOperator measurement,
                                     std::vector<OutputRegister> outputs, long two_qubit_gates)
    : ancilla_(std::move(ancilla)),
      input_layout_(std::move(input_layout)),
      unitary_(std::move(unitary)),
      measurement_(std::move(measurement)),
      outputs_(std::move(outputs)),
      two_qubit_gates_(two_qubit_gates) {
  (void)composite_layout();
  const int n = ancilla_.layout().num_qubits() + input_layout_.num_qubits();
  if (unitary_.num_qubits() != n)
    throw ValidationError("instrument unitary width does not match ancilla plus input");
  std::vector<int> seen(n, 0);
  std::set<std::string> labels;
  for (const auto& r : outputs_) {
    if (r.wires.empty()) throw ValidationError("output register '" + r.label + "' has no wires");
    if (!labels.insert(r.label).second)
      throw ValidationError("duplicate output register label '" + r.label + "'");
    for (int w : r.wires) {
      if (w < 0 || w >= n)
        throw ValidationError("output register '" + r.label + "' has a wire out of range");
      if (seen[w]++) throw ValidationError("wire assigned to more than one output register");
    }
  }
  if (std::any_of(seen.begin(), seen.end(), [](int c) { return c == 0; }))
    throw ValidationError("output registers do not cover every wire");
  const std::size_t d_env = std::size_t{1} << wires_of(Role::environment).size();
  if (measurement_.dim() != d_env)
    throw ValidationError("measurement dimension does not match the E register");
}

RegisterLayout QuantumInstrument::composite_layout() const {
  return ancilla_.layout().concat(input_layout_);
}

RegisterLayout QuantumInstrument::layout_of(Role role) const {
  std::vector<Register> regs;
  for (const auto& r : outputs_)
    if (r.role == role) regs.push_back({r.label, static_cast<int>(r.wires.size())});
  return RegisterLayout(std::move(regs));
}

std::vector<int> QuantumInstrument::wires_of(Role role) const {
  std::vector<int> w;
  for (const auto& r : outputs_)
    if (r.role == role) w.insert(w.end(), r.wires.begin(), r.wires.end());
  return w;
}

const OutputRegister& QuantumInstrument::output(const std::string& label) const {
  for (const auto& r : outputs_)
    if (r.label == label) return r;
  throw ValidationError("unknown output register label '" + label + "'");
}

QuantumInstrument QuantumInstrument::with_measurement(MeasurementOperator m) const {
  return QuantumInstrument(ancilla_, input_layout_, unitary_, std::move(m), outputs_,
                           two_qubit_gates_);
}

std::vector<EnsembleTerm> ensemble_of(const QuantumState& s) {
  if (s.is_pure()) return {{1.0, s.vector(), ComplexVector()}};
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s.density());
  std::vector<EnsembleTerm> terms;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double w = es.eigenvalues()(i);
    if (std::abs(w) < 1e-15) continue;
    terms.push_back({w, es.eigenvectors().col(i), ComplexVector()});
  }
  return terms;
}

std::vector<EnsembleTerm> ensemble_of(const ComplexMatrix& m) {
  require_square(m, "weighted state");
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  std::vector<EnsembleTerm> terms;
  const auto& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= 1e-15 * std::max(1.0, sv(0))) continue;
    terms.push_back({sv(i), svd.matrixU().col(i), svd.matrixV().col(i)});
  }
  return terms;
}

OutputEnsemble evolve(const QuantumInstrument& inst, const std::vector<EnsembleTerm>& input) {
  const int n = inst.num_qubits();
  std::vector<int> order = inst.wires_of(Role::garbage);
  const auto ws = inst.wires_of(Role::system);
  const auto we = inst.wires_of(Role::environment);
  OutputEnsemble out;
  out.dG = std::size_t{1} << order.size();
  out.dS = std::size_t{1} << ws.size();
  out.dE = std::size_t{1} << we.size();
  order.insert(order.end(), ws.begin(), ws.end());
  order.insert(order.end(), we.begin(), we.end());
  const auto anc = ensemble_of(inst.ancilla());
  const auto din = static_cast<Eigen::Index>(inst.input_layout().dim());
  auto run = [&](const ComplexVector& a, const ComplexVector& b) {
    ComplexVector v = kron(a, b);
    inst.unitary().apply(v);
    return permute_qubits(v, n, order);
  };
  for (const auto& ti : input) {
    if (ti.ket.size() != din || (ti.bra.size() && ti.bra.size() != din))
      throw ValidationError("instrument input dimension mismatch");
    for (const auto& ta : anc) {
      EnsembleTerm t;
      t.weight = ta.weight * ti.weight;
      t.ket = run(ta.ket, ti.ket);
      if (ti.bra.size()) t.bra = run(ta.ket, ti.bra);
      out.terms.push_back(std::move(t));
    }
  }
  return out;
}

namespace {

using ConstBlock = Eigen::Map<const ComplexMatrix>;

}  // namespace

ComplexMatrix contract_environment(const OutputEnsemble& out, const ComplexMatrix& m) {
  const auto dS = static_cast<Eigen::Index>(out.dS);
  const auto dE = static_cast<Eigen::Index>(out.dE);
  if (m.rows() != dE || m.cols() != dE) throw ValidationError("measurement dimension mismatch");
  const ComplexMatrix mt = m.transpose();
  ComplexMatrix tau = ComplexMatrix::Zero(dS, dS);
  for (const auto& t : out.terms) {
    const ComplexVector& bra = bra_of(t);
    for (std::size_t g = 0; g < out.dG; ++g) {
      ConstBlock a(t.ket.data() + g * out.dS * out.dE, dS, dE);
      ConstBlock b(bra.data() + g * out.dS * out.dE, dS, dE);
      tau.noalias() += t.weight * (a * mt) * b.adjoint();
    }
  }
  return tau;
}

Complex expectation_product(const OutputEnsemble& out, const ComplexMatrix& a,
                            const ComplexMatrix& b) {
  const auto dS = static_cast<Eigen::Index>(out.dS);
  const auto dE = static_cast<Eigen::Index>(out.dE);
  if (a.rows() != dS || b.rows() != dE) throw ValidationError("operator dimension mismatch");
  const ComplexMatrix bt = b.transpose();
  Complex acc{0.0, 0.0};
  for (const auto& t : out.terms) {
    const ComplexVector& bra = bra_of(t);
    for (std::size_t g = 0; g < out.dG; ++g) {
      ConstBlock k(t.ket.data() + g * out.dS * out.dE, dS, dE);
      ConstBlock br(bra.data() + g * out.dS * out.dE, dS, dE);
      const ComplexMatrix y = a * k * bt;
      acc += t.weight * (br.conjugate().cwiseProduct(y)).sum();
    }
  }
  return acc;
}

namespace {

ComplexMatrix weighted_output(const QuantumInstrument& inst, const OutputEnsemble& out) {
  const auto& m = inst.measurement();
  if (!m.decomposition()) {
    if (!m.is_normal())
      throw ValidationError("non-normal measurement requires a decomposition");
    return contract_environment(out, m.matrix());
  }
  ComplexMatrix tau = ComplexMatrix::Zero(static_cast<Eigen::Index>(out.dS),
                                          static_cast<Eigen::Index>(out.dS));
  for (const auto& t : *m.decomposition()) tau += t.coefficient * contract_environment(out, t.op);
  return tau;
}

}  // namespace

WeightedState apply_exact(const QuantumInstrument& inst, const std::vector<EnsembleTerm>& input) {
  const auto out = evolve(inst, input);
  return WeightedState(weighted_output(inst, out), inst.system_layout());
}

WeightedState apply_exact(const QuantumInstrument& inst, const QuantumState& input) {
  if (input.dim() != inst.input_layout().dim())
    throw ValidationError("instrument input dimension mismatch");
  return apply_exact(inst, ensemble_of(input));
}

WeightedState apply_exact(const QuantumInstrument& inst, const WeightedState& input) {
  if (input.dim() != inst.input_layout().dim())
    throw ValidationError("instrument input dimension mismatch");
  return apply_exact(inst, ensemble_of(input.matrix()));
}

std::optional<ComplexVector> apply_exact_vector(const QuantumInstrument& inst,
                                                const ComplexVector& input) {
  if (static_cast<std::size_t>(input.size()) != inst.input_layout().dim())
    throw ValidationError("instrument input dimension mismatch");
  if (!inst.ancilla().is_pure() || !inst.wires_of(Role::garbage).empty()) return std::nullopt;
  const auto& m = inst.measurement();
  if (m.kind() != MeasurementKind::hermitian) return std::nullopt;
  const Eigenbasis eb = normal_eigenbasis(m.matrix());
  int nonzero = -1;
  for (std::size_t i = 0; i < eb.values.size(); ++i) {
    if (std::abs(eb.values[i]) <= 1e-12) continue;
    if (nonzero >= 0) return std::nullopt;
    nonzero = static_cast<int>(i);
  }
  if (nonzero < 0) return ComplexVector::Zero(static_cast<Eigen::Index>(inst.system_layout().dim()));
  const double c = eb.values[nonzero].real();
  if (c <= 0.0) return std::nullopt;
  const ComplexVector mvec = eb.vectors.col(nonzero);
  const auto out = evolve(inst, {{1.0, input, ComplexVector()}});
  const auto& ket = out.terms.front().ket;
  ConstBlock a(ket.data(), static_cast<Eigen::Index>(out.dS), static_cast<Eigen::Index>(out.dE));
  return ComplexVector(std::sqrt(c) * (a * mvec.conjugate()));
}

std::vector<InstrumentBranch> branches(const QuantumInstrument& inst, const QuantumState& input) {
  if (input.dim() != inst.input_layout().dim())
    throw ValidationError("instrument input dimension mismatch");
  const auto spectrum = spectral_decompose(inst.measurement().matrix());
  const auto out = evolve(inst, ensemble_of(input));
  std::vector<InstrumentBranch> result;
  for (const auto& term : spectrum) {
    ComplexMatrix e = contract_environment(out, term.projector);
    double p = e.trace().real();
    InstrumentBranch b{term.eigenvalue, 0.0, ComplexMatrix::Zero(e.rows(), e.cols())};
    if (p >= kZeroProbability) {
      b.probability = std::min(p, 1.0);
      b.conditional = e / p;
    }
    result.push_back(std::move(b));
  }
  return result;
}

QuantumInstrument emulate_nonnormal(const QuantumInstrument& inst) {
  const auto& m = inst.measurement();
  if (!m.decomposition()) {
    if (!m.is_normal()) throw ValidationError("non-normal measurement requires a decomposition");
    return inst;
  }
  const auto& terms = *m.decomposition();
  double total = 0.0;
  for (const auto& t : terms) total += std::abs(t.coefficient);
  if (total == 0.0) throw ValidationError("measurement decomposition has zero weight");
  // c_k N_k = q_k (c_k / q_k) N_k with q_k = |c_k| / sum |c|.
  std::vector<double> q;
  std::vector<ComplexMatrix> folded;
  for (const auto& t : terms) {
    const double qk = std::abs(t.coefficient) / total;
    if (qk == 0.0) continue;
    q.push_back(qk);
    folded.push_back((t.coefficient / qk) * t.op);
  }
  if (q.size() == 1) return inst.with_measurement(MeasurementOperator(folded.front()));

  int extra = 0;
  while ((std::size_t{1} << extra) < q.size()) ++extra;
  const std::size_t dk = std::size_t{1} << extra;
  ComplexMatrix sigma = ComplexMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t k = 0; k < q.size(); ++k) sigma(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = q[k];

  std::string label = "emu";
  const auto composite = inst.composite_layout();
  auto taken = [&](const std::string& l) {
    if (composite.contains(l)) return true;
    return std::any_of(inst.outputs().begin(), inst.outputs().end(),
                       [&](const OutputRegister& r) { return r.label == l; });
  };
  while (taken(label)) label += "'";

  const int a = inst.ancilla().layout().num_qubits();
  const int n = inst.num_qubits();
  const auto ancilla = QuantumState::tensor(
      inst.ancilla(), QuantumState::from_density(sigma, RegisterLayout::single(label, extra)));
  std::vector<int> wire_map(n);
  for (int w = 0; w < n; ++w) wire_map[w] = w < a ? w : w + extra;
  Circuit u = inst.unitary().remapped(wire_map, n + extra);

  std::vector<OutputRegister> outputs;
  OutputRegister emu{label, Role::environment, {}};
  for (int i = 0; i < extra; ++i) emu.wires.push_back(a + i);
  outputs.push_back(std::move(emu));
  for (auto r : inst.outputs()) {
    for (int& w : r.wires) w = wire_map[w];
    outputs.push_back(std::move(r));
  }

  const auto de = static_cast<Eigen::Index>(m.dim());
  ComplexMatrix big = ComplexMatrix::Zero(static_cast<Eigen::Index>(dk) * de, static_cast<Eigen::Index>(dk) * de);
  for (std::size_t k = 0; k < folded.size(); ++k)
    big.block(static_cast<Eigen::Index>(k) * de, static_cast<Eigen::Index>(k) * de, de, de) = folded[k];
  return QuantumInstrument(ancilla, inst.input_layout(), std::move(u), MeasurementOperator(big),
                           std::move(outputs), inst.two_qubit_gates());
}

Complex expectation(const WeightedState& tau, const ComplexMatrix& obs) {
  if (obs.rows() != tau.matrix().rows() || obs.cols() != tau.matrix().cols())
    throw ValidationError("expectation: observable dimension mismatch");
  return (tau.matrix().cwiseProduct(obs.transpose())).sum();
}

QuantumInstrument identity_instrument(const RegisterLayout& layout) {
  std::vector<OutputRegister> outputs;
  for (const auto& r : layout.registers()) outputs.push_back({r.label, Role::system, layout.qubits_of(r.label)});
  return QuantumInstrument(QuantumState::empty(), layout, Circuit(layout.num_qubits()),
                           MeasurementOperator(ComplexMatrix::Ones(1, 1)), std::move(outputs));
}

namespace {

QuantumInstrument prefixed(const QuantumInstrument& inst, const std::string& prefix) {
  auto outputs = inst.outputs();
  for (auto& r : outputs) r.label = prefix + r.label;
  return QuantumInstrument(inst.ancilla().relabeled(inst.ancilla().layout().prefixed(prefix)),
                           inst.input_layout().prefixed(prefix), inst.unitary(),
                           inst.measurement(), std::move(outputs), inst.two_qubit_gates());
}

RegisterLayout fresh_inputs(const QuantumInstrument& next, const Wiring& wiring) {
  std::vector<Register> regs;
  for (const auto& r : next.input_layout().registers()) {
    const bool wired = std::any_of(wiring.begin(), wiring.end(),
                                   [&](const auto& w) { return w.second == r.label; });
    if (!wired) regs.push_back(r);
  }
  return RegisterLayout(std::move(regs));
}

void check_wiring(const QuantumInstrument& prev, const QuantumInstrument& next, const Wiring& wiring) {
  const auto sys = prev.system_layout();
  std::set<std::string> sources, targets;
  for (const auto& [from, to] : wiring) {
    if (!sys.contains(from))
      throw ValidationError("wiring mismatch: '" + from + "' is not a system register of the first instrument");
    if (!next.input_layout().contains(to))
      throw ValidationError("wiring mismatch: '" + to + "' is not an input register of the second instrument");
    if (!sources.insert(from).second || !targets.insert(to).second)
      throw ValidationError("wiring mismatch: register wired twice");
    if (sys.at(from).qubits != next.input_layout().at(to).qubits)
      throw ValidationError("wiring mismatch: '" + from + "' and '" + to + "' differ in size");
  }
  for (const auto& r : sys.registers())
    if (!sources.count(r.label))
      throw ValidationError("wiring mismatch: system register '" + r.label + "' is not wired");
}

// Flattens A followed by B; wiring refers to A's (already prefixed) system labels.
QuantumInstrument flatten(const QuantumInstrument& A, const QuantumInstrument& B,
                          const Wiring& wiring, const std::string& prefix) {
  const int a = A.ancilla().layout().num_qubits();
  const int ai = A.input_layout().num_qubits();
  const int b = B.ancilla().layout().num_qubits();
  const RegisterLayout fresh = fresh_inputs(B, wiring);
  const int n = a + b + ai + fresh.num_qubits();

  std::vector<int> map_a(A.num_qubits());
  for (int w = 0; w < A.num_qubits(); ++w) map_a[w] = w < a ? w : w + b;
  std::vector<int> map_b(B.num_qubits());
  for (int w = 0; w < b; ++w) map_b[w] = a + w;
  for (const auto& r : B.input_layout().registers()) {
    const int off = b + B.input_layout().offset_of(r.label);
    auto it = std::find_if(wiring.begin(), wiring.end(), [&](const auto& w) { return w.second == r.label; });
    for (int i = 0; i < r.qubits; ++i) {
      if (it != wiring.end())
        map_b[off + i] = map_a[A.output(it->first).wires[i]];
      else
        map_b[off + i] = a + b + ai + fresh.offset_of(r.label) + i;
    }
  }

  Circuit u = A.unitary().remapped(map_a, n);
  u.append(B.unitary().remapped(map_b, n));

  std::vector<OutputRegister> outputs;
  auto add = [&](const QuantumInstrument& inst, Role role, const std::vector<int>& map,
                 const std::string& pre) {
    for (auto r : inst.outputs()) {
      if (r.role != role) continue;
      for (int& w : r.wires) w = map[w];
      r.label = pre + r.label;
      outputs.push_back(std::move(r));
    }
  };
  add(B, Role::system, map_b, prefix);
  add(A, Role::environment, map_a, "");
  add(B, Role::environment, map_b, prefix);
  add(A, Role::garbage, map_a, "");
  add(B, Role::garbage, map_b, prefix);

  const auto ancilla = QuantumState::tensor(
      A.ancilla(), B.ancilla().relabeled(B.ancilla().layout().prefixed(prefix)));
  return QuantumInstrument(ancilla, A.input_layout().concat(fresh.prefixed(prefix)), std::move(u),
                           kron(A.measurement(), B.measurement()), std::move(outputs),
                           A.two_qubit_gates() + B.two_qubit_gates());
}

std::string stage_prefix(std::size_t i) { return "s" + std::to_string(i) + "."; }

Wiring prefixed_sources(const Wiring& wiring, const std::string& prefix) {
  Wiring out = wiring;
  for (auto& w : out) w.first = prefix + w.first;
  return out;
}

}  // namespace

Pipeline::Pipeline(QuantumInstrument first) : stages_{Stage{first, {}, first.input_layout()}} {}

Pipeline::Pipeline(std::vector<Stage> stages) : stages_(std::move(stages)) {}

const QuantumInstrument& Pipeline::flattened() const {
  if (!flat_) {
    int env = 0;
    for (const auto& st : stages_) env += static_cast<int>(st.instrument.wires_of(Role::environment).size());
    if (env > kMaxFlatEnvironmentQubits) throw ValidationError("pipeline too large to flatten");
    auto flat = prefixed(stages_[0].instrument, stage_prefix(0));
    for (std::size_t i = 1; i < stages_.size(); ++i)
      flat = flatten(flat, stages_[i].instrument,
                     prefixed_sources(stages_[i].wiring, stage_prefix(i - 1)), stage_prefix(i));
    flat_ = std::make_shared<const QuantumInstrument>(std::move(flat));
  }
  return *flat_;
}

Pipeline Pipeline::then(const QuantumInstrument& next, const Wiring& wiring) const {
  check_wiring(stages_.back().instrument, next, wiring);
  auto stages = stages_;
  stages.push_back(Stage{next, wiring, fresh_inputs(next, wiring)});
  return Pipeline(std::move(stages));
}

std::vector<int> Pipeline::stage_input_order(std::size_t i) const {
  const auto& st = stages_[i];
  const auto prev_sys = stages_[i - 1].instrument.system_layout();
  const int np = prev_sys.num_qubits();
  std::vector<int> order;
  for (const auto& r : st.instrument.input_layout().registers()) {
    auto it = std::find_if(st.wiring.begin(), st.wiring.end(),
                           [&](const auto& w) { return w.second == r.label; });
    const int base = it != st.wiring.end() ? prev_sys.offset_of(it->first)
                                           : np + st.fresh.offset_of(r.label);
    for (int k = 0; k < r.qubits; ++k) order.push_back(base + k);
  }
  return order;
}

namespace {

std::vector<EnsembleTerm> joint_terms(const std::vector<EnsembleTerm>& a,
                                      const std::vector<EnsembleTerm>& b, int num_qubits,
                                      const std::vector<int>& order) {
  std::vector<EnsembleTerm> out;
  for (const auto& x : a)
    for (const auto& y : b) {
      EnsembleTerm t;
      t.weight = x.weight * y.weight;
      t.ket = permute_qubits(kron(x.ket, y.ket), num_qubits, order);
      if (x.bra.size() || y.bra.size())
        t.bra = permute_qubits(kron(bra_of(x), bra_of(y)), num_qubits, order);
      out.push_back(std::move(t));
    }
  return out;
}

}  // namespace

WeightedState Pipeline::evaluate(const std::vector<WeightedState>& inputs) const {
  if (inputs.size() != stages_.size())
    throw ValidationError("pipeline: expected one input per stage");
  WeightedState tau = apply_exact(stages_[0].instrument, inputs[0]);
  for (std::size_t i = 1; i < stages_.size(); ++i) {
    if (inputs[i].dim() != stages_[i].fresh.dim())
      throw ValidationError("pipeline: fresh input dimension mismatch");
    const auto& inst = stages_[i].instrument;
    auto joint = joint_terms(ensemble_of(tau.matrix()), ensemble_of(inputs[i].matrix()),
                             inst.input_layout().num_qubits(), stage_input_order(i));
    tau = apply_exact(inst, joint);
  }
  return tau;
}

WeightedState Pipeline::evaluate(const std::vector<QuantumState>& inputs) const {
  std::vector<WeightedState> w;
  for (const auto& s : inputs) w.push_back(WeightedState::from_state(s));
  return evaluate(w);
}

std::optional<ComplexVector> Pipeline::evaluate_vector(const std::vector<ComplexVector>& inputs) const {
  if (inputs.size() != stages_.size())
    throw ValidationError("pipeline: expected one input per stage");
  auto phi = apply_exact_vector(stages_[0].instrument, inputs[0]);
  for (std::size_t i = 1; i < stages_.size() && phi; ++i) {
    const auto& inst = stages_[i].instrument;
    if (static_cast<std::size_t>(inputs[i].size()) != stages_[i].fresh.dim())
      throw ValidationError("pipeline: fresh input dimension mismatch");
    const ComplexVector joint = permute_qubits(kron(*phi, inputs[i]), inst.input_layout().num_qubits(),
                                               stage_input_order(i));
    phi = apply_exact_vector(inst, joint);
  }
  return phi;
}

QuantumState Pipeline::flattened_input(const std::vector<QuantumState>& inputs) const {
  if (inputs.size() != stages_.size())
    throw ValidationError("pipeline: expected one input per stage");
  QuantumState s = QuantumState::empty();
  for (std::size_t i = 0; i < inputs.size(); ++i)
    s = QuantumState::tensor(s, inputs[i].relabeled(inputs[i].layout().prefixed(stage_prefix(i))));
  return s.relabeled(flattened().input_layout());
}

Pipeline concatenate(const QuantumInstrument& first, const QuantumInstrument& second,
                     const Wiring& wiring) {
  return Pipeline(first).then(second, wiring);
}

}  // namespace wstate
