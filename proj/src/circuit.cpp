// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#include "wstate/circuit.hpp"

#include <algorithm>

namespace wstate {

void apply_gate(const ComplexMatrix& u, const std::vector<int>& wires, int num_qubits,
                Complex* data) {
  const int k = static_cast<int>(wires.size());
  const std::size_t sub = std::size_t{1} << k;
  std::vector<std::size_t> offs(sub, 0);
  std::size_t mask = 0;
  for (std::size_t v = 0; v < sub; ++v)
    for (int b = 0; b < k; ++b)
      if ((v >> (k - 1 - b)) & 1U) offs[v] |= std::size_t{1} << (num_qubits - 1 - wires[b]);
  for (int w : wires) mask |= std::size_t{1} << (num_qubits - 1 - w);
  const std::size_t dim = std::size_t{1} << num_qubits;
  std::vector<Complex> in(sub), out(sub);
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (std::size_t v = 0; v < sub; ++v) in[v] = data[base | offs[v]];
    for (std::size_t r = 0; r < sub; ++r) {
      Complex acc{0.0, 0.0};
      for (std::size_t c = 0; c < sub; ++c) {
        const Complex x = u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        if (x != Complex{0.0, 0.0}) acc += x * in[c];
      }
      out[r] = acc;
    }
    for (std::size_t v = 0; v < sub; ++v) data[base | offs[v]] = out[v];
  }
}

Circuit& Circuit::add(Gate gate) {
  const std::size_t dim = std::size_t{1} << gate.wires.size();
  if (gate.matrix.rows() != static_cast<Eigen::Index>(dim) ||
      gate.matrix.cols() != static_cast<Eigen::Index>(dim))
    throw ValidationError("gate '" + gate.name + "': matrix size does not match wires");
  std::vector<int> sorted = gate.wires;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("gate '" + gate.name + "': repeated wire");
  for (int w : gate.wires)
    if (w < 0 || w >= num_qubits_) throw ValidationError("gate '" + gate.name + "': wire out of range");
  if (!is_unitary(gate.matrix)) throw ValidationError("gate '" + gate.name + "' is not unitary");
  gates_.push_back(std::move(gate));
  return *this;
}

Circuit& Circuit::unitary(const ComplexMatrix& u, std::vector<int> wires, std::string name) {
  return add(Gate{std::move(name), u, std::move(wires)});
}

Circuit& Circuit::h(int q) { return unitary(pauli::H(), {q}, "H"); }
Circuit& Circuit::x(int q) { return unitary(pauli::X(), {q}, "X"); }

Circuit& Circuit::s_dagger(int q) {
  ComplexMatrix m = identity(2);
  m(1, 1) = Complex(0.0, -1.0);
  return unitary(m, {q}, "Sdg");
}

Circuit& Circuit::cnot(int control, int target) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return unitary(m, {control, target}, "CNOT");
}

Circuit& Circuit::swap(int a, int b) { return unitary(swap_operator(1), {a, b}, "SWAP"); }

Circuit& Circuit::cswap(int control, int a, int b) {
  ComplexMatrix m = identity(8);
  m.block(4, 4, 4, 4) = swap_operator(1);
  return unitary(m, {control, a, b}, "CSWAP");
}

Circuit& Circuit::controlled(int control, const ComplexMatrix& u, const std::vector<int>& targets,
                             std::string name) {
  const auto d = u.rows();
  ComplexMatrix m = identity(2 * d);
  m.block(d, d, d, d) = u;
  std::vector<int> wires{control};
  wires.insert(wires.end(), targets.begin(), targets.end());
  return unitary(m, std::move(wires), std::move(name));
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.num_qubits_ != num_qubits_) throw ValidationError("circuit width mismatch");
  gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
  return *this;
}

void Circuit::apply(ComplexVector& state) const {
  if (state.size() != static_cast<Eigen::Index>(std::size_t{1} << num_qubits_))
    throw ValidationError("circuit: state dimension mismatch");
  for (const auto& g : gates_) apply_gate(g.matrix, g.wires, num_qubits_, state.data());
}

ComplexVector Circuit::apply_to(const ComplexVector& state) const {
  ComplexVector out = state;
  apply(out);
  return out;
}

ComplexMatrix Circuit::conjugate(const ComplexMatrix& m) const {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << num_qubits_);
  if (m.rows() != dim || m.cols() != dim) throw ValidationError("circuit: matrix dimension mismatch");
  // Row-major m is a 2N-qubit vector: row index on wires 0..N-1, column on N..2N-1.
  ComplexMatrix out = m;
  for (const auto& g : gates_) {
    apply_gate(g.matrix, g.wires, 2 * num_qubits_, out.data());
    std::vector<int> shifted = g.wires;
    for (int& w : shifted) w += num_qubits_;
    const ComplexMatrix conj = g.matrix.conjugate();
    apply_gate(conj, shifted, 2 * num_qubits_, out.data());
  }
  return out;
}

ComplexMatrix Circuit::dense() const {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << num_qubits_);
  ComplexMatrix u(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    ComplexVector v = ComplexVector::Zero(dim);
    v(c) = 1.0;
    apply(v);
    u.col(c) = v;
  }
  return u;
}

Circuit Circuit::remapped(const std::vector<int>& wire_map, int new_num_qubits) const {
  if (static_cast<int>(wire_map.size()) != num_qubits_)
    throw ValidationError("circuit remap: map size mismatch");
  Circuit out(new_num_qubits);
  for (const auto& g : gates_) {
    Gate ng = g;
    for (int& w : ng.wires) w = wire_map[w];
    out.gates_.push_back(std::move(ng));
  }
  for (int w : wire_map)
    if (w < 0 || w >= new_num_qubits) throw ValidationError("circuit remap: wire out of range");
  return out;
}

}  // namespace wstate
