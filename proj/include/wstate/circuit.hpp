// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "wstate/linalg.hpp"

namespace wstate {

struct Gate {
  std::string name;
  ComplexMatrix matrix;
  std::vector<int> wires;
};

// Ordered gate list on a fixed number of qubits. Gates act on their wires in
// the listed order (wire 0 is the most significant bit of the gate matrix).
class Circuit {
 public:
  explicit Circuit(int num_qubits = 0) : num_qubits_(num_qubits) {}

  int num_qubits() const { return num_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }

  Circuit& add(Gate gate);
  Circuit& unitary(const ComplexMatrix& u, std::vector<int> wires, std::string name = "U");
  Circuit& h(int q);
  Circuit& x(int q);
  Circuit& s_dagger(int q);
  Circuit& cnot(int control, int target);
  Circuit& swap(int a, int b);
  Circuit& cswap(int control, int a, int b);
  Circuit& controlled(int control, const ComplexMatrix& u, const std::vector<int>& targets,
                      std::string name = "CU");
  Circuit& append(const Circuit& other);

  void apply(ComplexVector& state) const;
  ComplexVector apply_to(const ComplexVector& state) const;
  // U m U^dagger.
  ComplexMatrix conjugate(const ComplexMatrix& m) const;
  ComplexMatrix dense() const;

  // Gate wires w become wire_map[w] on a circuit of new_num_qubits.
  Circuit remapped(const std::vector<int>& wire_map, int new_num_qubits) const;

 private:
  int num_qubits_;
  std::vector<Gate> gates_;
};

void apply_gate(const ComplexMatrix& u, const std::vector<int>& wires, int num_qubits,
                Complex* data);

}  // namespace wstate
