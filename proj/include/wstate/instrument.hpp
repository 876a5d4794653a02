// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wstate/circuit.hpp"
#include "wstate/linalg.hpp"

namespace wstate {

inline constexpr double kStateTol = 1e-10;
inline constexpr double kZeroProbability = 1e-12;
inline constexpr int kMaxFlatEnvironmentQubits = 14;

// Density matrix or pure vector on a register layout.
class QuantumState {
 public:
  static QuantumState from_vector(ComplexVector v, RegisterLayout layout);
  static QuantumState from_density(ComplexMatrix m, RegisterLayout layout);
  // Zero-qubit state (dimension 1).
  static QuantumState empty();
  static QuantumState tensor(const QuantumState& a, const QuantumState& b);

  bool is_pure() const { return pure_; }
  const ComplexVector& vector() const;
  ComplexMatrix density() const;
  const RegisterLayout& layout() const { return layout_; }
  std::size_t dim() const { return layout_.dim(); }
  QuantumState relabeled(RegisterLayout layout) const;

 private:
  QuantumState() = default;
  bool pure_ = true;
  ComplexVector vector_;
  ComplexMatrix matrix_;
  RegisterLayout layout_;
};

// Arbitrary square matrix: need not be Hermitian, positive or normalised.
class WeightedState {
 public:
  WeightedState(ComplexMatrix m, RegisterLayout layout);
  static WeightedState from_state(const QuantumState& s);

  const ComplexMatrix& matrix() const { return matrix_; }
  const RegisterLayout& layout() const { return layout_; }
  std::size_t dim() const { return layout_.dim(); }

 private:
  ComplexMatrix matrix_;
  RegisterLayout layout_;
};

enum class MeasurementKind { hermitian, normal, nonnormal };
const char* to_string(MeasurementKind kind);
MeasurementKind measurement_kind_from_string(const std::string& s);

struct NormalTerm {
  Complex coefficient;
  ComplexMatrix op;
};

class MeasurementOperator {
 public:
  explicit MeasurementOperator(ComplexMatrix m);
  MeasurementOperator(ComplexMatrix m, std::vector<NormalTerm> decomposition);
  // Non-normal matrices get the Hermitian/skew split M = (M + M^dag)/2 + (M - M^dag)/2.
  static MeasurementOperator with_default_decomposition(ComplexMatrix m);

  const ComplexMatrix& matrix() const { return matrix_; }
  MeasurementKind kind() const { return kind_; }
  bool is_normal() const { return kind_ != MeasurementKind::nonnormal; }
  const std::optional<std::vector<NormalTerm>>& decomposition() const { return decomposition_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

 private:
  ComplexMatrix matrix_;
  MeasurementKind kind_;
  std::optional<std::vector<NormalTerm>> decomposition_;
};

MeasurementOperator kron(const MeasurementOperator& a, const MeasurementOperator& b);

enum class Role { system, environment, garbage };
const char* to_string(Role role);
Role role_from_string(const std::string& s);

struct OutputRegister {
  std::string label;
  Role role;
  std::vector<int> wires;
};

// I(sigma, U, M): composite wires are the ancilla registers followed by the
// input registers. Output registers partition the composite wires into S, E
// and G; M acts on the concatenated E wires.
class QuantumInstrument {
 public:
  QuantumInstrument(QuantumState ancilla, RegisterLayout input_layout, Circuit unitary,
                    MeasurementOperator measurement, std::vector<OutputRegister> outputs,
                    long two_qubit_gates = 0);

  const QuantumState& ancilla() const { return ancilla_; }
  const RegisterLayout& input_layout() const { return input_layout_; }
  const Circuit& unitary() const { return unitary_; }
  const MeasurementOperator& measurement() const { return measurement_; }
  const std::vector<OutputRegister>& outputs() const { return outputs_; }
  long two_qubit_gates() const { return two_qubit_gates_; }

  int num_qubits() const { return unitary_.num_qubits(); }
  RegisterLayout composite_layout() const;
  RegisterLayout layout_of(Role role) const;
  RegisterLayout system_layout() const { return layout_of(Role::system); }
  std::vector<int> wires_of(Role role) const;
  const OutputRegister& output(const std::string& label) const;

  QuantumInstrument with_measurement(MeasurementOperator m) const;

 private:
  QuantumState ancilla_;
  RegisterLayout input_layout_;
  Circuit unitary_;
  MeasurementOperator measurement_;
  std::vector<OutputRegister> outputs_;
  long two_qubit_gates_;
};

// rho = sum_k weight_k |ket_k><bra_k|; an empty bra stands for bra = ket.
struct EnsembleTerm {
  Complex weight;
  ComplexVector ket;
  ComplexVector bra;
};
std::vector<EnsembleTerm> ensemble_of(const QuantumState& s);
std::vector<EnsembleTerm> ensemble_of(const ComplexMatrix& m);

// U (sigma (x) rho_in) U^dagger as an ensemble with qubits reordered to G, S, E
// so that each garbage value g selects a contiguous dS x dE block.
struct OutputEnsemble {
  std::size_t dS = 1, dE = 1, dG = 1;
  std::vector<EnsembleTerm> terms;
};
OutputEnsemble evolve(const QuantumInstrument& inst, const std::vector<EnsembleTerm>& input);

// Tr_EG(rho_out (I (x) m (x) I)).
ComplexMatrix contract_environment(const OutputEnsemble& out, const ComplexMatrix& m);
// Tr(rho_out (a_S (x) b_E (x) I_G)).
Complex expectation_product(const OutputEnsemble& out, const ComplexMatrix& a,
                            const ComplexMatrix& b);

WeightedState apply_exact(const QuantumInstrument& inst, const QuantumState& input);
WeightedState apply_exact(const QuantumInstrument& inst, const std::vector<EnsembleTerm>& input);
WeightedState apply_exact(const QuantumInstrument& inst, const WeightedState& input);
// Output vector phi with tau = |phi><phi| when the ancilla is pure, there is no
// garbage register and M = c|m><m| with c > 0; nullopt otherwise.
std::optional<ComplexVector> apply_exact_vector(const QuantumInstrument& inst,
                                                const ComplexVector& input);

struct InstrumentBranch {
  Complex eigenvalue;
  double probability;
  // E_j(rho)/p_j, or zero when p_j < 1e-12.
  ComplexMatrix conditional;
};
std::vector<InstrumentBranch> branches(const QuantumInstrument& inst, const QuantumState& input);

QuantumInstrument emulate_nonnormal(const QuantumInstrument& inst);

Complex expectation(const WeightedState& tau, const ComplexMatrix& obs);

// Instrument with no ancilla, identity unitary and M = [1].
QuantumInstrument identity_instrument(const RegisterLayout& layout);

// Maps labels of the previous stage's system registers to input labels of the next stage.
using Wiring = std::vector<std::pair<std::string, std::string>>;

class Pipeline {
 public:
  explicit Pipeline(QuantumInstrument first);

  Pipeline then(const QuantumInstrument& next, const Wiring& wiring) const;

  std::size_t size() const { return stages_.size(); }
  const QuantumInstrument& stage(std::size_t i) const { return stages_[i].instrument; }
  // Inputs not fed by the previous stage; for stage 0 the whole input layout.
  const RegisterLayout& fresh_layout(std::size_t i) const { return stages_[i].fresh; }

  WeightedState evaluate(const std::vector<WeightedState>& inputs) const;
  WeightedState evaluate(const std::vector<QuantumState>& inputs) const;
  std::optional<ComplexVector> evaluate_vector(const std::vector<ComplexVector>& inputs) const;

  // Single equivalent instrument, built on first use.
  const QuantumInstrument& flattened() const;
  QuantumState flattened_input(const std::vector<QuantumState>& inputs) const;

 private:
  struct Stage {
    QuantumInstrument instrument;
    Wiring wiring;
    RegisterLayout fresh;
  };
  explicit Pipeline(std::vector<Stage> stages);
  ComplexMatrix stage_input(std::size_t i, const ComplexMatrix& previous,
                            const ComplexMatrix& fresh) const;
  std::vector<int> stage_input_order(std::size_t i) const;

  std::vector<Stage> stages_;
  mutable std::shared_ptr<const QuantumInstrument> flat_;
};

Pipeline concatenate(const QuantumInstrument& first, const QuantumInstrument& second,
                     const Wiring& wiring);

}  // namespace wstate
