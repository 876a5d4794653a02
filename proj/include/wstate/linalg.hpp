// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wstate/errors.hpp"

namespace wstate {

using Complex = std::complex<double>;
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using RealVector = Eigen::VectorXd;

inline constexpr double kNormalityTol = 1e-10;
inline constexpr double kDegeneracyTol = 1e-9;

// Qubit q of an N-qubit index is bit (N - 1 - q): qubit 0 is the most
// significant. Registers are laid out left to right in the same way.
struct Register {
  std::string label;
  int qubits = 0;
  bool operator==(const Register&) const = default;
};

class RegisterLayout {
 public:
  RegisterLayout() = default;
  explicit RegisterLayout(std::vector<Register> registers);
  static RegisterLayout single(std::string label, int qubits);

  const std::vector<Register>& registers() const { return registers_; }
  bool empty() const { return registers_.empty(); }
  int num_qubits() const;
  std::size_t dim() const { return std::size_t{1} << num_qubits(); }

  bool contains(std::string_view label) const;
  std::size_t index_of(std::string_view label) const;
  const Register& at(std::string_view label) const;
  // First qubit of the register within the layout.
  int offset_of(std::string_view label) const;
  std::vector<int> qubits_of(std::string_view label) const;

  RegisterLayout concat(const RegisterLayout& other) const;
  RegisterLayout prefixed(std::string_view prefix) const;

  bool operator==(const RegisterLayout&) const = default;

 private:
  std::vector<Register> registers_;
};

ComplexMatrix identity(std::size_t dim);
ComplexMatrix dagger(const ComplexMatrix& m);
ComplexMatrix outer(const ComplexVector& ket, const ComplexVector& bra);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);

ComplexMatrix partial_trace(const ComplexMatrix& m, const RegisterLayout& layout,
                            const std::set<std::string>& keep);
// Keeps the listed qubits, in the listed order, and traces the rest.
ComplexMatrix partial_trace_qubits(const ComplexMatrix& m, int num_qubits,
                                   const std::vector<int>& keep);
// New qubit q is old qubit order[q].
ComplexMatrix permute_qubits(const ComplexMatrix& m, int num_qubits,
                             const std::vector<int>& order);
ComplexVector permute_qubits(const ComplexVector& v, int num_qubits,
                             const std::vector<int>& order);

ComplexMatrix dephase(const ComplexMatrix& m);
ComplexMatrix hadamard_product(const ComplexMatrix& a, const ComplexMatrix& b);

struct HermitianSkew {
  ComplexMatrix h;
  ComplexMatrix s;
};
HermitianSkew hermitian_skew_split(const ComplexMatrix& m);

struct SpectralTerm {
  Complex eigenvalue;
  ComplexMatrix projector;
};
std::vector<SpectralTerm> spectral_decompose(const ComplexMatrix& m,
                                             double tol = kNormalityTol);

// Unitary eigenbasis of a normal matrix: m = V diag(values) V^dagger.
struct Eigenbasis {
  std::vector<Complex> values;
  ComplexMatrix vectors;
};
Eigenbasis normal_eigenbasis(const ComplexMatrix& m, double tol = kNormalityTol);

double max_abs(const ComplexMatrix& m);
double normality_residual(const ComplexMatrix& m);
bool is_square(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = kNormalityTol);
bool is_normal(const ComplexMatrix& m, double tol = kNormalityTol);
bool is_unitary(const ComplexMatrix& m, double tol = kNormalityTol);
bool is_power_of_two(std::size_t n);
int log2_exact(std::size_t n);
double operator_norm(const ComplexMatrix& m);
Complex trace(const ComplexMatrix& m);
void require_square(const ComplexMatrix& m, std::string_view what);
void require_finite(const ComplexMatrix& m, std::string_view what);

namespace pauli {
ComplexMatrix I();
ComplexMatrix X();
ComplexMatrix Y();
ComplexMatrix Z();
ComplexMatrix H();
}  // namespace pauli

ComplexVector basis_vector(std::size_t dim, std::size_t index);
ComplexMatrix swap_operator(int qubits_per_side);

}  // namespace wstate
