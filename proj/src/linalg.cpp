// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#include "wstate/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace wstate {

NotNormal::NotNormal(double residual, double tol)
    : PreconditionError([&] {
        std::ostringstream os;
        os << "matrix is not normal: commutator residual " << residual
           << " exceeds tolerance " << tol;
        return os.str();
      }()),
      residual_(residual) {}

OrthogonalInputs::OrthogonalInputs(double overlap)
    : PreconditionError("input states are (nearly) orthogonal: |<psi0|psi1>| = " +
                        std::to_string(overlap)),
      overlap_(overlap) {}

ZeroBeta::ZeroBeta(int index)
    : PreconditionError("ancilla amplitude beta_" + std::to_string(index) + " is zero") {}

VanishingOverlapProduct::VanishingOverlapProduct(int l_, int lp_, int k_, double magnitude)
    : PreconditionError("overlap product vanishes for (l, l', k) = (" + std::to_string(l_) +
                        ", " + std::to_string(lp_) + ", " + std::to_string(k_) +
                        "): |product| = " + std::to_string(magnitude)),
      l(l_),
      lp(lp_),
      k(k_) {}

OrthogonalIntermediate::OrthogonalIntermediate(std::string a, std::string b, double overlap)
    : PreconditionError("intermediate states " + a + " and " + b +
                        " are (nearly) orthogonal: normalised overlap " +
                        std::to_string(overlap)),
      first(std::move(a)),
      second(std::move(b)) {}

RegisterLayout::RegisterLayout(std::vector<Register> registers)
    : registers_(std::move(registers)) {
  for (std::size_t i = 0; i < registers_.size(); ++i) {
    if (registers_[i].qubits < 1)
      throw ValidationError("register '" + registers_[i].label + "' has no qubits");
    for (std::size_t j = 0; j < i; ++j)
      if (registers_[j].label == registers_[i].label)
        throw ValidationError("duplicate register label '" + registers_[i].label + "'");
  }
}

RegisterLayout RegisterLayout::single(std::string label, int qubits) {
  return RegisterLayout({Register{std::move(label), qubits}});
}

int RegisterLayout::num_qubits() const {
  int n = 0;
  for (const auto& r : registers_) n += r.qubits;
  return n;
}

bool RegisterLayout::contains(std::string_view label) const {
  return std::any_of(registers_.begin(), registers_.end(),
                     [&](const Register& r) { return r.label == label; });
}

std::size_t RegisterLayout::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < registers_.size(); ++i)
    if (registers_[i].label == label) return i;
  throw ValidationError("unknown register label '" + std::string(label) + "'");
}

const Register& RegisterLayout::at(std::string_view label) const {
  return registers_[index_of(label)];
}

int RegisterLayout::offset_of(std::string_view label) const {
  const std::size_t idx = index_of(label);
  int off = 0;
  for (std::size_t i = 0; i < idx; ++i) off += registers_[i].qubits;
  return off;
}

std::vector<int> RegisterLayout::qubits_of(std::string_view label) const {
  const int off = offset_of(label);
  std::vector<int> q(at(label).qubits);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = off + static_cast<int>(i);
  return q;
}

RegisterLayout RegisterLayout::concat(const RegisterLayout& other) const {
  auto regs = registers_;
  regs.insert(regs.end(), other.registers_.begin(), other.registers_.end());
  return RegisterLayout(std::move(regs));
}

RegisterLayout RegisterLayout::prefixed(std::string_view prefix) const {
  auto regs = registers_;
  for (auto& r : regs) r.label = std::string(prefix) + r.label;
  return RegisterLayout(std::move(regs));
}

ComplexMatrix identity(std::size_t dim) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(dim),
                                 static_cast<Eigen::Index>(dim));
}

ComplexMatrix dagger(const ComplexMatrix& m) { return m.adjoint(); }

ComplexMatrix outer(const ComplexVector& ket, const ComplexVector& bra) {
  return ket * bra.adjoint();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

namespace {

// Index offsets contributed by each value of a subset of qubits.
std::vector<std::size_t> scatter_table(int num_qubits, const std::vector<int>& qubits) {
  const std::size_t count = std::size_t{1} << qubits.size();
  std::vector<std::size_t> table(count, 0);
  const int k = static_cast<int>(qubits.size());
  for (std::size_t v = 0; v < count; ++v) {
    std::size_t idx = 0;
    for (int b = 0; b < k; ++b)
      if ((v >> (k - 1 - b)) & 1U) idx |= std::size_t{1} << (num_qubits - 1 - qubits[b]);
    table[v] = idx;
  }
  return table;
}

void check_qubit_list(int num_qubits, const std::vector<int>& qubits, bool full) {
  std::vector<bool> seen(num_qubits, false);
  for (int q : qubits) {
    if (q < 0 || q >= num_qubits) throw ValidationError("qubit index out of range");
    if (seen[q]) throw ValidationError("repeated qubit index");
    seen[q] = true;
  }
  if (full && static_cast<int>(qubits.size()) != num_qubits)
    throw ValidationError("qubit permutation must list every qubit once");
}

}  // namespace

ComplexMatrix partial_trace_qubits(const ComplexMatrix& m, int num_qubits,
                                   const std::vector<int>& keep) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (!is_square(m) || static_cast<std::size_t>(m.rows()) != dim)
    throw ValidationError("partial_trace: matrix dimension does not match layout");
  check_qubit_list(num_qubits, keep, false);
  std::vector<int> traced;
  for (int q = 0; q < num_qubits; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);
  const auto kt = scatter_table(num_qubits, keep);
  const auto tt = scatter_table(num_qubits, traced);
  const auto dk = static_cast<Eigen::Index>(kt.size());
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (Eigen::Index a = 0; a < dk; ++a)
    for (Eigen::Index b = 0; b < dk; ++b) {
      Complex acc{0.0, 0.0};
      for (std::size_t t : tt)
        acc += m(static_cast<Eigen::Index>(kt[a] | t), static_cast<Eigen::Index>(kt[b] | t));
      out(a, b) = acc;
    }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const RegisterLayout& layout,
                            const std::set<std::string>& keep) {
  for (const auto& label : keep) (void)layout.index_of(label);
  if (!is_square(m) || static_cast<std::size_t>(m.rows()) != layout.dim())
    throw ValidationError("partial_trace: matrix dimension does not match layout");
  std::vector<int> kept;
  for (const auto& r : layout.registers())
    if (keep.count(r.label)) {
      const auto q = layout.qubits_of(r.label);
      kept.insert(kept.end(), q.begin(), q.end());
    }
  return partial_trace_qubits(m, layout.num_qubits(), kept);
}

ComplexMatrix permute_qubits(const ComplexMatrix& m, int num_qubits,
                             const std::vector<int>& order) {
  check_qubit_list(num_qubits, order, true);
  const auto table = scatter_table(num_qubits, order);
  const auto dim = static_cast<Eigen::Index>(table.size());
  if (m.rows() != dim || m.cols() != dim)
    throw ValidationError("permute_qubits: dimension mismatch");
  ComplexMatrix out(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < dim; ++b)
      out(a, b) = m(static_cast<Eigen::Index>(table[a]), static_cast<Eigen::Index>(table[b]));
  return out;
}

ComplexVector permute_qubits(const ComplexVector& v, int num_qubits,
                             const std::vector<int>& order) {
  check_qubit_list(num_qubits, order, true);
  const auto table = scatter_table(num_qubits, order);
  const auto dim = static_cast<Eigen::Index>(table.size());
  if (v.size() != dim) throw ValidationError("permute_qubits: dimension mismatch");
  ComplexVector out(dim);
  for (Eigen::Index a = 0; a < dim; ++a) out(a) = v(static_cast<Eigen::Index>(table[a]));
  return out;
}

ComplexMatrix dephase(const ComplexMatrix& m) {
  require_square(m, "dephase");
  ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
  out.diagonal() = m.diagonal();
  return out;
}

ComplexMatrix hadamard_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("hadamard product: dimension mismatch");
  return a.cwiseProduct(b);
}

HermitianSkew hermitian_skew_split(const ComplexMatrix& m) {
  require_square(m, "hermitian_skew_split");
  HermitianSkew out;
  const ComplexMatrix md = m.adjoint();
  out.h = 0.5 * (m + md);
  out.s = m - out.h;
  return out;
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double normality_residual(const ComplexMatrix& m) {
  const ComplexMatrix md = m.adjoint();
  return max_abs(m * md - md * m);
}

bool is_square(const ComplexMatrix& m) { return m.rows() == m.cols() && m.rows() > 0; }

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return is_square(m) && max_abs(m - m.adjoint()) <= tol;
}

bool is_normal(const ComplexMatrix& m, double tol) {
  return is_square(m) && normality_residual(m) <= tol;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  return is_square(m) && max_abs(m * m.adjoint() - identity(m.rows())) <= tol;
}

bool is_power_of_two(std::size_t n) { return n > 0 && std::has_single_bit(n); }

int log2_exact(std::size_t n) {
  if (!is_power_of_two(n)) throw ValidationError("dimension is not a power of two");
  return std::countr_zero(n);
}

double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

Complex trace(const ComplexMatrix& m) { return m.trace(); }

void require_square(const ComplexMatrix& m, std::string_view what) {
  if (!is_square(m)) throw ValidationError(std::string(what) + ": matrix is not square");
}

void require_finite(const ComplexMatrix& m, std::string_view what) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw ValidationError(std::string(what) + ": non-finite entry");
  }
}

Eigenbasis normal_eigenbasis(const ComplexMatrix& m, double tol) {
  require_square(m, "spectral_decompose");
  const double residual = normality_residual(m);
  if (residual > tol) throw NotNormal(residual, tol);
  Eigenbasis out;
  const auto n = m.rows();
  if (is_hermitian(m, tol)) {
    const ComplexMatrix herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm);
    out.vectors = es.eigenvectors();
    out.values.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) out.values[i] = es.eigenvalues()(i);
  } else {
    Eigen::ComplexSchur<ComplexMatrix> schur(m);
    out.vectors = schur.matrixU();
    out.values.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) out.values[i] = schur.matrixT()(i, i);
  }
  return out;
}

std::vector<SpectralTerm> spectral_decompose(const ComplexMatrix& m, double tol) {
  const Eigenbasis eb = normal_eigenbasis(m, tol);
  const auto n = m.rows();
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<Complex> reps;
  for (Eigen::Index i = 0; i < n; ++i) {
    bool placed = false;
    for (std::size_t g = 0; g < reps.size(); ++g)
      if (std::abs(eb.values[i] - reps[g]) < kDegeneracyTol) {
        groups[g].push_back(i);
        placed = true;
        break;
      }
    if (!placed) {
      reps.push_back(eb.values[i]);
      groups.push_back({i});
    }
  }
  std::vector<SpectralTerm> out;
  for (const auto& g : groups) {
    SpectralTerm t;
    t.eigenvalue = 0.0;
    t.projector = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i : g) {
      t.eigenvalue += eb.values[i];
      const ComplexVector v = eb.vectors.col(i);
      t.projector += v * v.adjoint();
    }
    t.eigenvalue /= static_cast<double>(g.size());
    out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end(), [](const SpectralTerm& a, const SpectralTerm& b) {
    if (a.eigenvalue.real() != b.eigenvalue.real()) return a.eigenvalue.real() < b.eigenvalue.real();
    return a.eigenvalue.imag() < b.eigenvalue.imag();
  });
  return out;
}

namespace pauli {
ComplexMatrix I() { return identity(2); }
ComplexMatrix X() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
ComplexMatrix Y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0, -1), Complex(0, 1), 0.0;
  return m;
}
ComplexMatrix Z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
ComplexMatrix H() {
  ComplexMatrix m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}
}  // namespace pauli

ComplexVector basis_vector(std::size_t dim, std::size_t index) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return v;
}

ComplexMatrix swap_operator(int qubits_per_side) {
  const std::size_t d = std::size_t{1} << qubits_per_side;
  const auto dd = static_cast<Eigen::Index>(d * d);
  ComplexMatrix s = ComplexMatrix::Zero(dd, dd);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      s(static_cast<Eigen::Index>(j * d + i), static_cast<Eigen::Index>(i * d + j)) = 1.0;
  return s;
}

}  // namespace wstate
