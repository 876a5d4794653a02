// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>

#include "wstate/subroutines.hpp"

namespace wstate {

namespace {

void validate_spec(const PolySpec& spec) {
  bool any = false;
  for (const auto& t : spec.terms) {
    if (t.k < 1) throw ValidationError("PolySpec: k must be at least 1");
    if (t.l < 0) throw ValidationError("PolySpec: l must be non-negative");
    if (t.coefficient != 0.0) any = true;
  }
  if (!any) throw ValidationError("PolySpec: at least one coefficient must be non-zero");
}

std::vector<EnsembleTerm> product_terms(const std::vector<const ComplexMatrix*>& parts) {
  std::vector<EnsembleTerm> acc{{1.0, ComplexVector::Ones(1), ComplexVector()}};
  for (const auto* p : parts) {
    std::vector<EnsembleTerm> next;
    for (const auto& a : acc)
      for (const auto& b : ensemble_of(*p)) {
        EnsembleTerm t{a.weight * b.weight, kron(a.ket, b.ket), ComplexVector()};
        const ComplexVector& abra = a.bra.size() ? a.bra : a.ket;
        const ComplexVector& bbra = b.bra.size() ? b.bra : b.ket;
        if (a.bra.size() || b.bra.size()) t.bra = kron(abra, bbra);
        next.push_back(std::move(t));
      }
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

ComplexVector polynomial_exact(const ComplexVector& psi, const PolySpec& spec) {
  validate_spec(spec);
  ComplexVector out = ComplexVector::Zero(psi.size());
  for (const auto& t : spec.terms)
    for (Eigen::Index i = 0; i < psi.size(); ++i)
      out(i) += t.coefficient * std::pow(psi(i), t.k) * std::pow(std::conj(psi(i)), t.l);
  return out;
}

int poly_chi(const PolySpec& spec) {
  int chi = 1;
  for (const auto& t : spec.terms)
    if (t.coefficient != 0.0) chi = std::max({chi, t.k, t.l});
  return chi;
}

ComplexVector rank_one_vector(const ComplexMatrix& m) {
  Eigen::Index j = 0;
  m.diagonal().real().maxCoeff(&j);
  const double djj = m(j, j).real();
  if (djj <= 0.0) return ComplexVector::Zero(m.rows());
  return m.col(j) / std::sqrt(djj);
}

int PolynomialPipeline::add_node(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size()) - 1;
}

void PolynomialPipeline::set_leaf_state(ComplexVector psi, int n) {
  psi_ = std::move(psi);
  n_ = n;
}

WeightedState PolynomialPipeline::evaluate() const {
  std::vector<std::optional<ComplexMatrix>> memo(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& node = nodes_[i];
    if (node.kind == Kind::leaf) {
      memo[i] = ComplexMatrix(psi_ * psi_.adjoint());
      continue;
    }
    std::vector<const ComplexMatrix*> parts;
    for (int c : node.inputs) parts.push_back(&*memo[c]);
    memo[i] = apply_exact(*node.instrument, product_terms(parts)).matrix();
  }
  return WeightedState(*memo.back(), RegisterLayout::single("out", n_));
}

long PolynomialPipeline::two_qubit_gates() const {
  long total = 0;
  for (const auto& node : nodes_)
    if (node.instrument) total += node.instrument->two_qubit_gates();
  return total;
}

PolynomialResult polynomial_pipeline(const ComplexVector& psi, const PolySpec& spec) {
  validate_spec(spec);
  const int n = log2_exact(static_cast<std::size_t>(psi.size()));
  if (n < 1) throw ValidationError("polynomial_pipeline: state must have at least one qubit");
  if (std::abs(psi.norm() - 1.0) > kStateTol)
    throw ValidationError("polynomial_pipeline: input state is not normalised");

  using Kind = PolynomialPipeline::Kind;
  PolynomialPipeline pipe;
  pipe.set_leaf_state(psi, n);
  const int leaf = pipe.add_node({Kind::leaf, "psi", {}, std::nullopt, psi});

  const auto qhp_inst = build_qhp_instrument(n);
  std::map<int, int> power{{1, leaf}};
  std::map<int, int> conj;
  auto intended = [&](int id) { return pipe.nodes()[id].intended; };

  auto get_power = [&](int k) {
    for (int j = 2; j <= k; ++j)
      if (!power.count(j)) {
        const int prev = power[j - 1];
        power[j] = pipe.add_node({Kind::qhp, "psi^" + std::to_string(j), {prev, leaf}, qhp_inst,
                                  intended(prev).cwiseProduct(psi)});
      }
    return power[k];
  };
  auto get_conj = [&](int l) {
    if (!conj.count(1))
      conj[1] = pipe.add_node({Kind::transpose, "conj(psi)", {leaf}, build_transpose_instrument(n),
                               psi.conjugate()});
    for (int j = 2; j <= l; ++j)
      if (!conj.count(j)) {
        const int prev = conj[j - 1];
        conj[j] = pipe.add_node({Kind::qhp, "conj(psi)^" + std::to_string(j), {prev, conj[1]},
                                 qhp_inst, intended(prev).cwiseProduct(psi.conjugate())});
      }
    return conj[l];
  };

  std::vector<PolyTerm> terms;
  for (const auto& t : spec.terms)
    if (t.coefficient != 0.0) terms.push_back(t);
  std::sort(terms.begin(), terms.end(), [](const PolyTerm& a, const PolyTerm& b) {
    return a.k != b.k ? a.k < b.k : a.l < b.l;
  });

  std::vector<int> term_nodes;
  for (const auto& t : terms) {
    const int p = get_power(t.k);
    if (t.l == 0) {
      term_nodes.push_back(p);
      continue;
    }
    const int c = get_conj(t.l);
    const std::string name = "psi^" + std::to_string(t.k) + " conj(psi)^" + std::to_string(t.l);
    term_nodes.push_back(pipe.add_node({Kind::qhp, name, {p, c}, qhp_inst,
                                        intended(p).cwiseProduct(intended(c))}));
  }

  if (terms.size() == 1) {
    const Complex a = terms[0].coefficient;
    std::vector<OutputRegister> outs{{"out", Role::system, {}}};
    for (int i = 0; i < n; ++i) outs[0].wires.push_back(i);
    QuantumInstrument scale(QuantumState::empty(), RegisterLayout::single("in0", n), Circuit(n),
                            MeasurementOperator(ComplexMatrix::Constant(1, 1, std::norm(a))), outs);
    pipe.add_node({Kind::scale, "scale", {term_nodes[0]}, scale, a * intended(term_nodes[0])});
  } else {
    ComplexVector beta(2);
    beta << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const auto sigma = beta_state(beta);
    int acc = term_nodes[0];
    Complex acc_coeff = terms[0].coefficient;
    for (std::size_t j = 1; j < terms.size(); ++j) {
      const int t = term_nodes[j];
      const ComplexVector u = intended(acc);
      const ComplexVector v = intended(t);
      ComplexMatrix gram(2, 2);
      gram << u.squaredNorm(), u.dot(v), v.dot(u), v.squaredNorm();
      const double nu = std::sqrt(gram(0, 0).real()), nv = std::sqrt(gram(1, 1).real());
      const double overlap = (nu > 0 && nv > 0) ? std::abs(gram(0, 1)) / (nu * nv) : 0.0;
      if (overlap < kOrthogonalityTol)
        throw OrthogonalIntermediate(pipe.nodes()[acc].name, pipe.nodes()[t].name, overlap);
      const Complex c1 = terms[j].coefficient;
      const auto m = lincombo_pair_M(acc_coeff, c1, beta, gram);
      acc = pipe.add_node({Kind::combine, "sum#" + std::to_string(j), {acc, t},
                           build_qsp_instrument(sigma, m, n), acc_coeff * u + c1 * v});
      acc_coeff = 1.0;
    }
  }
  return PolynomialResult{polynomial_exact(psi, spec), std::move(pipe)};
}

}  // namespace wstate
