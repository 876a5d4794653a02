// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>
#include <numbers>

#include "wstate/subroutines.hpp"

namespace wstate {

namespace {

constexpr double kSolverTol = 1e-9;
constexpr double kReconstructTol = 1e-8;

// Real Pauli coefficients (I, X, Y, Z) of a Hermitian 2x2 matrix.
std::array<double, 4> pauli_coefficients(const ComplexMatrix& h) {
  return {0.5 * (h(0, 0) + h(1, 1)).real(), h(0, 1).real(), -h(0, 1).imag(),
          0.5 * (h(0, 0) - h(1, 1)).real()};
}

ComplexMatrix from_pauli(Complex c0, Complex cx, Complex cy, Complex cz) {
  return c0 * pauli::I() + cx * pauli::X() + cy * pauli::Y() + cz * pauli::Z();
}

bool reconstructs(const ComplexMatrix& alpha, const QspSolution& s) {
  return max_abs(s.sigma.cwiseProduct(s.m.transpose()) - alpha) <= kReconstructTol &&
         normality_residual(s.m) <= kNormalityTol;
}

QspSolverResult not_realizable(std::string why) {
  QspSolverResult r;
  r.note = std::move(why);
  return r;
}

QspSolverResult solve_case2(const ComplexMatrix& alpha, const std::array<double, 4>& h,
                            const std::array<double, 4>& s) {
  double c;
  if (std::abs(h[1]) > kSolverTol)
    c = s[1] / h[1];
  else if (std::abs(h[2]) > kSolverTol)
    c = s[2] / h[2];
  else
    return not_realizable("Hermitian part has no X/Y component");
  const double den = s[0] - c * h[0];
  if (std::abs(den) < kSolverTol) return not_realizable("R(alpha) is undefined (s0 = c h0)");
  const double r = (s[3] - c * h[3]) / den;
  if (!(r > -1.0 && r < 1.0))
    return not_realizable("R(alpha) = " + std::to_string(r) + " lies outside (-1, 1)");
  QspSolverResult result;
  result.kind = QspCase::case2;
  for (double theta : {std::acos(r), -std::acos(r)}) {
    const double ct = std::cos(theta), st = std::sin(theta);
    Eigen::Matrix<double, 4, 3> a;
    a << 1, 0, ct, 0, 1, c * ct, ct, 0, 1, 0, ct, c;
    Eigen::Vector4d rhs(2 * h[0], 2 * s[0], 2 * h[3], 2 * s[3]);
    const Eigen::Vector3d x = a.colPivHouseholderQr().solve(rhs);
    const double vx = 2 * h[1] / st, vy = -2 * h[2] / st, vz = x(2);
    const Complex k(1.0, c);
    QspSolution sol{theta, sigma_from_theta(theta),
                    from_pauli(Complex(x(0), x(1)), k * vx, k * vy, k * vz)};
    if (!reconstructs(alpha, sol)) return not_realizable("no normal M reconstructs alpha");
    result.solutions.push_back(std::move(sol));
  }
  result.realizable = true;
  result.note = "two pure ancilla states theta = +/- arccos R(alpha)";
  return result;
}

}  // namespace

const char* to_string(QspCase c) {
  switch (c) {
    case QspCase::diagonal: return "diagonal";
    case QspCase::case1: return "case1";
    case QspCase::case2: return "case2";
    case QspCase::not_realizable: return "not-realizable";
  }
  return "";
}

ComplexMatrix sigma_from_theta(double theta) {
  return 0.5 * (pauli::I() + std::sin(theta) * pauli::X() + std::cos(theta) * pauli::Z());
}

QspSolverResult solve_qsp_realizable(const ComplexMatrix& alpha) {
  if (alpha.rows() != 2 || alpha.cols() != 2) throw ValidationError("solver: alpha must be 2x2");
  require_finite(alpha, "alpha");
  if (std::abs(std::abs(alpha(0, 1)) - std::abs(alpha(1, 0))) > kSolverTol)
    return not_realizable("|alpha01| != |alpha10|");

  const double half_pi = std::numbers::pi / 2;
  if (std::abs(alpha(0, 1)) <= kSolverTol && std::abs(alpha(1, 0)) <= kSolverTol) {
    QspSolution sol{half_pi, sigma_from_theta(half_pi), ComplexMatrix::Zero(2, 2)};
    sol.m(0, 0) = 2.0 * alpha(0, 0);
    sol.m(1, 1) = 2.0 * alpha(1, 1);
    QspSolverResult r;
    r.realizable = true;
    r.kind = QspCase::diagonal;
    r.solutions.push_back(std::move(sol));
    r.note = "diagonal alpha: sigma = |+><+|, M = diag(2 a00, 2 a11)";
    return r;
  }

  const ComplexMatrix herm = 0.5 * (alpha + alpha.adjoint());
  const ComplexMatrix skew = (alpha - alpha.adjoint()) / Complex(0.0, 2.0);
  const auto h = pauli_coefficients(herm);
  const auto s = pauli_coefficients(skew);
  const Eigen::Vector4d hv(h[0], h[1], h[2], h[3]), sv(s[0], s[1], s[2], s[3]);
  const double gram_det = hv.squaredNorm() * sv.squaredNorm() - std::pow(hv.dot(sv), 2);
  const double scale = std::max(1.0, hv.squaredNorm() * sv.squaredNorm());
  if (gram_det <= kSolverTol * scale) {
    // alpha = e^{i phi} H-hat: M = 2 alpha^T is normal for sigma = |+><+|.
    QspSolution sol{half_pi, sigma_from_theta(half_pi), 2.0 * alpha.transpose()};
    QspSolverResult r;
    r.realizable = reconstructs(alpha, sol);
    r.kind = r.realizable ? QspCase::case1 : QspCase::not_realizable;
    if (r.realizable) r.solutions.push_back(std::move(sol));
    r.note = "alpha proportional to a Hermitian matrix: theta is free, representative theta = pi/2";
    return r;
  }

  if (std::abs(h[1]) <= kSolverTol && std::abs(h[2]) <= kSolverTol) {
    // Off-diagonal part is purely skew: solve for -i alpha and rotate M back.
    auto r = solve_case2(Complex(0.0, -1.0) * alpha, s, {-h[0], -h[1], -h[2], -h[3]});
    for (auto& sol : r.solutions) sol.m *= Complex(0.0, 1.0);
    return r;
  }
  return solve_case2(alpha, h, s);
}

}  // namespace wstate
