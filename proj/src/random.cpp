// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#include "wstate/random.hpp"

#include <cmath>

namespace wstate {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t h = splitmix64(splitmix64(splitmix64(seed) ^ stream) + index);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double Random::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Random::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

int Random::integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

Complex Random::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re, im};
}

ComplexVector Random::state(std::size_t dim) {
  ComplexVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = complex_normal();
  return v / v.norm();
}

ComplexMatrix Random::matrix(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix m(d, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = complex_normal();
  return m;
}

ComplexMatrix Random::density(std::size_t dim, std::size_t rank) {
  if (rank == 0) rank = dim;
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix g(d, static_cast<Eigen::Index>(rank));
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = complex_normal();
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace();
  return 0.5 * (rho + rho.adjoint());
}

ComplexMatrix Random::unitary(std::size_t dim) {
  const ComplexMatrix z = matrix(dim);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const Complex d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

ComplexMatrix Random::hermitian(std::size_t dim, double scale) {
  const ComplexMatrix a = matrix(dim);
  return scale * 0.5 * (a + a.adjoint());
}

ComplexMatrix Random::normal_matrix(std::size_t dim) {
  const ComplexMatrix u = unitary(dim);
  ComplexMatrix d = ComplexMatrix::Zero(u.rows(), u.cols());
  for (Eigen::Index i = 0; i < d.rows(); ++i) d(i, i) = complex_normal();
  return u * d * u.adjoint();
}

}  // namespace wstate
