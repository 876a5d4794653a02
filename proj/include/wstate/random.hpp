// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

#include "wstate/linalg.hpp"

namespace wstate {

// Counter-based randomness: the value depends only on (seed, stream, index).
std::uint64_t splitmix64(std::uint64_t x);
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Seeded generators for test instances and experiments.
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0);
  double normal();
  int integer(int lo, int hi);
  Complex complex_normal();

  // Haar-random unit vector (normalised complex Gaussian).
  ComplexVector state(std::size_t dim);
  // Mixed state of the given rank (Ginibre construction).
  ComplexMatrix density(std::size_t dim, std::size_t rank = 0);
  ComplexMatrix unitary(std::size_t dim);
  ComplexMatrix hermitian(std::size_t dim, double scale = 1.0);
  ComplexMatrix normal_matrix(std::size_t dim);
  ComplexMatrix matrix(std::size_t dim);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wstate
