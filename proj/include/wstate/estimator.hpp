// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "wstate/linalg.hpp"

namespace wstate {

struct EstimatorReport {
  std::uint64_t shots = 0;
  Complex sample_mean;
  // Per-shot spread E|X|^2 - |E X|^2 of the sampled values.
  double sample_variance = 0.0;
  Complex analytic_mean;
  double analytic_variance = 0.0;
  double variance_bound = 0.0;
  std::uint64_t seed = 0;
};

// Largest-remainder split of `total` in proportion to `weights`, with at least
// one shot for every non-zero weight.
std::vector<std::uint64_t> allocate_shots(const std::vector<double>& weights, std::uint64_t total);

// Outcome counts of `shots` draws from `probs`; draw i uses counter_uniform(seed, stream, i),
// so the counts do not depend on the number of workers.
std::vector<std::uint64_t> sample_counts(const std::vector<double>& probs, std::uint64_t shots,
                                         std::uint64_t seed, std::uint64_t stream, int workers = 1);

}  // namespace wstate
