// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "wstate/json_io.hpp"
#include "wstate/random.hpp"

namespace wstate {

struct ExperimentSpec {
  std::string name;
  Json parameters = Json::object();
  std::string output;
};
ExperimentSpec experiment_spec_from_json(const Json& j, const std::string& path);
Json to_json(const ExperimentSpec& spec);

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  Json metadata = Json::object();

  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
  // First line "# {metadata}" with a timestamp; the remaining lines depend only on the spec.
  std::string csv() const;
  void write_csv(const std::string& path) const;
};

const std::vector<std::string>& experiment_names();
ResultTable run_experiment(const ExperimentSpec& spec, int workers = 1);

// Amplitude families psi_j, j = 0..2^n - 1, normalised:
// sin: sin(j + 1); exp: exp(-decay j); linear: j + 1; uniform: 1.
ComplexVector family_state(const std::string& family, int n, double decay = 0.5);
std::string family_formula(const std::string& family, double decay = 0.5);

// psi1 = sqrt(r) psi0 + sqrt(1 - r) psi_perp with Haar-random psi0 and psi_perp.
std::pair<ComplexVector, ComplexVector> random_pair_with_overlap(std::size_t dim, double r,
                                                                 Random& rng);
// Tensor product of single-qubit observables u.sigma with random unit Bloch vectors u.
ComplexMatrix random_separable_observable(int n, Random& rng);

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol = 1e-10);
// Dense grid scan followed by golden-section refinement around the best grid point.
double minimize_on_interval(const std::function<double(double)>& f, double lo, double hi,
                            int grid = 200, double tol = 1e-10);

// Runs fn(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace wstate
