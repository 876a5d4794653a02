// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace wstate {

// Malformed input: wrong dimensions, unknown labels, schema violations.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Well-formed input on which a numerical precondition does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotNormal : public PreconditionError {
 public:
  NotNormal(double residual, double tol);
  double residual() const { return residual_; }

 private:
  double residual_;
};

class OrthogonalInputs : public PreconditionError {
 public:
  explicit OrthogonalInputs(double overlap);
  double overlap() const { return overlap_; }

 private:
  double overlap_;
};

class ZeroBeta : public PreconditionError {
 public:
  explicit ZeroBeta(int index);
};

class VanishingOverlapProduct : public PreconditionError {
 public:
  VanishingOverlapProduct(int l, int lp, int k, double magnitude);
  int l, lp, k;
};

class OrthogonalIntermediate : public PreconditionError {
 public:
  OrthogonalIntermediate(std::string first, std::string second, double overlap);
  std::string first, second;
};

}  // namespace wstate
