// Copyright 2026 The wstate Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "wstate/estimator.hpp"
#include "wstate/instrument.hpp"
#include "wstate/lcs.hpp"
#include "wstate/subroutines.hpp"

namespace wstate {

using Json = nlohmann::json;

// Matrices: {"dims": [rows, cols], "data": [[re, im], ...]} in row-major order.
// Vectors use "dims": [n] (a [n, 1] column is also accepted).
// Every parser takes the JSON path of its argument for error messages.
Json to_json(const ComplexMatrix& m);
Json vector_to_json(const ComplexVector& v);
Json complex_to_json(Complex z);
ComplexMatrix matrix_from_json(const Json& j, const std::string& path);
ComplexVector vector_from_json(const Json& j, const std::string& path);
Complex complex_from_json(const Json& j, const std::string& path);

Json to_json(const RegisterLayout& layout);
RegisterLayout layout_from_json(const Json& j, const std::string& path);

// {"layout": ..., "vector": ...} or {"layout": ..., "matrix": ...}.
Json to_json(const QuantumState& s);
QuantumState state_from_json(const Json& j, const std::string& path);

Json to_json(const WeightedState& w);

Json to_json(const MeasurementOperator& m);
MeasurementOperator measurement_from_json(const Json& j, const std::string& path);

// The unitary is stored densely; a parsed instrument holds it as one gate.
Json to_json(const QuantumInstrument& inst);
QuantumInstrument instrument_from_json(const Json& j, const std::string& path);

Json to_json(const PolySpec& spec);
PolySpec polyspec_from_json(const Json& j, const std::string& path);

// {"states": [vector | {"unitary": matrix}], "coefficients": [[re, im], ...]}.
Json to_json(const LcsProblem& p);
LcsProblem lcs_problem_from_json(const Json& j, const std::string& path);

Json to_json(const EstimatorReport& r);

// Parse a file; syntax errors report line and column.
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

// Field helpers that name the missing or mistyped field.
const Json& require_field(const Json& j, const std::string& key, const std::string& path);
double number_field(const Json& j, const std::string& key, const std::string& path);
long integer_field(const Json& j, const std::string& key, const std::string& path);

}  // namespace wstate
