#pragma once

#include "nlg/fields.hpp"
#include "nlg/metric.hpp"

#include <string>

namespace nlg {

// NLG-FIELD v1 text format. Header line:
//   NLG-FIELD v1 <kind:scalar|vector|trace|tensor> <nx> <ny> <hx> <hy>
// followed by whitespace-separated decimals in row-major order
// (vector: x-block then y-block; trace: bottom, right, top, left in
// increasing coordinate order; tensor: m11, m12, m22 blocks).
// Values are written with 17 significant digits, so doubles round-trip
// exactly.

void write_field(const std::string& path, const ScalarField& f);
void write_field(const std::string& path, const VectorField& f);
void write_field(const std::string& path, const BoundaryTrace& f);
void write_field(const std::string& path, const TensorField& f);

ScalarField read_scalar(const std::string& path);
VectorField read_vector(const std::string& path);
BoundaryTrace read_trace(const std::string& path);
TensorField read_tensor(const std::string& path);

/// Kind string from a file's header without loading the payload.
std::string peek_kind(const std::string& path);

std::string format_double(double v); // 17 significant digits

} // namespace nlg
