#pragma once

#include "nlg/fields.hpp"

namespace nlg {

/// Face-centered finite differences on interior faces; boundary-face
/// components are set to 0. Linear in u.
VectorField gradient(const ScalarField& u);

/// Cell-centered divergence, the exact discrete adjoint of gradient:
/// for every u and F,
///   boundary_integral(normal_trace(F), u)
///     = dot(u, divergence(F)) + dot(F, gradient(u))
/// holds to machine precision.
ScalarField divergence(const VectorField& f);

/// F . nu on each boundary face.
BoundaryTrace normal_trace(const VectorField& f);

/// Sum over boundary faces of f * (adjacent cell value of u) * ds.
double boundary_integral(const BoundaryTrace& f, const ScalarField& u);

/// Integral of f against 1 on the boundary (compatibility check).
double boundary_integral(const BoundaryTrace& f);

/// Subtracts the area-weighted mean.
ScalarField mean_zero(const ScalarField& u);

double mean(const ScalarField& u);

} // namespace nlg
