#pragma once

#include "nlg/fields.hpp"
#include "nlg/ops.hpp"

#include <optional>

namespace nlg {

struct LinearSolveConfig {
    double cg_tol = 1e-10;   // relative residual
    int cg_max_iter = 0;     // 0 means 10 * nx * ny

    void validate() const {
        if (!(cg_tol > 0 && cg_tol < 1))
            throw InvalidFieldError("LinearSolveConfig: cg_tol must be in (0,1)");
        if (cg_max_iter < 0)
            throw InvalidFieldError("LinearSolveConfig: cg_max_iter must be >= 0");
    }
};

struct HarmonicLift {
    ScalarField w;        // mean-zero, discrete weak solution of  Lap w = 0, dw/dnu = g
    double flux_pairing;  // boundary_integral(g, w); equals |grad w|^2 by the Green identity
};

/// Mean-zero u with <grad u, grad v> = <F, grad v> + boundary_integral(extra_flux, v)
/// for all cell fields v. Unpreconditioned CG on the singular Neumann system
/// with the constant nullspace projected out. Optional warm start.
ScalarField solve_poisson_neumann(const VectorField& F,
                                  const BoundaryTrace* extra_flux,
                                  const LinearSolveConfig& cfg,
                                  const ScalarField* warm_start = nullptr);

/// Mean-zero w with <grad w, grad v> = boundary_integral(g, v) for all v.
/// Requires compatible (zero-mean) nonzero g.
HarmonicLift solve_harmonic_flux(const BoundaryTrace& g, const LinearSolveConfig& cfg);

/// Mean-zero u with <sigma grad u, grad v> = -boundary_integral(g, v), so
/// J = -sigma grad u carries outflux g. Face conductivities by harmonic mean.
ScalarField solve_conductivity(const ScalarField& sigma, const BoundaryTrace& g,
                               const LinearSolveConfig& cfg);

/// Same, with a per-cell diagonal tensor conductivity (m12 must vanish).
ScalarField solve_conductivity_diag(const std::vector<double>& sxx,
                                    const std::vector<double>& syy,
                                    const Grid& grid, const BoundaryTrace& g,
                                    const LinearSolveConfig& cfg);

void check_compatible(const BoundaryTrace& g, double rel_tol = 1e-8);

} // namespace nlg
