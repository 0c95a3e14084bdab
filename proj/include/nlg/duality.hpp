#pragma once

#include "nlg/dr_solver.hpp"
#include "nlg/metric.hpp"

#include <functional>

namespace nlg {

/// Entropy-solution residuals for a candidate pair (u, T). All entries are
/// nonnegative, scale-normalized, and always computable.
struct Certificate {
    double div_residual = 0;     // ||div T||_inf * h / ||T||_inf
    double polar_excess = 0;     // max over cells of (phi_polar(x,T)-1)_+
    double flux_residual = 0;    // max |[T,nu] - lambda g| / ||lambda g||_inf
    double gap = 0;              // primal - dual
    double alignment_defect = 0; // relative defect of phi(grad u/|grad u|) = T.grad u/|grad u|
    double lambda = 0;           // dual value used for the flux test
    double masked_fraction = 0;  // cells with |grad u| <= eps, excluded from alignment
};

/// phi-total variation of u; requires membership in M_g.
double primal_value(const Metric& metric, const BoundaryTrace& g, const ScalarField& u);

/// boundary integral of [T,nu] against u_g.
double dual_value(const VectorField& T, const ScalarField& u_g);

/// Fills every certificate field. Cell vectors for the polar and alignment
/// tests use the owned-pair gather, matching the discrete optimality system.
Certificate certify(const Metric& metric, const BoundaryTrace& g, const ScalarField& u,
                    const VectorField& T, const ScalarField& u_g, double eps_grad);

struct MultiplicityReport {
    double tv_excess = 0;        // primal(F(u) renormalized)/lambda - 1
    double alignment_defect = 0; // against the unchanged T
    ScalarField remapped;        // c1*F(u)+c2, renormalized into M_g
};

/// Checks that a monotone reparameterization of a minimizer is again
/// (numerically) a minimizer sharing the same dual field T.
MultiplicityReport multiplicity_test(const Metric& metric, const BoundaryTrace& g,
                                     const ScalarField& u, const VectorField& T,
                                     const ScalarField& u_g,
                                     const std::function<double(double)>& F,
                                     double eps_grad);

/// ||g||_* estimate 1/lambda_hat; valid only for unit isotropic runs.
double g_star_estimate(const SolverReport& report);

} // namespace nlg
