#pragma once

#include "nlg/metric.hpp"

namespace nlg {

struct ProxConfig {
    double alpha = 1.0;
    double newton_tol = 1e-12;
    int newton_max_iter = 50;

    void validate() const {
        if (!(alpha > 0))
            throw InvalidFieldError("ProxConfig: alpha must be > 0");
    }
};

/// argmin_p phi(x,p) + (alpha/2)|p - q|^2.
///
/// Returns 0 exactly when phi_polar(x, alpha q) <= 1 (the dual-ball
/// characterization). Isotropic case is the closed-form soft threshold
/// with cutoff a/alpha; Riemannian case solves the stationarity condition
/// by safeguarded Newton on the scalar s = (p^T sigma0 p)^{1/2} in the
/// eigenbasis of sigma0, with bisection as fallback.
CellVector prox_phi(const Metric& m, int cell, CellVector q, const ProxConfig& cfg);

/// Cellwise application over the owned face pair of each cell:
/// q = w_field + u_g_grad, output d = prox_phi(q) - u_g_grad.
/// Unowned (left/bottom) boundary faces are passed through unchanged.
VectorField prox_field(const Metric& m, const VectorField& w_field,
                       const VectorField& u_g_grad, const ProxConfig& cfg);

} // namespace nlg
