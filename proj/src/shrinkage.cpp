#include "nlg/shrinkage.hpp"

#include "nlg/parallel.hpp"

#include <cmath>

namespace nlg {

namespace {

CellVector prox_isotropic(double a, double alpha, CellVector q) {
    double n = std::hypot(q.x, q.y);
    double thresh = a / alpha;
    if (n <= thresh) return {0.0, 0.0};
    double scale = (n - thresh) / n;
    return {scale * q.x, scale * q.y};
}

} // namespace

CellVector prox_phi(const Metric& m, int cell, CellVector q, const ProxConfig& cfg) {
    cfg.validate();
    double a = m.a().values[static_cast<size_t>(cell)];
    if (m.kind() == MetricKind::Isotropic)
        return prox_isotropic(a, cfg.alpha, q);

    if (m.phi_polar(cell, cfg.alpha * q.x, cfg.alpha * q.y) <= 1.0)
        return {0.0, 0.0};

    // Eigenbasis of sigma0: q~ = R^T q, stationarity
    //   a lam_i p~_i / s + alpha (p~_i - q~_i) = 0,  s = (sum lam_i p~_i^2)^{1/2},
    // so p~_i = q~_i s / (s + a lam_i / alpha) and s solves
    //   g(s) = sum lam_i q~_i^2 / (s + a lam_i/alpha)^2 - 1 = 0.
    // g is strictly decreasing with g(0) = phi_polar(alpha q)^2 > 1 here,
    // and g(s_hi) <= 0 for s_hi = (q^T sigma0 q)^{1/2}.
    const Eig2& e = m.eig(cell);
    double q1 = e.c * q.x + e.s * q.y;
    double q2 = -e.s * q.x + e.c * q.y;
    double c1 = a * e.l1 / cfg.alpha;
    double c2 = a * e.l2 / cfg.alpha;
    double t1 = e.l1 * q1 * q1;
    double t2 = e.l2 * q2 * q2;

    auto g = [&](double s) { return t1 / ((s + c1) * (s + c1)) + t2 / ((s + c2) * (s + c2)) - 1.0; };
    auto dg = [&](double s) {
        return -2.0 * t1 / ((s + c1) * (s + c1) * (s + c1)) -
               2.0 * t2 / ((s + c2) * (s + c2) * (s + c2));
    };

    double lo = 0.0, hi = std::sqrt(t1 + t2);
    double s = hi;
    bool converged = false;
    for (int it = 0; it < cfg.newton_max_iter; ++it) {
        double gv = g(s);
        if (std::abs(gv) <= cfg.newton_tol) {
            converged = true;
            break;
        }
        if (gv > 0) lo = s; else hi = s;
        double step = gv / dg(s);
        double snew = s - step;
        if (!(snew > lo) || !(snew < hi)) snew = 0.5 * (lo + hi);
        if (snew == s) {
            converged = true;
            break;
        }
        s = snew;
    }
    if (!converged) {
        // bisection fallback on the maintained bracket
        for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
            double mid = 0.5 * (lo + hi);
            if (g(mid) > 0) lo = mid; else hi = mid;
        }
        s = 0.5 * (lo + hi);
        if (std::abs(g(s)) > 1e-6)
            throw ProxNoConvergence("prox_phi: Newton and bisection both failed at cell " +
                                    std::to_string(cell));
    }

    double p1 = q1 * s / (s + c1);
    double p2 = q2 * s / (s + c2);
    return {e.c * p1 - e.s * p2, e.s * p1 + e.c * p2};
}

VectorField prox_field(const Metric& m, const VectorField& w_field,
                       const VectorField& u_g_grad, const ProxConfig& cfg) {
    cfg.validate();
    require_same_grid(m.grid(), w_field.grid, "prox_field");
    require_same_grid(w_field.grid, u_g_grad.grid, "prox_field");
    const Grid& g = w_field.grid;
    VectorField d = w_field; // unowned left/bottom faces keep the identity prox
    std::string error;
    parallel_for(0, g.ny, [&](int jlo, int jhi) {
        for (int j = jlo; j < jhi; ++j)
            for (int i = 0; i < g.nx; ++i) {
                CellVector w = gather_owned(w_field, i, j);
                CellVector ug = gather_owned(u_g_grad, i, j);
                CellVector q{w.x + ug.x, w.y + ug.y};
                try {
                    CellVector p = prox_phi(m, g.cidx(i, j), q, cfg);
                    scatter_owned(d, i, j, {p.x - ug.x, p.y - ug.y});
                } catch (const ProxNoConvergence& e) {
                    error = std::string(e.what()) + " (cell " + std::to_string(i) + "," +
                            std::to_string(j) + ")";
                    return;
                }
            }
    });
    if (!error.empty()) throw ProxNoConvergence(error);
    return d;
}

} // namespace nlg
