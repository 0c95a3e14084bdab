#include "nlg/poisson.hpp"

#include "nlg/errors.hpp"

#include <cmath>

namespace nlg {

namespace {

// Face diffusion coefficients for the 5-point operator A = G^T Sigma G.
// Interior faces only; boundary faces carry no flux (Neumann).
struct FaceCoeffs {
    Grid grid;
    std::vector<double> kx; // (nx+1)*ny, weight * hy/hx
    std::vector<double> ky; // nx*(ny+1), weight * hx/hy

    explicit FaceCoeffs(const Grid& g)
        : grid(g),
          kx(static_cast<size_t>(g.xfaces()), 0.0),
          ky(static_cast<size_t>(g.yfaces()), 0.0) {}
};

FaceCoeffs unit_coeffs(const Grid& g) {
    FaceCoeffs c(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            c.kx[g.xidx(i, j)] = g.hy / g.hx;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            c.ky[g.yidx(i, j)] = g.hx / g.hy;
    return c;
}

void apply_operator(const FaceCoeffs& c, const std::vector<double>& u,
                    std::vector<double>& out) {
    const Grid& g = c.grid;
    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            double flux = c.kx[g.xidx(i, j)] * (u[g.cidx(i, j)] - u[g.cidx(i - 1, j)]);
            out[g.cidx(i, j)] += flux;
            out[g.cidx(i - 1, j)] -= flux;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double flux = c.ky[g.yidx(i, j)] * (u[g.cidx(i, j)] - u[g.cidx(i, j - 1)]);
            out[g.cidx(i, j)] += flux;
            out[g.cidx(i, j - 1)] -= flux;
        }
}

void project_mean_zero(std::vector<double>& v) {
    double s = 0;
    for (double a : v) s += a;
    s /= static_cast<double>(v.size());
    for (double& a : v) a -= s;
}

double dot_raw(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

// CG on the singular Neumann system; constants projected out of rhs and
// iterates. rhs must already be compatibility-checked.
ScalarField cg_solve(const FaceCoeffs& coeffs, std::vector<double> rhs,
                     const LinearSolveConfig& cfg, const ScalarField* warm_start) {
    const Grid& g = coeffs.grid;
    const size_t n = rhs.size();
    project_mean_zero(rhs);

    ScalarField u(g);
    double rhs_norm = std::sqrt(dot_raw(rhs, rhs));
    if (rhs_norm == 0.0) return u;

    if (warm_start != nullptr) {
        require_same_grid(warm_start->grid, g, "cg warm start");
        u.values = warm_start->values;
        project_mean_zero(u.values);
    }

    int max_iter = cfg.cg_max_iter > 0 ? cfg.cg_max_iter : 10 * g.nx * g.ny;

    std::vector<double> r(n), p(n), Ap(n);
    apply_operator(coeffs, u.values, Ap);
    for (size_t k = 0; k < n; ++k) r[k] = rhs[k] - Ap[k];
    project_mean_zero(r);
    p = r;
    double rr = dot_raw(r, r);
    double tol2 = cfg.cg_tol * cfg.cg_tol * rhs_norm * rhs_norm;

    for (int it = 0; it < max_iter; ++it) {
        if (rr <= tol2) {
            project_mean_zero(u.values);
            return u;
        }
        apply_operator(coeffs, p, Ap);
        double pAp = dot_raw(p, Ap);
        if (pAp <= 0)
            throw ConvergenceError("cg: operator lost positivity (pAp <= 0)");
        double alpha = rr / pAp;
        for (size_t k = 0; k < n; ++k) {
            u.values[k] += alpha * p[k];
            r[k] -= alpha * Ap[k];
        }
        project_mean_zero(r);
        double rr_new = dot_raw(r, r);
        double beta = rr_new / rr;
        rr = rr_new;
        for (size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
    }
    if (rr <= tol2) {
        project_mean_zero(u.values);
        return u;
    }
    throw ConvergenceError("cg: iteration cap reached, relative residual " +
                           std::to_string(std::sqrt(rr) / rhs_norm));
}

std::vector<double> assemble_rhs(const Grid& g, const VectorField* F,
                                 const BoundaryTrace* extra_flux) {
    std::vector<double> rhs(static_cast<size_t>(g.cells()), 0.0);
    if (F != nullptr) {
        require_same_grid(F->grid, g, "solve_poisson_neumann rhs");
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i) {
                double c = F->fx(i, j) * g.hy;
                rhs[g.cidx(i, j)] += c;
                rhs[g.cidx(i - 1, j)] -= c;
            }
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double c = F->fy(i, j) * g.hx;
                rhs[g.cidx(i, j)] += c;
                rhs[g.cidx(i, j - 1)] -= c;
            }
    }
    if (extra_flux != nullptr) {
        require_same_grid(extra_flux->grid, g, "solve_poisson_neumann flux");
        for (const auto& bf : boundary_faces(g))
            rhs[g.cidx(bf.ci, bf.cj)] += extra_flux->values[bf.slot] * bf.ds;
    }
    return rhs;
}

void check_rhs_compatible(const std::vector<double>& rhs) {
    double s = 0, scale = 0;
    for (double v : rhs) {
        s += v;
        scale += std::abs(v);
    }
    if (scale == 0.0) return;
    if (std::abs(s) > 1e-8 * scale)
        throw CompatibilityError("Neumann rhs not compatible: constant projection " +
                                 std::to_string(s / scale) + " (relative)");
}

} // namespace

void check_compatible(const BoundaryTrace& g, double rel_tol) {
    double s = boundary_integral(g);
    double scale = 0;
    for (const auto& bf : boundary_faces(g.grid))
        scale += std::abs(g.values[bf.slot]) * bf.ds;
    if (scale == 0.0) return;
    if (std::abs(s) > rel_tol * scale)
        throw CompatibilityError("boundary data violates the zero-mean compatibility condition: "
                                 "integral " + std::to_string(s));
}

ScalarField solve_poisson_neumann(const VectorField& F, const BoundaryTrace* extra_flux,
                                  const LinearSolveConfig& cfg,
                                  const ScalarField* warm_start) {
    cfg.validate();
    F.check_finite("solve_poisson_neumann: F");
    auto rhs = assemble_rhs(F.grid, &F, extra_flux);
    check_rhs_compatible(rhs);
    return cg_solve(unit_coeffs(F.grid), std::move(rhs), cfg, warm_start);
}

HarmonicLift solve_harmonic_flux(const BoundaryTrace& g, const LinearSolveConfig& cfg) {
    cfg.validate();
    g.check_finite("solve_harmonic_flux: g");
    if (max_abs(g) == 0.0)
        throw ZeroDataError("solve_harmonic_flux: g is identically zero");
    check_compatible(g);
    auto rhs = assemble_rhs(g.grid, nullptr, &g);
    check_rhs_compatible(rhs);
    ScalarField w = cg_solve(unit_coeffs(g.grid), std::move(rhs), cfg, nullptr);
    return {w, boundary_integral(g, w)};
}

ScalarField solve_conductivity(const ScalarField& sigma, const BoundaryTrace& g,
                               const LinearSolveConfig& cfg) {
    cfg.validate();
    sigma.check_finite("solve_conductivity: sigma");
    for (double s : sigma.values)
        if (!(s > 0))
            throw NonPositiveConductivity("solve_conductivity: sigma must be > 0");
    if (max_abs(g) == 0.0)
        throw ZeroDataError("solve_conductivity: g is identically zero");
    check_compatible(g);

    const Grid& gr = sigma.grid;
    require_same_grid(gr, g.grid, "solve_conductivity");
    FaceCoeffs c(gr);
    for (int j = 0; j < gr.ny; ++j)
        for (int i = 1; i < gr.nx; ++i) {
            double sl = sigma.at(i - 1, j), sr = sigma.at(i, j);
            c.kx[gr.xidx(i, j)] = 2.0 * sl * sr / (sl + sr) * gr.hy / gr.hx;
        }
    for (int j = 1; j < gr.ny; ++j)
        for (int i = 0; i < gr.nx; ++i) {
            double sb = sigma.at(i, j - 1), st = sigma.at(i, j);
            c.ky[gr.yidx(i, j)] = 2.0 * sb * st / (sb + st) * gr.hx / gr.hy;
        }

    auto rhs = assemble_rhs(gr, nullptr, &g);
    for (double& v : rhs) v = -v;
    check_rhs_compatible(rhs);
    return cg_solve(c, std::move(rhs), cfg, nullptr);
}

ScalarField solve_conductivity_diag(const std::vector<double>& sxx,
                                    const std::vector<double>& syy,
                                    const Grid& grid, const BoundaryTrace& g,
                                    const LinearSolveConfig& cfg) {
    cfg.validate();
    if (sxx.size() != static_cast<size_t>(grid.cells()) || syy.size() != sxx.size())
        throw InvalidFieldError("solve_conductivity_diag: size mismatch");
    for (size_t k = 0; k < sxx.size(); ++k)
        if (!(sxx[k] > 0) || !(syy[k] > 0))
            throw NonPositiveConductivity("solve_conductivity_diag: entries must be > 0");
    if (max_abs(g) == 0.0)
        throw ZeroDataError("solve_conductivity_diag: g is identically zero");
    check_compatible(g);

    FaceCoeffs c(grid);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 1; i < grid.nx; ++i) {
            double sl = sxx[grid.cidx(i - 1, j)], sr = sxx[grid.cidx(i, j)];
            c.kx[grid.xidx(i, j)] = 2.0 * sl * sr / (sl + sr) * grid.hy / grid.hx;
        }
    for (int j = 1; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            double sb = syy[grid.cidx(i, j - 1)], st = syy[grid.cidx(i, j)];
            c.ky[grid.yidx(i, j)] = 2.0 * sb * st / (sb + st) * grid.hx / grid.hy;
        }

    auto rhs = assemble_rhs(grid, nullptr, &g);
    for (double& v : rhs) v = -v;
    check_rhs_compatible(rhs);
    return cg_solve(c, std::move(rhs), cfg, nullptr);
}

} // namespace nlg
