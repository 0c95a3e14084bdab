#include "nlg/duality.hpp"

#include <algorithm>
#include <cmath>

namespace nlg {

double primal_value(const Metric& metric, const BoundaryTrace& g, const ScalarField& u) {
    double pairing = boundary_integral(g, u);
    if (std::abs(pairing - 1.0) > 1e-4)
        throw NotInMg("primal_value: boundary pairing <g,u> = " + std::to_string(pairing) +
                      ", not 1");
    return metric.total_variation(u);
}

double dual_value(const VectorField& T, const ScalarField& u_g) {
    return boundary_integral(normal_trace(T), u_g);
}

Certificate certify(const Metric& metric, const BoundaryTrace& g, const ScalarField& u,
                    const VectorField& T, const ScalarField& u_g, double eps_grad) {
    require_same_grid(metric.grid(), u.grid, "certify");
    require_same_grid(u.grid, T.grid, "certify");
    require_same_grid(u.grid, g.grid, "certify");
    const Grid& gr = u.grid;

    Certificate c;
    c.lambda = dual_value(T, u_g);

    ScalarField div = divergence(T);
    double tmax = std::max(max_abs(T), 1e-300);
    c.div_residual = max_abs(div) * std::min(gr.hx, gr.hy) / tmax;

    for (int j = 0; j < gr.ny; ++j)
        for (int i = 0; i < gr.nx; ++i) {
            CellVector tc = gather_owned(T, i, j);
            double excess = metric.phi_polar(gr.cidx(i, j), tc.x, tc.y) - 1.0;
            c.polar_excess = std::max(c.polar_excess, excess);
        }
    c.polar_excess = std::max(c.polar_excess, 0.0);

    BoundaryTrace trace = normal_trace(T);
    double gscale = std::max(std::abs(c.lambda) * max_abs(g), 1e-300);
    for (const auto& bf : boundary_faces(gr))
        c.flux_residual = std::max(
            c.flux_residual,
            std::abs(trace.values[bf.slot] - c.lambda * g.values[bf.slot]) / gscale);

    c.gap = metric.total_variation(u) - c.lambda;

    // alignment only where the gradient direction exists
    VectorField gu = gradient(u);
    double gmax = 0;
    for (int j = 0; j < gr.ny; ++j)
        for (int i = 0; i < gr.nx; ++i) {
            CellVector gc = gather_owned(gu, i, j);
            gmax = std::max(gmax, std::hypot(gc.x, gc.y));
        }
    double eps = eps_grad * gmax;
    int masked = 0;
    for (int j = 0; j < gr.ny; ++j)
        for (int i = 0; i < gr.nx; ++i) {
            CellVector gc = gather_owned(gu, i, j);
            double n = std::hypot(gc.x, gc.y);
            if (n <= eps) {
                ++masked;
                continue;
            }
            int cell = gr.cidx(i, j);
            CellVector tc = gather_owned(T, i, j);
            double ph = metric.phi(cell, gc.x / n, gc.y / n);
            double defect = (ph - (tc.x * gc.x + tc.y * gc.y) / n) / ph;
            c.alignment_defect = std::max(c.alignment_defect, defect);
        }
    c.alignment_defect = std::max(c.alignment_defect, 0.0);
    c.masked_fraction = static_cast<double>(masked) / gr.cells();
    return c;
}

MultiplicityReport multiplicity_test(const Metric& metric, const BoundaryTrace& g,
                                     const ScalarField& u, const VectorField& T,
                                     const ScalarField& u_g,
                                     const std::function<double(double)>& F,
                                     double eps_grad) {
    // monotonicity check over the sampled range of u
    std::vector<double> samples = u.values;
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
    for (size_t k = 0; k + 1 < samples.size(); ++k) {
        double f0 = F(samples[k]), f1 = F(samples[k + 1]);
        if (!std::isfinite(f0) || !std::isfinite(f1))
            throw InvalidFieldError("multiplicity_test: F not finite on range of u");
        if (!(f1 > f0))
            throw InvalidFieldError("multiplicity_test: F is not increasing on range of u");
    }

    ScalarField fu = u;
    for (double& v : fu.values) v = F(v);
    double pairing = boundary_integral(g, fu);
    if (std::abs(pairing) < 1e-12 * std::max(1.0, max_abs(fu)))
        throw DegenerateRenormalization("multiplicity_test: <g,F(u)> ~ 0");

    ScalarField remapped = mean_zero((1.0 / pairing) * fu);
    double lambda = dual_value(T, u_g);
    if (!(lambda > 0))
        throw InvalidFieldError("multiplicity_test: nonpositive dual value");

    MultiplicityReport rep;
    rep.tv_excess = metric.total_variation(remapped) / lambda - 1.0;
    rep.alignment_defect = certify(metric, g, remapped, T, u_g, eps_grad).alignment_defect;
    rep.remapped = std::move(remapped);
    return rep;
}

double g_star_estimate(const SolverReport& report) {
    if (!report.unit_isotropic)
        throw InvalidFieldError("g_star_estimate: only defined for isotropic runs with a == 1");
    if (!(report.lambda_hat > 0))
        throw InvalidFieldError("g_star_estimate: lambda_hat must be positive");
    return 1.0 / report.lambda_hat;
}

} // namespace nlg
