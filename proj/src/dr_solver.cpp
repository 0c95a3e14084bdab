#include "nlg/dr_solver.hpp"

#include "nlg/field_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

namespace nlg {

std::string to_string(Termination t) {
    switch (t) {
        case Termination::Gap: return "gap";
        case Termination::Stagnation: return "stagnation";
        case Termination::MaxIter: return "max_iter";
    }
    return "unknown";
}

Reference prepare_reference(const BoundaryTrace& g, const SolverConfig& cfg) {
    cfg.validate();
    HarmonicLift lift = solve_harmonic_flux(g, cfg.linear);
    if (std::abs(lift.flux_pairing) < 1e-12)
        throw DegenerateNormalization("prepare_reference: <g,w> = " +
                                      std::to_string(lift.flux_pairing));
    ScalarField u_g = (1.0 / lift.flux_pairing) * lift.w;
    return {std::move(u_g), std::move(lift.w), lift.flux_pairing};
}

SolverState initial_state(const Reference& ref) {
    SolverState s;
    const Grid& grid = ref.w.grid;
    s.u = ScalarField(grid);
    s.v = ScalarField(grid);
    s.d = VectorField(grid);
    s.b = VectorField(grid);
    s.w = ref.w;
    s.u_g = ref.u_g;
    s.grad_ug = gradient(ref.u_g);
    s.gw = ref.gw;
    return s;
}

SolverState step(const SolverState& state, const Metric& metric,
                 const BoundaryTrace& g, const SolverConfig& cfg) {
    cfg.validate();
    require_same_grid(state.u.grid, metric.grid(), "step");
    try {
        SolverState next = state;
        VectorField F = state.d - state.b;
        next.u = solve_poisson_neumann(F, nullptr, cfg.linear, &state.u);
        next.beta = -boundary_integral(g, next.u) / state.gw;
        next.v = next.u + next.beta * state.w;
        VectorField gv = gradient(next.v);
        next.d = prox_field(metric, gv + state.b, state.grad_ug, cfg.prox());
        next.b = state.b + gv - next.d;
        next.k = state.k + 1;
        return next;
    } catch (const Error& e) {
        throw ConvergenceError("step " + std::to_string(state.k + 1) + ": " + e.what());
    }
}

VectorField completed_dual_field(const SolverState& state, double alpha,
                                 const BoundaryTrace& g) {
    VectorField T = alpha * state.b;
    double lambda = alpha * state.beta;
    const Grid& gr = T.grid;
    for (const auto& bf : boundary_faces(gr)) {
        double trace = lambda * g.values[bf.slot]; // want [T,nu] = lambda g
        switch (bf.side) {
            case Side::Bottom: T.fy(bf.ci, 0) = -trace; break;
            case Side::Right:  T.fx(gr.nx, bf.cj) = trace; break;
            case Side::Top:    T.fy(bf.ci, gr.ny) = trace; break;
            case Side::Left:   T.fx(0, bf.cj) = -trace; break;
        }
    }
    return T;
}

namespace {

struct Residuals {
    double div_residual;
    double flux_residual;
};

// Divergence residual of the completed dual field, certificate-scaled, and
// the boundary-cell imbalance read as a flux mismatch against lambda*g.
Residuals dual_residuals(const VectorField& T, double lambda, const BoundaryTrace& g) {
    const Grid& gr = T.grid;
    ScalarField div = divergence(T);
    double h = std::min(gr.hx, gr.hy);
    double tmax = std::max(max_abs(T), 1e-300);
    double div_res = max_abs(div) * h / tmax;

    std::vector<double> cell_ds(static_cast<size_t>(gr.cells()), 0.0);
    for (const auto& bf : boundary_faces(gr))
        cell_ds[gr.cidx(bf.ci, bf.cj)] += bf.ds;
    double gscale = std::max(std::abs(lambda) * max_abs(g), 1e-300);
    double flux_res = 0;
    for (int j = 0; j < gr.ny; ++j)
        for (int i = 0; i < gr.nx; ++i) {
            double ds = cell_ds[gr.cidx(i, j)];
            if (ds == 0.0) continue;
            double imbalance = std::abs(div.at(i, j)) * gr.cell_area() / ds;
            flux_res = std::max(flux_res, imbalance / gscale);
        }
    return {div_res, flux_res};
}

} // namespace

RunResult run(const Metric& metric, const BoundaryTrace& g, const SolverConfig& cfg,
              const SolverState* resume) {
    cfg.validate();
    g.check_finite("run: g");
    require_same_grid(metric.grid(), g.grid, "run");

    SolverState state = resume != nullptr ? *resume
                                          : initial_state(prepare_reference(g, cfg));
    require_same_grid(state.u.grid, metric.grid(), "run: resume state");

    SolverReport report;
    report.unit_isotropic = metric.is_unit_isotropic();
    report.termination_reason = Termination::MaxIter;

    double primal = 0, lambda = 0;
    int iters = 0;
    int gap_streak = 0;
    while (iters < cfg.max_iter) {
        double b_scale = std::max(1.0, norm2(state.b));
        double d_scale = std::max(1.0, norm2(state.d));
        double beta_prev = state.beta;
        SolverState next = step(state, metric, g, cfg);
        double b_change = norm2(next.b - state.b) / b_scale;
        double d_change = norm2(next.d - state.d) / d_scale;
        double beta_change =
            std::abs(next.beta - beta_prev) / std::max(1.0, std::abs(beta_prev));
        state = std::move(next);
        ++iters;

        lambda = cfg.alpha * state.beta;
        VectorField T = completed_dual_field(state, cfg.alpha, g);
        Residuals res = dual_residuals(T, lambda, g);
        primal = metric.total_variation(state.v + state.u_g);
        double gap = primal - lambda;
        report.history.push_back({b_change, res.div_residual, res.flux_residual});

        // a transient sign crossing of the gap must not stop the loop, so the
        // gap test has to hold on consecutive iterations
        gap_streak = std::abs(gap) <= cfg.gap_tol * std::max(1.0, primal)
                         ? gap_streak + 1
                         : 0;
        if (iters >= 3 && gap_streak >= 3) {
            report.termination_reason = Termination::Gap;
            break;
        }
        // b (the primal residual) can freeze while d and beta still drift;
        // stagnation requires all three to settle
        if (iters >= 3 && b_change <= cfg.stop_tol && d_change <= cfg.stop_tol &&
            beta_change <= cfg.stop_tol) {
            report.termination_reason = Termination::Stagnation;
            break;
        }
    }

    report.iterations_used = iters;
    report.lambda_hat = lambda;
    report.primal_value = primal;

    RunResult out;
    out.u = state.v + state.u_g;
    out.T = completed_dual_field(state, cfg.alpha, g);
    out.d = state.d;
    report.dual_value = boundary_integral(normal_trace(out.T), state.u_g);
    report.gap = report.primal_value - report.dual_value;
    out.report = std::move(report);
    out.state = std::move(state);
    return out;
}

void save_checkpoint(const std::string& dir, const SolverState& state) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_field(dir + "/u.fld", state.u);
    write_field(dir + "/v.fld", state.v);
    write_field(dir + "/d.fld", state.d);
    write_field(dir + "/b.fld", state.b);
    write_field(dir + "/w.fld", state.w);
    write_field(dir + "/ug.fld", state.u_g);
    std::ofstream meta(dir + "/meta.txt");
    if (!meta) throw IoError("cannot write checkpoint metadata in " + dir);
    meta << "k " << state.k << "\n"
         << "beta " << format_double(state.beta) << "\n"
         << "gw " << format_double(state.gw) << "\n";
}

SolverState load_checkpoint(const std::string& dir) {
    SolverState s;
    s.u = read_scalar(dir + "/u.fld");
    s.v = read_scalar(dir + "/v.fld");
    s.d = read_vector(dir + "/d.fld");
    s.b = read_vector(dir + "/b.fld");
    s.w = read_scalar(dir + "/w.fld");
    s.u_g = read_scalar(dir + "/ug.fld");
    s.grad_ug = gradient(s.u_g);
    std::ifstream meta(dir + "/meta.txt");
    if (!meta) throw IoError("missing checkpoint metadata in " + dir);
    std::string key;
    while (meta >> key) {
        if (key == "k") meta >> s.k;
        else if (key == "beta") meta >> s.beta;
        else if (key == "gw") meta >> s.gw;
        else throw IoError("unknown checkpoint key: " + key);
    }
    return s;
}

} // namespace nlg
