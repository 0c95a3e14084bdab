#pragma once

#include "nlg/metric.hpp"
#include "nlg/poisson.hpp"
#include "nlg/shrinkage.hpp"

#include <string>
#include <vector>

namespace nlg {

struct SolverConfig {
    double alpha = 1.0;
    int max_iter = 5000;
    double stop_tol = 1e-6;       // relative change of b
    double gap_tol = 1e-5;        // duality-gap stopping threshold
    double grad_floor_rel = 1e-8; // eps = grad_floor_rel * max |grad u|
    LinearSolveConfig linear;
    double newton_tol = 1e-12;
    int newton_max_iter = 50;

    void validate() const {
        if (!(alpha > 0) || max_iter < 1 || !(stop_tol > 0) || !(gap_tol > 0) ||
            !(grad_floor_rel > 0))
            throw InvalidFieldError("SolverConfig: all parameters must be positive");
        if (!(stop_tol < 1))
            throw InvalidFieldError("SolverConfig: stop_tol must be < 1");
        linear.validate();
    }
    ProxConfig prox() const { return {alpha, newton_tol, newton_max_iter}; }
};

/// Normalized reference pair: w is the mean-zero harmonic lift of the flux
/// data g, u_g = w / <g,w> carries boundary pairing 1.
struct Reference {
    ScalarField u_g;
    ScalarField w;
    double gw; // boundary_integral(g, w), positive
};

struct SolverState {
    int k = 0;
    ScalarField u, v;      // v = u + beta*w, mean-zero
    VectorField d, b;
    double beta = 0;
    ScalarField w, u_g;    // fixed references
    VectorField grad_ug;   // cached gradient(u_g)
    double gw = 0;
};

enum class Termination { Gap, Stagnation, MaxIter };
std::string to_string(Termination t);

struct IterationRecord {
    double b_change;      // ||b^{k+1}-b^k|| / max(1, ||b^k||)
    double div_residual;  // certificate scaling, on the trace-completed dual field
    double flux_residual; // boundary-cell imbalance relative to lambda_k g
};

struct SolverReport {
    double lambda_hat = 0;   // alpha * beta at termination (= dual value)
    double primal_value = 0; // phi-total variation of the returned minimizer
    double dual_value = 0;
    double gap = 0;          // primal - dual
    std::vector<IterationRecord> history;
    int iterations_used = 0;
    Termination termination_reason = Termination::MaxIter;
    bool unit_isotropic = false; // metric was isotropic with a == 1
};

struct RunResult {
    ScalarField u; // candidate minimizer v + u_g
    VectorField T; // trace-completed dual field alpha*b
    VectorField d;
    SolverReport report;
    SolverState state; // final iterate, for checkpointing
};

Reference prepare_reference(const BoundaryTrace& g, const SolverConfig& cfg);

SolverState initial_state(const Reference& ref);

/// One full iteration of the splitting loop:
///   u^{k+1}: Neumann Poisson solve with data d^k - b^k,
///   beta^{k+1} = -<g,u^{k+1}> / <g,w>,  v^{k+1} = u^{k+1} + beta^{k+1} w,
///   d^{k+1}: cellwise prox of grad v^{k+1} + b^k shifted by grad u_g,
///   b^{k+1} = b^k + grad v^{k+1} - d^{k+1}.
SolverState step(const SolverState& state, const Metric& metric,
                 const BoundaryTrace& g, const SolverConfig& cfg);

/// The dual field alpha*b with every boundary face overwritten so that its
/// normal trace equals lambda*g, lambda = alpha*beta. The interior faces of
/// b never touch boundary fluxes, so this completion is the unique trace
/// consistent with the converged divergence structure.
VectorField completed_dual_field(const SolverState& state, double alpha,
                                 const BoundaryTrace& g);

RunResult run(const Metric& metric, const BoundaryTrace& g, const SolverConfig& cfg,
              const SolverState* resume = nullptr);

// Checkpoint bundle: NLG-FIELD files (u,v,d,b,w,u_g) plus meta.txt in dir.
void save_checkpoint(const std::string& dir, const SolverState& state);
SolverState load_checkpoint(const std::string& dir);

} // namespace nlg
