#pragma once

#include "nlg/dr_solver.hpp"
#include "nlg/duality.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nlg {

/// Ground-truth conductivity used to synthesize imaging data. Either an
/// isotropic sigma, or a conformal class c(x)*sigma0(x) with known sigma0.
struct Phantom {
    std::string name;
    ScalarField sigma;
    bool anisotropic = false;
    TensorField sigma0; // conformal class; synthesis supports diagonal sigma0
    ScalarField c;      // conformal factor
};

std::vector<std::string> phantom_presets();
Phantom make_phantom(const std::string& preset, const Grid& grid);

/// The reference boundary drive: outflux -1 on the left edge, +1 on the
/// right edge, 0 on top and bottom.
BoundaryTrace square_flow(const Grid& grid);

/// Interior current-magnitude data plus boundary normal current.
struct ImagingData {
    ScalarField a;
    BoundaryTrace g;
    std::string phantom_id;
    double noise_level = 0;
    std::uint64_t seed = 0;
};

struct SynthesisResult {
    ImagingData data;
    VectorField J; // true current density (faces; boundary faces carry g)
    ScalarField u; // true voltage potential (mean-zero)
};

/// Forward solve: J = -sigma grad u with outflux g_drive; a is the per-cell
/// current magnitude (owned-pair gather), with multiplicative uniform noise
/// (1 + eta), eta in [-noise_level, noise_level], applied to a only.
SynthesisResult synthesize(const Phantom& phantom, const BoundaryTrace& g_drive,
                           double noise_level, std::uint64_t seed,
                           const LinearSolveConfig& cfg);

struct RecoveryResult {
    VectorField T;
    ScalarField u;
    ScalarField sigma_rec;      // |T| / |grad u| where unmasked; 0 elsewhere
    std::vector<std::uint8_t> mask; // 1 = cell valid for sigma_rec
    double masked_fraction = 0;
    double clipped_fraction = 0; // cells where a was raised to the floor
    SolverReport report;
    double t_rel_err = -1;      // ||T - J_true||_2 / ||J_true||_2, if truth given
};

/// Builds the metric from the data and runs the splitting solver; the dual
/// field T is the recovered current density. The potential u is one of
/// infinitely many minimizers (any monotone remapping of a minimizer is again
/// one) and is reported without any uniqueness claim.
///
/// That same ambiguity makes sigma = |T|/|grad u| identifiable only up to a
/// factor depending on the level-set value of u. When boundary_sigma > 0 the
/// factor is calibrated against a known conductivity on the boundary ring
/// (the usual assumption that the medium is unperturbed at the edge of the
/// field of view); pass boundary_sigma <= 0 to disable the calibration and
/// get the raw ratio.
RecoveryResult recover(const ImagingData& data, MetricKind kind, const SolverConfig& cfg,
                       const TensorField* sigma0 = nullptr,
                       const VectorField* J_true = nullptr,
                       double boundary_sigma = 1.0);

} // namespace nlg
