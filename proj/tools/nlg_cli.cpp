// Command-line driver: solve, phantom, diagnose.

#include "nlg/cdii.hpp"
#include "nlg/dr_solver.hpp"
#include "nlg/duality.hpp"
#include "nlg/field_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitCertificate = 3;

// key=value config file; flags given on the command line take precedence.
// Unknown keys are rejected by the option parser.
std::vector<std::string> load_config_args(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw nlg::IoError("cannot open config file: " + path);
    std::vector<std::string> args;
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw nlg::IoError("config line is not key=value: " + line);
        args.push_back("--" + line.substr(0, eq) + "=" + line.substr(eq + 1));
    }
    return args;
}

json report_to_json(const nlg::SolverReport& r) {
    json hist_b = json::array(), hist_div = json::array(), hist_flux = json::array();
    for (const auto& rec : r.history) {
        hist_b.push_back(rec.b_change);
        hist_div.push_back(rec.div_residual);
        hist_flux.push_back(rec.flux_residual);
    }
    return json{{"schema_version", 1},
                {"lambda_hat", r.lambda_hat},
                {"primal_value", r.primal_value},
                {"dual_value", r.dual_value},
                {"gap", r.gap},
                {"iterations_used", r.iterations_used},
                {"termination_reason", nlg::to_string(r.termination_reason)},
                {"unit_isotropic", r.unit_isotropic},
                {"history",
                 {{"b_change", hist_b}, {"div_residual", hist_div}, {"flux_residual", hist_flux}}}};
}

json certificate_to_json(const nlg::Certificate& c) {
    return json{{"div_residual", c.div_residual},
                {"polar_excess", c.polar_excess},
                {"flux_residual", c.flux_residual},
                {"gap", c.gap},
                {"alignment_defect", c.alignment_defect},
                {"lambda", c.lambda},
                {"masked_fraction", c.masked_fraction}};
}

void write_json(const std::string& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw nlg::IoError("cannot write: " + path);
    os << j.dump(2) << '\n';
}

nlg::Metric load_metric(const std::string& kind, const std::string& a_path,
                        const std::string& sigma0_path) {
    nlg::ScalarField a = nlg::read_scalar(a_path);
    if (kind == "iso") return nlg::Metric::isotropic(std::move(a));
    if (kind == "riem") {
        if (sigma0_path.empty())
            throw nlg::InvalidFieldError("--metric riem requires --sigma0");
        return nlg::Metric::riemannian(std::move(a), nlg::read_tensor(sigma0_path));
    }
    throw nlg::InvalidFieldError("unknown metric kind: " + kind);
}

struct SolveArgs {
    std::string metric = "iso", a_path, sigma0_path, g_path, out = ".";
    nlg::SolverConfig cfg;
};

int cmd_solve(const SolveArgs& args) {
    nlg::Metric metric = load_metric(args.metric, args.a_path, args.sigma0_path);
    nlg::BoundaryTrace g = nlg::read_trace(args.g_path);
    nlg::require_same_grid(metric.grid(), g.grid, "solve inputs");

    nlg::RunResult res = nlg::run(metric, g, args.cfg);

    fs::create_directories(args.out);
    nlg::write_field(args.out + "/u.fld", res.u);
    nlg::write_field(args.out + "/T.fld", res.T);
    nlg::write_field(args.out + "/d.fld", res.d);

    nlg::Certificate cert = nlg::certify(metric, g, res.u, res.T, res.state.u_g,
                                         args.cfg.grad_floor_rel);
    json rep = report_to_json(res.report);
    rep["certificate"] = certificate_to_json(cert);
    write_json(args.out + "/report.json", rep);

    std::cout << "lambda_hat " << nlg::format_double(res.report.lambda_hat)
              << "  gap " << nlg::format_double(res.report.gap)
              << "  iterations " << res.report.iterations_used
              << "  termination " << nlg::to_string(res.report.termination_reason) << "\n";
    if (res.report.termination_reason == nlg::Termination::MaxIter) {
        std::cerr << "nlg solve: iteration cap reached before convergence\n";
        return kExitNonConvergence;
    }
    return kExitOk;
}

struct PhantomArgs {
    std::string preset = "disk", out = ".";
    int n = 64;
    double noise = 0.0;
    std::uint64_t seed = 0;
};

int cmd_phantom(const PhantomArgs& args) {
    nlg::Grid grid(args.n, args.n, 1.0 / args.n, 1.0 / args.n);
    nlg::Phantom phantom = nlg::make_phantom(args.preset, grid);
    nlg::BoundaryTrace drive = nlg::square_flow(grid);
    nlg::SynthesisResult syn = nlg::synthesize(phantom, drive, args.noise, args.seed, {});

    fs::create_directories(args.out);
    nlg::write_field(args.out + "/a.fld", syn.data.a);
    nlg::write_field(args.out + "/g.fld", syn.data.g);
    nlg::write_field(args.out + "/sigma_true.fld", phantom.sigma);
    nlg::write_field(args.out + "/J_true.fld", syn.J);
    nlg::write_field(args.out + "/u_true.fld", syn.u);
    write_json(args.out + "/meta.json",
               json{{"schema_version", 1},
                    {"phantom", args.preset},
                    {"n", args.n},
                    {"noise_level", args.noise},
                    {"seed", args.seed}});
    std::cout << "phantom " << args.preset << " written to " << args.out << "\n";
    return kExitOk;
}

struct DiagnoseArgs {
    std::string metric = "iso", a_path, sigma0_path, g_path, u_path, t_path;
    double eps_grad = 1e-8;
    double div_tol = 1e-6, polar_tol = 1e-3, flux_tol = 1e-3, align_tol = 1e-2;
};

int cmd_diagnose(const DiagnoseArgs& args) {
    nlg::Metric metric = load_metric(args.metric, args.a_path, args.sigma0_path);
    nlg::BoundaryTrace g = nlg::read_trace(args.g_path);
    nlg::ScalarField u = nlg::read_scalar(args.u_path);
    nlg::VectorField T = nlg::read_vector(args.t_path);
    nlg::require_same_grid(metric.grid(), g.grid, "diagnose inputs");
    nlg::require_same_grid(metric.grid(), u.grid, "diagnose inputs");
    nlg::require_same_grid(metric.grid(), T.grid, "diagnose inputs");

    nlg::Reference ref = nlg::prepare_reference(g, {});
    nlg::Certificate cert = nlg::certify(metric, g, u, T, ref.u_g, args.eps_grad);

    json out = certificate_to_json(cert);
    out["schema_version"] = 1;
    out["thresholds"] = json{{"div_tol", args.div_tol},
                             {"polar_tol", args.polar_tol},
                             {"flux_tol", args.flux_tol},
                             {"align_tol", args.align_tol},
                             {"eps_grad", args.eps_grad}};
    bool ok = cert.div_residual <= args.div_tol && cert.polar_excess <= args.polar_tol &&
              cert.flux_residual <= args.flux_tol && cert.alignment_defect <= args.align_tol;
    out["pass"] = ok;
    std::cout << out.dump(2) << "\n";
    return ok ? kExitOk : kExitCertificate;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"least gradient solver with Neumann boundary data"};
    app.require_subcommand(1);

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "run the splitting solver");
    s->add_option("--metric", solve.metric, "iso or riem")->check(CLI::IsMember({"iso", "riem"}));
    s->add_option("--a", solve.a_path, "weight field (scalar NLG-FIELD)")->required();
    s->add_option("--sigma0", solve.sigma0_path, "tensor NLG-FIELD for riem");
    s->add_option("--g", solve.g_path, "boundary flux (trace NLG-FIELD)")->required();
    s->add_option("--alpha", solve.cfg.alpha, "splitting parameter");
    s->add_option("--max-iter", solve.cfg.max_iter, "iteration cap");
    s->add_option("--stop-tol", solve.cfg.stop_tol, "b stagnation threshold");
    s->add_option("--gap-tol", solve.cfg.gap_tol, "duality gap threshold");
    s->add_option("--eps-grad", solve.cfg.grad_floor_rel, "relative gradient floor");
    s->add_option("--cg-tol", solve.cfg.linear.cg_tol, "linear solve tolerance");
    s->add_option("--out", solve.out, "output directory");

    PhantomArgs phantom;
    auto* p = app.add_subcommand("phantom", "synthesize imaging data");
    p->add_option("--preset", phantom.preset, "phantom name")
        ->check(CLI::IsMember(nlg::phantom_presets()));
    p->add_option("--n", phantom.n, "grid cells per side");
    p->add_option("--noise", phantom.noise, "multiplicative noise level on a");
    p->add_option("--seed", phantom.seed, "noise seed");
    p->add_option("--out", phantom.out, "output directory");

    DiagnoseArgs diag;
    auto* d = app.add_subcommand("diagnose", "certificate check for a (u,T) pair");
    d->add_option("--metric", diag.metric, "iso or riem")->check(CLI::IsMember({"iso", "riem"}));
    d->add_option("--a", diag.a_path, "weight field")->required();
    d->add_option("--sigma0", diag.sigma0_path, "tensor field for riem");
    d->add_option("--g", diag.g_path, "boundary flux")->required();
    d->add_option("--u", diag.u_path, "candidate minimizer")->required();
    d->add_option("--T", diag.t_path, "candidate dual field")->required();
    d->add_option("--eps-grad", diag.eps_grad, "relative gradient floor");
    d->add_option("--div-tol", diag.div_tol, "divergence residual threshold");
    d->add_option("--polar-tol", diag.polar_tol, "polar excess threshold");
    d->add_option("--flux-tol", diag.flux_tol, "flux residual threshold");
    d->add_option("--align-tol", diag.align_tol, "alignment defect threshold");

    // a flag may appear both in a config file and on the command line; the
    // last occurrence (the command line, see below) wins
    for (auto* sub : {s, p, d})
        for (auto* opt : sub->get_options())
            opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // expand --config FILE into per-subcommand flags (command line wins)
    std::vector<std::string> args;
    try {
        for (int i = 1; i < argc; ++i) {
            std::string a = argv[i];
            if (a == "--config") {
                if (i + 1 >= argc) throw nlg::IoError("--config needs a file");
                auto extra = load_config_args(argv[++i]);
                // CLI11 lets later occurrences override, so file entries go first
                args.insert(args.begin() + 1, extra.begin(), extra.end());
            } else if (a.rfind("--config=", 0) == 0) {
                auto extra = load_config_args(a.substr(9));
                args.insert(args.begin() + 1, extra.begin(), extra.end());
            } else {
                args.push_back(a);
            }
        }
    } catch (const nlg::Error& e) {
        std::cerr << "nlg: " << e.what() << "\n";
        return kExitInput;
    }

    try {
        std::vector<const char*> cargs{argv[0]};
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInput;
    }

    try {
        if (s->parsed()) return cmd_solve(solve);
        if (p->parsed()) return cmd_phantom(phantom);
        if (d->parsed()) return cmd_diagnose(diag);
    } catch (const nlg::ConvergenceError& e) {
        std::cerr << "nlg: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const nlg::Error& e) {
        std::cerr << "nlg: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "nlg: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
