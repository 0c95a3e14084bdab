// Acceptance gate: one pass/fail line per criterion, exit 1 on any failure.

#include "nlg/cdii.hpp"
#include "nlg/dr_solver.hpp"
#include "nlg/duality.hpp"
#include "nlg/field_io.hpp"
#include "nlg/poisson.hpp"
#include "nlg/shrinkage.hpp"
#include "support/cp_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

using namespace nlg;
using nlg::testutil::CpResult;
using nlg::testutil::cp_solve;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;
std::vector<std::pair<int, std::string>> g_lines;

void report(int num, bool pass, const std::string& what, const std::string& detail) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "criterion %d %s: %s (%s)", num,
                  pass ? "PASS" : "FAIL", what.c_str(), detail.c_str());
    g_lines.emplace_back(num, buf);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SolverConfig tight_config() {
    SolverConfig cfg;
    cfg.alpha = 1.0;
    cfg.max_iter = 30000;
    cfg.stop_tol = 1e-10;
    cfg.gap_tol = 1e-9;
    cfg.linear.cg_tol = 1e-12;
    return cfg;
}

// every solver run in this gate contributes its certificate to criterion 3
struct NamedCert {
    std::string label;
    Certificate cert;
};
std::vector<NamedCert> g_certs;

void collect_cert(const std::string& label, const Metric& m, const BoundaryTrace& g,
                  const ScalarField& u, const VectorField& T) {
    Reference ref = prepare_reference(g, tight_config());
    g_certs.push_back({label, certify(m, g, u, T, ref.u_g, 1e-8)});
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1

RunResult criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    Grid g(64, 64, 1.0 / 64, 1.0 / 64);
    BoundaryTrace gtr = square_flow(g);
    Metric m = Metric::isotropic(ScalarField(g, 1.0));
    RunResult res = run(m, gtr, tight_config());
    double secs = seconds_since(t0);

    double tmax_err = 0;
    for (int j = 2; j < g.ny - 2; ++j)
        for (int i = 2; i < g.nx - 2; ++i) {
            CellVector t = gather_owned(res.T, i, j);
            tmax_err = std::max({tmax_err, std::abs(t.x - 1.0), std::abs(t.y)});
        }
    bool pass = res.report.lambda_hat >= 0.999 && res.report.lambda_hat <= 1.001 &&
                tmax_err <= 1e-2 && std::abs(res.report.gap) <= 1e-5 && secs <= 60.0;
    report(1, pass, "analytic duality certificate on the unit square",
           "lambda=" + fmt(res.report.lambda_hat) + " Terr=" + fmt(tmax_err) +
               " gap=" + fmt(res.report.gap) + " time=" + fmt(secs) + "s");
    collect_cert("square64", m, gtr, res.u, res.T);
    return res;
}

// ---------------------------------------------------------------- criterion 2

void criterion_2() {
    auto t0 = std::chrono::steady_clock::now();
    double worst = 0;
    std::string where = "-";
    for (int n : {8, 16}) {
        Grid g(n, n, 1.0 / n, 1.0 / n);
        BoundaryTrace gtr = square_flow(g);
        for (const std::string& prob : {"uniform", "ramp", "cdii"}) {
            ScalarField a(g, 1.0);
            if (prob == "ramp")
                for (int j = 0; j < g.ny; ++j)
                    for (int i = 0; i < g.nx; ++i) a.at(i, j) = 1.0 + g.cell_x(i);
            if (prob == "cdii") {
                Phantom p = make_phantom("disk", g);
                SynthesisResult syn = synthesize(p, gtr, 0.0, 0, {});
                a = syn.data.a;
            }
            Metric m = Metric::isotropic(a);
            SolverConfig cfg = tight_config();
            cfg.max_iter = 60000;
            RunResult res = run(m, gtr, cfg);
            CpResult cp = cp_solve(m, gtr, 400000, 1e-10);
            double err = std::abs(res.report.lambda_hat - cp.value);
            if (err > worst) {
                worst = err;
                where = prob + "@" + std::to_string(n);
            }
            collect_cert(prob + std::to_string(n), m, gtr, res.u, res.T);
        }
    }
    double secs = seconds_since(t0);
    bool pass = worst <= 1e-4 && secs <= 120.0;
    report(2, pass, "independent primal-dual referee agrees on the multiplier",
           "worst |dlambda|=" + fmt(worst) + " at " + where + " time=" + fmt(secs) + "s");
}

// ---------------------------------------------------------------- criterion 3

void criterion_3() {
    double div = 0, polar = 0, flux = 0, align = 0;
    std::string worst = "-";
    for (const auto& nc : g_certs) {
        div = std::max(div, nc.cert.div_residual);
        polar = std::max(polar, nc.cert.polar_excess);
        flux = std::max(flux, nc.cert.flux_residual);
        if (nc.cert.alignment_defect > align) {
            align = nc.cert.alignment_defect;
            worst = nc.label;
        }
    }
    bool pass = div <= 1e-6 && polar <= 1e-3 && flux <= 1e-3 && align <= 1e-2;
    report(3, pass,
           "certificates at termination of every solver run in this gate",
           "runs=" + std::to_string(g_certs.size()) + " div=" + fmt(div) +
               " polar=" + fmt(polar) + " flux=" + fmt(flux) + " align=" + fmt(align) +
               " worst_align=" + worst);
}

// ---------------------------------------------------------------- criterion 4

void criterion_4(const RunResult& square) {
    Grid g(64, 64, 1.0 / 64, 1.0 / 64);
    BoundaryTrace gtr = square_flow(g);
    Metric m = Metric::isotropic(ScalarField(g, 1.0));
    auto F = [](double t) { return t + 0.1 * std::tanh(t); };
    MultiplicityReport r =
        multiplicity_test(m, gtr, square.u, square.T, square.state.u_g, F, 1e-8);
    bool pass = std::abs(r.tv_excess) <= 1e-2 && r.alignment_defect <= 1e-2;
    report(4, pass, "remapped minimizer stays minimizing against the same dual field",
           "tv_excess=" + fmt(r.tv_excess) + " align=" + fmt(r.alignment_defect));
}

// ---------------------------------------------------------------- criterion 5

void criterion_5() {
    Grid g(16, 16, 1.0 / 16, 1.0 / 16);
    BoundaryTrace gtr = square_flow(g);
    SolverConfig cfg = tight_config();
    Metric m1 = Metric::isotropic(ScalarField(g, 1.0));
    double base = run(m1, gtr, cfg).report.lambda_hat;
    double worst = 0;
    for (double c : {0.5, 2.0}) {
        Metric mc = Metric::isotropic(ScalarField(g, c));
        double la = run(mc, gtr, cfg).report.lambda_hat;
        worst = std::max(worst, std::abs(la - c * base) / (c * base));
        BoundaryTrace gc = c * gtr;
        double lg = run(m1, gc, cfg).report.lambda_hat;
        worst = std::max(worst, std::abs(lg - base / c) / (base / c));
    }
    bool pass = worst <= 1e-3;
    report(5, pass, "multiplier scaling in the weight and in the boundary flux",
           "worst rel err=" + fmt(worst));
}

// ---------------------------------------------------------------- criterion 6

void criterion_6() {
    LinearSolveConfig lin;
    lin.cg_tol = 1e-10;
    std::vector<double> errs;
    for (int n : {16, 32, 64}) {
        Grid g(n, n, 1.0 / n, 1.0 / n);
        // u = cos(pi x) cos(pi y), homogeneous Neumann; feed the exact flux
        // through F so the discrete weak form matches the manufactured u
        VectorField F(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i)
                F.fx(i, j) = -kPi * std::sin(kPi * g.ox + kPi * (i * g.hx)) *
                             std::cos(kPi * g.cell_y(j));
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                F.fy(i, j) = -kPi * std::cos(kPi * g.cell_x(i)) *
                             std::sin(kPi * g.oy + kPi * (j * g.hy));
        ScalarField u = solve_poisson_neumann(F, nullptr, lin);
        double num = 0, den = 0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double exact = std::cos(kPi * g.cell_x(i)) * std::cos(kPi * g.cell_y(j));
                double d = u.at(i, j) - exact;
                num += d * d;
                den += exact * exact;
            }
        errs.push_back(std::sqrt(num / den));
    }
    double o1 = std::log2(errs[0] / errs[1]);
    double o2 = std::log2(errs[1] / errs[2]);
    bool pass = o1 >= 1.8 && o2 >= 1.8;
    report(6, pass, "Poisson sub-solver converges at second order",
           "orders=" + fmt(o1) + "," + fmt(o2) + " err64=" + fmt(errs[2]));
}

// ---------------------------------------------------------------- criterion 7

void criterion_7() {
    std::mt19937_64 rng(2024);
    Grid g(4, 4, 0.25, 0.25);
    std::uniform_real_distribution<double> amp(0.3, 2.5), coord(-3.0, 3.0),
        alpha_d(0.4, 2.5), rot(0.0, 2 * kPi), eig(0.4, 3.0);

    int bad_cert = 0, lost_search = 0;
    double iso_gap = 0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        bool riem = t % 2 == 1;
        double av = amp(rng);
        ScalarField a(g, av);
        Metric m = [&] {
            if (!riem) return Metric::isotropic(a);
            double th = rot(rng), l1 = eig(rng), l2 = eig(rng);
            double c = std::cos(th), s = std::sin(th);
            TensorField s0(g, c * c * l1 + s * s * l2, c * s * (l1 - l2),
                           s * s * l1 + c * c * l2);
            return Metric::riemannian(a, s0);
        }();
        ProxConfig pc;
        pc.alpha = alpha_d(rng);
        CellVector q{coord(rng), coord(rng)};
        CellVector p = prox_phi(m, 0, q, pc);

        // subgradient certificate: alpha (q - p) in the subdifferential at p
        CellVector r{pc.alpha * (q.x - p.x), pc.alpha * (q.y - p.y)};
        double polar = m.phi_polar(0, r.x, r.y);
        double np = std::hypot(p.x, p.y);
        bool ok;
        if (np < 1e-12) {
            ok = polar <= 1.0 + 1e-8;
        } else {
            double euler = r.x * p.x + r.y * p.y - m.phi(0, p.x, p.y);
            ok = polar <= 1.0 + 1e-8 && std::abs(euler) <= 1e-8 * std::max(1.0, np);
        }
        if (!ok) ++bad_cert;

        // the prox value beats a local grid search around both p and 0
        auto value = [&](CellVector z) {
            return m.phi(0, z.x, z.y) +
                   0.5 * pc.alpha * ((z.x - q.x) * (z.x - q.x) + (z.y - q.y) * (z.y - q.y));
        };
        double best = value(p);
        bool beaten = false;
        for (double h : {1e-2, 1e-3}) {
            for (int k = 0; k < 8; ++k) {
                double th = k * kPi / 4;
                CellVector z{p.x + h * std::cos(th), p.y + h * std::sin(th)};
                if (value(z) < best - 1e-12) beaten = true;
            }
        }
        if (beaten) ++lost_search;

        // Riemannian with sigma0 = I reduces to the isotropic closed form
        if (t % 10 == 0) {
            Metric mi = Metric::isotropic(a);
            Metric mr = Metric::riemannian(a, TensorField(g, 1.0, 0.0, 1.0));
            CellVector pi = prox_phi(mi, 0, q, pc);
            CellVector pr = prox_phi(mr, 0, q, pc);
            iso_gap = std::max({iso_gap, std::abs(pi.x - pr.x), std::abs(pi.y - pr.y)});
        }
    }
    bool pass = bad_cert == 0 && lost_search == 0 && iso_gap <= 1e-12;
    report(7, pass, "prox instances pass the subgradient certificate",
           "trials=" + std::to_string(trials) + " bad_cert=" + std::to_string(bad_cert) +
               " lost_search=" + std::to_string(lost_search) + " iso_gap=" + fmt(iso_gap));
}

// ---------------------------------------------------------------- criterion 8

void criterion_8() {
    auto t0 = std::chrono::steady_clock::now();
    Grid g(64, 64, 1.0 / 64, 1.0 / 64);
    Phantom p = make_phantom("disk", g);
    SolverConfig cfg = tight_config();
    cfg.max_iter = 3000;
    cfg.stop_tol = 1e-9;
    cfg.gap_tol = 1e-8;
    cfg.linear.cg_tol = 1e-11;

    double terr[2], serr[2];
    int k = 0;
    for (double noise : {0.0, 0.01}) {
        SynthesisResult syn = synthesize(p, square_flow(g), noise, 11, {});
        RecoveryResult rec =
            recover(syn.data, MetricKind::Isotropic, cfg, nullptr, &syn.J);
        terr[k] = rec.t_rel_err;
        double num = 0, den = 0;
        for (int c = 0; c < g.cells(); ++c) {
            if (rec.mask[static_cast<size_t>(c)] == 0) continue;
            double d = rec.sigma_rec.values[c] - p.sigma.values[c];
            num += d * d;
            den += p.sigma.values[c] * p.sigma.values[c];
        }
        serr[k] = std::sqrt(num / den);
        ++k;
    }
    double secs = seconds_since(t0);
    bool pass = terr[0] <= 0.05 && serr[0] <= 0.1 && terr[1] <= 0.15 && serr[1] <= 0.15 &&
                secs <= 300.0;
    report(8, pass, "CDII round trip on the disk phantom at 64^2",
           "clean: Terr=" + fmt(terr[0]) + " sigma=" + fmt(serr[0]) +
               "; 1% noise: Terr=" + fmt(terr[1]) + " sigma=" + fmt(serr[1]) +
               "; time=" + fmt(secs) + "s");
}

// ---------------------------------------------------------------- criterion 9

std::string slurp(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void criterion_9(const char* cli) {
    if (cli == nullptr) {
        report(9, false, "determinism of CLI outputs", "no CLI path given");
        return;
    }
    fs::path dir = fs::temp_directory_path() / ("nlg_gate_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto sh = [&](const std::string& cmd, int also_ok) {
        int rc = std::system((std::string(cli) + " " + cmd + " >/dev/null 2>&1").c_str());
        if (rc == -1 || !WIFEXITED(rc)) return false;
        int code = WEXITSTATUS(rc);
        return code == 0 || code == also_ok;
    };
    bool ok = true;
    for (const char* tag : {"r1", "r2"}) {
        std::string d = (dir / tag).string();
        ok = ok && sh("phantom --preset disk --n 16 --noise 0.01 --seed 42 --out " + d, 0);
        // noisy data does not converge inside the cap; exit 2 is the honest
        // report and the outputs must still be reproducible
        ok = ok && sh("solve --max-iter 800 --a " + d + "/a.fld --g " + d +
                          "/g.fld --out " + d + "/sol",
                      2);
    }
    int diffs = 0;
    if (ok) {
        for (const char* f :
             {"a.fld", "g.fld", "J_true.fld", "sigma_true.fld", "u_true.fld", "meta.json",
              "sol/u.fld", "sol/T.fld", "sol/d.fld", "sol/report.json"})
            if (slurp(dir / "r1" / f) != slurp(dir / "r2" / f) ||
                slurp(dir / "r1" / f).empty())
                ++diffs;
    }
    fs::remove_all(dir);
    report(9, ok && diffs == 0, "identical inputs and seed give bit-identical outputs",
           ok ? "files_differing=" + std::to_string(diffs) : "CLI run failed");
}

} // namespace

int main(int argc, char** argv) {
    RunResult square = criterion_1();
    criterion_2();
    criterion_4(square);
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9(argc > 1 ? argv[1] : nullptr);
    criterion_3(); // aggregates the certificates of the runs above
    std::sort(g_lines.begin(), g_lines.end());
    for (const auto& [num, line] : g_lines) std::printf("%s\n", line.c_str());
    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return 1;
}
