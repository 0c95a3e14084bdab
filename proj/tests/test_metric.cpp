#include "nlg/metric.hpp"
#include "support/testutil.hpp"

#include <doctest.h>

#include <cmath>

using namespace nlg;
using namespace nlg::testutil;

namespace {

constexpr double kPi = 3.14159265358979323846;

Metric random_riemannian(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ua(0.5, 3.0), uang(0.0, kPi),
        ul(0.3, 4.0);
    ScalarField a(g);
    TensorField s(g);
    for (int c = 0; c < g.cells(); ++c) {
        a.values[c] = ua(rng);
        double th = uang(rng), l1 = ul(rng), l2 = ul(rng);
        double co = std::cos(th), si = std::sin(th);
        s.m11[c] = l1 * co * co + l2 * si * si;
        s.m22[c] = l1 * si * si + l2 * co * co;
        s.m12[c] = (l1 - l2) * co * si;
    }
    return Metric::riemannian(std::move(a), std::move(s));
}

// sup over directions of xi.p / phi(p), |p| = 1
double polar_brute(const Metric& m, int cell, double xx, double xy, int n = 20000) {
    double best = 0;
    for (int k = 0; k < n; ++k) {
        double th = 2 * kPi * k / n;
        double px = std::cos(th), py = std::sin(th);
        best = std::max(best, (xx * px + xy * py) / m.phi(cell, px, py));
    }
    return best;
}

} // namespace

TEST_CASE("construction validates positivity") {
    Grid g(3, 3, 1.0 / 3, 1.0 / 3);
    ScalarField a(g, 1.0);
    a.at(1, 2) = 0.0;
    CHECK_THROWS_AS(Metric::isotropic(a), NonPositiveConductivity);
    a.at(1, 2) = -2.0;
    CHECK_THROWS_AS(Metric::isotropic(a), NonPositiveConductivity);

    TensorField s(g); // identity
    s.m11[4] = -1.0;
    CHECK_THROWS_AS(Metric::riemannian(ScalarField(g, 1.0), s), NonPositiveConductivity);
    TensorField s2(g, 1.0, 2.0, 1.0); // indefinite: det = -3
    CHECK_THROWS_AS(Metric::riemannian(ScalarField(g, 1.0), s2), NonPositiveConductivity);
}

TEST_CASE("symmetric 2x2 eigendecomposition") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        double m11 = d(rng), m12 = d(rng), m22 = d(rng);
        Eig2 e = eig_sym2(m11, m12, m22);
        // reconstruct M = R diag(l1,l2) R^T
        double r11 = e.c * e.c * e.l1 + e.s * e.s * e.l2;
        double r12 = e.c * e.s * (e.l1 - e.l2);
        double r22 = e.s * e.s * e.l1 + e.c * e.c * e.l2;
        CHECK(r11 == doctest::Approx(m11).epsilon(1e-10));
        CHECK(r12 == doctest::Approx(m12).epsilon(1e-10));
        CHECK(r22 == doctest::Approx(m22).epsilon(1e-10));
    }
}

TEST_CASE("phi is positively homogeneous and convex (triangle inequality)") {
    Grid g(4, 4, 0.25, 0.25);
    std::mt19937_64 rng(23);
    Metric m = random_riemannian(g, rng);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (int trial = 0; trial < 500; ++trial) {
        int cell = static_cast<int>(rng() % static_cast<unsigned>(g.cells()));
        double px = d(rng), py = d(rng), qx = d(rng), qy = d(rng);
        double t = std::abs(d(rng));
        CHECK(m.phi(cell, t * px, t * py) ==
              doctest::Approx(t * m.phi(cell, px, py)).epsilon(1e-12));
        CHECK(m.phi(cell, px + qx, py + qy) <=
              m.phi(cell, px, py) + m.phi(cell, qx, qy) + 1e-12);
        CHECK(m.phi(cell, px, py) >= 0.0);
    }
    CHECK(m.phi(0, 0.0, 0.0) == 0.0);
}

TEST_CASE("closed-form polar matches a direction sweep") {
    Grid g(3, 3, 1.0 / 3, 1.0 / 3);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> d(-2.0, 2.0);

    Metric iso = Metric::isotropic(ScalarField(g, 2.5));
    Metric riem = random_riemannian(g, rng);
    for (int trial = 0; trial < 40; ++trial) {
        int cell = static_cast<int>(rng() % static_cast<unsigned>(g.cells()));
        double xx = d(rng), xy = d(rng);
        CHECK(iso.phi_polar(cell, xx, xy) ==
              doctest::Approx(polar_brute(iso, cell, xx, xy)).epsilon(1e-6));
        CHECK(riem.phi_polar(cell, xx, xy) ==
              doctest::Approx(polar_brute(riem, cell, xx, xy)).epsilon(1e-6));
    }
}

TEST_CASE("bipolar recovers phi") {
    Grid g(3, 3, 1.0 / 3, 1.0 / 3);
    std::mt19937_64 rng(37);
    Metric m = random_riemannian(g, rng);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        int cell = static_cast<int>(rng() % static_cast<unsigned>(g.cells()));
        double px = d(rng), py = d(rng);
        // sweep the polar of the polar
        double best = 0;
        for (int k = 0; k < 20000; ++k) {
            double th = 2 * kPi * k / 20000;
            double xx = std::cos(th), xy = std::sin(th);
            best = std::max(best, (px * xx + py * xy) / m.phi_polar(cell, xx, xy));
        }
        CHECK(best == doctest::Approx(m.phi(cell, px, py)).epsilon(1e-6));
    }
}

TEST_CASE("gradient of phi: finite differences and the Euler identity") {
    Grid g(3, 3, 1.0 / 3, 1.0 / 3);
    std::mt19937_64 rng(41);
    Metric iso = Metric::isotropic(ScalarField(g, 1.7));
    Metric riem = random_riemannian(g, rng);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    const double h = 1e-6;
    for (const Metric* m : {&iso, &riem}) {
        for (int trial = 0; trial < 60; ++trial) {
            int cell = static_cast<int>(rng() % static_cast<unsigned>(g.cells()));
            double px = d(rng), py = d(rng);
            if (std::hypot(px, py) < 0.1) continue;
            CellVector gr = m->grad_p_phi(cell, px, py);
            double fdx = (m->phi(cell, px + h, py) - m->phi(cell, px - h, py)) / (2 * h);
            double fdy = (m->phi(cell, px, py + h) - m->phi(cell, px, py - h)) / (2 * h);
            CHECK(gr.x == doctest::Approx(fdx).epsilon(1e-6));
            CHECK(gr.y == doctest::Approx(fdy).epsilon(1e-6));
            CHECK(gr.x * px + gr.y * py ==
                  doctest::Approx(m->phi(cell, px, py)).epsilon(1e-12));
            // the gradient saturates the polar ball boundary
            CHECK(m->phi_polar(cell, gr.x, gr.y) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(iso.grad_p_phi(0, 0.0, 0.0), Error);
}

TEST_CASE("comparability bounds alpha1, alpha2") {
    Grid g(4, 4, 0.25, 0.25);
    std::mt19937_64 rng(43);
    Metric m = random_riemannian(g, rng);
    CHECK(m.alpha1() > 0);
    CHECK(m.alpha2() >= m.alpha1());
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (int trial = 0; trial < 300; ++trial) {
        int cell = static_cast<int>(rng() % static_cast<unsigned>(g.cells()));
        double px = d(rng), py = d(rng);
        double n = std::hypot(px, py);
        double v = m.phi(cell, px, py);
        CHECK(v >= m.alpha1() * n - 1e-12);
        CHECK(v <= m.alpha2() * n + 1e-12);
    }
}

TEST_CASE("unit isotropic detection") {
    Grid g(3, 3, 1.0 / 3, 1.0 / 3);
    CHECK(Metric::isotropic(ScalarField(g, 1.0)).is_unit_isotropic());
    CHECK_FALSE(Metric::isotropic(ScalarField(g, 1.01)).is_unit_isotropic());
    CHECK_FALSE(Metric::riemannian(ScalarField(g, 1.0), TensorField(g, 2.0, 0.0, 1.0))
                    .is_unit_isotropic());
}

TEST_CASE("total variation of a linear ramp") {
    Grid g(16, 16, 1.0 / 16, 1.0 / 16);
    ScalarField u(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            u.at(i, j) = 2.0 * g.cell_x(i);
    Metric m = Metric::isotropic(ScalarField(g, 3.0));
    // integrand is a*|grad u| = 6; cell-centered averaging halves the
    // gradient in the two boundary columns, costing one column's worth
    double expect = 6.0 * (1.0 - 1.0 / 16.0);
    CHECK(m.total_variation(u) == doctest::Approx(expect).epsilon(1e-12));
}
