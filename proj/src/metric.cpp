#include "nlg/metric.hpp"

#include <cmath>

namespace nlg {

Eig2 eig_sym2(double m11, double m12, double m22) {
    if (m12 == 0.0) {
        return {m11, m22, 1.0, 0.0};
    }
    double tr = m11 + m22;
    double diff = m11 - m22;
    double disc = std::sqrt(diff * diff + 4.0 * m12 * m12);
    double l1 = 0.5 * (tr + disc);
    double l2 = 0.5 * (tr - disc);
    // eigenvector for l1: (m12, l1 - m11), normalized
    double vx = m12, vy = l1 - m11;
    double n = std::hypot(vx, vy);
    return {l1, l2, vx / n, vy / n};
}

Metric Metric::isotropic(ScalarField a) {
    a.check_finite("Metric: a");
    Metric m;
    m.kind_ = MetricKind::Isotropic;
    m.a_min_ = a.values[0];
    m.a_max_ = a.values[0];
    for (double v : a.values) {
        m.a_min_ = std::min(m.a_min_, v);
        m.a_max_ = std::max(m.a_max_, v);
    }
    if (!(m.a_min_ > 0))
        throw NonPositiveConductivity("Metric: weight a must be strictly positive");
    m.a_ = std::move(a);
    return m;
}

Metric Metric::riemannian(ScalarField a, TensorField sigma0) {
    Metric m = isotropic(std::move(a));
    require_same_grid(m.a_.grid, sigma0.grid, "Metric::riemannian");
    m.kind_ = MetricKind::Riemannian;
    size_t n = sigma0.m11.size();
    m.eig_.resize(n);
    m.mu_min_ = 0;
    m.mu_max_ = 0;
    for (size_t k = 0; k < n; ++k) {
        double m11 = sigma0.m11[k], m12 = sigma0.m12[k], m22 = sigma0.m22[k];
        if (!std::isfinite(m11) || !std::isfinite(m12) || !std::isfinite(m22))
            throw InvalidFieldError("Metric: non-finite sigma0 entry");
        // SPD: positive trace and determinant
        if (!(m11 + m22 > 0) || !(m11 * m22 - m12 * m12 > 0))
            throw NonPositiveConductivity("Metric: sigma0 not SPD at cell " + std::to_string(k));
        Eig2 e = eig_sym2(m11, m12, m22);
        if (k == 0) {
            m.mu_min_ = e.l2;
            m.mu_max_ = e.l1;
        } else {
            m.mu_min_ = std::min(m.mu_min_, e.l2);
            m.mu_max_ = std::max(m.mu_max_, e.l1);
        }
        m.eig_[k] = e;
    }
    if (!(m.mu_min_ > 0))
        throw InvalidFieldError("Metric: sigma0 eigenvalues must be positive");
    m.sigma0_ = std::move(sigma0);
    return m;
}

bool Metric::is_unit_isotropic(double tol) const {
    if (kind_ != MetricKind::Isotropic) return false;
    return std::abs(a_min_ - 1.0) <= tol && std::abs(a_max_ - 1.0) <= tol;
}

double Metric::alpha1() const { return a_min_ * std::sqrt(mu_min_); }
double Metric::alpha2() const { return a_max_ * std::sqrt(mu_max_); }

double Metric::phi(int cell, double px, double py) const {
    double a = a_.values[static_cast<size_t>(cell)];
    if (kind_ == MetricKind::Isotropic)
        return a * std::hypot(px, py);
    const auto& s = sigma0_;
    size_t k = static_cast<size_t>(cell);
    double q = s.m11[k] * px * px + 2.0 * s.m12[k] * px * py + s.m22[k] * py * py;
    return a * std::sqrt(std::max(q, 0.0));
}

double Metric::phi_polar(int cell, double xx, double xy) const {
    double a = a_.values[static_cast<size_t>(cell)];
    if (kind_ == MetricKind::Isotropic)
        return std::hypot(xx, xy) / a;
    const auto& s = sigma0_;
    size_t k = static_cast<size_t>(cell);
    double det = s.m11[k] * s.m22[k] - s.m12[k] * s.m12[k];
    // sigma0^{-1} = [[m22,-m12],[-m12,m11]]/det
    double q = (s.m22[k] * xx * xx - 2.0 * s.m12[k] * xx * xy + s.m11[k] * xy * xy) / det;
    return std::sqrt(std::max(q, 0.0)) / a;
}

CellVector Metric::grad_p_phi(int cell, double px, double py) const {
    if (px == 0.0 && py == 0.0)
        throw InvalidFieldError("grad_p_phi: p = 0");
    double a = a_.values[static_cast<size_t>(cell)];
    if (kind_ == MetricKind::Isotropic) {
        double n = std::hypot(px, py);
        return {a * px / n, a * py / n};
    }
    const auto& s = sigma0_;
    size_t k = static_cast<size_t>(cell);
    double sx = s.m11[k] * px + s.m12[k] * py;
    double sy = s.m12[k] * px + s.m22[k] * py;
    double q = std::sqrt(px * sx + py * sy);
    return {a * sx / q, a * sy / q};
}

double Metric::total_variation(const ScalarField& u) const {
    require_same_grid(grid(), u.grid, "total_variation");
    VectorField g = gradient(u);
    const Grid& gr = grid();
    double s = 0;
    for (int j = 0; j < gr.ny; ++j)
        for (int i = 0; i < gr.nx; ++i) {
            CellVector c = gather_centered(g, i, j);
            s += phi(gr.cidx(i, j), c.x, c.y);
        }
    return s * gr.cell_area();
}

} // namespace nlg
