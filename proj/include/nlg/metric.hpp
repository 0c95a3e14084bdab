#pragma once

#include "nlg/fields.hpp"
#include "nlg/ops.hpp"

namespace nlg {

/// Per-cell symmetric 2x2 tensor, stored as (m11, m12, m22).
struct TensorField {
    Grid grid;
    std::vector<double> m11, m12, m22;

    TensorField() = default;
    explicit TensorField(const Grid& g, double d11 = 1, double d12 = 0, double d22 = 1)
        : grid(g),
          m11(static_cast<size_t>(g.cells()), d11),
          m12(static_cast<size_t>(g.cells()), d12),
          m22(static_cast<size_t>(g.cells()), d22) {}
};

/// Eigendecomposition of a symmetric 2x2 matrix: M = R diag(l1,l2) R^T
/// with R = [[c,-s],[s,c]].
struct Eig2 {
    double l1, l2, c, s;
};

Eig2 eig_sym2(double m11, double m12, double m22);

enum class MetricKind { Isotropic, Riemannian };

/// The integrand phi(x,p): a(x)|p| (isotropic) or
/// a(x) (p^T sigma0(x) p)^{1/2} (Riemannian). Validated at construction:
/// a >= a_min > 0, sigma0 SPD with eigenvalues bounded away from zero.
class Metric {
public:
    static Metric isotropic(ScalarField a);
    static Metric riemannian(ScalarField a, TensorField sigma0);

    MetricKind kind() const { return kind_; }
    const Grid& grid() const { return a_.grid; }
    const ScalarField& a() const { return a_; }
    const TensorField& sigma0() const { return sigma0_; }
    bool is_unit_isotropic(double tol = 1e-12) const;

    double a_min() const { return a_min_; }
    double a_max() const { return a_max_; }
    double mu_min() const { return mu_min_; }
    double mu_max() const { return mu_max_; }
    /// C1 bounds: alpha1 |p| <= phi(x,p) <= alpha2 |p|.
    double alpha1() const;
    double alpha2() const;

    double phi(int cell, double px, double py) const;
    /// Polar norm phi0(x,xi) = sup_p xi.p / phi(x,p), in closed form.
    double phi_polar(int cell, double xx, double xy) const;
    /// grad_p phi at p != 0. Satisfies Euler's identity g.p = phi(p).
    CellVector grad_p_phi(int cell, double px, double py) const;

    const Eig2& eig(int cell) const { return eig_[static_cast<size_t>(cell)]; }

    /// Sum over cells of phi(x, grad u averaged to the cell center) * hx*hy.
    double total_variation(const ScalarField& u) const;

private:
    Metric() = default;
    MetricKind kind_ = MetricKind::Isotropic;
    ScalarField a_;
    TensorField sigma0_;
    std::vector<Eig2> eig_;
    double a_min_ = 0, a_max_ = 0, mu_min_ = 1, mu_max_ = 1;
};

} // namespace nlg
