#include "nlg/ops.hpp"

namespace nlg {

VectorField gradient(const ScalarField& u) {
    u.check_finite("gradient: input");
    const Grid& g = u.grid;
    VectorField r(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            r.fx(i, j) = (u.at(i, j) - u.at(i - 1, j)) / g.hx;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            r.fy(i, j) = (u.at(i, j) - u.at(i, j - 1)) / g.hy;
    return r;
}

ScalarField divergence(const VectorField& f) {
    f.check_finite("divergence: input");
    const Grid& g = f.grid;
    ScalarField r(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            r.at(i, j) = (f.fx(i + 1, j) - f.fx(i, j)) / g.hx +
                         (f.fy(i, j + 1) - f.fy(i, j)) / g.hy;
    return r;
}

BoundaryTrace normal_trace(const VectorField& f) {
    const Grid& g = f.grid;
    BoundaryTrace t(g);
    for (const auto& bf : boundary_faces(g)) {
        double v = 0;
        switch (bf.side) {
            case Side::Bottom: v = -f.fy(bf.ci, 0); break;
            case Side::Right:  v =  f.fx(g.nx, bf.cj); break;
            case Side::Top:    v =  f.fy(bf.ci, g.ny); break;
            case Side::Left:   v = -f.fx(0, bf.cj); break;
        }
        t.values[bf.slot] = v;
    }
    return t;
}

double boundary_integral(const BoundaryTrace& f, const ScalarField& u) {
    require_same_grid(f.grid, u.grid, "boundary_integral");
    double s = 0;
    for (const auto& bf : boundary_faces(f.grid))
        s += f.values[bf.slot] * u.at(bf.ci, bf.cj) * bf.ds;
    return s;
}

double boundary_integral(const BoundaryTrace& f) {
    double s = 0;
    for (const auto& bf : boundary_faces(f.grid))
        s += f.values[bf.slot] * bf.ds;
    return s;
}

double mean(const ScalarField& u) {
    double s = 0;
    for (double v : u.values) s += v;
    return s / static_cast<double>(u.values.size());
}

ScalarField mean_zero(const ScalarField& u) {
    double m = mean(u);
    ScalarField r = u;
    for (double& v : r.values) v -= m;
    return r;
}

} // namespace nlg
