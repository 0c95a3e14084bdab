#include "nlg/fields.hpp"

#include <algorithm>
#include <cmath>

namespace nlg {

std::vector<BoundaryFace> boundary_faces(const Grid& g) {
    std::vector<BoundaryFace> out;
    out.reserve(static_cast<size_t>(g.bfaces()));
    int slot = 0;
    for (int i = 0; i < g.nx; ++i)
        out.push_back({slot++, Side::Bottom, i, 0, 0.0, -1.0, g.hx, g.cell_x(i), g.oy});
    for (int j = 0; j < g.ny; ++j)
        out.push_back({slot++, Side::Right, g.nx - 1, j, 1.0, 0.0, g.hy, g.ox + g.lx(), g.cell_y(j)});
    for (int i = 0; i < g.nx; ++i)
        out.push_back({slot++, Side::Top, i, g.ny - 1, 0.0, 1.0, g.hx, g.cell_x(i), g.oy + g.ly()});
    for (int j = 0; j < g.ny; ++j)
        out.push_back({slot++, Side::Left, 0, j, -1.0, 0.0, g.hy, g.ox, g.cell_y(j)});
    return out;
}

static void check_vec_finite(const std::vector<double>& v, const char* what) {
    for (double a : v)
        if (!std::isfinite(a))
            throw InvalidFieldError(std::string(what) + ": non-finite entry");
}

void ScalarField::check_finite(const char* what) const { check_vec_finite(values, what); }
void VectorField::check_finite(const char* what) const {
    check_vec_finite(x, what);
    check_vec_finite(y, what);
}
void BoundaryTrace::check_finite(const char* what) const { check_vec_finite(values, what); }

double linf(const std::vector<double>& v) {
    double m = 0;
    for (double a : v) m = std::max(m, std::abs(a));
    return m;
}

double max_abs(const ScalarField& u) { return linf(u.values); }
double max_abs(const VectorField& f) { return std::max(linf(f.x), linf(f.y)); }
double max_abs(const BoundaryTrace& t) { return linf(t.values); }

double dot(const ScalarField& u, const ScalarField& v) {
    require_same_grid(u.grid, v.grid, "dot(scalar,scalar)");
    double s = 0;
    for (size_t k = 0; k < u.values.size(); ++k) s += u.values[k] * v.values[k];
    return s * u.grid.cell_area();
}

double dot(const VectorField& f, const VectorField& g) {
    require_same_grid(f.grid, g.grid, "dot(vector,vector)");
    double s = 0;
    for (size_t k = 0; k < f.x.size(); ++k) s += f.x[k] * g.x[k];
    for (size_t k = 0; k < f.y.size(); ++k) s += f.y[k] * g.y[k];
    return s * f.grid.cell_area();
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "scalar +");
    ScalarField r = a;
    for (size_t k = 0; k < r.values.size(); ++k) r.values[k] += b.values[k];
    return r;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "scalar -");
    ScalarField r = a;
    for (size_t k = 0; k < r.values.size(); ++k) r.values[k] -= b.values[k];
    return r;
}

ScalarField operator*(double c, const ScalarField& a) {
    ScalarField r = a;
    for (double& v : r.values) v *= c;
    return r;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid, b.grid, "vector +");
    VectorField r = a;
    for (size_t k = 0; k < r.x.size(); ++k) r.x[k] += b.x[k];
    for (size_t k = 0; k < r.y.size(); ++k) r.y[k] += b.y[k];
    return r;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid, b.grid, "vector -");
    VectorField r = a;
    for (size_t k = 0; k < r.x.size(); ++k) r.x[k] -= b.x[k];
    for (size_t k = 0; k < r.y.size(); ++k) r.y[k] -= b.y[k];
    return r;
}

VectorField operator*(double c, const VectorField& a) {
    VectorField r = a;
    for (double& v : r.x) v *= c;
    for (double& v : r.y) v *= c;
    return r;
}

BoundaryTrace operator*(double c, const BoundaryTrace& t) {
    BoundaryTrace r = t;
    for (double& v : r.values) v *= c;
    return r;
}

CellVector gather_owned(const VectorField& f, int i, int j) {
    return {f.fx(i + 1, j), f.fy(i, j + 1)};
}

void scatter_owned(VectorField& f, int i, int j, const CellVector& v) {
    f.fx(i + 1, j) = v.x;
    f.fy(i, j + 1) = v.y;
}

CellVector gather_centered(const VectorField& f, int i, int j) {
    return {0.5 * (f.fx(i, j) + f.fx(i + 1, j)),
            0.5 * (f.fy(i, j) + f.fy(i, j + 1))};
}

} // namespace nlg
