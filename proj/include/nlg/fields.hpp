#pragma once

#include "nlg/grid.hpp"

#include <cmath>
#include <vector>

namespace nlg {

/// Cell-centered scalar field.
struct ScalarField {
    Grid grid;
    std::vector<double> values; // row-major, j*nx+i

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(g), values(static_cast<size_t>(g.cells()), fill) {}

    double& at(int i, int j) { return values[grid.cidx(i, j)]; }
    double at(int i, int j) const { return values[grid.cidx(i, j)]; }

    void check_finite(const char* what = "ScalarField") const;
};

/// Staggered (MAC) vector field: x-components on vertical faces,
/// y-components on horizontal faces.
struct VectorField {
    Grid grid;
    std::vector<double> x; // (nx+1)*ny, row-major j*(nx+1)+i
    std::vector<double> y; // nx*(ny+1), row-major j*nx+i

    VectorField() = default;
    explicit VectorField(const Grid& g, double fill = 0.0)
        : grid(g),
          x(static_cast<size_t>(g.xfaces()), fill),
          y(static_cast<size_t>(g.yfaces()), fill) {}

    double& fx(int i, int j) { return x[grid.xidx(i, j)]; }
    double fx(int i, int j) const { return x[grid.xidx(i, j)]; }
    double& fy(int i, int j) { return y[grid.yidx(i, j)]; }
    double fy(int i, int j) const { return y[grid.yidx(i, j)]; }

    void check_finite(const char* what = "VectorField") const;
};

/// One real per boundary face, ordered bottom, right, top, left.
struct BoundaryTrace {
    Grid grid;
    std::vector<double> values;

    BoundaryTrace() = default;
    explicit BoundaryTrace(const Grid& g, double fill = 0.0)
        : grid(g), values(static_cast<size_t>(g.bfaces()), fill) {}

    void check_finite(const char* what = "BoundaryTrace") const;
};

struct CellVector {
    double x = 0, y = 0;
};

// ---- elementwise helpers ----------------------------------------------

double linf(const std::vector<double>& v);
double max_abs(const ScalarField& u);
double max_abs(const VectorField& f);
double max_abs(const BoundaryTrace& t);

/// Area-weighted L2 inner product of cell fields: sum u*v*hx*hy.
double dot(const ScalarField& u, const ScalarField& v);

/// Face-weighted L2 inner product: every face carries measure hx*hy.
double dot(const VectorField& f, const VectorField& g);

inline double norm2(const ScalarField& u) { return std::sqrt(dot(u, u)); }
inline double norm2(const VectorField& f) { return std::sqrt(dot(f, f)); }

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double c, const ScalarField& a);
VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double c, const VectorField& a);
BoundaryTrace operator*(double c, const BoundaryTrace& t);

/// Per-cell 2-vector gather used by the optimization and its certificates:
/// cell (i,j) owns x-face (i+1,j) and y-face (i,j+1) (forward-difference
/// pairing). Left/bottom boundary faces belong to no cell.
CellVector gather_owned(const VectorField& f, int i, int j);

/// Scatter the owned pair of cell (i,j) back to its faces.
void scatter_owned(VectorField& f, int i, int j, const CellVector& v);

/// Centered per-cell gather: average of the two adjacent faces per
/// component. Used for reporting physical fields, not for certificates.
CellVector gather_centered(const VectorField& f, int i, int j);

} // namespace nlg
