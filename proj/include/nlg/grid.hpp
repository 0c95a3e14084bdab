#pragma once

#include "nlg/errors.hpp"

#include <array>
#include <vector>

namespace nlg {

/// Uniform rectangular grid on [ox, ox+nx*hx] x [oy, oy+ny*hy].
/// Scalars live at cell centers; vector components at faces (MAC layout):
/// x-components on vertical faces ((nx+1)*ny of them), y-components on
/// horizontal faces (nx*(ny+1)). Boundary faces enumerate the perimeter
/// once, ordered bottom, right, top, left, each edge in increasing
/// coordinate order.
struct Grid {
    int nx = 0, ny = 0;
    double hx = 0, hy = 0;
    double ox = 0, oy = 0;

    Grid() = default;
    Grid(int nx_, int ny_, double hx_, double hy_, double ox_ = 0, double oy_ = 0)
        : nx(nx_), ny(ny_), hx(hx_), hy(hy_), ox(ox_), oy(oy_) {
        if (nx < 2 || ny < 2)
            throw InvalidFieldError("Grid: need nx >= 2 and ny >= 2");
        if (!(hx > 0) || !(hy > 0))
            throw InvalidFieldError("Grid: spacings must be positive");
    }

    int cells() const { return nx * ny; }
    int xfaces() const { return (nx + 1) * ny; }
    int yfaces() const { return nx * (ny + 1); }
    int bfaces() const { return 2 * (nx + ny); }

    double lx() const { return nx * hx; }
    double ly() const { return ny * hy; }
    double cell_area() const { return hx * hy; }

    // cell (i,j), i in [0,nx), j in [0,ny)
    int cidx(int i, int j) const { return j * nx + i; }
    // vertical face (i,j), i in [0,nx], j in [0,ny)
    int xidx(int i, int j) const { return j * (nx + 1) + i; }
    // horizontal face (i,j), i in [0,nx), j in [0,ny]
    int yidx(int i, int j) const { return j * nx + i; }

    double cell_x(int i) const { return ox + (i + 0.5) * hx; }
    double cell_y(int j) const { return oy + (j + 0.5) * hy; }

    bool operator==(const Grid& o) const {
        return nx == o.nx && ny == o.ny && hx == o.hx && hy == o.hy &&
               ox == o.ox && oy == o.oy;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

enum class Side { Bottom, Right, Top, Left };

/// One boundary face: its slot in a BoundaryTrace, the adjacent cell,
/// the outward unit normal, the face length, and the face midpoint.
struct BoundaryFace {
    int slot;       // index into BoundaryTrace values
    Side side;
    int ci, cj;     // adjacent cell
    double nux, nuy; // outward unit normal
    double ds;      // face length
    double x, y;    // face midpoint
};

/// Enumerates the perimeter exactly once (bottom, right, top, left).
std::vector<BoundaryFace> boundary_faces(const Grid& g);

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (a != b)
        throw InvalidFieldError(std::string("grid mismatch in ") + what);
}

} // namespace nlg
