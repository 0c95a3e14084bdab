#include "nlg/field_io.hpp"

#include "nlg/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace nlg {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void write_header(std::ostream& os, const char* kind, const Grid& g) {
    os << "NLG-FIELD v1 " << kind << ' ' << g.nx << ' ' << g.ny << ' '
       << format_double(g.hx) << ' ' << format_double(g.hy) << '\n';
}

void write_block(std::ostream& os, const std::vector<double>& v, int per_row) {
    for (size_t k = 0; k < v.size(); ++k) {
        os << format_double(v[k]);
        os << ((static_cast<int>(k) % per_row == per_row - 1) ? '\n' : ' ');
    }
    if (!v.empty() && static_cast<int>(v.size()) % per_row != 0) os << '\n';
}

struct Header {
    std::string kind;
    Grid grid;
};

Header read_header(std::istream& is, const std::string& path) {
    std::string magic, version, kind;
    int nx = 0, ny = 0;
    double hx = 0, hy = 0;
    if (!(is >> magic >> version >> kind >> nx >> ny >> hx >> hy))
        throw IoError(path + ": malformed NLG-FIELD header");
    if (magic != "NLG-FIELD" || version != "v1")
        throw IoError(path + ": not an NLG-FIELD v1 file");
    try {
        return {kind, Grid(nx, ny, hx, hy)};
    } catch (const Error& e) {
        throw IoError(path + ": invalid grid in header: " + e.what());
    }
}

void read_values(std::istream& is, std::vector<double>& out, const std::string& path) {
    for (double& v : out)
        if (!(is >> v))
            throw IoError(path + ": truncated payload");
    double extra;
    if (is >> extra)
        throw IoError(path + ": trailing data");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open: " + path);
    return is;
}

} // namespace

void write_field(const std::string& path, const ScalarField& f) {
    auto os = open_out(path);
    write_header(os, "scalar", f.grid);
    write_block(os, f.values, f.grid.nx);
}

void write_field(const std::string& path, const VectorField& f) {
    auto os = open_out(path);
    write_header(os, "vector", f.grid);
    write_block(os, f.x, f.grid.nx + 1);
    write_block(os, f.y, f.grid.nx);
}

void write_field(const std::string& path, const BoundaryTrace& f) {
    auto os = open_out(path);
    write_header(os, "trace", f.grid);
    write_block(os, f.values, f.grid.nx + f.grid.ny);
}

void write_field(const std::string& path, const TensorField& f) {
    auto os = open_out(path);
    write_header(os, "tensor", f.grid);
    write_block(os, f.m11, f.grid.nx);
    write_block(os, f.m12, f.grid.nx);
    write_block(os, f.m22, f.grid.nx);
}

std::string peek_kind(const std::string& path) {
    auto is = open_in(path);
    return read_header(is, path).kind;
}

ScalarField read_scalar(const std::string& path) {
    auto is = open_in(path);
    Header h = read_header(is, path);
    if (h.kind != "scalar") throw IoError(path + ": expected scalar, got " + h.kind);
    ScalarField f(h.grid);
    read_values(is, f.values, path);
    f.check_finite(path.c_str());
    return f;
}

VectorField read_vector(const std::string& path) {
    auto is = open_in(path);
    Header h = read_header(is, path);
    if (h.kind != "vector") throw IoError(path + ": expected vector, got " + h.kind);
    VectorField f(h.grid);
    std::vector<double> all(f.x.size() + f.y.size());
    read_values(is, all, path);
    std::copy(all.begin(), all.begin() + static_cast<long>(f.x.size()), f.x.begin());
    std::copy(all.begin() + static_cast<long>(f.x.size()), all.end(), f.y.begin());
    f.check_finite(path.c_str());
    return f;
}

BoundaryTrace read_trace(const std::string& path) {
    auto is = open_in(path);
    Header h = read_header(is, path);
    if (h.kind != "trace") throw IoError(path + ": expected trace, got " + h.kind);
    BoundaryTrace f(h.grid);
    read_values(is, f.values, path);
    f.check_finite(path.c_str());
    return f;
}

TensorField read_tensor(const std::string& path) {
    auto is = open_in(path);
    Header h = read_header(is, path);
    if (h.kind != "tensor") throw IoError(path + ": expected tensor, got " + h.kind);
    TensorField f(h.grid);
    std::vector<double> all(3 * f.m11.size());
    read_values(is, all, path);
    size_t n = f.m11.size();
    std::copy(all.begin(), all.begin() + static_cast<long>(n), f.m11.begin());
    std::copy(all.begin() + static_cast<long>(n), all.begin() + static_cast<long>(2 * n), f.m12.begin());
    std::copy(all.begin() + static_cast<long>(2 * n), all.end(), f.m22.begin());
    return f;
}

} // namespace nlg
