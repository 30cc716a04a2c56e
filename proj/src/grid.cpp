#include "grid.hpp"

#include "errors.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>

namespace tracelab {

std::size_t Grid::size() const {
    std::size_t s = 1;
    for (int k : n) s *= static_cast<std::size_t>(k);
    return s;
}

double Grid::xi(int axis, int i) const {
    return std::numbers::pi * wavenumber(i, n[axis]) / L;
}

double Grid::nyquist(int axis) const { return std::numbers::pi * (n[axis] / 2) / L; }

double Grid::max_nyquist() const {
    double m = 0.0;
    for (int a = 0; a < dim(); ++a) m = std::max(m, nyquist(a));
    return m;
}

std::size_t Grid::stride(int axis) const {
    std::size_t s = 1;
    for (int a = dim() - 1; a > axis; --a) s *= static_cast<std::size_t>(n[a]);
    return s;
}

Grid Grid::boundary() const {
    Grid b;
    b.n.assign(n.begin() + (n.empty() ? 0 : 1), n.end());
    b.L = L;
    b.offset = false;
    return b;
}

void Grid::validate() const {
    if (!(L > 0.0) || !std::isfinite(L)) throw Error(Status::Arg, "grid half-period must be positive");
    for (int k : n)
        if (k < 2 || !std::has_single_bit(static_cast<unsigned>(k)))
            throw Error(Status::Arg, "grid axis size must be a power of two >= 2, got " + std::to_string(k));
}

GridFunction::GridFunction(Grid g, int r_, double gamma_) : grid(std::move(g)), r(r_), gamma(gamma_) {
    if (r < 1) throw Error(Status::Arg, "fiber dimension must be >= 1");
    v.assign(grid.size() * static_cast<std::size_t>(r), cplx(0.0, 0.0));
}

bool GridFunction::finite() const {
    for (const auto& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

double measure_support_margin(const GridFunction& f, double rel) {
    const Grid& g = f.grid;
    double cut = rel * f.max_abs();
    if (cut == 0.0) return 1.0;
    std::vector<double> reach(static_cast<std::size_t>(g.dim()), 0.0);
    std::vector<int> idx(static_cast<std::size_t>(g.dim()), 0);
    for (std::size_t node = 0; node < g.size(); ++node) {
        double m = 0.0;
        for (int c = 0; c < f.r; ++c) m = std::max(m, std::abs(f.at(node, c)));
        if (m > cut)
            for (int a = 0; a < g.dim(); ++a) reach[a] = std::max(reach[a], std::abs(g.x(a, idx[a])) + 0.5 * g.h(a));
        for (int a = g.dim() - 1; a >= 0; --a) {
            if (++idx[a] < g.n[a]) break;
            idx[a] = 0;
        }
    }
    double margin = 1.0;
    for (double r : reach) margin = std::min(margin, std::max(0.0, (g.L - r) / g.L));
    return margin;
}

double effective_support_margin(const GridFunction& f) {
    return f.support_margin < 0.0 ? measure_support_margin(f) : f.support_margin;
}

Spectrum::Spectrum(Grid g, int r_) : grid(std::move(g)), r(r_) {
    c.assign(grid.size() * static_cast<std::size_t>(r), cplx(0.0, 0.0));
}

namespace {
void check_same(const Grid& a, int ra, const Grid& b, int rb) {
    if (!(a == b) || ra != rb) throw Error(Status::Arg, "grid or fiber mismatch");
}
}  // namespace

GridFunction& operator+=(GridFunction& a, const GridFunction& b) {
    check_same(a.grid, a.r, b.grid, b.r);
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
    return a;
}
GridFunction& operator-=(GridFunction& a, const GridFunction& b) {
    check_same(a.grid, a.r, b.grid, b.r);
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] -= b.v[i];
    return a;
}
GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(cplx s, GridFunction a) {
    for (auto& z : a.v) z *= s;
    return a;
}
Spectrum& operator+=(Spectrum& a, const Spectrum& b) {
    check_same(a.grid, a.r, b.grid, b.r);
    for (std::size_t i = 0; i < a.c.size(); ++i) a.c[i] += b.c[i];
    return a;
}
Spectrum& operator-=(Spectrum& a, const Spectrum& b) {
    check_same(a.grid, a.r, b.grid, b.r);
    for (std::size_t i = 0; i < a.c.size(); ++i) a.c[i] -= b.c[i];
    return a;
}

// ---- binary format -------------------------------------------------------

namespace {

constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::vector<std::uint8_t>& out, T value) {
    static_assert(std::endian::native == std::endian::little, "little-endian host required");
    std::uint8_t buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.insert(out.end(), buf, buf + sizeof(T));
}

template <class T>
T get(const std::vector<std::uint8_t>& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw Error(Status::IO, "truncated grid function file");
    T value;
    std::memcpy(&value, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return value;
}

}  // namespace

std::vector<std::uint8_t> encode_grid_function(const GridFunction& f) {
    std::vector<std::uint8_t> out{'W', 'T', 'L', 'B'};
    out.reserve(64 + f.v.size() * 16);
    put<std::uint32_t>(out, kVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid.dim()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(f.r));
    for (int k : f.grid.n) put<std::uint32_t>(out, static_cast<std::uint32_t>(k));
    put<double>(out, f.grid.L);
    put<std::uint8_t>(out, f.grid.offset ? 1 : 0);
    put<double>(out, f.gamma);
    for (const auto& z : f.v) {
        put<double>(out, z.real());
        put<double>(out, z.imag());
    }
    return out;
}

GridFunction decode_grid_function(const std::vector<std::uint8_t>& in) {
    if (in.size() < 4 || std::memcmp(in.data(), "WTLB", 4) != 0)
        throw Error(Status::IO, "bad magic in grid function file");
    std::size_t pos = 4;
    auto version = get<std::uint32_t>(in, pos);
    if (version != kVersion) throw Error(Status::IO, "unsupported grid function version " + std::to_string(version));
    auto d = get<std::uint32_t>(in, pos);
    auto r = get<std::uint32_t>(in, pos);
    if (d > 8 || r < 1 || r > 64) throw Error(Status::IO, "implausible grid function header");
    Grid g;
    for (std::uint32_t a = 0; a < d; ++a) g.n.push_back(static_cast<int>(get<std::uint32_t>(in, pos)));
    g.L = get<double>(in, pos);
    g.offset = get<std::uint8_t>(in, pos) != 0;
    double gamma = get<double>(in, pos);
    g.validate();
    GridFunction f(g, static_cast<int>(r), gamma);
    if (in.size() - pos != f.v.size() * 16) throw Error(Status::IO, "grid function payload size mismatch");
    for (auto& z : f.v) {
        double re = get<double>(in, pos);
        double im = get<double>(in, pos);
        z = cplx(re, im);
    }
    return f;
}

void save_grid_function(const GridFunction& f, const std::string& path) {
    auto bytes = encode_grid_function(f);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(Status::IO, "cannot open " + path + " for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error(Status::IO, "write failed: " + path);
}

GridFunction load_grid_function(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(Status::IO, "cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return decode_grid_function(bytes);
}

}  // namespace tracelab
