#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tracelab {

using cplx = std::complex<double>;

/// Periodized grid on the torus [-L, L)^d. Axis 0 is the normal variable x1;
/// with `offset` its nodes sit at cell midpoints so that x1 = 0 is never a node.
struct Grid {
    std::vector<int> n;
    double L = 0.0;
    bool offset = true;

    int dim() const { return static_cast<int>(n.size()); }
    std::size_t size() const;
    double h(int axis) const { return 2.0 * L / n[axis]; }
    double shift(int axis) const { return (axis == 0 && offset) ? 0.5 : 0.0; }
    double x(int axis, int i) const { return -L + (i + shift(axis)) * h(axis); }
    /// Signed wavenumber of FFT slot i (k in [-n/2, n/2)).
    static int wavenumber(int i, int nn) { return i < nn / 2 ? i : i - nn; }
    double xi(int axis, int i) const;
    double nyquist(int axis) const;
    double max_nyquist() const;
    /// Stride of axis a in a row-major node index (last axis fastest).
    std::size_t stride(int axis) const;
    /// Grid of the tangential variables (axis 0 removed, no offset).
    Grid boundary() const;
    void validate() const;
    bool operator==(const Grid& o) const { return n == o.n && L == o.L && offset == o.offset; }
};

/// Sampled C^r-valued function. Values are stored node-major with the r fiber
/// components contiguous: v[node * r + c].
struct GridFunction {
    Grid grid;
    int r = 1;
    double gamma = 0.0;
    /// Declared fraction of each half-period free of essential support, measured
    /// from the seam at |x_a| = L. Negative means undeclared (measured on demand).
    double support_margin = -1.0;
    std::vector<cplx> v;

    GridFunction() = default;
    GridFunction(Grid g, int r_, double gamma_ = 0.0);

    std::size_t nodes() const { return grid.size(); }
    cplx& at(std::size_t node, int c = 0) { return v[node * r + c]; }
    const cplx& at(std::size_t node, int c = 0) const { return v[node * r + c]; }
    bool finite() const;
    double max_abs() const;
};

/// min over axes of (L - R_a) / L, R_a the largest |x_a| with |f| > rel * max|f|.
double measure_support_margin(const GridFunction& f, double rel = 1e-10);
/// The declared margin, or the measured one when undeclared.
double effective_support_margin(const GridFunction& f);

/// Spectral coefficients f(x) = sum_k c_k exp(i xi_k . x), same layout as GridFunction.
struct Spectrum {
    Grid grid;
    int r = 1;
    std::vector<cplx> c;

    Spectrum() = default;
    Spectrum(Grid g, int r_);
};

GridFunction& operator+=(GridFunction& a, const GridFunction& b);
GridFunction& operator-=(GridFunction& a, const GridFunction& b);
GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(cplx s, GridFunction a);
Spectrum& operator+=(Spectrum& a, const Spectrum& b);
Spectrum& operator-=(Spectrum& a, const Spectrum& b);

/// Binary container: "WTLB", u32 version, u32 d, u32 r, u32 N[d], f64 L,
/// u8 offset, f64 gamma, then interleaved (re, im) f64 payload; little-endian.
void save_grid_function(const GridFunction& f, const std::string& path);
GridFunction load_grid_function(const std::string& path);
std::vector<std::uint8_t> encode_grid_function(const GridFunction& f);
GridFunction decode_grid_function(const std::vector<std::uint8_t>& bytes);

}  // namespace tracelab
