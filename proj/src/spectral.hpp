#pragma once

#include "grid.hpp"

#include <functional>
#include <vector>

namespace tracelab {

/// Calls fn(slot, xi, idx) for each frequency slot; xi and idx have grid.dim()
/// entries (idx[a] == n[a]/2 marks the Nyquist slot of axis a).
template <class Fn>
void for_each_mode(const Grid& g, Fn&& fn) {
    const int d = g.dim();
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> xi(static_cast<std::size_t>(d), 0.0);
    std::vector<std::vector<double>> tab(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a)
        for (int i = 0; i < g.n[a]; ++i) tab[a].push_back(g.xi(a, i));
    const std::size_t total = g.size();
    for (std::size_t slot = 0; slot < total; ++slot) {
        for (int a = 0; a < d; ++a) xi[a] = tab[a][static_cast<std::size_t>(idx[a])];
        fn(slot, static_cast<const double*>(xi.data()), static_cast<const int*>(idx.data()));
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[a] < g.n[a]) break;
            idx[a] = 0;
        }
    }
}

inline bool on_nyquist(const Grid& g, const int* idx) {
    for (int a = 0; a < g.dim(); ++a)
        if (idx[a] == g.n[a] / 2) return true;
    return false;
}

/// Calls fn(node, x) for each grid node.
template <class Fn>
void for_each_node(const Grid& g, Fn&& fn) {
    const int d = g.dim();
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> x(static_cast<std::size_t>(d), 0.0);
    const std::size_t total = g.size();
    for (std::size_t node = 0; node < total; ++node) {
        for (int a = 0; a < d; ++a) x[a] = g.x(a, idx[a]);
        fn(node, x.data());
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[a] < g.n[a]) break;
            idx[a] = 0;
        }
    }
}

double radius(const double* xi, int d);

/// Scalar symbol multiplication in place.
void multiply(Spectrum& s, const std::function<cplx(const double* xi, bool nyq)>& symbol);
/// Radial real symbol m(|xi|).
void multiply_radial(Spectrum& s, const std::function<double(double)>& symbol);
/// Pointwise r x r matrix symbol; mat(xi, out) writes row-major r*r entries.
void multiply_matrix(Spectrum& s, const std::function<void(const double* xi, cplx* out)>& mat);

/// (i xi)^alpha; slots on the Nyquist line of an axis with odd order are zeroed.
void differentiate(Spectrum& s, const std::vector<int>& alpha);
GridFunction derivative(const GridFunction& f, const std::vector<int>& alpha);
/// (1 + |xi|^2)^{s/2}.
void bessel(Spectrum& s, double order);

/// Evaluate at x1 = t for every tangential frequency: returns the boundary
/// spectrum. The Nyquist slot of axis 0 is dropped and its l1 mass added to *tail.
Spectrum evaluate_axis0(const Spectrum& s, double t, double* tail = nullptr);
/// Values along axis 0 at arbitrary t from axis0_coeffs output (k0-major).
void eval_column(const std::vector<cplx>& col_coeffs, const Grid& g, int r, double t, std::size_t tangential_node,
                 cplx* out, int deriv = 0);

/// Zero-pad every axis by `factor` (power of two). Band-limited data only.
Spectrum upsample(const Spectrum& s, int factor);
/// Zero-pad axis 0 only.
Spectrum upsample_axis0(const Spectrum& s, int factor);

/// l2 mass of coefficients where |xi| > cutoff (the Nyquist line always counts).
double tail_l2(const Spectrum& s, double cutoff);
double l2(const Spectrum& s);

/// All multi-indices in d variables with |alpha| <= k (graded order).
std::vector<std::vector<int>> multi_indices(int d, int k);

}  // namespace tracelab
