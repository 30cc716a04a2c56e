#include "spectral.hpp"

#include "errors.hpp"
#include "fft.hpp"

#include <bit>
#include <cmath>

namespace tracelab {

double radius(const double* xi, int d) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += xi[a] * xi[a];
    return std::sqrt(s);
}

void multiply(Spectrum& s, const std::function<cplx(const double* xi, bool nyq)>& symbol) {
    const Grid& g = s.grid;
    for_each_mode(g, [&](std::size_t slot, const double* xi, const int* idx) {
        cplx m = symbol(xi, on_nyquist(g, idx));
        for (int c = 0; c < s.r; ++c) s.c[slot * s.r + c] *= m;
    });
}

void multiply_radial(Spectrum& s, const std::function<double(double)>& symbol) {
    const int d = s.grid.dim();
    for_each_mode(s.grid, [&](std::size_t slot, const double* xi, const int*) {
        double m = symbol(radius(xi, d));
        for (int c = 0; c < s.r; ++c) s.c[slot * s.r + c] *= m;
    });
}

void multiply_matrix(Spectrum& s, const std::function<void(const double* xi, cplx* out)>& mat) {
    const int r = s.r;
    std::vector<cplx> m(static_cast<std::size_t>(r * r)), tmp(static_cast<std::size_t>(r));
    for_each_mode(s.grid, [&](std::size_t slot, const double* xi, const int*) {
        mat(xi, m.data());
        cplx* v = &s.c[slot * r];
        for (int i = 0; i < r; ++i) {
            cplx acc = 0.0;
            for (int j = 0; j < r; ++j) acc += m[static_cast<std::size_t>(i * r + j)] * v[j];
            tmp[i] = acc;
        }
        for (int i = 0; i < r; ++i) v[i] = tmp[i];
    });
}

void differentiate(Spectrum& s, const std::vector<int>& alpha) {
    const Grid& g = s.grid;
    if (static_cast<int>(alpha.size()) != g.dim()) throw Error(Status::Arg, "multi-index length != grid dimension");
    bool trivial = true;
    for (int a : alpha) {
        if (a < 0) throw Error(Status::Arg, "negative derivative order");
        if (a) trivial = false;
    }
    if (trivial) return;
    for_each_mode(g, [&](std::size_t slot, const double* xi, const int* idx) {
        cplx m(1.0, 0.0);
        for (int a = 0; a < g.dim(); ++a) {
            if (alpha[a] == 0) continue;
            if (idx[a] == g.n[a] / 2 && alpha[a] % 2 == 1) {
                m = 0.0;
                break;
            }
            m *= std::pow(cplx(0.0, xi[a]), alpha[a]);
        }
        for (int c = 0; c < s.r; ++c) s.c[slot * s.r + c] *= m;
    });
}

void bessel(Spectrum& s, double order) {
    if (order == 0.0) return;
    multiply_radial(s, [order](double rho) { return std::pow(1.0 + rho * rho, 0.5 * order); });
}

Spectrum evaluate_axis0(const Spectrum& s, double t, double* tail) {
    const Grid& g = s.grid;
    if (g.dim() == 0) throw Error(Status::Arg, "boundary evaluation needs d >= 1");
    Spectrum out(g.boundary(), s.r);
    const int n0 = g.n[0];
    const std::size_t m = g.stride(0) * static_cast<std::size_t>(s.r);
    double nyq_mass = 0.0;
    for (int i = 0; i < n0; ++i) {
        const cplx* row = &s.c[static_cast<std::size_t>(i) * m];
        if (i == n0 / 2) {
            for (std::size_t j = 0; j < m; ++j) nyq_mass += std::abs(row[j]);
            continue;
        }
        cplx e = t == 0.0 ? cplx(1.0, 0.0) : std::polar(1.0, g.xi(0, i) * t);
        for (std::size_t j = 0; j < m; ++j) out.c[j] += e * row[j];
    }
    if (tail) *tail += nyq_mass;
    return out;
}

void eval_column(const std::vector<cplx>& col, const Grid& g, int r, double t, std::size_t tnode, cplx* out,
                 int deriv) {
    const int n0 = g.n[0];
    const std::size_t m = g.stride(0) * static_cast<std::size_t>(r);
    for (int c = 0; c < r; ++c) out[c] = 0.0;
    for (int i = 0; i < n0; ++i) {
        if (i == n0 / 2) continue;
        double xi = g.xi(0, i);
        cplx e = std::polar(1.0, xi * t);
        if (deriv) e *= std::pow(cplx(0.0, xi), deriv);
        const cplx* v = &col[static_cast<std::size_t>(i) * m + tnode * static_cast<std::size_t>(r)];
        for (int c = 0; c < r; ++c) out[c] += e * v[c];
    }
}

namespace {

Spectrum upsample_axis(const Spectrum& s, int axis, int factor) {
    if (factor == 1) return s;
    if (factor < 1 || !std::has_single_bit(static_cast<unsigned>(factor)))
        throw Error(Status::Arg, "upsampling factor must be a power of two");
    Grid ng = s.grid;
    const int n = s.grid.n[axis];
    const int nn = n * factor;
    ng.n[axis] = nn;
    Spectrum out(ng, s.r);
    std::size_t outer = 1;
    for (int a = 0; a < axis; ++a) outer *= static_cast<std::size_t>(s.grid.n[a]);
    const std::size_t inner = s.grid.stride(axis) * static_cast<std::size_t>(s.r);
    for (std::size_t o = 0; o < outer; ++o) {
        for (int i = 0; i < n; ++i) {
            int k = Grid::wavenumber(i, n);
            const cplx* src = &s.c[(o * n + static_cast<std::size_t>(i)) * inner];
            auto put = [&](int kk, double w) {
                int ni = kk >= 0 ? kk : nn + kk;
                cplx* dst = &out.c[(o * nn + static_cast<std::size_t>(ni)) * inner];
                for (std::size_t j = 0; j < inner; ++j) dst[j] += w * src[j];
            };
            if (k == -n / 2) {
                put(-n / 2, 0.5);
                put(n / 2, 0.5);
            } else {
                put(k, 1.0);
            }
        }
    }
    return out;
}

}  // namespace

Spectrum upsample(const Spectrum& s, int factor) {
    Spectrum out = s;
    for (int a = 0; a < s.grid.dim(); ++a) out = upsample_axis(out, a, factor);
    return out;
}

Spectrum upsample_axis0(const Spectrum& s, int factor) { return upsample_axis(s, 0, factor); }

double tail_l2(const Spectrum& s, double cutoff) {
    const Grid& g = s.grid;
    double acc = 0.0;
    for_each_mode(g, [&](std::size_t slot, const double* xi, const int* idx) {
        if (radius(xi, g.dim()) > cutoff || on_nyquist(g, idx))
            for (int c = 0; c < s.r; ++c) acc += std::norm(s.c[slot * s.r + c]);
    });
    return std::sqrt(acc);
}

double l2(const Spectrum& s) {
    double acc = 0.0;
    for (const auto& z : s.c) acc += std::norm(z);
    return std::sqrt(acc);
}

GridFunction derivative(const GridFunction& f, const std::vector<int>& alpha) {
    Spectrum s = to_coeffs(f);
    differentiate(s, alpha);
    return from_coeffs(s, f.gamma);
}

std::vector<std::vector<int>> multi_indices(int d, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> a(static_cast<std::size_t>(d), 0);
    for (int order = 0; order <= k; ++order) {
        std::function<void(int, int)> rec = [&](int axis, int left) {
            if (axis == d - 1 || d == 0) {
                if (d > 0) a[axis] = left;
                if (d > 0 || left == 0) out.push_back(a);
                return;
            }
            for (int v = left; v >= 0; --v) {
                a[axis] = v;
                rec(axis + 1, left - v);
            }
        };
        rec(0, order);
    }
    return out;
}

}  // namespace tracelab
