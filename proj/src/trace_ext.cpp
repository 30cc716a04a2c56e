#include "trace_ext.hpp"

#include "errors.hpp"
#include "fft.hpp"
#include "quadrature.hpp"
#include "spectral.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace tracelab {

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

cplx ipow(int m) {
    static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[m & 3];
}

Jet eta0_shape(double xi, int order) {
    Jet x = Jet::variable(xi, order);
    Jet u = 1.0 + (-1.0) * (x * x);
    return flat_exp(u, 1.0);
}

Jet eta_shape(double xi, int order) {
    Jet u = 2.0 * (Jet::variable(xi, order) + Jet(order, -1.0));
    Jet v = u * (1.0 + (-1.0) * u);
    return flat_exp(v, 1.0);
}

}  // namespace

EtaFamily::EtaFamily(const Grid& full, int top_block, int m_max, double sharpness)
    : grid_(full), J_(top_block), m_max_(m_max), gen_(sharpness) {
    grid_.validate();
    if (grid_.dim() < 1) throw Error(Status::Arg, "extension kernels need d >= 1");
    if (top_block < 0) throw Error(Status::Arg, "top block must be >= 0");
    if (m_max < 0 || m_max > 8) throw Error(Status::Arg, "m_max out of range [0, 8]");
    const int n0 = grid_.n[0];
    const double L = grid_.L;
    const int jmax = std::max(J_, 1);
    if (1.5 * std::ldexp(1.0, jmax) >= grid_.nyquist(0))
        throw Error(Status::Arg, "normal axis too coarse for top block " + std::to_string(J_));

    c_eta0_ = 2.0 * kPi / integrate_gl([](double x) { return eta0_shape(x, 0).value(); }, -1.0, 1.0, 20, 64);
    c_eta_ = 2.0 * kPi / integrate_gl([](double x) { return eta_shape(x, 0).value(); }, 1.0, 1.5, 20, 64);

    std::vector<double> xi(static_cast<std::size_t>(n0));
    for (int i = 0; i < n0; ++i) xi[static_cast<std::size_t>(i)] = grid_.xi(0, i);
    const int nyq = n0 / 2;

    kern_.assign(static_cast<std::size_t>(J_ + 1), {});
    for (int j = 0; j <= J_; ++j) {
        const double s = std::ldexp(1.0, -j);
        const double uc = j == 0 ? 0.0 : 1.25;
        auto zeta = [&](double u, int d) { return j == 0 ? eta0(u, d) : eta(u, d); };
        for (int m = 0; m <= m_max_; ++m) {
            std::vector<cplx> a(static_cast<std::size_t>(n0), 0.0);
            const cplx lead = s * ipow(m) * std::pow(s, m) / (factorial(m) * 2.0 * L);
            for (int i = 0; i < n0; ++i)
                if (i != nyq) a[static_cast<std::size_t>(i)] = lead * zeta(s * xi[i], m);
            // Discrete moment correction in span{zeta(u) (u - uc)^l}.
            const int K = m + 1;
            Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(K, K);
            Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(K);
            for (int lp = 0; lp < K; ++lp) rhs(lp) = lp == m ? cplx(std::pow(s, m)) : cplx(0.0);
            for (int i = 0; i < n0; ++i) {
                if (i == nyq) continue;
                double u = s * xi[i];
                double z = zeta(u, 0);
                if (z == 0.0 && a[static_cast<std::size_t>(i)] == 0.0) continue;
                cplx row(1.0, 0.0);
                for (int lp = 0; lp < K; ++lp) {
                    rhs(lp) -= row * a[static_cast<std::size_t>(i)];
                    double basis = s * z / (2.0 * L);
                    for (int l = 0; l < K; ++l) {
                        A(lp, l) += row * basis;
                        basis *= (u - uc);
                    }
                    row *= cplx(0.0, u);
                }
            }
            Eigen::VectorXcd c = A.fullPivLu().solve(rhs);
            for (int l = 0; l < K; ++l) max_corr_ = std::max(max_corr_, std::abs(c(l)));
            for (int i = 0; i < n0; ++i) {
                if (i == nyq) continue;
                double u = s * xi[i];
                double z = zeta(u, 0);
                if (z == 0.0) continue;
                cplx add = 0.0;
                double pw = s * z / (2.0 * L);
                for (int l = 0; l < K; ++l) {
                    add += c(l) * pw;
                    pw *= (u - uc);
                }
                a[static_cast<std::size_t>(i)] += add;
            }
            kern_[static_cast<std::size_t>(j)].push_back(std::move(a));
        }
    }

    // rho family: 1-D blocks along x1, globally rescaled so rho_1(0) = 2.
    auto raw_block = [&](int n) {
        std::vector<cplx> r(static_cast<std::size_t>(n0), 0.0);
        double sum = 0.0;
        for (int i = 0; i < n0; ++i) {
            if (i == nyq) continue;
            double rho = std::abs(xi[i]);
            double v = n == 0 ? gen_(rho) : gen_(std::ldexp(rho, -n)) - gen_(std::ldexp(rho, -n + 1));
            r[static_cast<std::size_t>(i)] = v / (2.0 * L);
            sum += v / (2.0 * L);
        }
        return std::make_pair(r, sum);
    };
    auto [r1, s1] = raw_block(1);
    rho_scale_ = 2.0 / s1;
    rho1_zero_ = rho_scale_ * s1;
    rho_.clear();
    for (int n = 0; n <= J_; ++n) {
        auto [r, sum] = raw_block(n);
        if (n == 0) rho0_unhalved_ = rho_scale_ * sum;
        for (auto& z : r) z /= sum;
        rho_.push_back(std::move(r));
    }
}

double EtaFamily::eta0(double xi, int deriv) const {
    if (!(std::abs(xi) < 1.0)) return 0.0;
    return c_eta0_ * eta0_shape(xi, deriv).derivative(deriv);
}

double EtaFamily::eta(double xi, int deriv) const {
    if (!(xi > 1.0 && xi < 1.5)) return 0.0;
    return c_eta_ * eta_shape(xi, deriv).derivative(deriv);
}

const std::vector<cplx>& EtaFamily::kernel(int j, int m) const {
    if (j < 0 || j > J_ || m < 0 || m > m_max_) throw Error(Status::Arg, "kernel index out of range");
    return kern_[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)];
}

const std::vector<cplx>& EtaFamily::rho(int n) const {
    if (n < 0 || n > J_) throw Error(Status::Arg, "rho index out of range");
    return rho_[static_cast<std::size_t>(n)];
}

cplx EtaFamily::kernel_series(int j, int m, double x1, int deriv) const {
    const auto& a = kernel(j, m);
    cplx acc = 0.0;
    for (int i = 0; i < grid_.n[0]; ++i) {
        if (a[static_cast<std::size_t>(i)] == 0.0) continue;
        double xi = grid_.xi(0, i);
        acc += a[static_cast<std::size_t>(i)] * std::pow(cplx(0.0, xi), deriv) * std::polar(1.0, xi * x1);
    }
    return acc;
}

cplx EtaFamily::kernel_profile(int j, int m, double x1) const {
    double y = std::ldexp(x1, j);
    auto integrand = [&](double xi) {
        double z = j == 0 ? eta0(xi) : eta(xi);
        return z * std::polar(1.0, xi * y);
    };
    cplx inv = j == 0 ? integrate_gl(integrand, -1.0, 1.0, 24, 128) : integrate_gl(integrand, 1.0, 1.5, 24, 64);
    inv /= 2.0 * kPi;
    return std::pow(x1, m) / factorial(m) * inv;
}

double EtaFamily::eta0_at_zero() const {
    return integrate_gl([this](double x) { return eta0(x); }, -1.0, 1.0, 24, 200) / (2.0 * kPi);
}

double EtaFamily::eta_at_zero() const {
    return integrate_gl([this](double x) { return eta(x); }, 1.0, 1.5, 24, 200) / (2.0 * kPi);
}

// ---- trace -----------------------------------------------------------------

Spectrum trace_spectrum(const Spectrum& f, int m, double* tail) {
    if (f.grid.dim() < 1) throw Error(Status::Arg, "trace needs d >= 1");
    if (m < 0) throw Error(Status::Arg, "trace order must be >= 0");
    Spectrum s = f;
    std::vector<int> alpha(static_cast<std::size_t>(f.grid.dim()), 0);
    alpha[0] = m;
    differentiate(s, alpha);
    return evaluate_axis0(s, 0.0, tail);
}

GridFunction trace(const GridFunction& f, const LpSystem& sys, int m, double tol) {
    Spectrum s = to_coeffs(f);
    if (!(s.grid == sys.grid())) throw Error(Status::Arg, "function grid differs from LP system grid");
    const int d = s.grid.dim();
    const int N = sys.blocks();
    double tail = 0.0, total = 0.0;
    for_each_mode(s.grid, [&](std::size_t slot, const double* xi, const int* idx) {
        double w = std::pow(std::abs(xi[0]), m);
        double keep = sys.lowpass(N, radius(xi, d));
        for (int c = 0; c < s.r; ++c) {
            double a = w * std::abs(s.c[slot * s.r + c]);
            total += a;
            if (idx[0] != s.grid.n[0] / 2) tail += (1.0 - keep) * a;
        }
    });
    sys.apply_lowpass(s, N);
    Spectrum b = trace_spectrum(s, m, &tail);
    if (tail > tol * total && tail > 1e-300)
        throw Error(Status::Numeric, "divergent block sum: truncation tail " + std::to_string(tail) + " relative " +
                                         std::to_string(tail / total));
    return from_coeffs(b);
}

// ---- extension -------------------------------------------------------------

namespace {

void check_ext_inputs(const Spectrum& g, const EtaFamily& eta, const LpSystem& bsys) {
    Grid bg = eta.grid().boundary();
    if (!(bsys.grid() == bg)) throw Error(Status::Arg, "boundary LP system grid does not match the family");
    if (!(g.grid == bg)) throw Error(Status::Arg, "boundary function grid does not match the family");
    if (bsys.blocks() != eta.top_block()) throw Error(Status::Arg, "boundary LP system and family disagree on top block");
}

void check_leakage(const Spectrum& g, const LpSystem& bsys, double tol) {
    const int d = g.grid.dim();
    double tail = 0.0, total = 0.0;
    for_each_mode(g.grid, [&](std::size_t slot, const double* xi, const int*) {
        double keep = bsys.lowpass(bsys.blocks(), radius(xi, d));
        for (int c = 0; c < g.r; ++c) {
            double a = std::abs(g.c[slot * g.r + c]);
            total += a;
            tail += (1.0 - keep) * a;
        }
    });
    if (tail > tol * total && tail > 1e-300)
        throw Error(Status::Numeric, "boundary data leaks past the top block: tail mass " + std::to_string(tail));
}

/// C(k0, kt) = sum_j a_j(k0) phi_j(kt) G(kt).
template <class KernelFn>
Spectrum assemble(const Spectrum& g, const EtaFamily& eta, const LpSystem& bsys, KernelFn kern) {
    const Grid& full = eta.grid();
    const int J = bsys.blocks();
    const int bd = g.grid.dim();
    const std::size_t nb = g.grid.size();
    std::vector<double> w(static_cast<std::size_t>(J + 1) * nb);
    for_each_mode(g.grid, [&](std::size_t slot, const double* xi, const int*) {
        double rho = radius(xi, bd);
        for (int j = 0; j <= J; ++j) w[static_cast<std::size_t>(j) * nb + slot] = bsys.block(j, rho);
    });
    Spectrum out(full, g.r);
    const std::size_t m = nb * static_cast<std::size_t>(g.r);
    for (int i = 0; i < full.n[0]; ++i) {
        cplx* row = &out.c[static_cast<std::size_t>(i) * m];
        for (int j = 0; j <= J; ++j) {
            cplx a = kern(j)[static_cast<std::size_t>(i)];
            if (a == 0.0) continue;
            const double* wj = &w[static_cast<std::size_t>(j) * nb];
            for (std::size_t k = 0; k < nb; ++k) {
                if (wj[k] == 0.0) continue;
                cplx f = a * wj[k];
                for (int c = 0; c < g.r; ++c) row[k * g.r + c] += f * g.c[k * g.r + c];
            }
        }
    }
    return out;
}

}  // namespace

Spectrum ext_m_spectrum(const Spectrum& g, int m, const EtaFamily& eta, const LpSystem& bsys, double tol) {
    check_ext_inputs(g, eta, bsys);
    check_leakage(g, bsys, tol);
    if (m < 0 || m > eta.m_max()) throw Error(Status::Arg, "extension order out of range");
    return assemble(g, eta, bsys, [&](int j) -> const std::vector<cplx>& { return eta.kernel(j, m); });
}

GridFunction ext_m(const GridFunction& g, int m, const EtaFamily& eta, const LpSystem& bsys, double tol) {
    return from_coeffs(ext_m_spectrum(to_coeffs(g), m, eta, bsys, tol));
}

GridFunction ext0(const GridFunction& g, const EtaFamily& eta, const LpSystem& bsys, double tol) {
    Spectrum gs = to_coeffs(g);
    check_ext_inputs(gs, eta, bsys);
    check_leakage(gs, bsys, tol);
    return from_coeffs(assemble(gs, eta, bsys, [&](int j) -> const std::vector<cplx>& { return eta.rho(j); }));
}

GridFunction ext_vector(const std::vector<GridFunction>& g, const EtaFamily& eta, const LpSystem& bsys,
                        double tol) {
    if (g.empty()) throw Error(Status::Arg, "ext_vector needs at least one boundary function");
    Spectrum f(eta.grid(), g[0].r);
    for (std::size_t j = 0; j < g.size(); ++j) {
        Spectrum res = to_coeffs(g[j]);
        res -= trace_spectrum(f, static_cast<int>(j));
        f += ext_m_spectrum(res, static_cast<int>(j), eta, bsys, tol);
    }
    return from_coeffs(f);
}

// ---- mollification ---------------------------------------------------------

Jet mollifier_profile(double x, int order) {
    static const Ramp ramp{1.0};
    Jet t = 2.0 + (-2.0) * Jet::variable(x, order);
    return ramp.jet(t);
}

GridFunction mollify(const GridFunction& f, int m, double n, int deriv, int quad) {
    const Grid& g = f.grid;
    if (g.dim() < 1 || !g.offset) throw Error(Status::Arg, "mollification needs an offset normal axis");
    if (m < 0 || deriv < 0) throw Error(Status::Arg, "orders must be >= 0");
    if (!(n > 0.0)) throw Error(Status::Arg, "steepness must be positive");
    Spectrum s = to_coeffs(f);
    {
        Spectrum tr = trace_spectrum(s, m);
        GridFunction dm = derivative(f, [&] {
            std::vector<int> a(static_cast<std::size_t>(g.dim()), 0);
            a[0] = m;
            return a;
        }());
        double scale = std::max(1e-300, dm.max_abs());
        double worst = 0.0;
        GridFunction trv = from_coeffs(tr);
        worst = trv.max_abs();
        if (worst > 1e-8 * scale)
            throw Error(Status::Domain, "nonvanishing boundary value of d1^" + std::to_string(m) + " f: " +
                                            std::to_string(worst));
    }
    const int top = std::max(deriv, m);
    std::vector<GridFunction> d1;  // d1^k f on the grid, k = 0..top
    for (int k = 0; k <= top; ++k) {
        std::vector<int> a(static_cast<std::size_t>(g.dim()), 0);
        a[0] = k;
        d1.push_back(derivative(f, a));
    }
    const double a_end = 1.0 / n;
    const double b_mid = 0.5 / n;
    GridFunction out(g, f.r, f.gamma);
    const std::size_t st = g.stride(0);
    std::vector<cplx> col;
    if (m >= 1 && deriv < m) col = axis0_coeffs(f);
    std::vector<cplx> tmp(static_cast<std::size_t>(f.r));

    auto binom = [](int a, int b) {
        double r = 1.0;
        for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
        return r;
    };

    for (int i = 0; i < g.n[0]; ++i) {
        const double x = g.x(0, i);
        if (x <= 0.0) continue;
        for (std::size_t tn = 0; tn < st; ++tn) {
            const std::size_t node = static_cast<std::size_t>(i) * st + tn;
            if (x >= a_end) {
                for (int c = 0; c < f.r; ++c) out.at(node, c) = d1[static_cast<std::size_t>(deriv)].at(node, c);
                continue;
            }
            Jet ph = mollifier_profile(n * x, top);
            auto phi_n = [&](int k) { return std::pow(n, k) * ph.derivative(k); };
            if (m == 0 || deriv >= m) {
                // d^deriv g = d^(deriv-m) (phi_n d^m f) by Leibniz.
                int e = deriv - m;
                for (int c = 0; c < f.r; ++c) {
                    cplx acc = 0.0;
                    for (int k = 0; k <= e; ++k)
                        acc += binom(e, k) * phi_n(k) * d1[static_cast<std::size_t>(deriv - k)].at(node, c);
                    out.at(node, c) = acc;
                }
                continue;
            }
            // deriv < m: d^deriv f + int_x^a (x-t)^(m-1-deriv)/(m-1-deriv)! (1-phi_n) d^m f dt
            const int e = m - 1 - deriv;
            const double fe = factorial(e);
            std::vector<cplx> acc(static_cast<std::size_t>(f.r), 0.0);
            auto piece = [&](double lo, double hi, bool ramp) {
                if (hi <= lo) return;
                const GaussRule& gr = gauss_legendre(quad);
                double half = 0.5 * (hi - lo);
                for (std::size_t q = 0; q < gr.x.size(); ++q) {
                    double t = lo + half * (gr.x[q] + 1.0);
                    double wgt = half * gr.w[q] * std::pow(x - t, e) / fe;
                    if (ramp) wgt *= 1.0 - mollifier_profile(n * t, 0).value();
                    eval_column(col, g, f.r, t, tn, tmp.data(), m);
                    for (int c = 0; c < f.r; ++c) acc[static_cast<std::size_t>(c)] += wgt * tmp[static_cast<std::size_t>(c)];
                }
            };
            double mid = std::max(x, b_mid);
            piece(x, mid, false);
            piece(mid, a_end, true);
            for (int c = 0; c < f.r; ++c)
                out.at(node, c) = d1[static_cast<std::size_t>(deriv)].at(node, c) + acc[static_cast<std::size_t>(c)];
        }
    }
    return out;
}

GridFunction indicator_multiply(const GridFunction& f) {
    const Grid& g = f.grid;
    if (g.dim() < 1) throw Error(Status::Arg, "indicator needs d >= 1");
    GridFunction out = f;
    const std::size_t m = g.stride(0) * static_cast<std::size_t>(f.r);
    for (int i = 0; i < g.n[0]; ++i) {
        if (g.x(0, i) > 0.0) continue;
        for (std::size_t j = 0; j < m; ++j) out.v[static_cast<std::size_t>(i) * m + j] = 0.0;
    }
    return out;
}

}  // namespace tracelab
