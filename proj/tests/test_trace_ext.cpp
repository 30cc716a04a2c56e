#include <doctest.h>

#include "errors.hpp"
#include "fft.hpp"
#include "trace_ext.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

using namespace tracelab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Fixture {
    Grid g{{512, 256}, 16 * kPi, true};
    Grid bg = g.boundary();
    LpSystem fsys{LpGenerator(), LpSystem::max_blocks(g), g};
    LpSystem bsys{LpGenerator(), 3, bg};
    EtaFamily eta{g, 3, 3};
};

// sum of |a - b|^2 over nodes, relative to |b|
double rel(const GridFunction& a, const GridFunction& b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        num += std::norm(a.v[i] - b.v[i]);
        den += std::norm(b.v[i]);
    }
    return std::sqrt(num / den);
}

GridFunction bgauss(const Grid& bg, double sigma, double c, double omega = 0) {
    GridFunction f(bg, 1);
    for (int i = 0; i < bg.n[0]; ++i) {
        double x = bg.x(0, i) - c;
        f.at(i) = std::exp(-x * x / (2 * sigma * sigma)) * std::polar(1.0, omega * x);
    }
    return f;
}

}  // namespace

TEST_SUITE("trace") {
    TEST_CASE("trace of a shifted Gaussian, closed form") {
        Fixture F;
        GridFunction f(F.g, 1);
        for (int i = 0; i < F.g.n[0]; ++i)
            for (int j = 0; j < F.g.n[1]; ++j) {
                double x1 = F.g.x(0, i), x2 = F.g.x(1, j);
                f.at(i * F.g.n[1] + j) = std::exp(-(x1 - 0.3) * (x1 - 0.3) / 2 - x2 * x2 / 2);
            }
        GridFunction t0 = trace(f, F.fsys, 0), t1 = trace(f, F.fsys, 1), t2 = trace(f, F.fsys, 2);
        for (int j = 0; j < F.bg.n[0]; ++j) {
            double x2 = F.bg.x(0, j), e = std::exp(-0.045 - x2 * x2 / 2);
            CHECK(std::abs(t0.at(j) - e) < 1e-10);
            CHECK(std::abs(t1.at(j) - 0.3 * e) < 1e-10);
            CHECK(std::abs(t2.at(j) - (0.09 - 1.0) * e) < 1e-10);
        }
    }

    TEST_CASE("trace equals a direct series sum at x1 = 0") {
        Fixture F;
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-1, 1);
        // random band-limited data from explicit modes |k| <= 20
        struct Mode {
            int k0, k1;
            cplx a;
        };
        std::vector<Mode> modes;
        for (int i = 0; i < 12; ++i)
            modes.push_back({static_cast<int>(u(rng) * 20), static_cast<int>(u(rng) * 20), {u(rng), u(rng)}});
        GridFunction f(F.g, 1);
        for (int i = 0; i < F.g.n[0]; ++i)
            for (int j = 0; j < F.g.n[1]; ++j) {
                cplx s = 0;
                for (auto& m : modes)
                    s += m.a * std::polar(1.0, kPi / F.g.L * (m.k0 * F.g.x(0, i) + m.k1 * F.g.x(1, j)));
                f.at(i * F.g.n[1] + j) = s;
            }
        for (int m = 0; m <= 2; ++m) {
            GridFunction t = trace(f, F.fsys, m);
            double err = 0;
            for (int j = 0; j < F.bg.n[0]; ++j) {
                cplx s = 0;
                for (auto& md : modes) {
                    cplx d = std::pow(cplx(0, kPi / F.g.L * md.k0), m);
                    s += md.a * d * std::polar(1.0, kPi / F.g.L * md.k1 * F.bg.x(0, j));
                }
                err = std::max(err, std::abs(t.at(j) - s) / std::max(1.0, std::abs(s)));
            }
            CHECK(err < 1e-10);
        }
    }

    TEST_CASE("Tr_j ext_m g = delta_jm g") {
        Fixture F;
        GridFunction g = bgauss(F.bg, 1.0, 0.5, 1.5);
        double gn = std::sqrt(std::accumulate(g.v.begin(), g.v.end(), 0.0,
                                              [](double a, cplx b) { return a + std::norm(b); }));
        for (int m = 0; m <= 3; ++m) {
            GridFunction e = m == 0 ? ext0(g, F.eta, F.bsys) : ext_m(g, m, F.eta, F.bsys);
            for (int j = 0; j <= m; ++j) {
                GridFunction t = trace(e, F.fsys, j);
                if (j == m) {
                    CHECK(rel(t, g) < 1e-8);
                } else {
                    double r = 0;
                    for (auto& v : t.v) r += std::norm(v);
                    CHECK(std::sqrt(r) <= 1e-8 * gn);
                }
            }
        }
    }

    TEST_CASE("vector extension recovers all traces") {
        Fixture F;
        std::vector<GridFunction> g{bgauss(F.bg, 1.0, 0.0), bgauss(F.bg, 0.8, 1.0, 2.0), bgauss(F.bg, 1.2, -1.0)};
        GridFunction e = ext_vector(g, F.eta, F.bsys);
        for (int j = 0; j < 3; ++j) CHECK(rel(trace(e, F.fsys, j), g[static_cast<std::size_t>(j)]) < 1e-7);
    }

    TEST_CASE("extension kernels match their quadrature profile") {
        // The series carries the moment correction on a finite torus, so it
        // differs from the continuous profile at the 1e-4 level for j = 0.
        Fixture F;
        for (int j = 0; j <= 3; ++j)
            for (int m = 0; m <= 2; ++m)
                for (double x : {0.05, 0.4, 1.3}) {
                    double tol = j == 0 ? 1e-3 : 1e-4;
                    CHECK(std::abs(F.eta.kernel_series(j, m, x) - F.eta.kernel_profile(j, m, x)) < tol);
                }
        CHECK(F.eta.rho1_at_zero() == doctest::Approx(2.0));
    }

    TEST_CASE("high frequency data leaking past the top block is refused") {
        Fixture F;
        LpSystem low(LpGenerator(), 1, F.bg);
        EtaFamily eta(F.g, 1, 1);
        GridFunction g = bgauss(F.bg, 1.0, 0.0, 6.0);
        CHECK_THROWS_AS(ext_m(g, 1, eta, low), Error);
        CHECK_NOTHROW(ext_m(g, 1, F.eta, F.bsys));
    }
}

TEST_SUITE("mollify") {
    TEST_CASE("profile values") {
        CHECK(mollifier_profile(0.25, 0).c[0] == 0.0);
        CHECK(mollifier_profile(0.5, 0).c[0] == 0.0);
        CHECK(mollifier_profile(1.0, 0).c[0] == 1.0);
        CHECK(mollifier_profile(3.0, 0).c[0] == 1.0);
        double mid = mollifier_profile(0.75, 0).c[0];
        CHECK(mid > 0.0);
        CHECK(mid < 1.0);
    }

    TEST_CASE("g_n equals f beyond 1/n and vanishes for x1 < 0") {
        Grid g{{2048}, 2 * kPi, true};
        GridFunction f(g, 1);
        for (int i = 0; i < 2048; ++i) {
            double x = g.x(0, i);
            f.at(i) = std::exp(-x * x);
        }
        for (double n : {2.0, 8.0}) {
            GridFunction gn = mollify(f, 1, n);
            for (int i = 0; i < 2048; ++i) {
                double x = g.x(0, i);
                if (x > 1.0 / n) CHECK(std::abs(gn.at(i) - f.at(i)) < 1e-12);
                if (x < 0) CHECK(gn.at(i) == cplx(0.0));
            }
        }
    }

    TEST_CASE("indicator multiplier") {
        Grid g{{64}, 2 * kPi, true};
        GridFunction f(g, 1);
        for (int i = 0; i < 64; ++i) f.at(i) = 1.0 + g.x(0, i);
        GridFunction h = indicator_multiply(f);
        for (int i = 0; i < 64; ++i) CHECK(h.at(i) == (g.x(0, i) > 0 ? f.at(i) : cplx(0.0)));
    }
}
