#include <doctest.h>

#include "errors.hpp"
#include "lp.hpp"
#include "norms.hpp"

#include <cmath>
#include <numbers>

using namespace tracelab;

namespace {

constexpr double kPi = std::numbers::pi;

GridFunction gauss(const Grid& g, double sigma, double omega, double center = 0.0) {
    GridFunction f(g, 1);
    for (int i = 0; i < g.n[0]; ++i) {
        double x = g.x(0, i) - center;
        f.at(i) = std::exp(-x * x / (2 * sigma * sigma)) * std::polar(1.0, omega * x);
    }
    return f;
}

// Antiderivative of |x|^gamma, evaluated per cell; written here independently.
double cell_mass(double a, double b, double gamma) {
    auto F = [&](double x) { return std::copysign(std::pow(std::abs(x), gamma + 1) / (gamma + 1), x); };
    return F(b) - F(a);
}

}  // namespace

TEST_SUITE("norms") {
    TEST_CASE("unweighted L^p equals the Riemann sum") {
        Grid g{{1024}, 8 * kPi, true};
        GridFunction f = gauss(g, 1.3, 2.0, 0.4);
        for (double p : {1.0, 2.0, 3.0}) {
            double s = 0;
            for (int i = 0; i < 1024; ++i) s += std::pow(std::abs(f.at(i)), p) * g.h(0);
            CHECK(lp_norm(f, p, WeightSpec(0.0, Domain::Full)).value ==
                  doctest::Approx(std::pow(s, 1 / p)).epsilon(1e-10));
        }
    }

    TEST_CASE("weighted cell masses use the antiderivative") {
        Grid g{{1024}, 8 * kPi, true};
        GridFunction f = gauss(g, 1.0, 0.0, 0.3);
        for (double gm : {-0.5, 0.5, 2.5}) {
            double full = 0, half = 0;
            for (int i = 0; i < 1024; ++i) {
                double a = (i - 512) * g.h(0), b = a + g.h(0);
                double m = cell_mass(a, b, gm) * std::norm(f.at(i));
                full += m;
                if (a >= 0) half += m;
            }
            CHECK(lp_norm(f, 2, WeightSpec(gm, Domain::Full)).value == doctest::Approx(std::sqrt(full)).epsilon(1e-10));
            CHECK(lp_norm(f, 2, WeightSpec(gm, Domain::Half)).value == doctest::Approx(std::sqrt(half)).epsilon(1e-10));
        }
        CHECK(weighted_mass(0.0, 2.0, 1.0) == doctest::Approx(2.0));
        CHECK(weighted_mass(-1.0, 1.0, 2.0) == doctest::Approx(2.0 / 3.0));
    }

    TEST_CASE("W^{1,2} of a modulated Gaussian, closed form") {
        Grid g{{2048}, 16 * kPi, true};
        const double sigma = 1.0;
        double l2 = std::sqrt(sigma * std::sqrt(kPi));
        for (double omega : {0.0, 3.0, 6.0, 12.0}) {
            GridFunction f = gauss(g, sigma, omega);
            double d2 = std::sqrt(omega * omega * sigma * std::sqrt(kPi) + std::sqrt(kPi) / (2 * sigma));
            CHECK(sobolev_norm(f, 0, 2, WeightSpec(0, Domain::Full)).value == doctest::Approx(l2).epsilon(1e-10));
            CHECK(sobolev_norm(f, 1, 2, WeightSpec(0, Domain::Full)).value ==
                  doctest::Approx(l2 + d2).epsilon(1e-10));
        }
    }

    TEST_CASE("Sobolev ratio grows linearly in the modulation") {
        Grid g{{4096}, 16 * kPi, true};
        std::vector<double> r;
        for (double omega : {10.0, 20.0, 40.0}) {
            GridFunction f = gauss(g, 1.0, omega);
            r.push_back(sobolev_norm(f, 1, 2, WeightSpec(0, Domain::Full)).value /
                        sobolev_norm(f, 0, 2, WeightSpec(0, Domain::Full)).value);
        }
        CHECK((r[1] - 1) / (r[0] - 1) == doctest::Approx(2.0).epsilon(2e-3));
        CHECK((r[2] - 1) / (r[1] - 1) == doctest::Approx(2.0).epsilon(2e-3));
    }

    TEST_CASE("H^{s,2} with gamma = 0 by Parseval") {
        Grid g{{2048}, 16 * kPi, true};
        GridFunction f = gauss(g, 1.0, 0.0);
        // ||(1+xi^2)^{s/2} f^||: for e^{-x^2/2}, |f^(xi)|^2 ~ e^{-xi^2}; integrate by quadrature.
        for (double s : {-1.0, 0.5, 2.0}) {
            double acc = 0, dx = 1e-3;
            for (double xi = -20; xi <= 20; xi += dx) acc += std::pow(1 + xi * xi, s) * std::exp(-xi * xi) * dx;
            double want = std::sqrt(acc * 2 * kPi / (2 * kPi));  // |f^|^2 = 2 pi e^{-xi^2}, Plancherel 1/(2 pi)
            CHECK(bessel_norm(f, s, 2, WeightSpec(0, Domain::Full)).value == doctest::Approx(want).epsilon(1e-8));
        }
    }

    TEST_CASE("bessel and sobolev of order 2 are comparable") {
        Grid g{{2048}, 16 * kPi, true};
        for (double omega : {0.0, 2.0, 8.0}) {
            GridFunction f = gauss(g, 1.0, omega, 0.5);
            double h = bessel_norm(f, 2, 2, WeightSpec(0, Domain::Full)).value;
            double w = sobolev_norm(f, 2, 2, WeightSpec(0, Domain::Full)).value;
            CHECK(h / w >= 1.0 / 3.0);
            CHECK(h / w <= 3.0);
        }
    }

    TEST_CASE("Besov with q = 2 and p = 2 at s = 0 brackets L^2") {
        Grid g{{2048}, 16 * kPi, true};
        LpSystem sys(LpGenerator(), LpSystem::max_blocks(g), g);
        GridFunction f = gauss(g, 0.7, 3.0, 0.2);
        double b = besov_norm(f, 0, 2, 2, WeightSpec(0, Domain::Full), sys).value;
        double l = lp_norm(f, 2, WeightSpec(0, Domain::Full)).value;
        // sum phi_n^2 lies in [1/2, 1]
        CHECK(b <= l * (1 + 1e-10));
        CHECK(b >= l / std::sqrt(2.0) * (1 - 1e-10));
    }

    TEST_CASE("q monotonicity of B and F is exact") {
        Grid g{{2048}, 16 * kPi, true};
        LpSystem sys(LpGenerator(), LpSystem::max_blocks(g), g);
        GridFunction f = gauss(g, 0.3, 5.0, 0.2);
        WeightSpec w(0.5, Domain::Full);
        double prev_b = INFINITY, prev_f = INFINITY;
        for (double q : {1.0, 2.0, 4.0, kInf}) {
            double b = besov_norm(f, 1.0, 2, q, w, sys).value, t = triebel_norm(f, 1.0, 2, q, w, sys).value;
            CHECK(b <= prev_b);
            CHECK(t <= prev_f);
            prev_b = b;
            prev_f = t;
        }
    }

    TEST_CASE("support margin contract") {
        Grid g{{1024}, 2 * kPi, true};
        GridFunction wide = gauss(g, 3.0, 0.0);
        CHECK_THROWS_AS(lp_norm(wide, 2, WeightSpec(0, Domain::Full)), Error);
        wide.support_margin = 0.3;  // declared margins are trusted
        CHECK_NOTHROW(lp_norm(wide, 2, WeightSpec(0, Domain::Full)));
    }

    TEST_CASE("domain errors") {
        Grid g{{1024}, 8 * kPi, true};
        GridFunction f = gauss(g, 1.0, 0.0);
        LpSystem sys(LpGenerator(), LpSystem::max_blocks(g), g);
        CHECK_THROWS_AS(lp_norm(f, 0.5, WeightSpec(0, Domain::Full)), Error);
        CHECK_THROWS_AS(besov_norm(f, 0, 2, 0.5, WeightSpec(0, Domain::Full), sys), Error);
        CHECK_THROWS_AS(WeightSpec(-1.0, Domain::Full), Error);
    }

    TEST_CASE("norm CSV export") {
        NormRow r;
        r.function_id = "f0";
        r.family = "B";
        r.s_or_k = 0.5;
        r.q = kInf;
        r.result.value = 1.25;
        std::string csv = norm_rows_csv({r, r});
        CHECK(csv.rfind("function_id,family,s_or_k,p,q,gamma,domain,value,tail\n", 0) == 0);
        CHECK(csv.find("f0,B,0.5,2,inf,0,full,1.25,0\n") != std::string::npos);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
        r.function_id = "a,b";
        CHECK_THROWS_AS(norm_rows_csv({r}), Error);
    }
}

TEST_SUITE("hardy") {
    TEST_CASE("nonzero boundary value is rejected below the critical weight") {
        Grid g{{2048}, 8 * kPi, true};
        GridFunction u = gauss(g, 1.0, 0.0);
        CHECK_THROWS_AS(hardy_ratio(u, 2, 0.0), Error);
        CHECK_THROWS_AS(hardy_ratio(u, 2, 1.0), Error);  // gamma = p - 1
    }

    TEST_CASE("u(0) = 0 gives a finite ratio") {
        Grid g{{4096}, 8 * kPi, true};
        GridFunction u(g, 1);
        for (int i = 0; i < 4096; ++i) {
            double x = g.x(0, i);
            u.at(i) = x * std::exp(-x * x / 2);
        }
        auto h = hardy_ratio(u, 2, 0.0);
        // ||u/x|| / ||u'|| on (0, inf): int e^{-x^2} = sqrt(pi)/2, int (1-x^2)^2 e^{-x^2} = 3 sqrt(pi)/8
        CHECK(h.ratio == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-6));
    }

    TEST_CASE("sharp constant above the critical weight") {
        Grid g{{8192}, 8 * kPi, true};
        GridFunction u = gauss(g, 0.5, 0.0, 1.0);
        auto h = hardy_ratio(u, 2, 3.0, NormOptions{2});
        CHECK(h.ratio <= 1.0 * 1.05);
        CHECK(h.ratio > 0.1);
    }
}
