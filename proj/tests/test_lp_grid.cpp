#include <doctest.h>

#include "errors.hpp"
#include "fft.hpp"
#include "grid.hpp"
#include "lp.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

using namespace tracelab;

namespace {

// Ramp and generator written out from the formulas, independent of lp.cpp.
double ramp_ref(double t) {
    if (t <= 0) return 1.0;
    if (t >= 1) return 0.0;
    double b_t = std::exp(-1.0 / t), b_1t = std::exp(-1.0 / (1.0 - t));
    return b_1t / (b_t + b_1t);
}
double phi_ref(double rho) { return ramp_ref(2.0 * (rho - 1.0)); }
double block_ref(int n, double rho) {
    if (n < 0) return 0.0;
    if (n == 0) return phi_ref(rho);
    return phi_ref(rho / std::ldexp(1.0, n)) - phi_ref(rho / std::ldexp(1.0, n - 1));
}

GridFunction wave(const Grid& g, int k) {
    GridFunction f(g, 1);
    for (int i = 0; i < g.n[0]; ++i) f.at(i) = std::polar(1.0, std::numbers::pi * k / g.L * g.x(0, i));
    return f;
}

template <class T>
void put(std::vector<std::uint8_t>& b, T v) {
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    b.insert(b.end(), raw, raw + sizeof(T));
}

}  // namespace

TEST_SUITE("grid") {
    TEST_CASE("offset nodes avoid x1 = 0") {
        Grid g{{8}, 1.0, true};
        CHECK(g.x(0, 0) == doctest::Approx(-1.0 + 0.125));
        CHECK(g.x(0, 4) == doctest::Approx(0.125));
        for (int i = 0; i < 8; ++i) CHECK(g.x(0, i) != 0.0);
        Grid plain{{8}, 1.0, false};
        CHECK(plain.x(0, 4) == 0.0);
    }

    TEST_CASE("wavenumbers and nyquist") {
        Grid g{{16}, std::numbers::pi, true};
        CHECK(Grid::wavenumber(3, 16) == 3);
        CHECK(Grid::wavenumber(9, 16) == -7);
        CHECK(g.nyquist(0) == doctest::Approx(8.0));
        CHECK(g.xi(0, 3) == doctest::Approx(3.0));
    }

    TEST_CASE("invalid grids are rejected") {
        CHECK_THROWS_AS((Grid{{0}, 1.0, true}).validate(), Error);
        CHECK_THROWS_AS((Grid{{8}, -1.0, true}).validate(), Error);
    }

    TEST_CASE("file layout byte for byte") {
        Grid g{{2}, 1.5, true};
        GridFunction f(g, 1, 0.5);
        f.at(0) = {1.0, 2.0};
        f.at(1) = {3.0, 4.0};
        std::vector<std::uint8_t> want{'W', 'T', 'L', 'B'};
        put<std::uint32_t>(want, 1);
        put<std::uint32_t>(want, 1);
        put<std::uint32_t>(want, 1);
        put<std::uint32_t>(want, 2);
        put<double>(want, 1.5);
        put<std::uint8_t>(want, 1);
        put<double>(want, 0.5);
        for (double v : {1.0, 2.0, 3.0, 4.0}) put<double>(want, v);
        CHECK(encode_grid_function(f) == want);
        GridFunction back = decode_grid_function(want);
        CHECK(back.grid == g);
        CHECK(back.gamma == 0.5);
        CHECK(back.v == f.v);
    }

    TEST_CASE("truncated or foreign files fail") {
        Grid g{{4}, 1.0, true};
        auto bytes = encode_grid_function(GridFunction(g, 2));
        auto cut = bytes;
        cut.resize(cut.size() - 3);
        CHECK_THROWS_AS(decode_grid_function(cut), Error);
        auto bad = bytes;
        bad[0] = 'X';
        CHECK_THROWS_AS(decode_grid_function(bad), Error);
    }

    TEST_CASE("coefficient round trip") {
        Grid g{{16, 8}, 2.0, true};
        GridFunction f(g, 2);
        for (std::size_t i = 0; i < f.v.size(); ++i) f.v[i] = {std::sin(0.3 * i), std::cos(0.7 * i)};
        GridFunction back = from_coeffs(to_coeffs(f));
        double err = 0;
        for (std::size_t i = 0; i < f.v.size(); ++i) err = std::max(err, std::abs(back.v[i] - f.v[i]));
        CHECK(err < 1e-13);
    }

    TEST_CASE("coefficients of a single mode") {
        Grid g{{32}, std::numbers::pi, true};
        Spectrum s = to_coeffs(wave(g, 5));
        for (int i = 0; i < 32; ++i) CHECK(std::abs(s.c[i] - (i == 5 ? 1.0 : 0.0)) < 1e-13);
    }
}

TEST_SUITE("lp") {
    TEST_CASE("ramp matches the closed form") {
        Ramp h;
        for (double t : {-0.5, 0.0, 0.1, 0.2, 0.5, 0.77, 1.0, 1.3}) CHECK(h(t) == doctest::Approx(ramp_ref(t)).epsilon(1e-15));
        LpGenerator gen;
        CHECK(gen(1.25) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(gen(1.1) == doctest::Approx(ramp_ref(0.2)).epsilon(1e-15));
        CHECK(gen(1.0) == 1.0);
        CHECK(gen(1.5) == 0.0);
    }

    TEST_CASE("block values from the generator") {
        Grid g{{4096}, 4 * std::numbers::pi, true};
        LpSystem sys(LpGenerator(), 8, g);
        for (int n = -1; n <= 8; ++n)
            for (double rho : {0.0, 0.9, 1.3, 2.2, 3.0, 7.0, 50.0, 200.0})
                CHECK(sys.block(n, rho) == doctest::Approx(block_ref(n, rho)).epsilon(1e-14));
        CHECK(sys.block(3, 7.0) == 1.0);
        CHECK(sys.block(3, 3.0) == 0.0);
    }

    TEST_CASE("telescoping partition on the default grid") {
        Grid g{{4096}, 4 * std::numbers::pi, true};
        LpSystem sys(LpGenerator(), 8, g);
        CHECK(sys.telescoping_residual() <= 1e-12);
        // independent check on every grid frequency up to 2^8
        double worst = 0;
        for (int i = 0; i < 4096; ++i) {
            double xi = std::abs(g.xi(0, i));
            if (xi > 256) continue;
            double s = 0;
            for (int n = 0; n <= 8; ++n) s += block_ref(n, xi);
            worst = std::max(worst, std::abs(s - 1));
        }
        CHECK(worst <= 1e-12);
    }

    TEST_CASE("admissible block count") {
        Grid g{{4096}, 4 * std::numbers::pi, true};  // nyquist 512
        CHECK(LpSystem::max_blocks(g) == 9);
        CHECK_THROWS_AS(LpSystem(LpGenerator(), 10, g), Error);
    }

    TEST_CASE("pure wave: block 2 keeps e^{i3x}") {
        Grid g{{256}, std::numbers::pi, true};
        LpSystem sys(LpGenerator(), 7, g);
        GridFunction f = wave(g, 3);
        for (int n = -1; n <= 7; ++n) {
            GridFunction b = sys.block(f, n);
            double w = block_ref(n, 3.0), err = 0;
            for (int i = 0; i < 256; ++i) err = std::max(err, std::abs(b.at(i) - w * f.at(i)));
            CHECK(err < 1e-13);
        }
    }

    TEST_CASE("S_{-1} is zero and blocks 2 apart are disjoint") {
        Grid g{{512}, 2 * std::numbers::pi, true};
        LpSystem sys(LpGenerator(), LpSystem::max_blocks(g), g);
        GridFunction f(g, 1);
        for (int i = 0; i < 512; ++i) {
            double x = g.x(0, i);
            f.at(i) = std::exp(-x * x) * std::polar(1.0, 3.0 * x) + std::exp(-4 * x * x);
        }
        GridFunction z = sys.block(f, -1);
        CHECK(z.max_abs() == 0.0);
        for (int j = 0; j <= sys.blocks(); ++j)
            for (int k = j + 2; k <= sys.blocks(); ++k) CHECK(sys.block(sys.block(f, j), k).max_abs() <= 1e-13);
    }

    TEST_CASE("a sharper ramp is a different generator") {
        LpGenerator a(1.0), b(4.0);
        CHECK(a(1.1) != b(1.1));
        CHECK(a(1.25) == doctest::Approx(b(1.25)));
    }
}
