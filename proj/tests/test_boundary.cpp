#include <doctest.h>

#include "boundary.hpp"
#include "errors.hpp"
#include "fft.hpp"
#include "spectral.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

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

GridFunction bgauss(const Grid& bg, int r, double sigma, double c) {
    GridFunction f(bg, r);
    for (int i = 0; i < bg.n[0]; ++i)
        for (int k = 0; k < r; ++k) {
            double x = bg.x(0, i) - c - 0.5 * k;
            f.at(i, k) = std::exp(-x * x / (2 * sigma * sigma)) * (1.0 + 0.3 * k);
        }
    return f;
}

GridFunction full_gauss(const Grid& g, int r) {
    GridFunction f(g, r);
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < r; ++k) {
                double x1 = g.x(0, i) - 0.2 * (k + 1), x2 = g.x(1, j) + 0.4 * k;
                f.at(i * g.n[1] + j, k) = std::exp(-x1 * x1 / 2 - x2 * x2 / 2);
            }
    return f;
}

double l2(const GridFunction& f) {
    double s = 0;
    for (auto& v : f.v) s += std::norm(v);
    return std::sqrt(s);
}

MatrixField varying(const Grid& bg, int rows, int cols, double phase) {
    MatrixField m(bg, rows, cols);
    for (int i = 0; i < bg.n[0]; ++i) {
        double x = bg.x(0, i);
        for (int a = 0; a < rows * cols; ++a) m.at(i)[a] = 1.0 + 0.5 * std::cos(x / 4 + phase + a) + (a == 0 ? 1.0 : 0.0);
    }
    return m;
}

}  // namespace

TEST_SUITE("boundary") {
    TEST_CASE("B = b0 Tr0 + Tr1 against the hand-built composition") {
        Fixture F;
        MatrixField b0 = varying(F.bg, 1, 1, 0.0);
        BoundaryOperator B(1, 1, {{0, {0}, b0}, {1, {0}, MatrixField::identity(F.bg, 1)}});
        CHECK(B.order() == 1);
        GridFunction f = full_gauss(F.g, 1);
        GridFunction got = B.apply(f);
        GridFunction want = apply_field(b0, trace(f, F.fsys, 0)) + trace(f, F.fsys, 1);
        CHECK(l2(got - want) <= 1e-10 * l2(want));
    }

    TEST_CASE("tangential derivative term") {
        Fixture F;
        BoundaryOperator B(1, 1, {{0, {1}, MatrixField::identity(F.bg, 1)}});
        GridFunction f = full_gauss(F.g, 1);
        GridFunction got = B.apply(f);
        GridFunction want = derivative(trace(f, F.fsys, 0), {1});
        CHECK(l2(got - want) <= 1e-10 * l2(want));
    }

    TEST_CASE("mixed system: both data recovered and Tr_1 vanishes") {
        Fixture F;
        MatrixField b2 = varying(F.bg, 1, 2, 0.3), b0 = varying(F.bg, 1, 2, 1.1);
        NormalSystem sys({BoundaryOperator::trace_op(F.bg, 2, 0), BoundaryOperator(2, 1, {{2, {0}, b2}, {0, {0}, b0}})});
        CHECK(sys.orders() == std::vector<int>{0, 2});
        CHECK(sys.right_inverse_residual() < 1e-12);
        std::vector<GridFunction> data{bgauss(F.bg, 2, 1.0, 0.0), bgauss(F.bg, 1, 0.8, 1.0)};
        GridFunction u = ext_boundary(sys, data, F.eta, F.bsys);
        for (int i = 0; i < 2; ++i) {
            GridFunction out = sys.op(i).apply(u);
            CHECK(l2(out - data[static_cast<std::size_t>(i)]) <= 1e-7 * l2(data[static_cast<std::size_t>(i)]));
        }
        CHECK(l2(trace(u, F.fsys, 1)) <= 1e-7 * l2(data[0]));
    }

    TEST_CASE("projections: pi_j C^j = pi_j of the reduced operator") {
        Fixture F;
        MatrixField b2 = varying(F.bg, 1, 2, 0.3);
        NormalSystem sys({BoundaryOperator(2, 1, {{0, {0}, b2}})});
        GridFunction v = full_gauss(F.g, 2);
        auto C = extended_system_apply(sys, 1, v);
        GridFunction red = reduced_apply(sys, 0, v);
        GridFunction a = apply_field(sys.projection(0), C[0]), b = apply_field(sys.projection(0), red);
        CHECK(l2(a - b) <= 1e-10 * std::max(1.0, l2(b)));
        CHECK(sys.projection_residual() < 1e-10);
    }

    TEST_CASE("kernel predicates agree on constructed witnesses") {
        Fixture F;
        MatrixField b2 = varying(F.bg, 1, 2, 0.3);
        NormalSystem sys({BoundaryOperator(2, 1, {{0, {0}, b2}})});
        GridFunction g0 = bgauss(F.bg, 2, 1.0, 0.0);
        GridFunction zero(F.bg, 2);
        GridFunction v = ext_vector({g0, zero}, F.eta, F.bsys);
        double thr = 1e-8 * l2(v);
        auto rep = kernel_equiv_check(sys, 1, v, thr);
        CHECK(rep.agree());
        CHECK_FALSE(rep.traces_small);
        CHECK(rep.trace_residual >= 0.5 * l2(g0));
        GridFunction flat = v - ext_vector({trace(v, F.fsys, 0), trace(v, F.fsys, 1)}, F.eta, F.bsys);
        auto rep0 = kernel_equiv_check(sys, 1, flat, thr);
        CHECK(rep0.traces_small);
        CHECK(rep0.agree());
    }

    TEST_CASE("rank-deficient leading coefficient is refused") {
        Fixture F;
        MatrixField z(F.bg, 1, 2);
        CHECK_THROWS_AS(pseudo_inverse(z), Error);
    }

    TEST_CASE("JSON descriptor with a coefficient file") {
        Fixture F;
        auto dir = std::filesystem::temp_directory_path() / "tracelab_bsys_test";
        std::filesystem::create_directories(dir);
        GridFunction c(F.bg, 1);
        for (int i = 0; i < F.bg.n[0]; ++i) c.at(i) = 2.0 + std::sin(F.bg.x(0, i) / 4);
        save_grid_function(c, (dir / "b0.wtlb").string());
        std::string text = R"({"r": 1, "operators": [
            {"rows": 1, "terms": [{"j": 0, "alpha": [0], "coeff": "b0.wtlb"}]},
            {"rows": 1, "terms": [{"j": 1, "alpha": [0], "coeff": [[1, 0]]}]}],
            "coretraction": "auto"})";
        NormalSystem sys = load_normal_system(text, F.bg, dir.string());
        CHECK(sys.orders() == std::vector<int>{0, 1});
        GridFunction f = full_gauss(F.g, 1);
        GridFunction want = apply_field(MatrixField::constant(F.bg, 1, 1, {1.0}), trace(f, F.fsys, 0));
        for (int i = 0; i < F.bg.n[0]; ++i) want.at(i) *= c.at(i);
        CHECK(l2(sys.op(0).apply(f) - want) <= 1e-10 * l2(want));
        CHECK_THROWS_AS(load_normal_system("{\"r\": 1}", F.bg, dir.string()), Error);
        CHECK_THROWS_AS(load_normal_system("{not json", F.bg, dir.string()), Error);
        std::filesystem::remove_all(dir);
    }
}
