#include <doctest.h>

#include "bank.hpp"
#include "errors.hpp"
#include "fft.hpp"
#include "lp.hpp"
#include "report.hpp"
#include "spectral.hpp"
#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>

using namespace tracelab;

namespace {

constexpr double kPi = std::numbers::pi;

SuiteReport sample_report() {
    SuiteReport r;
    r.suite = "demo";
    r.config = {{"x", 1}, {"timing", false}};
    r.cases.push_back(make_case("a/one", {{"p", 2.0}}, 0.5, 0.0, 1.0));
    r.cases.push_back(make_case("b/nan", {{"note", "has, comma"}}, NAN, std::nullopt, 1.0, true, "quote \" here"));
    r.cases.push_back(make_case("c/inf", ojson::object(), 3.0, std::nullopt, INFINITY, false));
    r.aggregate = {{"max", 0.5}};
    return r;
}

std::vector<double> block_energies(const GridFunction& f, const LpSystem& sys) {
    std::vector<double> e;
    for (int n = 0; n <= sys.blocks(); ++n) {
        GridFunction b = sys.block(f, n);
        double s = 0;
        for (auto& v : b.v) s += std::norm(v);
        e.push_back(s);
    }
    return e;
}

}  // namespace

TEST_SUITE("report") {
    TEST_CASE("pass flags are recomputable") {
        for (const auto& c : sample_report().cases) CHECK(c.pass == CaseRecord::check(c.measured, c.lo, c.hi));
        CHECK_FALSE(CaseRecord::check(NAN, std::nullopt, std::nullopt));
        CHECK(CaseRecord::check(1.0, 1.0, 1.0));
    }

    TEST_CASE("gated failures decide the verdict") {
        SuiteReport r = sample_report();
        CHECK(r.gated_count() == 2);
        CHECK(r.failed_count() == 1);
        CHECK_FALSE(r.passed());
        r.cases.erase(r.cases.begin() + 1);
        CHECK(r.passed());
    }

    TEST_CASE("json round trip") {
        SuiteReport r = sample_report();
        ojson j = to_json(r);
        CHECK(j["schema"] == kReportSchema);
        SuiteReport back = report_from_json(j);
        CHECK(to_json(back).dump() == j.dump());
        CHECK(std::isnan(back.cases[1].measured));
        CHECK(std::isinf(*back.cases[2].hi));
    }

    TEST_CASE("foreign schema is refused") {
        ojson j = to_json(sample_report());
        j["schema"] = "other/9";
        CHECK_THROWS_AS(report_from_json(j), Error);
        CHECK_THROWS_AS(report_from_json(ojson::object()), Error);
    }

    TEST_CASE("csv row count equals case count") {
        std::string csv = to_csv(sample_report());
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
        CHECK(csv.rfind("case_id,gated,pass,measured,lo,hi,params,note\n", 0) == 0);
        CHECK(csv.find("\"quote \"\" here\"") != std::string::npos);
        CHECK_THROWS_AS(render(sample_report(), "xml"), Error);
    }

    TEST_CASE("re-emission is byte identical") {
        SuiteReport r = sample_report();
        CHECK(render(r, "json") == render(report_from_json(to_json(r)), "json"));
        CHECK(render(r, "csv") == render(report_from_json(to_json(r)), "csv"));
    }
}

TEST_SUITE("suites") {
    TEST_CASE("registry") {
        const auto& l = suite_list();
        CHECK(l.size() == 17);
        std::vector<int> crit;
        for (const auto& s : l)
            if (s.criterion) crit.push_back(s.criterion);
        std::sort(crit.begin(), crit.end());
        CHECK(crit.size() == 14);
        for (int i = 0; i < 14; ++i) CHECK(crit[static_cast<std::size_t>(i)] == i + 1);
        CHECK(suite_defaults("partition").contains("timing"));
    }

    TEST_CASE("unknown names and keys") {
        try {
            run_suite("nope");
            FAIL("expected NotFound");
        } catch (const Error& e) {
            CHECK(e.status() == Status::NotFound);
        }
        try {
            run_suite("partition", {{"bogus", 1}});
            FAIL("expected Arg");
        } catch (const Error& e) {
            CHECK(e.status() == Status::Arg);
        }
        CHECK_THROWS_AS(run_suite("partition", {{"grid", {{"bogus", 1}}}}), Error);
    }

    TEST_CASE("reports are reproducible across runs and thread counts") {
        ojson cfg{{"timing", false}};
        std::string a = render(run_suite("partition", cfg, 1), "json");
        std::string b = render(run_suite("partition", cfg, 4), "json");
        CHECK(a == b);
        SuiteReport d = run_suite("disjointness", {{"timing", false}, {"bank", {{"size", 6}}}}, 3);
        CHECK(render(d, "csv") == render(run_suite("disjointness", {{"timing", false}, {"bank", {{"size", 6}}}}, 1), "csv"));
        CHECK(d.passed());
        for (std::size_t i = 1; i < d.cases.size(); ++i) CHECK(d.cases[i - 1].id < d.cases[i].id);
        CHECK(d.wall_time == 0.0);
    }

    TEST_CASE("cheap suites pass with defaults") {
        CHECK(run_suite("partition").passed());
        CHECK(run_suite("calculus").passed());
    }

    TEST_CASE("thresholds live in the config") {
        // tightening a gate past the measured value turns the suite red
        SuiteReport r = run_suite("partition", {{"tol", -1.0}});
        CHECK_FALSE(r.passed());
    }

    TEST_CASE("parallel_for covers every index once") {
        std::vector<int> hits(1000, 0);
        parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
}

TEST_SUITE("bank") {
    TEST_CASE("same seed, same bits") {
        BankConfig cfg;
        cfg.grid = Grid{{4096}, 16 * kPi, true};
        cfg.blocks = 7;
        cfg.size = 10;
        cfg.seed = 7;
        auto a = generate_bank(cfg), b = generate_bank(cfg);
        REQUIRE(a.size() == 10);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].id == b[i].id);
            CHECK(a[i].f.v == b[i].f.v);
        }
        cfg.seed = 8;
        auto c = generate_bank(cfg);
        CHECK(c[0].f.v != a[0].f.v);
    }

    TEST_CASE("members satisfy the tail and margin contracts") {
        BankConfig cfg;
        cfg.grid = Grid{{512, 256}, 16 * kPi, true};
        cfg.blocks = 3;
        cfg.size = 12;
        cfg.seed = 3;
        cfg.r = 2;
        LpGenerator gen;
        for (const auto& m : generate_bank(cfg)) {
            CHECK(block_tail(m.f, gen, cfg.blocks) <= 1e-12);
            CHECK(m.f.support_margin >= 0.25);
            CHECK(m.f.r == 2);
        }
    }

    TEST_CASE("infeasible configurations") {
        BankConfig cfg;
        cfg.grid = Grid{{256}, 8 * kPi, true};
        cfg.blocks = 12;
        CHECK_THROWS_AS(generate_bank(cfg), Error);
        cfg.blocks = 3;
        cfg.kinds = {"spiral"};
        CHECK_THROWS_AS(generate_bank(cfg), Error);
    }

    TEST_CASE("dilation by 2 moves the spectrum one block up") {
        Grid g{{8192}, 32 * kPi, true};
        LpSystem sys(LpGenerator(), 7, g);
        Atom a;
        a.center = {0.0};
        a.sigma = {4.0};
        a.omega = {14.0};
        auto e0 = block_energies(sample_atoms(g, 1, {a}), sys);
        auto e1 = block_energies(sample_atoms(g, 1, dilate_atoms({a}, 2.0)), sys);
        auto top0 = std::max_element(e0.begin(), e0.end()) - e0.begin();
        auto top1 = std::max_element(e1.begin(), e1.end()) - e1.begin();
        CHECK(top0 == 4);
        CHECK(top1 == 5);
        // ||f(2.)||^2 = ||f||^2 / 2
        CHECK(e1[5] == doctest::Approx(e0[4] / 2).epsilon(1e-10));
    }

    TEST_CASE("written bank reloads") {
        BankConfig cfg;
        cfg.grid = Grid{{1024}, 16 * kPi, true};
        cfg.blocks = 5;
        cfg.size = 4;
        auto bank = generate_bank(cfg);
        auto dir = std::filesystem::temp_directory_path() / "tracelab_bank_test";
        std::filesystem::remove_all(dir);
        write_bank(bank, cfg, dir.string());
        CHECK(std::filesystem::exists(dir / "manifest.json"));
        for (const auto& m : bank) CHECK(load_grid_function((dir / (m.id + ".wtlb")).string()).v == m.f.v);
        std::filesystem::remove_all(dir);
    }
}
