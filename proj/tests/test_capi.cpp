// Exercises the shared library through the public header only.
#include <doctest.h>

#include "tracelab/tracelab.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

namespace {

constexpr double kPi = std::numbers::pi;

std::string take(char* s) {
    std::string out = s ? s : "";
    tl_free_string(s);
    return out;
}

tl_grid* gauss_grid(int n, double L, double sigma) {
    tl_grid* g = nullptr;
    REQUIRE(tl_grid_create(1, &n, L, 1, 1, 0.0, &g) == TL_OK);
    std::vector<double> v(tl_grid_value_count(g));
    for (int i = 0; i < n; ++i) {
        double x = 0;
        REQUIRE(tl_grid_coord(g, 0, i, &x) == TL_OK);
        v[2 * i] = std::exp(-x * x / (2 * sigma * sigma));
    }
    REQUIRE(tl_grid_set(g, v.data(), v.size()) == TL_OK);
    return g;
}

}  // namespace

TEST_SUITE("capi") {
    TEST_CASE("version and status names") {
        CHECK(std::strlen(tl_version()) > 0);
        CHECK(std::string(tl_status_name(TL_ERR_PARSE)) == "parse");
    }

    TEST_CASE("null arguments are errors, not crashes") {
        char* out = nullptr;
        CHECK(tl_query(nullptr, &out) == TL_ERR_ARG);
        CHECK(std::string(tl_last_error()).find("NULL") != std::string::npos);
        CHECK(tl_suite_run(nullptr, nullptr, 1, nullptr) == TL_ERR_ARG);
        CHECK(tl_report_passed(nullptr) == 0);
        tl_grid_free(nullptr);
        tl_report_free(nullptr);
        tl_lp_free(nullptr);
    }

    TEST_CASE("query") {
        char* out = nullptr;
        REQUIRE(tl_query("trace m=0 B[s=2,p=2,q=1,gamma=0]", &out) == TL_OK);
        std::string j = take(out);
        CHECK(j.find("B[s=3/2,p=2,q=1,gamma=0,d=1,r=1,dom=bdry]") != std::string::npos);
        CHECK(tl_query("trace m=0 B[s=2", &out) == TL_ERR_PARSE);
        CHECK(std::string(tl_last_error()).find("column") != std::string::npos);
    }

    TEST_CASE("suites") {
        char* out = nullptr;
        REQUIRE(tl_suite_list(&out) == TL_OK);
        CHECK(take(out).find("\"kernel-C\"") != std::string::npos);
        tl_report* r = nullptr;
        CHECK(tl_suite_run("nope", nullptr, 1, &r) == TL_ERR_NOT_FOUND);
        CHECK(tl_suite_run("partition", "{\"bogus\": 1}", 1, &r) == TL_ERR_ARG);
        CHECK(tl_suite_run("partition", "{oops", 1, &r) == TL_ERR_PARSE);
        REQUIRE(tl_suite_run("partition", "{\"timing\": false}", 1, &r) == TL_OK);
        CHECK(tl_report_passed(r) == 1);
        REQUIRE(tl_report_render(r, "csv", &out) == TL_OK);
        std::string csv = take(out);
        CHECK(static_cast<size_t>(std::count(csv.begin(), csv.end(), '\n')) == tl_report_case_count(r) + 1);
        REQUIRE(tl_report_render(r, "json", &out) == TL_OK);
        std::string json = take(out);
        tl_report* back = nullptr;
        REQUIRE(tl_report_read(json.c_str(), &back) == TL_OK);
        REQUIRE(tl_report_render(back, "json", &out) == TL_OK);
        CHECK(take(out) == json);
        CHECK(tl_report_render(r, "yaml", &out) == TL_ERR_ARG);
        CHECK(tl_report_write(r, "/nonexistent-dir/x.json", "json") == TL_ERR_IO);
        tl_report_free(back);
        tl_report_free(r);
    }

    TEST_CASE("grid functions and norms") {
        tl_grid* g = gauss_grid(2048, 16 * kPi, 1.0);
        int d = 0, n[4] = {0}, r = 0;
        double L = 0;
        REQUIRE(tl_grid_shape(g, &d, n, 4, &L, &r) == TL_OK);
        CHECK(d == 1);
        CHECK(n[0] == 2048);
        CHECK(L == doctest::Approx(16 * kPi));
        double v = 0, tail = -1;
        REQUIRE(tl_norm(g, "L", 0, 2, NAN, 0, TL_FULL, nullptr, &v, &tail) == TL_OK);
        CHECK(v == doctest::Approx(std::sqrt(std::sqrt(kPi))).epsilon(1e-10));
        CHECK(tl_norm(g, "B", 0.5, 2, 2, 0, TL_FULL, nullptr, &v, nullptr) == TL_ERR_ARG);
        CHECK(tl_norm(g, "Z", 0.5, 2, 2, 0, TL_FULL, nullptr, &v, nullptr) == TL_ERR_ARG);
        CHECK(tl_norm(g, "L", 0, 2, NAN, -2, TL_FULL, nullptr, &v, nullptr) == TL_ERR_DOMAIN);
        tl_lp* sys = nullptr;
        REQUIRE(tl_lp_system_create(g, 1.0, 0, &sys) == TL_OK);
        CHECK(tl_lp_blocks(sys) >= 1);
        REQUIRE(tl_norm(g, "B", 0.5, 2, INFINITY, 0.5, TL_HALF, sys, &v, nullptr) == TL_OK);
        CHECK(v > 0);
        const tl_grid* fs[2] = {g, g};
        const char* ids[2] = {"g0", "g1"};
        char* csv = nullptr;
        REQUIRE(tl_norm_batch_csv(fs, ids, 2, "W", 1, 2, NAN, 0, TL_FULL, nullptr, &csv) == TL_OK);
        std::string text = take(csv);
        CHECK(text.rfind("function_id,family,s_or_k,p,q,gamma,domain,value,tail\ng0,W,1,2,,0,full,", 0) == 0);

        tl_grid* b = nullptr;
        REQUIRE(tl_lp_block(sys, g, 0, &b) == TL_OK);
        CHECK(tl_lp_block(sys, g, 99, &b) != TL_OK);
        tl_grid_free(b);
        tl_lp_free(sys);

        auto path = (std::filesystem::temp_directory_path() / "tracelab_capi.wtlb").string();
        REQUIRE(tl_grid_save(g, path.c_str()) == TL_OK);
        tl_grid* h = nullptr;
        REQUIRE(tl_grid_load(path.c_str(), &h) == TL_OK);
        std::vector<double> a(tl_grid_value_count(g)), c(tl_grid_value_count(h));
        tl_grid_get(g, a.data(), a.size());
        tl_grid_get(h, c.data(), c.size());
        CHECK(a == c);
        CHECK(tl_grid_get(h, c.data(), c.size() - 1) == TL_ERR_ARG);
        CHECK(tl_grid_load("/nonexistent.wtlb", &h) == TL_ERR_IO);
        std::filesystem::remove(path);
        tl_grid_free(h);
        tl_grid_free(g);
    }

    TEST_CASE("support margin is enforced and declarable") {
        tl_grid* g = gauss_grid(1024, 2 * kPi, 3.0);
        double v = 0;
        CHECK(tl_norm(g, "L", 0, 2, NAN, 0, TL_FULL, nullptr, &v, nullptr) == TL_ERR_DOMAIN);
        REQUIRE(tl_grid_set_support_margin(g, 0.3) == TL_OK);
        CHECK(tl_norm(g, "L", 0, 2, NAN, 0, TL_FULL, nullptr, &v, nullptr) == TL_OK);
        tl_grid_free(g);
    }

    TEST_CASE("trace of an extension") {
        int n = 256;
        tl_grid* g = nullptr;
        REQUIRE(tl_grid_create(1, &n, 16 * kPi, 0, 1, 0.0, &g) == TL_OK);
        std::vector<double> v(tl_grid_value_count(g));
        for (int i = 0; i < n; ++i) {
            double x = 0;
            tl_grid_coord(g, 0, i, &x);
            v[2 * i] = std::exp(-(x - 0.5) * (x - 0.5) / 2);
        }
        tl_grid_set(g, v.data(), v.size());
        tl_lp* bsys = nullptr;
        REQUIRE(tl_lp_system_create(g, 1.0, 3, &bsys) == TL_OK);
        for (int m = 0; m <= 2; ++m) {
            tl_grid* e = nullptr;
            REQUIRE(tl_ext(g, bsys, 512, m, &e) == TL_OK);
            tl_lp* fsys = nullptr;
            REQUIRE(tl_lp_system_create(e, 1.0, 0, &fsys) == TL_OK);
            tl_grid* t = nullptr;
            REQUIRE(tl_trace(e, fsys, m, &t) == TL_OK);
            std::vector<double> w(tl_grid_value_count(t));
            tl_grid_get(t, w.data(), w.size());
            double err = 0;
            for (size_t i = 0; i < w.size(); ++i) err = std::max(err, std::abs(w[i] - v[i]));
            CHECK(err < 1e-8);
            tl_grid_free(t);
            tl_lp_free(fsys);
            tl_grid_free(e);
        }
        tl_lp_free(bsys);
        tl_grid_free(g);
    }

    TEST_CASE("bank writing") {
        auto dir = (std::filesystem::temp_directory_path() / "tracelab_capi_bank").string();
        std::filesystem::remove_all(dir);
        int n = 1024, count = 0;
        REQUIRE(tl_bank_write(7, 5, 1, &n, 16 * kPi, 0, dir.c_str(), &count) == TL_OK);
        CHECK(count == 5);
        CHECK(std::filesystem::exists(std::filesystem::path(dir) / "manifest.json"));
        CHECK(tl_bank_write(7, 5, 1, &n, 16 * kPi, 40, dir.c_str(), &count) == TL_ERR_ARG);
        std::filesystem::remove_all(dir);
    }
}
