// tracelab command line front end; talks to the library only through the C API.
#include "tracelab/tracelab.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct CString {
    char* p = nullptr;
    ~CString() { tl_free_string(p); }
};

struct ReportHandle {
    tl_report* p = nullptr;
    ~ReportHandle() { tl_report_free(p); }
};

struct GridHandle {
    tl_grid* p = nullptr;
    GridHandle() = default;
    GridHandle(GridHandle&& o) noexcept : p(o.p) { o.p = nullptr; }
    ~GridHandle() { tl_grid_free(p); }
};

struct LpHandle {
    tl_lp* p = nullptr;
    ~LpHandle() { tl_lp_free(p); }
};

constexpr int kExitFailed = 1;
constexpr int kExitError = 2;

// Throws with the library's message on a non-ok status.
void check(tl_status s) {
    if (s != TL_OK) throw std::runtime_error(std::string(tl_status_name(s)) + " error: " + tl_last_error());
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

int threads_from_env() {
    const char* t = std::getenv("TRACELAB_THREADS");
    return t ? std::atoi(t) : 0;
}

double parse_q(const std::string& q) {
    if (q.empty()) return NAN;
    if (q == "inf") return INFINITY;
    return std::stod(q);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tracelab: weighted function spaces, traces and extensions on the half-space"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tl_version()));

    auto* suite = app.add_subcommand("suite", "run a verification suite");
    std::string suite_name, config_path, report_path, format = "json";
    int threads = 0;
    bool quiet = false;
    suite->add_option("name", suite_name, "suite name (see `tracelab list`)")->required();
    suite->add_option("--config", config_path, "JSON overrides merged over the defaults")->check(CLI::ExistingFile);
    suite->add_option("--report", report_path, "write the report here instead of stdout");
    suite->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
    suite->add_option("--threads", threads, "worker cap (default: TRACELAB_THREADS or all cores)");
    suite->add_flag("-q,--quiet", quiet, "no report on stdout");

    auto* defaults = app.add_subcommand("defaults", "print the default configuration of a suite");
    std::string defaults_name;
    defaults->add_option("name", defaults_name)->required();

    auto* list = app.add_subcommand("list", "list suites");

    auto* query = app.add_subcommand("query", "evaluate a space-calculus query");
    std::vector<std::string> query_words;
    query->add_option("expr", query_words, "query text; several words are joined by spaces")->required();

    auto* bank = app.add_subcommand("bank", "write a deterministic test bank");
    std::uint64_t seed = 7;
    int bank_size = 50, blocks = 0;
    std::vector<int> bank_n{4096};
    double L_over_pi = 16.0;
    std::string out_dir;
    bank->add_option("--seed", seed)->required();
    bank->add_option("--out", out_dir, "output directory")->required();
    bank->add_option("--size", bank_size)->capture_default_str();
    bank->add_option("--n", bank_n, "points per axis")->capture_default_str();
    bank->add_option("--L-over-pi", L_over_pi, "torus half-period in units of pi")->capture_default_str();
    bank->add_option("--blocks", blocks, "LP block count (0: largest admissible)")->capture_default_str();

    auto* norm = app.add_subcommand("norm", "norm of grid-function files as CSV");
    std::vector<std::string> files;
    std::string family = "B", q_text, domain = "full";
    double s = 0.0, p = 2.0, gamma = 0.0, sharpness = 1.0;
    norm->add_option("files", files, ".wtlb files")->required()->check(CLI::ExistingFile);
    norm->add_option("--family", family)->check(CLI::IsMember({"L", "W", "H", "B", "F"}))->capture_default_str();
    norm->add_option("--s", s, "smoothness (integer k for W)")->capture_default_str();
    norm->add_option("--p", p)->capture_default_str();
    norm->add_option("--q", q_text, "number or inf (B and F)");
    norm->add_option("--gamma", gamma)->capture_default_str();
    norm->add_option("--domain", domain)->check(CLI::IsMember({"full", "half"}))->capture_default_str();
    norm->add_option("--sharpness", sharpness, "LP ramp sharpness")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*suite) {
            std::string cfg = config_path.empty() ? std::string() : read_file(config_path);
            if (threads <= 0) threads = threads_from_env();
            ReportHandle rep;
            check(tl_suite_run(suite_name.c_str(), cfg.empty() ? nullptr : cfg.c_str(), threads, &rep.p));
            if (!report_path.empty()) {
                check(tl_report_write(rep.p, report_path.c_str(), format.c_str()));
            } else if (!quiet) {
                CString text;
                check(tl_report_render(rep.p, format.c_str(), &text.p));
                std::fwrite(text.p, 1, std::strlen(text.p), stdout);
            }
            bool ok = tl_report_passed(rep.p) != 0;
            std::fprintf(stderr, "%s: %s (%zu cases)\n", suite_name.c_str(), ok ? "PASS" : "FAIL",
                         tl_report_case_count(rep.p));
            return ok ? 0 : kExitFailed;
        }
        if (*defaults) {
            CString text;
            check(tl_suite_defaults(defaults_name.c_str(), &text.p));
            std::printf("%s\n", text.p);
            return 0;
        }
        if (*list) {
            CString text;
            check(tl_suite_list(&text.p));
            for (const auto& e : nlohmann::json::parse(text.p)) {
                int c = e["criterion"].get<int>();
                std::printf("%-18s %-4s %s\n", e["name"].get<std::string>().c_str(),
                            c ? ("C" + std::to_string(c)).c_str() : "-", e["summary"].get<std::string>().c_str());
            }
            return 0;
        }
        if (*query) {
            std::string expr;
            for (const auto& w : query_words) expr += (expr.empty() ? "" : " ") + w;
            CString text;
            check(tl_query(expr.c_str(), &text.p));
            std::printf("%s\n", text.p);
            return 0;
        }
        if (*bank) {
            int count = 0;
            check(tl_bank_write(seed, bank_size, static_cast<int>(bank_n.size()), bank_n.data(), L_over_pi * std::numbers::pi,
                                blocks, out_dir.c_str(), &count));
            std::fprintf(stderr, "wrote %d functions to %s\n", count, out_dir.c_str());
            return 0;
        }
        if (*norm) {
            std::vector<GridHandle> grids;
            std::vector<const tl_grid*> ptrs;
            std::vector<const char*> ids;
            for (const auto& f : files) {
                GridHandle g;
                check(tl_grid_load(f.c_str(), &g.p));
                grids.push_back(std::move(g));
            }
            for (std::size_t i = 0; i < grids.size(); ++i) {
                ptrs.push_back(grids[i].p);
                ids.push_back(files[i].c_str());
            }
            LpHandle sys;
            if (family == "B" || family == "F") check(tl_lp_system_create(ptrs[0], sharpness, 0, &sys.p));
            CString csv;
            check(tl_norm_batch_csv(ptrs.data(), ids.data(), ptrs.size(), family.c_str(), s, p, parse_q(q_text), gamma,
                                    domain == "half" ? TL_HALF : TL_FULL, sys.p, &csv.p));
            std::fwrite(csv.p, 1, std::strlen(csv.p), stdout);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "tracelab: %s\n", e.what());
        return kExitError;
    }
    return kExitError;
}
