#pragma once

#include "bank.hpp"
#include "errors.hpp"
#include "report.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace tracelab::suites {

struct Output {
    std::vector<CaseRecord> cases;
    ojson aggregate = ojson::object();
};

/// A unit of work yielding case records; `id` labels the failure record if it throws.
struct Task {
    std::string id;
    ojson params = ojson::object();
    std::function<std::vector<CaseRecord>()> run;
};

/// Runs tasks concurrently; an exception becomes a failing gated record.
std::vector<CaseRecord> run_tasks(const std::vector<Task>& tasks, int threads);

/// {"n": [..], "L_over_pi": x, "offset": b}
Grid grid_from(const ojson& j);
BankConfig bank_from(const ojson& j, const Grid& g, int blocks);

std::vector<double> doubles(const ojson& j);
std::vector<int> ints(const ojson& j);
/// "inf" or a number.
double qvalue(const ojson& j);

inline double log_ratio_span(const std::vector<double>& v) {
    double lo = INFINITY, hi = 0.0;
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return hi / lo;
}

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

std::string fixed(double x, int prec = 3);
/// "key=value" path segment of a case id.
inline std::string tag(const char* k, double v) { return std::string(k) + "=" + fixed(v, 4); }

/// Discrete unweighted L^p over the grid. No support-margin contract, so it is
/// the measure of choice for residuals.
double grid_lp(const GridFunction& f, double p = 2.0);

using Runner = Output (*)(const ojson& cfg, int threads);

// Defaults and runners, one pair per suite.
ojson partition_defaults();
Output partition_run(const ojson&, int);
ojson disjointness_defaults();
Output disjointness_run(const ojson&, int);
ojson norm_equivalence_defaults();
Output norm_equivalence_run(const ojson&, int);
ojson sandwich_defaults();
Output sandwich_run(const ojson&, int);
ojson sobolev_embedding_defaults();
Output sobolev_embedding_run(const ojson&, int);
ojson hardy_defaults();
Output hardy_run(const ojson&, int);
ojson scaling_defaults();
Output scaling_run(const ojson&, int);
ojson trace_ext_defaults();
Output trace_ext_run(const ojson&, int);
ojson trace_hw_defaults();
Output trace_hw_run(const ojson&, int);
ojson vector_trace_defaults();
Output vector_trace_run(const ojson&, int);
ojson indicator_defaults();
Output indicator_run(const ojson&, int);
ojson mollify_defaults();
Output mollify_run(const ojson&, int);
ojson boundary_sys_defaults();
Output boundary_sys_run(const ojson&, int);
ojson kernel_c_defaults();
Output kernel_c_run(const ojson&, int);
ojson interp_logconvex_defaults();
Output interp_logconvex_run(const ojson&, int);
ojson fubini_defaults();
Output fubini_run(const ojson&, int);
ojson calculus_defaults();
Output calculus_run(const ojson&, int);

}  // namespace tracelab::suites
