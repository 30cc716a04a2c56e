#include "suites.hpp"

#include "suite_util.hpp"

#include "norms.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <map>
#include <sstream>

namespace tracelab {

namespace suites {

std::vector<CaseRecord> run_tasks(const std::vector<Task>& tasks, int threads) {
    std::vector<std::vector<CaseRecord>> out(tasks.size());
    parallel_for(tasks.size(), threads, [&](std::size_t i) {
        try {
            out[i] = tasks[i].run();
        } catch (const std::exception& e) {
            out[i] = {make_case(tasks[i].id, tasks[i].params, NAN, std::nullopt, std::nullopt, true,
                                std::string("error: ") + e.what())};
        }
    });
    std::vector<CaseRecord> flat;
    for (auto& v : out)
        for (auto& c : v) flat.push_back(std::move(c));
    return flat;
}

Grid grid_from(const ojson& j) {
    Grid g;
    g.n = j.at("n").get<std::vector<int>>();
    g.L = j.at("L_over_pi").get<double>() * std::numbers::pi;
    g.offset = j.value("offset", true);
    g.validate();
    return g;
}

BankConfig bank_from(const ojson& j, const Grid& g, int blocks) {
    BankConfig b;
    b.grid = g;
    b.blocks = blocks;
    b.size = j.value("size", 50);
    b.seed = j.value("seed", std::uint64_t{7});
    b.r = j.value("r", 1);
    b.boundary_jmax = j.value("boundary_jmax", 6);
    if (j.contains("kinds")) b.kinds = j["kinds"].get<std::vector<std::string>>();
    return b;
}

std::vector<double> doubles(const ojson& j) { return j.get<std::vector<double>>(); }
std::vector<int> ints(const ojson& j) { return j.get<std::vector<int>>(); }

double qvalue(const ojson& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return INFINITY;
        throw Error(Status::Arg, "q must be a number or \"inf\"");
    }
    return j.get<double>();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double a = std::log(x[i]), b = std::log(y[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string fixed(double x, int prec) {
    std::ostringstream os;
    os << std::setprecision(prec) << x;
    return os.str();
}

double grid_lp(const GridFunction& f, double p) {
    double cell = 1.0;
    for (int a = 0; a < f.grid.dim(); ++a) cell *= f.grid.h(a);
    std::vector<double> t(f.nodes());
    for (std::size_t k = 0; k < t.size(); ++k) {
        double s = 0.0;
        for (int c = 0; c < f.r; ++c) s += std::norm(f.at(k, c));
        t[k] = std::pow(std::sqrt(s), p);
    }
    return std::pow(pairwise_sum(t.data(), t.size()) * cell, 1.0 / p);
}

}  // namespace suites

namespace {

struct Entry {
    SuiteInfo info;
    ojson (*defaults)();
    suites::Runner run;
};

const std::vector<Entry>& registry() {
    using namespace suites;
    static const std::vector<Entry> r{
        {{"partition", "telescoping partition of unity of the LP system", 1}, partition_defaults, partition_run},
        {{"disjointness", "S_k S_j = 0 for |k-j| >= 2 and block synthesis", 2}, disjointness_defaults,
         disjointness_run},
        {{"trace-ext", "trace / extension right-inverse identities", 3}, trace_ext_defaults, trace_ext_run},
        {{"scaling", "sup_x1 ||h(x1,.)||_p / ||h||_{p,gamma} against the band limit R", 4}, scaling_defaults,
         scaling_run},
        {{"hardy", "weighted Hardy inequality", 5}, hardy_defaults, hardy_run},
        {{"sobolev-embedding", "dilation consistency of the weighted Sobolev embedding", 6},
         sobolev_embedding_defaults, sobolev_embedding_run},
        {{"sandwich", "F/H/W/B sandwich embeddings and q-monotonicity", 7}, sandwich_defaults, sandwich_run},
        {{"norm-equivalence", "independence of the LP generator", 8}, norm_equivalence_defaults,
         norm_equivalence_run},
        {{"indicator", "half-space indicator as a multiplier on H^{s,p}", 9}, indicator_defaults, indicator_run},
        {{"boundary-sys", "right inverse of normal boundary systems", 10}, boundary_sys_defaults, boundary_sys_run},
        {{"kernel-C", "kernel of the extended system C against the trace kernel", 11}, kernel_c_defaults,
         kernel_c_run},
        {{"interp-logconvex", "multiplicative W^l bound from the interpolation identity", 12},
         interp_logconvex_defaults, interp_logconvex_run},
        {{"fubini", "mixed-norm split of W^{k,p} on the half-space", 13}, fubini_defaults, fubini_run},
        {{"calculus", "golden queries of the space calculus", 14}, calculus_defaults, calculus_run},
        {{"trace-HW", "trace continuity from W^{k,p} / H^{s,p} into B_{p,p}", 0}, trace_hw_defaults, trace_hw_run},
        {{"vector-trace", "vector extension recovers all traces", 0}, vector_trace_defaults, vector_trace_run},
        {{"mollify", "boundary-preserving mollification", 0}, mollify_defaults, mollify_run},
    };
    return r;
}

const Entry& lookup(const std::string& name) {
    for (const auto& e : registry())
        if (e.info.name == name) return e;
    throw Error(Status::NotFound, "unknown suite: " + name);
}

void merge(ojson& base, const ojson& over, const std::string& path) {
    if (!over.is_object()) throw Error(Status::Arg, "suite config must be a JSON object");
    for (auto it = over.begin(); it != over.end(); ++it) {
        std::string key = path.empty() ? it.key() : path + "." + it.key();
        if (!base.contains(it.key())) throw Error(Status::Arg, "unknown config key: " + key);
        ojson& slot = base[it.key()];
        if (slot.is_object() && it.value().is_object())
            merge(slot, it.value(), key);
        else
            slot = it.value();
    }
}

}  // namespace

const std::vector<SuiteInfo>& suite_list() {
    static const std::vector<SuiteInfo> v = [] {
        std::vector<SuiteInfo> out;
        for (const auto& e : registry()) out.push_back(e.info);
        return out;
    }();
    return v;
}

ojson suite_defaults(const std::string& name) {
    ojson d = lookup(name).defaults();
    d["timing"] = true;
    return d;
}

SuiteReport run_suite(const std::string& name, const ojson& overrides, int threads) {
    const Entry& e = lookup(name);
    ojson cfg = suite_defaults(name);
    if (!overrides.is_null()) merge(cfg, overrides, "");
    if (threads <= 0) threads = thread_budget();
    auto t0 = std::chrono::steady_clock::now();
    suites::Output out;
    try {
        out = e.run(cfg, threads);
    } catch (const ojson::exception& ex) {
        throw Error(Status::Arg, std::string("suite config: ") + ex.what());
    }
    auto t1 = std::chrono::steady_clock::now();
    SuiteReport r;
    r.suite = name;
    r.config = cfg;
    r.cases = std::move(out.cases);
    std::stable_sort(r.cases.begin(), r.cases.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < r.cases.size(); ++i)
        if (r.cases[i].id == r.cases[i - 1].id) throw Error(Status::Internal, "duplicate case id " + r.cases[i].id);
    r.aggregate = std::move(out.aggregate);
    r.wall_time = cfg.value("timing", true) ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
    return r;
}

}  // namespace tracelab
