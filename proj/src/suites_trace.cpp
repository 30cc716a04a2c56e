// Trace, extension, indicator and mollification suites.
#include "fft.hpp"
#include "norms.hpp"
#include "spectral.hpp"
#include "suite_util.hpp"
#include "trace_ext.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace tracelab::suites {

namespace {

struct TraceSetup {
    Grid g;
    EtaFamily eta;
    LpSystem bsys, fsys;
    TraceSetup(const ojson& cfg)
        : g(grid_from(cfg.at("grid"))),
          eta(g, cfg.at("boundary_blocks").get<int>(), cfg.at("m_max").get<int>()),
          bsys(LpGenerator(), cfg.at("boundary_blocks").get<int>(), g.boundary()),
          fsys(LpGenerator(), LpSystem::max_blocks(g), g) {}
};

ojson trace_grid() { return {{"n", {1024, 256}}, {"L_over_pi", 16.0}, {"offset", true}}; }

}  // namespace

// ---- trace-ext -------------------------------------------------------------

ojson trace_ext_defaults() {
    return {{"grid", trace_grid()},
            {"boundary_blocks", 3},
            {"m_max", 3},
            {"bank", {{"size", 50}, {"seed", 19}}},
            {"p", {2.0, 3.0}},
            {"gamma", {-0.5, 0.5, 1.5, 2.5}},
            {"tol", 1e-7}};
}

Output trace_ext_run(const ojson& cfg, int threads) {
    TraceSetup S(cfg);
    const int M = S.eta.m_max();
    auto bank = generate_bank(bank_from(cfg.at("bank"), S.g.boundary(), S.bsys.blocks()));
    auto ps = doubles(cfg.at("p"));
    double tol = cfg.at("tol").get<double>();
    // Operators do not depend on (p, gamma): evaluate once per member, measure in every L^p.
    // worst[identity][p index]
    std::map<std::string, std::vector<double>> worst;
    std::mutex mu;
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < bank.size(); ++i) {
        tasks.push_back({bank[i].id, {{"member", bank[i].id}}, [&, i] {
                             const GridFunction& gb = bank[i].f;
                             std::vector<std::pair<std::string, std::vector<double>>> res;
                             auto record = [&](const std::string& id, const GridFunction& err, const GridFunction& ref) {
                                 std::vector<double> r;
                                 for (double p : ps) r.push_back(grid_lp(err, p) / grid_lp(ref, p));
                                 res.emplace_back(id, r);
                             };
                             record("trace_ext0", trace(ext0(gb, S.eta, S.bsys), S.fsys, 0) - gb, gb);
                             for (int m = 1; m <= M; ++m) {
                                 GridFunction e = ext_m(gb, m, S.eta, S.bsys);
                                 for (int j = 0; j <= m; ++j) {
                                     GridFunction t = trace(e, S.fsys, j);
                                     std::string id = "Tr" + std::to_string(j) + "_ext" + std::to_string(m);
                                     if (j == m) record(id, t - gb, gb);
                                     else record(id, t, gb);
                                 }
                             }
                             std::vector<GridFunction> gs;
                             for (int j = 0; j <= M; ++j) gs.push_back(bank[(i + static_cast<std::size_t>(j)) % bank.size()].f);
                             GridFunction fv = ext_vector(gs, S.eta, S.bsys);
                             std::vector<double> vr(ps.size(), 0.0);
                             for (int j = 0; j <= M; ++j) {
                                 GridFunction err = trace(fv, S.fsys, j) - gs[static_cast<std::size_t>(j)];
                                 for (std::size_t pi = 0; pi < ps.size(); ++pi) {
                                     double den = 0.0;
                                     for (const auto& x : gs) den = std::max(den, grid_lp(x, ps[pi]));
                                     vr[pi] = std::max(vr[pi], grid_lp(err, ps[pi]) / den);
                                 }
                             }
                             res.emplace_back("Tr_ext_vector", vr);
                             std::lock_guard<std::mutex> lock(mu);
                             for (auto& [id, r] : res) {
                                 auto& w = worst[id];
                                 w.resize(ps.size(), 0.0);
                                 for (std::size_t pi = 0; pi < ps.size(); ++pi) w[pi] = std::max(w[pi], r[pi]);
                             }
                             return std::vector<CaseRecord>{};
                         }});
    }
    Output o;
    o.cases = run_tasks(tasks, threads);
    for (std::size_t pi = 0; pi < ps.size(); ++pi)
        for (double gm : doubles(cfg.at("gamma"))) {
            ojson params{{"p", ps[pi]}, {"gamma", gm}};
            double m = 0.0;
            for (const auto& [id, w] : worst) {
                params["residuals"][id] = w[pi];
                m = std::max(m, w[pi]);
            }
            o.cases.push_back(make_case(tag("p", ps[pi]) + "/" + tag("gamma", gm), params, m, std::nullopt, tol, true,
                                        "max relative residual over identities and bank"));
        }
    o.aggregate["bank_size"] = bank.size();
    o.aggregate["rho1_at_zero"] = S.eta.rho1_at_zero();
    o.aggregate["max_moment_correction"] = S.eta.max_correction();
    return o;
}

// ---- vector-trace ----------------------------------------------------------

ojson vector_trace_defaults() {
    return {{"grid", trace_grid()},
            {"boundary_blocks", 3},
            {"m_max", 3},
            {"bank", {{"size", 20}, {"seed", 23}}},
            {"tol", 1e-7}};
}

Output vector_trace_run(const ojson& cfg, int threads) {
    TraceSetup S(cfg);
    const int M = S.eta.m_max();
    auto bank = generate_bank(bank_from(cfg.at("bank"), S.g.boundary(), S.bsys.blocks()));
    double tol = cfg.at("tol").get<double>();
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < bank.size(); ++i) {
        tasks.push_back({bank[i].id, {{"member", bank[i].id}}, [&, i] {
                             std::vector<CaseRecord> out;
                             auto pick = [&](std::size_t j) { return bank[(i + j) % bank.size()].f; };
                             ojson p{{"member", bank[i].id}};
                             for (int m = 1; m <= M; ++m) {
                                 std::vector<GridFunction> gs;
                                 double den = 0.0;
                                 for (int j = 0; j <= m; ++j) {
                                     gs.push_back(pick(static_cast<std::size_t>(j)));
                                     den = std::max(den, grid_lp(gs.back(), 2.0));
                                 }
                                 GridFunction f = ext_vector(gs, S.eta, S.bsys);
                                 double worst = 0.0;
                                 for (int j = 0; j <= m; ++j)
                                     worst = std::max(worst, grid_lp(trace(f, S.fsys, j) - gs[static_cast<std::size_t>(j)], 2.0) / den);
                                 out.push_back(make_case(bank[i].id + "/traces/m=" + std::to_string(m), p, worst,
                                                         std::nullopt, tol));
                             }
                             // (0, g1): the recursion collapses to ext_1
                             GridFunction zero(S.g.boundary(), 1);
                             GridFunction a = ext_vector({zero, pick(0)}, S.eta, S.bsys);
                             GridFunction b = ext_m(pick(0), 1, S.eta, S.bsys);
                             out.push_back(make_case(bank[i].id + "/collapse", p, grid_lp(a - b, 2.0) / grid_lp(b, 2.0),
                                                     std::nullopt, tol));
                             // linearity in the data
                             cplx c1(0.7, -0.2), c2(-1.3, 0.4);
                             std::vector<GridFunction> u{pick(0), pick(1), pick(2)}, v{pick(3), pick(4), pick(5)}, w;
                             for (int j = 0; j < 3; ++j) w.push_back(c1 * u[static_cast<std::size_t>(j)] + c2 * v[static_cast<std::size_t>(j)]);
                             GridFunction lhs = ext_vector(w, S.eta, S.bsys);
                             GridFunction rhs = c1 * ext_vector(u, S.eta, S.bsys) + c2 * ext_vector(v, S.eta, S.bsys);
                             out.push_back(make_case(bank[i].id + "/linearity", p, grid_lp(lhs - rhs, 2.0) / grid_lp(rhs, 2.0),
                                                     std::nullopt, tol));
                             return out;
                         }});
    }
    Output o;
    o.cases = run_tasks(tasks, threads);
    o.aggregate["bank_size"] = bank.size();
    return o;
}

// ---- trace-HW --------------------------------------------------------------

ojson trace_hw_defaults() {
    return {{"grid", trace_grid()},
            {"boundary_blocks", 3},
            {"bank", {{"size", 20}, {"seed", 29}}},
            {"p", {2.0, 3.0}},
            {"gamma", {-0.5, 0.5, 2.5}},
            {"k", {1, 2}},
            {"max_constant", 100.0}};
}

Output trace_hw_run(const ojson& cfg, int threads) {
    Grid g = grid_from(cfg.at("grid"));
    int NB = cfg.at("boundary_blocks").get<int>();
    LpSystem bsys(LpGenerator(), NB, g.boundary()), fsys(LpGenerator(), NB, g);
    auto bank = generate_bank(bank_from(cfg.at("bank"), g, NB));
    auto ps = doubles(cfg.at("p")), gs = doubles(cfg.at("gamma"));
    auto ks = ints(cfg.at("k"));
    double Cmax = cfg.at("max_constant").get<double>();
    struct Combo {
        int k, m;
        double p, gamma, t;
    };
    std::vector<Combo> combos;
    for (int k : ks)
        for (double p : ps)
            for (double gm : gs)
                for (int m = 0; m < k; ++m) {
                    double t = k - m - (gm + 1.0) / p;
                    if (t > 0.0) combos.push_back({k, m, p, gm, t});
                }
    std::vector<std::pair<double, double>> range(combos.size(), {INFINITY, 0.0});
    std::mutex mu;
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < bank.size(); ++i) {
        tasks.push_back({bank[i].id, {{"member", bank[i].id}}, [&, i] {
                             const GridFunction& f = bank[i].f;
                             std::map<int, GridFunction> tr;
                             std::map<std::tuple<int, double, double>, double> wn;
                             std::vector<double> r(combos.size());
                             for (std::size_t c = 0; c < combos.size(); ++c) {
                                 const auto& cb = combos[c];
                                 if (!tr.count(cb.m)) tr[cb.m] = trace(f, fsys, cb.m);
                                 auto key = std::make_tuple(cb.k, cb.p, cb.gamma);
                                 if (!wn.count(key))
                                     wn[key] = sobolev_norm(f, cb.k, cb.p, WeightSpec(cb.gamma, Domain::Half)).value;
                                 double num = besov_norm(tr[cb.m], cb.t, cb.p, cb.p, WeightSpec(0.0, Domain::Full), bsys).value;
                                 r[c] = num / wn[key];
                             }
                             std::lock_guard<std::mutex> lock(mu);
                             for (std::size_t c = 0; c < combos.size(); ++c)
                                 range[c] = {std::min(range[c].first, r[c]), std::max(range[c].second, r[c])};
                             return std::vector<CaseRecord>{};
                         }});
    }
    Output o;
    o.cases = run_tasks(tasks, threads);
    for (std::size_t c = 0; c < combos.size(); ++c) {
        const auto& cb = combos[c];
        std::string id = "k=" + std::to_string(cb.k) + "/m=" + std::to_string(cb.m) + "/" + tag("p", cb.p) + "/" +
                         tag("gamma", cb.gamma);
        ojson params{{"k", cb.k}, {"m", cb.m}, {"p", cb.p}, {"gamma", cb.gamma}, {"target_s", cb.t},
                     {"ratio_min", range[c].first}, {"ratio_max", range[c].second}};
        o.cases.push_back(make_case(id, params, range[c].second, 0.0, Cmax, true, "empirical constant"));
    }
    o.aggregate["bank_size"] = bank.size();
    return o;
}

// ---- indicator -------------------------------------------------------------

ojson indicator_defaults() {
    return {{"grid", {{"n", {32768}}, {"L_over_pi", 4.0}, {"offset", true}}},
            {"bank", {{"size", 50}, {"seed", 31}}},
            {"bank_blocks", 8},
            {"p", 2.0},
            {"gamma", {-0.5, 0.5}},
            {"bounded_max", 50.0},
            {"divergence_shift", 0.5},
            {"N_range", {6, 12}},
            {"growth_min", 10.0},
            {"trace_floor", 0.05},
            {"resolved_tail", 1e-12}};
}

Output indicator_run(const ojson& cfg, int threads) {
    Grid g = grid_from(cfg.at("grid"));
    int NB = cfg.at("bank_blocks").get<int>();
    auto bank = generate_bank(bank_from(cfg.at("bank"), g, NB));
    double p = cfg.at("p").get<double>(), bmax = cfg.at("bounded_max").get<double>(),
           shift = cfg.at("divergence_shift").get<double>(), gmin = cfg.at("growth_min").get<double>(),
           floor = cfg.at("trace_floor").get<double>();
    auto Nr = ints(cfg.at("N_range"));
    if (Nr.size() != 2 || Nr[0] >= Nr[1]) throw Error(Status::Arg, "N_range must be [N0, N1] with N0 < N1");
    LpSystem top(LpGenerator(), Nr[1], g);  // validates admissibility of N1
    // Members whose boundary value is a fair fraction of their maximum and whose own spectrum is
    // resolved by block N0 (so growth in N comes from the jump only), plus plain Gaussians at 0.
    std::vector<std::pair<std::string, GridFunction>> traced;
    for (const auto& m : bank) {
        if (block_tail(m.f, top.generator(), Nr[0]) > cfg.at("resolved_tail").get<double>()) continue;
        Spectrum s = to_coeffs(m.f);
        cplx v0 = 0.0;
        for (const auto& c : s.c) v0 += c;
        if (std::abs(v0) >= floor * m.f.max_abs()) traced.emplace_back(m.id, m.f);
    }
    for (double sg : {0.25, 0.5, 1.0}) {
        Atom a;
        a.center = {0.0};
        a.sigma = {sg};
        a.omega = {0.0};
        traced.emplace_back("gauss-" + fixed(sg), sample_atoms(g, 1, {a}));
    }
    std::vector<Task> tasks;
    for (double gm : doubles(cfg.at("gamma"))) {
        WeightSpec w(gm, Domain::Full);
        double s_mid = (gm + 1.0) / p - 0.5;
        std::string bid = "bounded/" + tag("gamma", gm);
        ojson bp{{"p", p}, {"gamma", gm}, {"s", s_mid}};
        tasks.push_back({bid, bp, [&, w, s_mid, bid, bp] {
                             double worst = 0.0;
                             for (const auto& m : bank) {
                                 double r = bessel_norm(indicator_multiply(m.f), s_mid, p, w).value /
                                            bessel_norm(m.f, s_mid, p, w).value;
                                 worst = std::max(worst, r);
                             }
                             ojson q = bp;
                             q["sup_ratio"] = worst;
                             return std::vector<CaseRecord>{make_case(bid, q, worst, 0.0, bmax)};
                         }});
        double s_div = (gm + 1.0) / p + shift;
        std::string did = "divergence/" + tag("gamma", gm);
        ojson dp{{"p", p}, {"gamma", gm}, {"s", s_div}, {"N0", Nr[0]}, {"N1", Nr[1]}};
        tasks.push_back({did, dp, [&, w, s_div, did, dp, gm] {
                             double worst = INFINITY, best = 0.0;
                             ojson per = ojson::object();
                             for (const auto& [id, f] : traced) {
                                 GridFunction cut = indicator_multiply(f);
                                 // The LP-truncated product has rapidly decaying tails; it inherits
                                 // the support margin of 1_+ f.
                                 double margin = measure_support_margin(cut);
                                 std::vector<double> vals;
                                 for (int N = Nr[0]; N <= Nr[1]; ++N) {
                                     Spectrum s = to_coeffs(cut);
                                     top.apply_lowpass(s, N);
                                     GridFunction t = from_coeffs(s);
                                     t.support_margin = margin;
                                     vals.push_back(bessel_norm(t, s_div, p, w).value);
                                 }
                                 per[id] = vals;
                                 worst = std::min(worst, vals.back() / vals.front());
                                 best = std::max(best, vals.back() / vals.front());
                             }
                             ojson q = dp;
                             q["max_growth"] = best;
                             q["norms_by_N"] = per;
                             q["predicted_growth"] = std::pow(2.0, (s_div - (gm + 1.0) / p) * (Nr[1] - Nr[0]));
                             return std::vector<CaseRecord>{
                                 make_case(did, q, worst, gmin, std::nullopt, true, "min growth over traced members")};
                         }});
    }
    Output o;
    o.cases = run_tasks(tasks, threads);
    o.aggregate["bank_size"] = bank.size();
    o.aggregate["traced_members"] = traced.size();
    return o;
}

// ---- mollify ---------------------------------------------------------------

ojson mollify_defaults() {
    return {{"grid", {{"n", {4096}}, {"L_over_pi", 2.0}, {"offset", true}}},
            {"steepness", {2.0, 4.0, 8.0, 16.0}},
            {"sigma", {0.5, 1.0}},
            {"omega", {0.0, 3.0}},
            {"cases", {{{"m", 1}, {"k", 2}, {"p", 2.0}, {"gamma", {0.0, 0.5}}},
                       {{"m", 0}, {"k", 1}, {"p", 2.0}, {"gamma", {0.0, 0.5}}},
                       {{"m", 1}, {"k", 2}, {"p", 3.0}, {"gamma", {0.5, 1.5}}}}},
            {"identity_tol", 1e-10},
            {"fd_ratio_min", 3.0}};
}

Output mollify_run(const ojson& cfg, int threads) {
    Grid g = grid_from(cfg.at("grid"));
    if (g.dim() != 1) throw Error(Status::Arg, "mollify suite uses a 1-D grid");
    auto ns = doubles(cfg.at("steepness"));
    double itol = cfg.at("identity_tol").get<double>(), ftol = cfg.at("fd_ratio_min").get<double>();
    // Even profiles (f'(0) = 0) for m = 1, odd ones (f(0) = 0) for m = 0.
    auto profile = [&](double sg, double om, bool odd) {
        Atom a, b;
        a.center = b.center = {0.0};
        a.sigma = b.sigma = {sg};
        a.omega = {om};
        b.omega = {-om};
        a.amp = odd ? cplx(0.0, -0.5) : cplx(0.5, 0.0);
        b.amp = odd ? cplx(0.0, 0.5) : cplx(0.5, 0.0);
        return sample_atoms(g, 1, {a, b});
    };
    std::vector<Task> tasks;
    int ci = 0;
    for (const auto& c : cfg.at("cases")) {
        int m = c.at("m").get<int>(), k = c.at("k").get<int>();
        double p = c.at("p").get<double>();
        for (double sg : doubles(cfg.at("sigma")))
            for (double om : doubles(cfg.at("omega"))) {
                bool odd = m == 0;
                double omega = odd && om == 0.0 ? 2.0 : om;  // sin needs a frequency
                std::string fid = "case" + std::to_string(ci) + "/" + tag("sigma", sg) + "/" + tag("omega", omega);
                ojson params{{"m", m}, {"k", k}, {"p", p}, {"sigma", sg}, {"omega", omega}};
                auto gammas = doubles(c.at("gamma"));
                tasks.push_back({fid, params, [&, m, k, p, sg, omega, odd, fid, params, gammas] {
                                     GridFunction f = profile(sg, omega, odd);
                                     std::vector<GridFunction> df;
                                     for (int j = 0; j <= k; ++j) df.push_back(derivative(f, {j}));
                                     double scale = f.max_abs();
                                     std::vector<CaseRecord> out;
                                     double far = 0.0, flat = 0.0, leib = 0.0, fd = 0.0, fd2 = 0.0;
                                     std::map<double, std::vector<double>> err;  // gamma -> per n
                                     for (double n : ns) {
                                         std::vector<GridFunction> gn;
                                         for (int j = 0; j <= k; ++j) gn.push_back(mollify(f, m, n, j));
                                         std::size_t first = 0;
                                         while (g.x(0, static_cast<int>(first)) < 0.0) ++first;
                                         for (int i = 0; i < g.n[0]; ++i) {
                                             double x = g.x(0, i);
                                             auto ie = static_cast<std::size_t>(i);
                                             if (x >= 1.0 / n) far = std::max(far, std::abs(gn[0].v[ie] - f.v[ie]));
                                             if (x > 0.0 && x < 0.5 / n && m >= 1) {
                                                 // d^m g_n = 0 there: d^(m-1) g_n is constant (integral branch)
                                                 const auto& lo = gn[static_cast<std::size_t>(m - 1)];
                                                 flat = std::max(flat, std::abs(lo.v[ie] - lo.v[first]));
                                             }
                                             if (x > 0.0 && m <= k) {
                                                 double ph = mollifier_profile(n * x, 0).value();
                                                 leib = std::max(leib, std::abs(gn[static_cast<std::size_t>(m)].v[ie] -
                                                                                ph * df[static_cast<std::size_t>(m)].v[ie]));
                                             }
                                             if (x > 3.0 * g.h(0) && i + 2 < g.n[0]) {
                                                 // central differences at h and 2h against the claimed derivative
                                                 cplx d1 = (gn[0].v[ie + 1] - gn[0].v[ie - 1]) / (2.0 * g.h(0));
                                                 cplx d2 = (gn[0].v[ie + 2] - gn[0].v[ie - 2]) / (4.0 * g.h(0));
                                                 fd = std::max(fd, std::abs(d1 - gn[1].v[ie]));
                                                 fd2 = std::max(fd2, std::abs(d2 - gn[1].v[ie]));
                                             }
                                         }
                                         for (double gm : gammas) {
                                             auto mass = axis0_masses(g, gm);
                                             double tot = 0.0;
                                             for (int j = 0; j <= k; ++j) {
                                                 std::vector<double> t;
                                                 for (int i = 0; i < g.n[0]; ++i)
                                                     if (g.x(0, i) > 0.0) {
                                                         auto ie = static_cast<std::size_t>(i);
                                                         t.push_back(std::pow(std::abs(df[static_cast<std::size_t>(j)].v[ie] -
                                                                                       gn[static_cast<std::size_t>(j)].v[ie]),
                                                                              p) * mass[ie]);
                                                     }
                                                 tot += std::pow(pairwise_sum(t.data(), t.size()), 1.0 / p);
                                             }
                                             err[gm].push_back(tot);
                                         }
                                     }
                                     out.push_back(make_case(fid + "/equal-beyond-1/n", params, far / scale, std::nullopt, itol));
                                     if (m >= 1)
                                         out.push_back(make_case(fid + "/flat-near-boundary", params, flat / scale,
                                                                 std::nullopt, itol));
                                     out.push_back(make_case(fid + "/leibniz", params, leib / scale, std::nullopt, itol));
                                     // second-order convergence of the differences to g_n' (ratio 4 ideally, 1 if g_n' were wrong)
                                     ojson fp = params;
                                     fp["fd_error_h"] = fd;
                                     fp["fd_error_2h"] = fd2;
                                     if (m >= 1)
                                         out.push_back(make_case(fid + "/derivative-consistency", fp, fd2 / fd, ftol, std::nullopt,
                                                                 true, "FD error ratio 2h : h"));
                                     for (const auto& [gm, e] : err) {
                                         bool dec = true;
                                         for (std::size_t i = 1; i < e.size(); ++i) dec = dec && e[i] < e[i - 1];
                                         ojson q = params;
                                         q["gamma"] = gm;
                                         q["errors"] = e;
                                         q["rate"] = loglog_slope(ns, e);
                                         q["predicted_rate"] = ((k - m - 1) * p - 1.0 - gm) / p;
                                         out.push_back(make_case(fid + "/decrease/" + tag("gamma", gm), q, dec ? 1.0 : 0.0,
                                                                 1.0, 1.0, true, "W^{k,p} error decreasing in n"));
                                     }
                                     return out;
                                 }});
            }
        ++ci;
    }
    Output o;
    o.cases = run_tasks(tasks, threads);
    return o;
}

}  // namespace tracelab::suites
