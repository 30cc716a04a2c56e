// Littlewood-Paley and weighted-norm suites.
#include "fft.hpp"
#include "norms.hpp"
#include "spectral.hpp"
#include "suite_util.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <mutex>

namespace tracelab::suites {

namespace {

ojson one_d_grid(int n, double l_over_pi) { return {{"n", {n}}, {"L_over_pi", l_over_pi}, {"offset", true}}; }

}  // namespace

// ---- partition -------------------------------------------------------------

ojson partition_defaults() {
    return {{"grid", one_d_grid(4096, 4.0)},
            {"blocks", 8},
            {"sharpness", {1.0, 0.5, 2.0}},
            {"tol", 1e-12},
            {"profile_tol", 1e-15}};
}

Output partition_run(const ojson& cfg, int threads) {
    Grid g = grid_from(cfg.at("grid"));
    int N = cfg.at("blocks").get<int>();
    double tol = cfg.at("tol").get<double>(), ptol = cfg.at("profile_tol").get<double>();
    std::vector<Task> tasks;
    for (double a : doubles(cfg.at("sharpness"))) {
        std::string base = tag("a", a);
        ojson params{{"sharpness", a}, {"blocks", N}};
        tasks.push_back({base, params, [=] {
                             LpSystem sys(LpGenerator(a), N, g);
                             std::vector<CaseRecord> out;
                             out.push_back(make_case(base + "/telescoping", params, sys.telescoping_residual(),
                                                     std::nullopt, tol));
                             // plateau, cutoff and range of the generator on the grid frequencies
                             double prof = 0.0, supp = 0.0;
                             for (int i = 0; i < g.n[0]; ++i) {
                                 double rho = std::abs(g.xi(0, i));
                                 double v = sys.generator()(rho);
                                 if (rho <= 1.0) prof = std::max(prof, std::abs(v - 1.0));
                                 if (rho >= 1.5) prof = std::max(prof, std::abs(v));
                                 prof = std::max({prof, -v, v - 1.0});
                                 for (int n = 1; n <= N; ++n) {
                                     double lo = std::ldexp(1.0, n - 1), hi = 3.0 * lo;
                                     if (rho < lo || rho > hi) supp = std::max(supp, std::abs(sys.block(n, rho)));
                                 }
                             }
                             out.push_back(make_case(base + "/generator-profile", params, prof, std::nullopt, ptol));
                             out.push_back(make_case(base + "/block-support", params, supp, std::nullopt, ptol));
                             // h(1/2) = 1/2 for every sharpness, so phi(1.25) = 1/2
                             out.push_back(make_case(base + "/ramp-midpoint", params,
                                                     std::abs(sys.generator()(1.25) - 0.5), std::nullopt, ptol));
                             out.push_back(make_case(base + "/phi1-origin", params, std::abs(sys.block(1, 0.0)),
                                                     std::nullopt, 0.0));
                             // plateau of phi_3 is [6, 8]; |xi| = 3 lies where both dilates equal 1
                             out.push_back(make_case(base + "/phi3-at-7", params, std::abs(sys.block(3, 7.0) - 1.0),
                                                     std::nullopt, ptol));
                             out.push_back(make_case(base + "/phi3-at-3", params, std::abs(sys.block(3, 3.0)),
                                                     std::nullopt, ptol));
                             return out;
                         }});
    }
    Output o;
    o.cases = run_tasks(tasks, threads);
    o.aggregate["max_admissible_blocks"] = LpSystem::max_blocks(g);
    double worst = 0.0;
    for (const auto& c : o.cases)
        if (c.id.ends_with("/telescoping")) worst = std::max(worst, c.measured);
    o.aggregate["max_telescoping_residual"] = worst;
    return o;
}

// ---- disjointness ----------------------------------------------------------

ojson disjointness_defaults() {
    return {{"grid", one_d_grid(4096, 4.0)},
            {"blocks", 8},
            {"bank", {{"size", 50}, {"seed", 7}}},
            {"tol", 1e-12},
            {"synthesis_tol", 1e-10},
            {"tail_tol", 1e-12}};
}

Output disjointness_run(const ojson& cfg, int threads) {
    Grid g = grid_from(cfg.at("grid"));
    int N = cfg.at("blocks").get<int>();
    double tol = cfg.at("tol").get<double>(), stol = cfg.at("synthesis_tol").get<double>(),
           ttol = cfg.at("tail_tol").get<double>();
    auto bank = generate_bank(bank_from(cfg.at("bank"), g, N));
    LpSystem sys(LpGenerator(), N, g);
    std::vector<Task> tasks;
    for (const auto& m : bank) {
        tasks.push_back({m.id, {{"member", m.id}}, [&, m] {
                             double nf = grid_lp(m.f);
                             std::vector<GridFunction> blk;
                             for (int n = 0; n <= N; ++n) blk.push_back(sys.block(m.f, n));
                             double worst = 0.0;
                             for (int j = 0; j <= N; ++j)
                                 for (int k = 0; k <= N; ++k)
                                     if (std::abs(j - k) >= 2)
                                         worst = std::max(worst, grid_lp(sys.block(blk[static_cast<std::size_t>(j)], k)) / nf);
                             GridFunction syn = blk[0];
                             for (int n = 1; n <= N; ++n) syn += blk[static_cast<std::size_t>(n)];
                             double synth = grid_lp(syn - m.f) / nf;
                             double below = grid_lp(sys.block(m.f, -1), 2.0);
                             ojson p{{"member", m.id}, {"kind", m.kind}};
                             return std::vector<CaseRecord>{
                                 make_case(m.id + "/disjoint", p, worst, std::nullopt, tol),
                                 make_case(m.id + "/synthesis", p, synth, std::nullopt, stol),
                                 make_case(m.id + "/tail", p, block_tail(m.f, sys.generator(), N), std::nullopt, ttol),
                                 make_case(m.id + "/S_-1", p, below, std::nullopt, 0.0)};
                         }});
    }
    Output o;
    o.cases = run_tasks(tasks, threads);
    double worst = 0.0;
    for (const auto& c : o.cases)
        if (c.id.ends_with("/disjoint")) worst = std::max(worst, c.measured);
    o.aggregate["bank_size"] = bank.size();
    o.aggregate["max_disjointness"] = worst;
    return o;
}

// ---- norm-equivalence ------------------------------------------------------

ojson norm_equivalence_defaults() {
    return {{"grid", one_d_grid(4096, 4.0)},
            {"blocks", 8},
            {"sharpness", {1.0, 4.0}},
            {"bank", {{"size", 20}, {"seed", 11}}},
            {"s", {-1.0, 0.0, 0.5, 1.5}},
            {"p", {2.0, 3.0}},
            {"q", {1.0, 2.0, "inf"}},
            {"gamma", {-0.5, 0.5, 2.5}},
            {"bracket", 5.0}};
}

Output norm_equivalence_run(const ojson& cfg, int threads) {
    Grid g = grid_from(cfg.at("grid"));
    int N = cfg.at("blocks").get<int>();
    auto a = doubles(cfg.at("sharpness"));
    if (a.size() != 2) throw Error(Status::Arg, "norm-equivalence needs exactly two sharpness values");
    double C = cfg.at("bracket").get<double>();
    auto bank = generate_bank(bank_from(cfg.at("bank"), g, N));
    LpSystem s0(LpGenerator(a[0]), N, g), s1(LpGenerator(a[1]), N, g);
    std::vector<double> qs;
    for (const auto& q : cfg.at("q")) qs.push_back(qvalue(q));
    std::vector<Task> tasks;
    double lo_all = INFINITY, hi_all = 0.0;
    std::mutex mu;
    for (double s : doubles(cfg.at("s")))
        for (double p : doubles(cfg.at("p")))
            for (double q : qs)
                for (double gm : doubles(cfg.at("gamma"))) {
                    std::string id = tag("s", s) + "/" + tag("p", p) + "/" + tag("q", q) + "/" + tag("gamma", gm);
                    ojson params{{"s", s}, {"p", p}, {"q", std::isinf(q) ? ojson("inf") : ojson(q)}, {"gamma", gm}};
                    tasks.push_back({id, params, [&, id, params, s, p, q, gm] {
                                         WeightSpec w(gm, Domain::Full);
                                         double lo = INFINITY, hi = 0.0;
                                         for (const auto& m : bank) {
                                             double r = besov_norm(m.f, s, p, q, w, s1).value /
                                                        besov_norm(m.f, s, p, q, w, s0).value;
                                             lo = std::min(lo, r);
                                             hi = std::max(hi, r);
                                         }
                                         {
                                             std::lock_guard<std::mutex> lock(mu);
                                             lo_all = std::min(lo_all, lo);
                                             hi_all = std::max(hi_all, hi);
                                         }
                                         ojson p2 = params;
                                         p2["ratio_min"] = lo;
                                         p2["ratio_max"] = hi;
                                         return std::vector<CaseRecord>{
                                             make_case(id, p2, std::max(hi, 1.0 / lo), std::nullopt, C)};
                                     }});
                }
    Output o;
    o.cases = run_tasks(tasks, threads);
    o.aggregate["ratio_bracket"] = {lo_all, hi_all};
    o.aggregate["bank_size"] = bank.size();
    return o;
}

// ---- sandwich --------------------------------------------------------------

ojson sandwich_defaults() {
    return {{"grid", one_d_grid(4096, 4.0)},
            {"blocks", 8},
            {"bank", {{"size", 30}, {"seed", 13}}},
            {"weights", {{2.0, -0.5}, {2.0, 0.0}, {2.0, 0.5}, {3.0, 0.0}, {3.0, 1.0}, {3.0, 1.5}}},
            {"s", {0.0, 1.0, 1.5}},
            {"k", {0, 1, 2}},
            {"q", {1.0, 2.0, 4.0, "inf"}},
            {"max_constant", 100.0}};
}

Output sandwich_run(const ojson& cfg, int threads) {
    Grid g = grid_from(cfg.at("grid"));
    int N = cfg.at("blocks").get<int>();
    double Cmax = cfg.at("max_constant").get<double>();
    auto bank = generate_bank(bank_from(cfg.at("bank"), g, N));
    LpSystem sys(LpGenerator(), N, g);
    std::vector<double> qs;
    for (const auto& q : cfg.at("q")) qs.push_back(qvalue(q));
    auto svals = doubles(cfg.at("s"));
    auto kvals = ints(cfg.at("k"));
    std::vector<Task> tasks;
    std::mutex mu;
    std::map<std::string, std::pair<double, double>> constants;  // pair -> [min, max] ratio
    for (const auto& wpair : cfg.at("weights")) {
        double p = wpair.at(0).get<double>(), gm = wpair.at(1).get<double>();
        std::string wid = tag("p", p) + "/" + tag("gamma", gm);
        tasks.push_back({wid, {{"p", p}, {"gamma", gm}}, [&, p, gm, wid] {
                             WeightSpec w(gm, Domain::Full);
                             std::vector<CaseRecord> out;
                             // Norm values are shared between pairs: memoize per member.
                             std::map<std::tuple<char, std::size_t, double, double>, double> memo;
                             auto cached = [&](char kind, std::size_t i, double s, double q, auto&& fn) {
                                 auto key = std::make_tuple(kind, i, s, q);
                                 auto it = memo.find(key);
                                 if (it != memo.end()) return it->second;
                                 return memo[key] = fn(bank[i].f);
                             };
                             auto B = [&](std::size_t i, double s, double q) {
                                 return cached('B', i, s, q, [&](const GridFunction& f) { return besov_norm(f, s, p, q, w, sys).value; });
                             };
                             auto F = [&](std::size_t i, double s, double q) {
                                 return cached('F', i, s, q, [&](const GridFunction& f) { return triebel_norm(f, s, p, q, w, sys).value; });
                             };
                             auto H = [&](std::size_t i, double s) {
                                 return cached('H', i, s, 0.0, [&](const GridFunction& f) { return bessel_norm(f, s, p, w).value; });
                             };
                             auto Wk = [&](std::size_t i, int k) {
                                 return cached('W', i, k, 0.0, [&](const GridFunction& f) { return sobolev_norm(f, k, p, w).value; });
                             };
                             auto sup_case = [&](const std::string& name, const std::function<double(std::size_t)>& ratio,
                                                 ojson extra) {
                                 double lo = INFINITY, hi = 0.0;
                                 for (std::size_t i = 0; i < bank.size(); ++i) {
                                     double r = ratio(i);
                                     lo = std::min(lo, r);
                                     hi = std::max(hi, r);
                                 }
                                 ojson prm{{"p", p}, {"gamma", gm}};
                                 prm.update(extra);
                                 prm["ratio_min"] = lo;
                                 prm["ratio_max"] = hi;
                                 out.push_back(make_case(wid + "/" + name, prm, hi, 0.0, Cmax, true, "empirical constant"));
                                 std::lock_guard<std::mutex> lock(mu);
                                 auto key = name.substr(0, name.find('/'));
                                 auto it = constants.find(key);
                                 if (it == constants.end()) constants[key] = {lo, hi};
                                 else it->second = {std::min(it->second.first, lo), std::max(it->second.second, hi)};
                             };
                             for (double s : svals) {
                                 std::string sid = tag("s", s);
                                 sup_case("H_over_F1/" + sid, [&](std::size_t i) { return H(i, s) / F(i, s, 1.0); }, {{"s", s}});
                                 sup_case("Finf_over_H/" + sid, [&](std::size_t i) { return F(i, s, INFINITY) / H(i, s); }, {{"s", s}});
                                 for (double q : qs) {
                                     std::string qid = sid + "/" + tag("q", q);
                                     ojson ex{{"s", s}, {"q", std::isinf(q) ? ojson("inf") : ojson(q)}};
                                     sup_case("F_over_Bmin/" + qid, [&](std::size_t i) { return F(i, s, q) / B(i, s, std::min(p, q)); }, ex);
                                     sup_case("Bmax_over_F/" + qid, [&](std::size_t i) { return B(i, s, std::max(p, q)) / F(i, s, q); }, ex);
                                 }
                                 // exact l^q monotonicity: consecutive q in the sweep
                                 double worst_b = 0.0, worst_f = 0.0;
                                 for (std::size_t i = 0; i < bank.size(); ++i)
                                     for (std::size_t j = 0; j + 1 < qs.size(); ++j) {
                                         worst_b = std::max(worst_b, B(i, s, qs[j + 1]) / B(i, s, qs[j]));
                                         worst_f = std::max(worst_f, F(i, s, qs[j + 1]) / F(i, s, qs[j]));
                                     }
                                 ojson prm{{"p", p}, {"gamma", gm}, {"s", s}};
                                 out.push_back(make_case(wid + "/q-monotone-B/" + sid, prm, worst_b, std::nullopt, 1.0,
                                                         true, "max B(q1)/B(q0), q0 < q1; exact"));
                                 out.push_back(make_case(wid + "/q-monotone-F/" + sid, prm, worst_f, std::nullopt, 1.0,
                                                         true, "max F(q1)/F(q0), q0 < q1; exact"));
                             }
                             for (int k : kvals) {
                                 std::string kid = "k=" + std::to_string(k);
                                 sup_case("W_over_F1/" + kid, [&](std::size_t i) { return Wk(i, k) / F(i, k, 1.0); }, {{"k", k}});
                                 sup_case("Finf_over_W/" + kid, [&](std::size_t i) { return F(i, k, INFINITY) / Wk(i, k); }, {{"k", k}});
                             }
                             sup_case("L_over_F01/s=0", [&](std::size_t i) {
                                 return cached('L', i, 0.0, 0.0, [&](const GridFunction& f) { return lp_norm(f, p, w).value; }) /
                                        F(i, 0.0, 1.0);
                             }, ojson::object());
                             return out;
                         }});
    }
    Output o;
    o.cases = run_tasks(tasks, threads);
    for (const auto& [k, v] : constants) o.aggregate["constants"][k] = {v.first, v.second};
    o.aggregate["bank_size"] = bank.size();
    return o;
}

// ---- sobolev-embedding -----------------------------------------------------

ojson sobolev_embedding_defaults() {
    return {{"grid", one_d_grid(32768, 32.0)},
            {"blocks", 9},
            {"lambda_exponents", {-3, -2, -1, 0, 1, 2, 3}},
            {"tuples",
             {{{"source", {1.0, 2.0, 1.0}}, {"target", {0.5, 2.0, 0.0}}},
              {{"source", {1.0, 2.0, 0.0}}, {"target", {5.0 / 6.0, 3.0, 0.0}}},
              {{"source", {1.5, 2.0, 2.0}}, {"target", {1.0, 3.0, 2.0}}}}},
            {"q", 2.0},
            {"base_frequency", 24.0},
            {"base_sigma", 1.0},
            {"base_centers", {0.0, 0.4}},
            {"admissible_max_variation", 4.0},
            {"broken_min_variation", 8.0},
            {"break", 0.5}};
}

Output sobolev_embedding_run(const ojson& cfg, int threads) {
    Grid g = grid_from(cfg.at("grid"));
    int N = cfg.at("blocks").get<int>();
    LpSystem sys(LpGenerator(), N, g);
    auto lam = ints(cfg.at("lambda_exponents"));
    double q = qvalue(cfg.at("q")), w0 = cfg.at("base_frequency").get<double>(),
           sg = cfg.at("base_sigma").get<double>(), brk = cfg.at("break").get<double>();
    double vmax = cfg.at("admissible_max_variation").get<double>(), vmin = cfg.at("broken_min_variation").get<double>();
    std::vector<std::vector<Atom>> bases;
    for (double c : doubles(cfg.at("base_centers"))) {
        Atom a;
        a.center = {c};
        a.sigma = {sg};
        a.omega = {w0};
        bases.push_back({a});
    }
    std::vector<Task> tasks;
    int ti = 0;
    for (const auto& t : cfg.at("tuples")) {
        auto src = doubles(t.at("source")), dst = doubles(t.at("target"));
        std::string tid = "tuple" + std::to_string(ti++);
        for (int b = 0; b < static_cast<int>(bases.size()); ++b) {
            std::string bid = tid + "/base" + std::to_string(b);
            ojson params{{"source", src}, {"target", dst}, {"q", q}, {"base", b}};
            tasks.push_back({bid, params, [&, src, dst, bid, params, b] {
                                 // ratio(lambda) for target smoothness s1 + shift
                                 std::vector<double> lambdas;
                                 std::vector<GridFunction> fs;
                                 for (int e : lam) {
                                     double l = std::ldexp(1.0, e);
                                     lambdas.push_back(l);
                                     fs.push_back(sample_atoms(g, 1, dilate_atoms(bases[static_cast<std::size_t>(b)], l)));
                                 }
                                 WeightSpec ws(src[2], Domain::Full), wt(dst[2], Domain::Full);
                                 std::vector<double> srcn;
                                 for (const auto& f : fs) srcn.push_back(triebel_norm(f, src[0], src[1], q, ws, sys).value);
                                 auto ratios = [&](double shift) {
                                     std::vector<double> r;
                                     for (std::size_t i = 0; i < fs.size(); ++i)
                                         r.push_back(triebel_norm(fs[i], dst[0] + shift, dst[1], q, wt, sys).value / srcn[i]);
                                     return r;
                                 };
                                 auto monotone = [](const std::vector<double>& r) {
                                     bool up = true, down = true;
                                     for (std::size_t i = 1; i < r.size(); ++i) {
                                         up = up && r[i] > r[i - 1];
                                         down = down && r[i] < r[i - 1];
                                     }
                                     return up || down;
                                 };
                                 std::vector<CaseRecord> out;
                                 auto r0 = ratios(0.0);
                                 ojson p0 = params;
                                 p0["ratios"] = r0;
                                 out.push_back(make_case(bid + "/admissible", p0, log_ratio_span(r0), std::nullopt, vmax));
                                 for (double sh : {brk, -brk}) {
                                     auto r = ratios(sh);
                                     std::string sid = bid + "/broken" + (sh > 0 ? "+" : "-") + fixed(brk);
                                     ojson p1 = params;
                                     p1["shift"] = sh;
                                     p1["ratios"] = r;
                                     p1["slope"] = loglog_slope(lambdas, r);
                                     out.push_back(make_case(sid + "/variation", p1, log_ratio_span(r), vmin, std::nullopt));
                                     out.push_back(make_case(sid + "/monotone", p1, monotone(r) ? 1.0 : 0.0, 1.0, 1.0));
                                 }
                                 return out;
                             }});
        }
    }
    Output o;
    o.cases = run_tasks(tasks, threads);
    double amax = 0.0, bmin = INFINITY;
    for (const auto& c : o.cases) {
        if (c.id.ends_with("/admissible")) amax = std::max(amax, c.measured);
        if (c.id.ends_with("/variation")) bmin = std::min(bmin, c.measured);
    }
    o.aggregate["max_admissible_variation"] = amax;
    o.aggregate["min_broken_variation"] = bmin;
    // exact dyadic dilation: S_n f(2^e .) = (S_{n-e} f)(2^e .), so the broken ratio moves by exactly 2^(shift * span)
    auto [emin, emax] = std::minmax_element(lam.begin(), lam.end());
    o.aggregate["ideal_broken_variation"] = std::pow(2.0, brk * (*emax - *emin));
    return o;
}

// ---- hardy -----------------------------------------------------------------

ojson hardy_defaults() {
    return {{"grid", one_d_grid(8192, 8.0)},
            {"blocks", 9},
            {"bank", {{"size", 50}, {"seed", 17}}},
            {"above", {{2.0, 1.5}, {2.0, 3.0}, {2.0, 5.0}, {3.0, 2.5}, {3.0, 4.0}, {3.0, 6.0}}},
            {"below", {{2.0, -0.5}, {2.0, 0.0}, {2.0, 0.5}, {3.0, 0.0}, {3.0, 1.0}, {3.0, 1.5}}},
            {"excluded_p", {2.0, 3.0}},
            {"sharp_slack", 1.05},
            {"below_max", 100.0},
            {"upsample", 2},
            {"anchor_sigma", 1.0}};
}

Output hardy_run(const ojson& cfg, int threads) {
    Grid g = grid_from(cfg.at("grid"));
    int N = cfg.at("blocks").get<int>();
    auto members = generate_bank(bank_from(cfg.at("bank"), g, N));
    NormOptions opt{cfg.at("upsample").get<int>()};
    double slack = cfg.at("sharp_slack").get<double>(), bmax = cfg.at("below_max").get<double>(),
           sa = cfg.at("anchor_sigma").get<double>();
    // Half-line profiles: centres reflected into x1 >= 0.
    std::vector<std::vector<Atom>> free_bc, zero_bc;
    for (auto m : members) {
        for (auto& a : m.atoms) a.center[0] = std::abs(a.center[0]);
        free_bc.push_back(m.atoms);
        // subtract u(0) times a Gaussian anchor at the origin so that u(0) = 0 exactly
        cplx u0 = 0.0;
        for (const auto& a : m.atoms) {
            double t = a.center[0] / a.sigma[0];
            u0 += a.amp * std::exp(-0.5 * t * t);
        }
        Atom anchor;
        anchor.amp = -u0;
        anchor.center = {0.0};
        anchor.sigma = {sa};
        anchor.omega = {0.0};
        auto z = m.atoms;
        z.push_back(anchor);
        zero_bc.push_back(z);
    }
    std::vector<Task> tasks;
    auto arm = [&](const ojson& list, bool above) {
        for (const auto& pg : list) {
            double p = pg.at(0).get<double>(), gm = pg.at(1).get<double>();
            std::string id = std::string(above ? "above" : "below") + "/" + tag("p", p) + "/" + tag("gamma", gm);
            ojson params{{"p", p}, {"gamma", gm}};
            tasks.push_back({id, params, [&, p, gm, id, params, above] {
                                 const auto& set = above ? free_bc : zero_bc;
                                 double worst = 0.0;
                                 for (const auto& atoms : set) {
                                     GridFunction u = sample_atoms(g, 1, atoms);
                                     worst = std::max(worst, hardy_ratio(u, p, gm, opt).ratio);
                                 }
                                 double C = p / std::abs(gm - p + 1.0);
                                 ojson prm = params;
                                 prm["sup_ratio"] = worst;
                                 prm["C_sharp"] = C;
                                 if (above)
                                     return std::vector<CaseRecord>{make_case(id, prm, worst / C, std::nullopt, slack, true,
                                                                              "sup ratio / (p/(gamma-p+1))")};
                                 return std::vector<CaseRecord>{make_case(id, prm, worst, std::nullopt, bmax, true, "sup ratio")};
                             }});
        }
    };
    arm(cfg.at("above"), true);
    arm(cfg.at("below"), false);
    for (double p : doubles(cfg.at("excluded_p"))) {
        std::string id = "excluded/" + tag("p", p);
        ojson params{{"p", p}, {"gamma", p - 1.0}};
        tasks.push_back({id, params, [&, p, id, params] {
                             std::string why;
                             double rejected = 0.0;
                             try {
                                 hardy_ratio(sample_atoms(g, 1, free_bc[0]), p, p - 1.0, opt);
                             } catch (const Error& e) {
                                 rejected = e.status() == Status::Domain ? 1.0 : 0.0;
                                 why = e.what();
                             }
                             return std::vector<CaseRecord>{make_case(id, params, rejected, 1.0, 1.0, true, why)};
                         }});
    }
    {
        std::string id = "nonzero-boundary/p=2/gamma=0";
        ojson params{{"p", 2.0}, {"gamma", 0.0}};
        tasks.push_back({id, params, [&, id, params] {
                             Atom a;
                             a.center = {0.0};
                             a.sigma = {1.0};
                             a.omega = {0.0};
                             std::string why;
                             double rejected = 0.0;
                             try {
                                 hardy_ratio(sample_atoms(g, 1, {a}), 2.0, 0.0, opt);
                             } catch (const Error& e) {
                                 rejected = e.status() == Status::Domain ? 1.0 : 0.0;
                                 why = e.what();
                             }
                             return std::vector<CaseRecord>{make_case(id, params, rejected, 1.0, 1.0, true, why)};
                         }});
    }
    Output o;
    o.cases = run_tasks(tasks, threads);
    o.aggregate["bank_size"] = members.size();
    return o;
}

// ---- scaling ---------------------------------------------------------------

ojson scaling_defaults() {
    return {{"grid", {{"n", {4096, 64}}, {"L_over_pi", 16.0}, {"offset", true}}},
            {"R_exponents", {1, 2, 3, 4, 5, 6}},
            {"weights", {{2.0, -0.5}, {2.0, 0.5}, {2.0, 2.5}, {3.0, -0.5}, {3.0, 0.5}, {3.0, 2.5}}},
            {"normal_sigma", 5.0},
            {"tangential_sigma", 4.0},
            {"slope_tol", 0.15},
            {"upsample", 2}};
}

Output scaling_run(const ojson& cfg, int threads) {
    Grid g = grid_from(cfg.at("grid"));
    if (g.dim() != 2) throw Error(Status::Arg, "scaling suite needs a 2-D grid");
    auto Rexp = ints(cfg.at("R_exponents"));
    double s1 = cfg.at("normal_sigma").get<double>(), s2 = cfg.at("tangential_sigma").get<double>(),
           tol = cfg.at("slope_tol").get<double>();
    int up = cfg.at("upsample").get<int>();
    auto weights = cfg.at("weights");
    // Two base profiles with |xi| essentially <= 1.5: a Gaussian and a non-separable pair.
    auto atom = [](cplx amp, double c1, double c2, double sa, double sb, double w1, double w2) {
        Atom a;
        a.amp = amp;
        a.center = {c1, c2};
        a.sigma = {sa, sb};
        a.omega = {w1, w2};
        return a;
    };
    std::vector<std::vector<Atom>> bases{
        {atom(1.0, 0.0, 0.0, s1, s2, 0.0, 0.0)},
        {atom(1.0, 1.0, -3.0, s1, s2, 0.2, 0.0), atom(cplx(0.0, 0.7), -2.0, 4.0, s1, s2, -0.3, 0.3)}};
    // ratio[w][R] = max over bases
    std::size_t nw = weights.size();
    std::vector<std::vector<double>> ratio(nw, std::vector<double>(Rexp.size(), 0.0));
    std::vector<double> Rs;
    for (int e : Rexp) Rs.push_back(std::ldexp(1.0, e));
    std::vector<Task> tasks;
    std::mutex mu;
    for (std::size_t ri = 0; ri < Rexp.size(); ++ri)
        for (std::size_t b = 0; b < bases.size(); ++b) {
            std::string id = "R=" + std::to_string(static_cast<int>(Rs[ri])) + "/base" + std::to_string(b);
            tasks.push_back({id, {{"R", Rs[ri]}, {"base", b}}, [&, ri, b] {
                                 // dilate in x1 only: band limit in xi_1 scales with R
                                 auto atoms = bases[b];
                                 for (auto& a : atoms) {
                                     a.center[0] /= Rs[ri];
                                     a.sigma[0] /= Rs[ri];
                                     a.omega[0] *= Rs[ri];
                                 }
                                 GridFunction h = sample_atoms(g, 1, atoms);
                                 GridFunction hu = from_coeffs(upsample(to_coeffs(h), up));
                                 const Grid& G = hu.grid;
                                 const std::size_t st = G.stride(0);
                                 for (std::size_t wi = 0; wi < nw; ++wi) {
                                     double p = weights[wi].at(0).get<double>(), gm = weights[wi].at(1).get<double>();
                                     double sup = 0.0;
                                     for (int i = 0; i < G.n[0]; ++i) {
                                         std::vector<double> t(st);
                                         for (std::size_t j = 0; j < st; ++j)
                                             t[j] = std::pow(std::abs(hu.v[static_cast<std::size_t>(i) * st + j]), p);
                                         sup = std::max(sup, std::pow(pairwise_sum(t.data(), t.size()) * G.h(1), 1.0 / p));
                                     }
                                     double den = lp_norm(h, p, WeightSpec(gm, Domain::Full), NormOptions{up}).value;
                                     std::lock_guard<std::mutex> lock(mu);
                                     ratio[wi][ri] = std::max(ratio[wi][ri], sup / den);
                                 }
                                 return std::vector<CaseRecord>{};
                             }});
        }
    Output o;
    o.cases = run_tasks(tasks, threads);
    for (std::size_t wi = 0; wi < nw; ++wi) {
        double p = weights[wi].at(0).get<double>(), gm = weights[wi].at(1).get<double>();
        double slope = loglog_slope(Rs, ratio[wi]);
        double expect = (gm + 1.0) / p;
        ojson params{{"p", p}, {"gamma", gm}, {"slope", slope}, {"expected", expect}, {"R", Rs}, {"ratio", ratio[wi]}};
        o.cases.push_back(make_case(tag("p", p) + "/" + tag("gamma", gm), params, std::abs(slope - expect),
                                    std::nullopt, tol, true, "|slope - (gamma+1)/p|"));
    }
    return o;
}

}  // namespace tracelab::suites
