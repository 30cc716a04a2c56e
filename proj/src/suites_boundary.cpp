// Boundary-system, kernel, interpolation, Fubini and calculus suites.
#include "boundary.hpp"
#include "fft.hpp"
#include "norms.hpp"
#include "query.hpp"
#include "spectral.hpp"
#include "suite_util.hpp"
#include "trace_ext.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

namespace tracelab {
// Generated at build time from tests/golden/calculus.json.
extern const char* const kCalculusGolden;
}  // namespace tracelab

namespace tracelab::suites {

namespace {

ojson boundary_grid() { return {{"n", {1024, 256}}, {"L_over_pi", 16.0}, {"offset", true}}; }

struct Setup {
    Grid g, bg;
    EtaFamily eta;
    LpSystem bsys;
    explicit Setup(const ojson& cfg)
        : g(grid_from(cfg.at("grid"))),
          bg(g.boundary()),
          eta(g, cfg.at("boundary_blocks").get<int>(), 4),
          bsys(LpGenerator(), cfg.at("boundary_blocks").get<int>(), g.boundary()) {}
};

// Second-order mixed system on C^2: B^0 = Tr_0, B^2 = b2 Tr_2 + b1 d~ Tr_1 + b0 Tr_0 with 1x2 variable rows.
NormalSystem mixed_system(const Grid& bg) {
    MatrixField b2(bg, 1, 2), b1(bg, 1, 2), b0(bg, 1, 2);
    for (int i = 0; i < bg.n[0]; ++i) {
        double x = bg.x(0, i);
        auto k = static_cast<std::size_t>(i);
        b2.at(k)[0] = 2.0 + std::cos(x / 4.0);
        b2.at(k)[1] = std::sin(x / 8.0);
        b1.at(k)[0] = 0.3;
        b1.at(k)[1] = cplx(0.0, 0.2) * std::cos(x / 8.0);
        b0.at(k)[0] = 0.5 * std::exp(-x * x / 50.0);
        b0.at(k)[1] = 1.0;
    }
    std::vector<BoundaryTerm> t2{{2, {0}, b2}, {1, {1}, b1}, {0, {0}, b0}};
    return NormalSystem({BoundaryOperator::trace_op(bg, 2, 0), BoundaryOperator(2, 1, t2)});
}

struct NamedSystem {
    std::string name;
    NormalSystem sys;
};

std::vector<NamedSystem> standard_systems(const Grid& bg) {
    return {{"dirichlet", NormalSystem({BoundaryOperator::trace_op(bg, 1, 0)})},
            {"tr0-tr1", NormalSystem({BoundaryOperator::trace_op(bg, 1, 0), BoundaryOperator::trace_op(bg, 1, 1)})},
            {"mixed-r2", mixed_system(bg)}};
}

}  // namespace

// ---- boundary-sys ----------------------------------------------------------

ojson boundary_sys_defaults() {
    return {{"grid", boundary_grid()},
            {"boundary_blocks", 3},
            {"bank", {{"size", 20}, {"seed", 37}}},
            {"tol", 1e-6}};
}

Output boundary_sys_run(const ojson& cfg, int threads) {
    Setup S(cfg);
    double tol = cfg.at("tol").get<double>();
    BankConfig bc1 = bank_from(cfg.at("bank"), S.bg, S.bsys.blocks()), bc2 = bc1;
    bc2.r = 2;
    bc2.seed += 1;
    auto bank1 = generate_bank(bc1), bank2 = generate_bank(bc2);
    auto systems = standard_systems(S.bg);
    std::vector<Task> tasks;
    Output o;
    for (const auto& ns : systems) {
        ojson sp{{"system", ns.name}, {"orders", ns.sys.orders()}};
        o.cases.push_back(make_case(ns.name + "/coretraction", sp, ns.sys.right_inverse_residual(), std::nullopt, tol,
                                    true, "max |b b^c - 1| over nodes"));
        for (std::size_t i = 0; i < bank1.size(); ++i) {
            std::string id = ns.name + "/" + bank1[i].id;
            ojson params{{"system", ns.name}, {"member", bank1[i].id}};
            tasks.push_back({id, params, [&, i, id, params] {
                                 const NormalSystem& sys = ns.sys;
                                 std::vector<GridFunction> data;
                                 for (int k = 0; k < sys.size(); ++k) {
                                     const auto& src = sys.op(k).rows() == 2 ? bank2 : bank1;
                                     data.push_back(src[(i + static_cast<std::size_t>(k)) % src.size()].f);
                                 }
                                 GridFunction f = ext_boundary(sys, data, S.eta, S.bsys);
                                 double res = 0.0, gnorm = 0.0;
                                 for (int k = 0; k < sys.size(); ++k) {
                                     const auto& gk = data[static_cast<std::size_t>(k)];
                                     gnorm = std::max(gnorm, grid_lp(gk));
                                     res = std::max(res, grid_lp(sys.op(k).apply(f) - gk) / grid_lp(gk));
                                 }
                                 std::vector<CaseRecord> out{make_case(id + "/B-residual", params, res, std::nullopt, tol)};
                                 Spectrum F = to_coeffs(f);
                                 auto orders = sys.orders();
                                 double skipped = 0.0;
                                 bool any = false;
                                 for (int j = 0; j < orders.back(); ++j)
                                     if (sys.index_of_order(j) < 0) {
                                         any = true;
                                         skipped = std::max(skipped, grid_lp(from_coeffs(trace_spectrum(F, j))) / gnorm);
                                     }
                                 if (any)
                                     out.push_back(make_case(id + "/skipped-traces", params, skipped, std::nullopt, tol));
                                 return out;
                             }});
        }
    }
    auto rest = run_tasks(tasks, threads);
    o.cases.insert(o.cases.end(), rest.begin(), rest.end());
    o.aggregate["bank_size"] = bank1.size();
    return o;
}

// ---- kernel-C --------------------------------------------------------------

ojson kernel_c_defaults() {
    return {{"grid", boundary_grid()},
            {"boundary_blocks", 3},
            {"a", 3},
            {"witnesses", 50},
            {"seed", 41},
            {"bank", {{"size", 12}, {"seed", 43}}},
            {"tau", 1e-8}};
}

Output kernel_c_run(const ojson& cfg, int threads) {
    Setup S(cfg);
    int a = cfg.at("a").get<int>();
    int W = cfg.at("witnesses").get<int>();
    double tau = cfg.at("tau").get<double>();
    NormalSystem sys = mixed_system(S.bg);
    BankConfig bc = bank_from(cfg.at("bank"), S.bg, S.bsys.blocks());
    bc.r = 2;
    auto bdata = generate_bank(bc);
    // interior profiles on the full grid (r = 2), localized in x1 so the torus image stays tiny
    BankConfig fc = bank_from(cfg.at("bank"), S.g, S.bsys.blocks());
    fc.r = 2;
    fc.seed += 100;
    auto fdata = generate_bank(fc);
    const int Nb = static_cast<int>(bdata.size());
    std::mt19937_64 rng(cfg.at("seed").get<std::uint64_t>());
    std::uniform_int_distribution<int> pick(0, Nb - 1);
    struct Plan {
        std::string kind;
        std::vector<int> data;  // bank index per trace order, -1 for zero
        int interior = -1;
        double eps = 1.0;
        bool ker_b2 = false;
    };
    const char* kinds[] = {"subset", "trace-free", "tiny", "ker-b2", "near"};
    std::vector<Plan> plans;
    for (int w = 0; w < W; ++w) {
        Plan p;
        p.kind = kinds[w % 5];
        p.data.assign(static_cast<std::size_t>(a + 1), -1);
        if (p.kind == "subset") {
            // random nonempty subset of nonzero trace data
            unsigned mask = 0;
            while (mask == 0) mask = static_cast<unsigned>(rng() % (1u << (a + 1)));
            for (int j = 0; j <= a; ++j)
                if (mask >> j & 1u) p.data[static_cast<std::size_t>(j)] = pick(rng);
        } else if (p.kind == "trace-free") {
            p.interior = pick(rng) % static_cast<int>(fdata.size());
        } else if (p.kind == "tiny") {
            p.interior = pick(rng) % static_cast<int>(fdata.size());
            p.data[static_cast<std::size_t>(rng() % static_cast<unsigned>(a + 1))] = pick(rng);
            p.eps = 1e-13;
        } else if (p.kind == "ker-b2") {
            p.ker_b2 = true;
            p.data[2] = pick(rng);
        } else {
            p.interior = pick(rng) % static_cast<int>(fdata.size());
            p.data[static_cast<std::size_t>(rng() % static_cast<unsigned>(a + 1))] = pick(rng);
            p.eps = 1e-5;
        }
        plans.push_back(p);
    }
    std::vector<Task> tasks;
    for (int w = 0; w < W; ++w) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "w%02d", w);
        std::string id = std::string(buf) + "-" + plans[static_cast<std::size_t>(w)].kind;
        tasks.push_back({id, {{"kind", plans[static_cast<std::size_t>(w)].kind}}, [&, w, id] {
                             const Plan& p = plans[static_cast<std::size_t>(w)];
                             GridFunction zero(S.bg, 2);
                             std::vector<GridFunction> g(static_cast<std::size_t>(a + 1), zero);
                             for (int j = 0; j <= a; ++j)
                                 if (p.data[static_cast<std::size_t>(j)] >= 0)
                                     g[static_cast<std::size_t>(j)] = bdata[static_cast<std::size_t>(p.data[static_cast<std::size_t>(j)])].f;
                             if (p.ker_b2) {
                                 // project the order-2 datum onto ker b2 pointwise: (b2_1, b2_0) rotated
                                 const MatrixField& b2 = sys.op(1).leading();
                                 GridFunction& h = g[2];
                                 for (std::size_t k = 0; k < h.nodes(); ++k) {
                                     cplx u = b2.at(k)[0], v = b2.at(k)[1];
                                     cplx s = h.at(k, 0);
                                     h.at(k, 0) = -v * s;
                                     h.at(k, 1) = u * s;
                                 }
                             }
                             GridFunction v(S.g, 2);
                             for (auto& x : v.v) x = 0.0;
                             if (p.interior >= 0) {
                                 // u minus an extension of its own traces: all traces vanish
                                 const GridFunction& u = fdata[static_cast<std::size_t>(p.interior)].f;
                                 Spectrum U = to_coeffs(u);
                                 std::vector<GridFunction> tr;
                                 for (int j = 0; j <= a; ++j) tr.push_back(from_coeffs(trace_spectrum(U, j)));
                                 v = u - ext_vector(tr, S.eta, S.bsys);
                             }
                             bool nonzero = std::any_of(p.data.begin(), p.data.end(), [](int x) { return x >= 0; });
                             if (nonzero) v += cplx(p.eps) * ext_vector(g, S.eta, S.bsys);
                             double scale = grid_lp(v);
                             KernelReport rep = kernel_equiv_check(sys, a, v, tau * scale);
                             ojson prm{{"kind", p.kind},
                                       {"eps", p.eps},
                                       {"c_residual_rel", rep.c_residual / scale},
                                       {"trace_residual_rel", rep.trace_residual / scale},
                                       {"c_small", rep.c_small},
                                       {"traces_small", rep.traces_small}};
                             return std::vector<CaseRecord>{make_case(id, prm, rep.agree() ? 1.0 : 0.0, 1.0, 1.0)};
                         }});
    }
    Output o;
    o.cases = run_tasks(tasks, threads);
    int small = 0;
    for (const auto& c : o.cases)
        if (c.params.value("traces_small", false)) ++small;
    o.aggregate["witnesses"] = W;
    o.aggregate["both_small"] = small;
    o.aggregate["projection_residual"] = sys.projection_residual();
    return o;
}

// ---- interp-logconvex ------------------------------------------------------

ojson interp_logconvex_defaults() {
    // base atoms live on a small torus so that all dilates 2^-3..2^3 fit the large one
    return {{"grid", {{"n", {16384}}, {"L_over_pi", 40.0}, {"offset", true}}},
            {"base", {{"n", {128}}, {"L_over_pi", 4.0}, {"offset", true}}},
            {"base_blocks", 4},
            {"bank", {{"size", 12}, {"seed", 47}}},
            {"lambda_exponents", {-3, -2, -1, 0, 1, 2, 3}},
            {"translate_j", {0, 2, 4, 6}},
            {"pairs", {{2, 1}, {4, 2}, {3, 1}}},
            {"p", {2.0, 3.0}},
            {"gamma", {0.5, 2.5, 4.5}},
            {"max_ratio", 20.0}};
}

Output interp_logconvex_run(const ojson& cfg, int threads) {
    Grid g = grid_from(cfg.at("grid")), g0 = grid_from(cfg.at("base"));
    if (g.dim() != 1) throw Error(Status::Arg, "interp-logconvex uses a 1-D grid");
    auto base = generate_bank(bank_from(cfg.at("bank"), g0, cfg.at("base_blocks").get<int>()));
    std::vector<std::pair<std::string, GridFunction>> fam;
    for (const auto& m : base) {
        for (int e : ints(cfg.at("lambda_exponents")))
            fam.emplace_back(m.id + "/dilate" + std::to_string(e), sample_atoms(g, 1, dilate_atoms(m.atoms, std::ldexp(1.0, e))));
        for (int j : ints(cfg.at("translate_j"))) {
            double c0 = m.atoms.front().center[0];
            fam.emplace_back(m.id + "/translate" + std::to_string(j),
                             sample_atoms(g, 1, translate_atoms(m.atoms, std::ldexp(1.0, -j) - c0)));
        }
    }
    double C = cfg.at("max_ratio").get<double>();
    std::vector<Task> tasks;
    for (double p : doubles(cfg.at("p")))
        for (double gm : doubles(cfg.at("gamma"))) {
            std::string wid = tag("p", p) + "/" + tag("gamma", gm);
            tasks.push_back({wid, {{"p", p}, {"gamma", gm}}, [&, p, gm, wid] {
                                 WeightSpec w(gm, Domain::Half);
                                 std::vector<std::pair<std::pair<int, int>, std::pair<double, std::string>>> best;
                                 for (const auto& kl : cfg.at("pairs")) best.push_back({{kl.at(0).get<int>(), kl.at(1).get<int>()}, {0.0, ""}});
                                 for (const auto& [id, f] : fam) {
                                     std::map<int, double> W;
                                     auto norm = [&](int k) {
                                         if (!W.count(k)) W[k] = sobolev_norm(f, k, p, w).value;
                                         return W[k];
                                     };
                                     for (auto& [kl, b] : best) {
                                         double th = static_cast<double>(kl.second) / kl.first;
                                         double r = norm(kl.second) / (std::pow(norm(0), 1.0 - th) * std::pow(norm(kl.first), th));
                                         if (r > b.first) b = {r, id};
                                     }
                                 }
                                 std::vector<CaseRecord> out;
                                 for (const auto& [kl, b] : best) {
                                     ojson prm{{"k", kl.first}, {"l", kl.second}, {"p", p}, {"gamma", gm}, {"argmax", b.second}};
                                     out.push_back(make_case(wid + "/k=" + std::to_string(kl.first) + "/l=" + std::to_string(kl.second),
                                                             prm, b.first, 0.0, C, true, "bank-wide sup ratio"));
                                 }
                                 return out;
                             }});
        }
    Output o;
    o.cases = run_tasks(tasks, threads);
    o.aggregate["family_size"] = fam.size();
    return o;
}

// ---- fubini ----------------------------------------------------------------

ojson fubini_defaults() {
    return {{"grid", {{"n", {512, 128}}, {"L_over_pi", 8.0}, {"offset", true}}},
            {"blocks", 3},
            {"bank", {{"size", 50}, {"seed", 53}}},
            {"k", {1, 2}},
            {"p", 2.0},
            {"gamma", 2.5},
            {"bracket", 10.0}};
}

Output fubini_run(const ojson& cfg, int threads) {
    Grid g = grid_from(cfg.at("grid"));
    auto bank = generate_bank(bank_from(cfg.at("bank"), g, cfg.at("blocks").get<int>()));
    double p = cfg.at("p").get<double>(), gm = cfg.at("gamma").get<double>(), C = cfg.at("bracket").get<double>();
    std::vector<Task> tasks;
    for (int k : ints(cfg.at("k"))) {
        std::string id = "k=" + std::to_string(k) + "/" + tag("p", p) + "/" + tag("gamma", gm);
        tasks.push_back({id, {{"k", k}}, [&, k, id] {
                             double lo = INFINITY, hi = 0.0;
                             for (const auto& m : bank) {
                                 double mixed = normal_mixed_norm(m.f, k, p, gm).value + tangential_sobolev_norm(m.f, k, p, gm).value;
                                 double full = sobolev_norm(m.f, k, p, WeightSpec(gm, Domain::Half)).value;
                                 lo = std::min(lo, mixed / full);
                                 hi = std::max(hi, mixed / full);
                             }
                             ojson prm{{"k", k}, {"p", p}, {"gamma", gm}, {"ratio_min", lo}, {"ratio_max", hi}};
                             return std::vector<CaseRecord>{make_case(id, prm, std::max(hi, 1.0 / lo), std::nullopt, C, true,
                                                                      "max(sup ratio, 1/inf ratio)")};
                         }});
    }
    Output o;
    o.cases = run_tasks(tasks, threads);
    o.aggregate["bank_size"] = bank.size();
    return o;
}

// ---- calculus --------------------------------------------------------------

ojson calculus_defaults() { return {{"golden", "builtin"}}; }

Output calculus_run(const ojson& cfg, int threads) {
    std::string src = cfg.at("golden").get<std::string>();
    std::string text;
    if (src == "builtin") {
        text = kCalculusGolden;
    } else {
        std::ifstream in(src);
        if (!in) throw Error(Status::IO, "cannot read golden file " + src);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    ojson golden;
    try {
        golden = ojson::parse(text);
    } catch (const ojson::exception& e) {
        throw Error(Status::Parse, std::string("golden JSON: ") + e.what());
    }
    std::vector<Task> tasks;
    int i = 0;
    for (const auto& e : golden) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "q%02d", i++);
        std::string id = std::string(buf) + "-" + e.at("rule").get<std::string>();
        ojson params{{"query", e.at("query")}, {"rule", e.at("rule")}};
        tasks.push_back({id, params, [e, id, params] {
                             ojson got = ojson::parse(calc::run_query(e.at("query").get<std::string>()));
                             bool cited = false;
                             for (const auto& c : got.at("citations"))
                                 if (c.at("rule_id") == e.at("rule")) cited = true;
                             bool same = got.at("outcome") == e.at("expect");
                             ojson prm = params;
                             prm["outcome"] = got.at("outcome");
                             std::string note = same ? (cited ? "" : "rule not cited") : "outcome differs from golden";
                             return std::vector<CaseRecord>{make_case(id, prm, same && cited ? 1.0 : 0.0, 1.0, 1.0, true, note)};
                         }});
    }
    Output o;
    o.cases = run_tasks(tasks, threads);
    o.aggregate["queries"] = golden.size();
    return o;
}

}  // namespace tracelab::suites
