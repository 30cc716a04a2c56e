#include "tracelab/tracelab.h"

#include "bank.hpp"
#include "errors.hpp"
#include "norms.hpp"
#include "query.hpp"
#include "report.hpp"
#include "suites.hpp"
#include "trace_ext.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

struct tl_grid {
    tracelab::GridFunction f;
};
struct tl_lp {
    tracelab::LpSystem sys;
};
struct tl_report {
    tracelab::SuiteReport r;
};

namespace {

using namespace tracelab;

thread_local std::string g_error;

tl_status code(Status s) { return static_cast<tl_status>(static_cast<int>(s)); }

tl_status fail(tl_status s, const std::string& msg) {
    g_error = msg;
    return s;
}

template <class F>
tl_status guard(F&& fn) {
    try {
        fn();
        return TL_OK;
    } catch (const Error& e) {
        return fail(code(e.status()), e.what());
    } catch (const ojson::parse_error& e) {
        return fail(TL_ERR_PARSE, e.what());
    } catch (const ojson::exception& e) {
        return fail(TL_ERR_ARG, e.what());
    } catch (const std::bad_alloc&) {
        return fail(TL_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(TL_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(TL_ERR_INTERNAL, "unknown exception");
    }
}

void need(const void* p, const char* what) {
    if (!p) throw Error(Status::Arg, std::string(what) + " is NULL");
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

Grid make_grid(int d, const int* n, double L, bool offset) {
    if (d < 1 || d > 8) throw Error(Status::Arg, "dimension must be in [1, 8]");
    need(n, "n");
    Grid g;
    g.n.assign(n, n + d);
    g.L = L;
    g.offset = offset;
    g.validate();
    return g;
}

NormResult eval_norm(const tl_grid* f, const char* family, double s, double p, double q, double gamma, tl_domain dom,
                     const tl_lp* sys) {
    need(f, "grid");
    need(family, "family");
    if (dom != TL_FULL && dom != TL_HALF) throw Error(Status::Arg, "unknown domain");
    WeightSpec w(gamma, dom == TL_HALF ? Domain::Half : Domain::Full);
    std::string fam = family;
    if (fam == "L") return lp_norm(f->f, p, w);
    if (fam == "W") {
        if (s != std::floor(s) || s < 0) throw Error(Status::Arg, "W needs an integer order k >= 0");
        return sobolev_norm(f->f, static_cast<int>(s), p, w);
    }
    if (fam == "H") return bessel_norm(f->f, s, p, w);
    if (fam == "B" || fam == "F") {
        need(sys, "LP system");
        if (std::isnan(q)) throw Error(Status::Arg, "q is required for B and F");
        return fam == "B" ? besov_norm(f->f, s, p, q, w, sys->sys) : triebel_norm(f->f, s, p, q, w, sys->sys);
    }
    throw Error(Status::Arg, "unknown norm family: " + fam);
}

}  // namespace

extern "C" {

const char* tl_last_error(void) { return g_error.c_str(); }

const char* tl_version(void) { return "0.1.0"; }

const char* tl_status_name(tl_status s) {
    switch (s) {
        case TL_OK: return "ok";
        case TL_ERR_ARG: return "argument";
        case TL_ERR_DOMAIN: return "domain";
        case TL_ERR_IO: return "io";
        case TL_ERR_PARSE: return "parse";
        case TL_ERR_NUMERIC: return "numeric";
        case TL_ERR_NOT_FOUND: return "not-found";
        case TL_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

void tl_free_string(char* s) { std::free(s); }

tl_status tl_query(const char* expr, char** out_json) {
    return guard([&] {
        need(expr, "expr");
        need(out_json, "out_json");
        *out_json = dup(calc::run_query(expr));
    });
}

tl_status tl_suite_list(char** out_json) {
    return guard([&] {
        need(out_json, "out_json");
        ojson j = ojson::array();
        for (const auto& s : suite_list())
            j.push_back({{"name", s.name}, {"summary", s.summary}, {"criterion", s.criterion}});
        *out_json = dup(j.dump());
    });
}

tl_status tl_suite_defaults(const char* name, char** out_json) {
    return guard([&] {
        need(name, "name");
        need(out_json, "out_json");
        *out_json = dup(suite_defaults(name).dump(2));
    });
}

tl_status tl_suite_run(const char* name, const char* config_json, int threads, tl_report** out) {
    return guard([&] {
        need(name, "name");
        need(out, "out");
        ojson cfg = config_json ? ojson::parse(config_json) : ojson::object();
        auto rep = std::make_unique<tl_report>();
        rep->r = run_suite(name, cfg, threads);
        *out = rep.release();
    });
}

int tl_report_passed(const tl_report* r) { return r && r->r.passed() ? 1 : 0; }

size_t tl_report_case_count(const tl_report* r) { return r ? r->r.cases.size() : 0; }

tl_status tl_report_render(const tl_report* r, const char* format, char** out) {
    return guard([&] {
        need(r, "report");
        need(format, "format");
        need(out, "out");
        *out = dup(render(r->r, format));
    });
}

tl_status tl_report_write(const tl_report* r, const char* path, const char* format) {
    return guard([&] {
        need(r, "report");
        need(path, "path");
        need(format, "format");
        std::string text = render(r->r, format);
        std::ofstream os(path, std::ios::binary);
        if (!os) throw Error(Status::IO, std::string("cannot open ") + path);
        os << text;
        if (!os) throw Error(Status::IO, std::string("cannot write ") + path);
    });
}

tl_status tl_report_read(const char* json_text, tl_report** out) {
    return guard([&] {
        need(json_text, "json_text");
        need(out, "out");
        auto rep = std::make_unique<tl_report>();
        rep->r = report_from_json(ojson::parse(json_text));
        *out = rep.release();
    });
}

void tl_report_free(tl_report* r) { delete r; }

tl_status tl_bank_write(uint64_t seed, int size, int d, const int* n, double L, int blocks, const char* dir,
                        int* out_count) {
    return guard([&] {
        need(dir, "dir");
        BankConfig cfg;
        cfg.grid = make_grid(d, n, L, true);
        cfg.blocks = blocks > 0 ? blocks : LpSystem::max_blocks(cfg.grid);
        cfg.size = size;
        cfg.seed = seed;
        auto bank = generate_bank(cfg);
        write_bank(bank, cfg, dir);
        if (out_count) *out_count = static_cast<int>(bank.size());
    });
}

tl_status tl_grid_create(int d, const int* n, double L, int offset, int r, double gamma, tl_grid** out) {
    return guard([&] {
        need(out, "out");
        if (r < 1) throw Error(Status::Arg, "fiber dimension must be >= 1");
        auto g = std::make_unique<tl_grid>();
        g->f = GridFunction(make_grid(d, n, L, offset != 0), r, gamma);
        *out = g.release();
    });
}

tl_status tl_grid_load(const char* path, tl_grid** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        auto g = std::make_unique<tl_grid>();
        g->f = load_grid_function(path);
        *out = g.release();
    });
}

tl_status tl_grid_save(const tl_grid* f, const char* path) {
    return guard([&] {
        need(f, "grid");
        need(path, "path");
        save_grid_function(f->f, path);
    });
}

void tl_grid_free(tl_grid* f) { delete f; }

tl_status tl_grid_shape(const tl_grid* f, int* d, int* n, int n_cap, double* L, int* r) {
    return guard([&] {
        need(f, "grid");
        const Grid& g = f->f.grid;
        if (d) *d = g.dim();
        if (n) {
            if (n_cap < g.dim()) throw Error(Status::Arg, "n buffer too small");
            for (int a = 0; a < g.dim(); ++a) n[a] = g.n[a];
        }
        if (L) *L = g.L;
        if (r) *r = f->f.r;
    });
}

size_t tl_grid_value_count(const tl_grid* f) { return f ? 2 * f->f.v.size() : 0; }

tl_status tl_grid_get(const tl_grid* f, double* values, size_t count) {
    return guard([&] {
        need(f, "grid");
        need(values, "values");
        if (count != 2 * f->f.v.size()) throw Error(Status::Arg, "value count mismatch");
        for (std::size_t i = 0; i < f->f.v.size(); ++i) {
            values[2 * i] = f->f.v[i].real();
            values[2 * i + 1] = f->f.v[i].imag();
        }
    });
}

tl_status tl_grid_set(tl_grid* f, const double* values, size_t count) {
    return guard([&] {
        need(f, "grid");
        need(values, "values");
        if (count != 2 * f->f.v.size()) throw Error(Status::Arg, "value count mismatch");
        for (std::size_t i = 0; i < f->f.v.size(); ++i) f->f.v[i] = cplx(values[2 * i], values[2 * i + 1]);
    });
}

tl_status tl_grid_coord(const tl_grid* f, int axis, int i, double* x) {
    return guard([&] {
        need(f, "grid");
        need(x, "x");
        const Grid& g = f->f.grid;
        if (axis < 0 || axis >= g.dim() || i < 0 || i >= g.n[axis]) throw Error(Status::Arg, "index out of range");
        *x = g.x(axis, i);
    });
}

tl_status tl_grid_set_support_margin(tl_grid* f, double margin) {
    return guard([&] {
        need(f, "grid");
        f->f.support_margin = margin < 0 ? -1.0 : margin;
    });
}

tl_status tl_lp_system_create(const tl_grid* like, double sharpness, int blocks, tl_lp** out) {
    return guard([&] {
        need(like, "grid");
        need(out, "out");
        const Grid& g = like->f.grid;
        int N = blocks > 0 ? blocks : LpSystem::max_blocks(g);
        *out = new tl_lp{LpSystem(LpGenerator(sharpness), N, g)};
    });
}

int tl_lp_blocks(const tl_lp* sys) { return sys ? sys->sys.blocks() : -1; }

void tl_lp_free(tl_lp* sys) { delete sys; }

tl_status tl_lp_block(const tl_lp* sys, const tl_grid* f, int n, tl_grid** out) {
    return guard([&] {
        need(sys, "system");
        need(f, "grid");
        need(out, "out");
        auto g = std::make_unique<tl_grid>();
        g->f = sys->sys.block(f->f, n);
        *out = g.release();
    });
}

tl_status tl_norm(const tl_grid* f, const char* family, double s, double p, double q, double gamma, tl_domain dom,
                  const tl_lp* sys, double* value, double* tail) {
    return guard([&] {
        need(value, "value");
        NormResult r = eval_norm(f, family, s, p, q, gamma, dom, sys);
        *value = r.value;
        if (tail) *tail = r.tail;
    });
}

tl_status tl_norm_batch_csv(const tl_grid* const* fs, const char* const* ids, size_t count, const char* family,
                            double s, double p, double q, double gamma, tl_domain dom, const tl_lp* sys,
                            char** out_csv) {
    return guard([&] {
        need(out_csv, "out_csv");
        if (count > 0) {
            need(fs, "functions");
            need(ids, "ids");
        }
        std::vector<NormRow> rows;
        for (size_t i = 0; i < count; ++i) {
            need(ids[i], "id");
            NormRow row;
            row.function_id = ids[i];
            row.family = family ? family : "";
            row.s_or_k = s;
            row.p = p;
            row.q = (row.family == "B" || row.family == "F") ? q : NAN;
            row.gamma = gamma;
            row.domain = dom == TL_HALF ? Domain::Half : Domain::Full;
            row.result = eval_norm(fs[i], family, s, p, q, gamma, dom, sys);
            rows.push_back(std::move(row));
        }
        *out_csv = dup(norm_rows_csv(rows));
    });
}

tl_status tl_trace(const tl_grid* f, const tl_lp* sys, int m, tl_grid** out) {
    return guard([&] {
        need(f, "grid");
        need(sys, "system");
        need(out, "out");
        auto g = std::make_unique<tl_grid>();
        g->f = trace(f->f, sys->sys, m);
        *out = g.release();
    });
}

tl_status tl_ext(const tl_grid* g, const tl_lp* bsys, int n_normal, int m, tl_grid** out) {
    return guard([&] {
        need(g, "grid");
        need(bsys, "system");
        need(out, "out");
        if (m < 0) throw Error(Status::Arg, "order m must be >= 0");
        Grid full;
        full.n.push_back(n_normal);
        for (int a : g->f.grid.n) full.n.push_back(a);
        full.L = g->f.grid.L;
        full.offset = true;
        full.validate();
        EtaFamily eta(full, bsys->sys.blocks(), std::max(m, 1));
        auto e = std::make_unique<tl_grid>();
        e->f = m == 0 ? ext0(g->f, eta, bsys->sys) : ext_m(g->f, m, eta, bsys->sys);
        *out = e.release();
    });
}

}  // extern "C"
