#include "bank.hpp"

#include "errors.hpp"
#include "fft.hpp"
#include "spectral.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace tracelab {

namespace {

// Gaussian spectra fall below 1e-12 (l2-relative) this many widths 1/sigma out;
// values fall below 1e-10 of the peak this many sigmas out.
constexpr double kSpecWidths = 7.5;
constexpr double kSpaceWidths = 7.0;

struct Limits {
    double band;       // usable |xi|
    double reach;      // usable |x_a| (essential support)
    double sigma_min;  // finest Gaussian resolvable on the grid
};

Limits limits(const BankConfig& cfg) {
    const Grid& g = cfg.grid;
    Limits l;
    l.band = std::ldexp(1.0, cfg.blocks);
    for (int a = 0; a < g.dim(); ++a) l.band = std::min(l.band, g.nyquist(a));
    l.reach = (1.0 - cfg.margin) * g.L;
    l.sigma_min = kSpecWidths / l.band;
    return l;
}

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}
    double uniform(double a, double b) { return a + (b - a) * unit_(rng_); }
    int integer(int a, int b) { return a + static_cast<int>(std::floor(unit_(rng_) * (b - a + 1))) % (b - a + 1); }
    cplx amplitude() {
        double r = uniform(0.5, 2.0), t = uniform(0.0, 2.0 * std::numbers::pi);
        return std::polar(r, t);
    }
    std::vector<double> direction(int d) {
        std::vector<double> v(static_cast<std::size_t>(d));
        double n = 0.0;
        do {
            n = 0.0;
            for (auto& x : v) {
                x = uniform(-1.0, 1.0);
                n += x * x;
            }
        } while (n < 1e-4 || n > 1.0);
        for (auto& x : v) x /= std::sqrt(n);
        return v;
    }

private:
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

/// Atom with isotropic width sigma and frequency |omega| = w along a random direction.
Atom make_atom(Sampler& rs, int d, int r, double sigma, double w, double center_room) {
    Atom a;
    a.amp = rs.amplitude();
    a.comp = r > 1 ? rs.integer(0, r - 1) : 0;
    a.sigma.assign(static_cast<std::size_t>(d), sigma);
    a.center.resize(static_cast<std::size_t>(d));
    for (auto& c : a.center) c = rs.uniform(-center_room, center_room);
    a.omega = rs.direction(d);
    for (auto& o : a.omega) o *= w;
    return a;
}

bool fits(const Atom& a, const Limits& l) {
    double w = 0.0;
    for (double o : a.omega) w += o * o;
    w = std::sqrt(w);
    for (std::size_t i = 0; i < a.sigma.size(); ++i) {
        if (a.sigma[i] < l.sigma_min * (1.0 - 1e-12)) return false;
        if (std::abs(a.center[i]) + kSpaceWidths * a.sigma[i] > l.reach) return false;
        if (w + kSpecWidths / a.sigma[i] > l.band) return false;
    }
    return true;
}

double sigma_max(const Limits& l, double room) { return (l.reach - room) / kSpaceWidths; }

std::vector<Atom> block_member(Sampler& rs, const BankConfig& cfg, const Limits& l) {
    const int d = cfg.grid.dim();
    double room = 0.2 * l.reach;
    double smax = sigma_max(l, room);
    int count = rs.integer(1, 3);
    std::vector<Atom> atoms;
    for (int t = 0; t < count; ++t) {
        // Highest block whose annulus core still leaves room for the spectral width.
        int top = 0;
        while (top < cfg.blocks && 1.25 * std::ldexp(1.0, top) + kSpecWidths / smax <= l.band) ++top;
        int n = rs.integer(0, top);
        double w = n == 0 ? rs.uniform(0.0, 0.5) : rs.uniform(1.05, 1.45) * std::ldexp(1.0, n - 1);
        double lo = std::max(l.sigma_min, kSpecWidths / std::max(l.band - w, 1e-300));
        double sigma = lo <= smax ? std::exp(rs.uniform(std::log(lo), std::log(smax))) : smax;
        atoms.push_back(make_atom(rs, d, cfg.r, sigma, w, room));
    }
    return atoms;
}

std::vector<Atom> bump_member(Sampler& rs, const BankConfig& cfg, const Limits& l) {
    double room = 0.3 * l.reach;
    double smax = sigma_max(l, room);
    double w = rs.uniform(0.0, std::min(2.0, 0.5 * l.band));
    double lo = std::max(l.sigma_min, kSpecWidths / (l.band - w));
    double sigma = std::exp(rs.uniform(std::log(std::min(lo * 2.0, smax)), std::log(smax)));
    return {make_atom(rs, cfg.grid.dim(), cfg.r, sigma, w, room)};
}

std::vector<Atom> dilate_member(Sampler& rs, const BankConfig& cfg, const Limits& l, double* lambda) {
    auto base = bump_member(rs, cfg, l);
    int k = rs.integer(-1, 2);
    for (; k > -4; --k) {
        auto a = dilate_atoms(base, std::ldexp(1.0, k));
        bool ok = std::all_of(a.begin(), a.end(), [&](const Atom& x) { return fits(x, l); });
        if (ok) {
            *lambda = std::ldexp(1.0, k);
            return a;
        }
    }
    *lambda = 1.0;
    return base;
}

std::vector<Atom> boundary_member(Sampler& rs, const BankConfig& cfg, const Limits& l, int* jout) {
    const int d = cfg.grid.dim();
    int j = rs.integer(1, std::max(1, cfg.boundary_jmax));
    double dist = std::ldexp(1.0, -j);
    Atom a = make_atom(rs, d, cfg.r, 1.0, 0.0, 0.0);
    a.center[0] = dist;
    a.sigma[0] = std::max(0.5 * dist, l.sigma_min);
    a.omega.assign(static_cast<std::size_t>(d), 0.0);
    for (int ax = 1; ax < d; ++ax) {
        a.center[static_cast<std::size_t>(ax)] = rs.uniform(-0.2, 0.2) * l.reach;
        a.sigma[static_cast<std::size_t>(ax)] = std::max(l.sigma_min, rs.uniform(0.03, 0.1) * l.reach);
    }
    *jout = j;
    return {a};
}

}  // namespace

GridFunction sample_atoms(const Grid& g, int r, const std::vector<Atom>& atoms) {
    GridFunction f(g, r);
    const int d = g.dim();
    for_each_node(g, [&](std::size_t node, const double* x) {
        for (const auto& a : atoms) {
            double e = 0.0, ph = 0.0;
            for (int ax = 0; ax < d; ++ax) {
                double t = (x[ax] - a.center[ax]) / a.sigma[ax];
                e += 0.5 * t * t;
                ph += a.omega[ax] * x[ax];
            }
            if (e > 700.0) continue;
            f.at(node, a.comp) += a.amp * std::exp(-e) * std::polar(1.0, ph);
        }
    });
    return f;
}

std::vector<Atom> dilate_atoms(std::vector<Atom> atoms, double lambda) {
    for (auto& a : atoms) {
        for (auto& c : a.center) c /= lambda;
        for (auto& s : a.sigma) s /= lambda;
        for (auto& o : a.omega) o *= lambda;
    }
    return atoms;
}

std::vector<Atom> translate_atoms(std::vector<Atom> atoms, double shift) {
    for (auto& a : atoms) {
        // exp(i omega (x - s)) = exp(-i omega s) exp(i omega x)
        a.amp *= std::polar(1.0, -a.omega[0] * shift);
        a.center[0] += shift;
    }
    return atoms;
}

double block_tail(const GridFunction& f, const LpGenerator& gen, int N) {
    Spectrum s = to_coeffs(f);
    double tail = 0.0, total = 0.0;
    const int d = s.grid.dim();
    for_each_mode(s.grid, [&](std::size_t slot, const double* xi, const int* idx) {
        double keep = on_nyquist(s.grid, idx) ? 0.0 : gen(std::ldexp(radius(xi, d), -N));
        for (int c = 0; c < s.r; ++c) {
            double m = std::norm(s.c[slot * s.r + c]);
            total += m;
            tail += (1.0 - keep) * (1.0 - keep) * m;
        }
    });
    return total > 0.0 ? std::sqrt(tail / total) : 0.0;
}

std::vector<BankMember> generate_bank(const BankConfig& cfg) {
    cfg.grid.validate();
    if (cfg.size < 0) throw Error(Status::Arg, "bank size must be >= 0");
    if (cfg.blocks > LpSystem::max_blocks(cfg.grid)) {
        std::ostringstream os;
        os << "bank block count " << cfg.blocks << " exceeds the grid maximum " << LpSystem::max_blocks(cfg.grid);
        throw Error(Status::Arg, os.str());
    }
    Limits l = limits(cfg);
    if (sigma_max(l, 0.3 * l.reach) < 2.0 * l.sigma_min)
        throw Error(Status::Arg, "bank infeasible: torus too small for the spectral band of the grid");
    static const std::vector<std::string> all{"block", "bump", "dilate", "boundary"};
    const auto& kinds = cfg.kinds.empty() ? all : cfg.kinds;
    for (const auto& k : kinds)
        if (std::find(all.begin(), all.end(), k) == all.end()) throw Error(Status::Arg, "unknown bank kind: " + k);

    Sampler rs(cfg.seed);
    LpGenerator gen;
    std::vector<BankMember> out;
    for (int i = 0; i < cfg.size; ++i) {
        BankMember m;
        m.kind = kinds[static_cast<std::size_t>(i) % kinds.size()];
        std::ostringstream id;
        id << "f" << (i < 10 ? "0" : "") << i << "-" << m.kind;
        if (m.kind == "block") {
            m.atoms = block_member(rs, cfg, l);
        } else if (m.kind == "bump") {
            m.atoms = bump_member(rs, cfg, l);
        } else if (m.kind == "dilate") {
            double lambda = 1.0;
            m.atoms = dilate_member(rs, cfg, l, &lambda);
            id << "-l" << lambda;
        } else {
            int j = 0;
            m.atoms = boundary_member(rs, cfg, l, &j);
            id << "-j" << j;
        }
        m.id = id.str();
        m.f = sample_atoms(cfg.grid, cfg.r, m.atoms);
        double tail = block_tail(m.f, gen, cfg.blocks);
        if (tail > cfg.tail_tol) {
            std::ostringstream os;
            os << "bank member " << m.id << " has tail " << tail << " beyond block " << cfg.blocks;
            throw Error(Status::Arg, os.str());
        }
        m.f.support_margin = measure_support_margin(m.f);
        if (m.f.support_margin < cfg.margin) {
            std::ostringstream os;
            os << "bank member " << m.id << " has support margin " << m.f.support_margin;
            throw Error(Status::Arg, os.str());
        }
        out.push_back(std::move(m));
    }
    return out;
}

void write_bank(const std::vector<BankMember>& bank, const BankConfig& cfg, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Status::IO, "cannot create " + dir + ": " + ec.message());
    nlohmann::ordered_json man;
    man["seed"] = cfg.seed;
    man["size"] = cfg.size;
    man["blocks"] = cfg.blocks;
    man["r"] = cfg.r;
    man["grid"] = {{"n", cfg.grid.n}, {"L", cfg.grid.L}, {"offset", cfg.grid.offset}};
    auto& members = man["members"] = nlohmann::ordered_json::array();
    for (const auto& m : bank) {
        std::string file = m.id + ".wtlb";
        save_grid_function(m.f, (fs::path(dir) / file).string());
        members.push_back({{"id", m.id}, {"kind", m.kind}, {"file", file}, {"support_margin", m.f.support_margin}});
    }
    std::ofstream os(fs::path(dir) / "manifest.json", std::ios::binary);
    os << man.dump(2) << '\n';
    if (!os) throw Error(Status::IO, "cannot write manifest in " + dir);
}

}  // namespace tracelab

