#include "norms.hpp"

#include "errors.hpp"
#include "fft.hpp"
#include "spectral.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <sstream>

namespace tracelab {

WeightSpec::WeightSpec(double g, Domain d) : gamma(g), domain(d) {
    if (!(g > -1.0) || !std::isfinite(g)) throw Error(Status::Domain, "weight exponent must satisfy gamma > -1");
}

double weighted_mass(double a, double b, double gamma) {
    auto F = [gamma](double x) {
        double s = x < 0.0 ? -1.0 : 1.0;
        return s * std::pow(std::abs(x), gamma + 1.0) / (gamma + 1.0);
    };
    if (gamma == 0.0) return b - a;
    return F(b) - F(a);
}

std::vector<double> axis0_masses(const Grid& g, double gamma) {
    std::vector<double> m(static_cast<std::size_t>(g.n[0]));
    double h = g.h(0);
    // Edges from exact half-integer offsets so the edge at x1 = 0 is exactly zero;
    // for gamma < 0 a roundoff of eps there costs eps^(gamma+1) in the mass.
    for (int i = 0; i < g.n[0]; ++i) {
        double t = i + g.shift(0) - 0.5 * g.n[0];
        m[static_cast<std::size_t>(i)] = weighted_mass((t - 0.5) * h, (t + 0.5) * h, gamma);
    }
    return m;
}

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

namespace {

GridFunction resample(const GridFunction& f, int factor) {
    if (factor == 1) return f;
    return from_coeffs(upsample(to_coeffs(f), factor), f.gamma);
}

/// Weighted quadrature of a per-node nonnegative density.
double integrate(const Grid& g, const std::vector<double>& density, const WeightSpec& w) {
    if (g.dim() == 0) return density.empty() ? 0.0 : density[0];
    auto m0 = axis0_masses(g, w.gamma);
    std::size_t st = g.stride(0);
    double tang = 1.0;
    for (int a = 1; a < g.dim(); ++a) tang *= g.h(a);
    std::vector<double> terms;
    terms.reserve(density.size());
    for (int i = 0; i < g.n[0]; ++i) {
        if (w.domain == Domain::Half && !(g.x(0, i) > 0.0)) continue;
        double mi = m0[static_cast<std::size_t>(i)] * tang;
        for (std::size_t j = 0; j < st; ++j) terms.push_back(density[static_cast<std::size_t>(i) * st + j] * mi);
    }
    return pairwise_sum(terms.data(), terms.size());
}

std::vector<double> fiber_abs(const GridFunction& f) {
    std::vector<double> a(f.nodes());
    for (std::size_t k = 0; k < f.nodes(); ++k) {
        double s = 0.0;
        for (int c = 0; c < f.r; ++c) s += std::norm(f.at(k, c));
        a[k] = std::sqrt(s);
    }
    return a;
}

double lp_of_abs(const Grid& g, std::vector<double> a, double p, const WeightSpec& w) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (w.domain == Domain::Half && g.dim() > 0) {
                int i0 = static_cast<int>(k / g.stride(0));
                if (!(g.x(0, i0) > 0.0)) continue;
            }
            m = std::max(m, a[k]);
        }
        return m;
    }
    for (auto& x : a) x = std::pow(x, p);
    return std::pow(integrate(g, a, w), 1.0 / p);
}

double volume(const Grid& g) { return std::pow(2.0 * g.L, g.dim()); }

double truncation_tail(const Spectrum& s, const LpGenerator& gen, int N) {
    double acc = 0.0;
    const int d = s.grid.dim();
    for_each_mode(s.grid, [&](std::size_t slot, const double* xi, const int*) {
        double keep = gen(std::ldexp(radius(xi, d), -N));
        double drop = 1.0 - keep;
        if (drop == 0.0) return;
        for (int c = 0; c < s.r; ++c) acc += drop * drop * std::norm(s.c[slot * s.r + c]);
    });
    return std::sqrt(acc * volume(s.grid));
}

void require_ap(double gamma, double p, const char* what) {
    if (!(gamma > -1.0 && gamma < p - 1.0))
        throw Error(Status::Domain, std::string(what) + " requires an A_p weight, gamma in (-1, p-1)");
}

void require_margin(const GridFunction& f) {
    double m = effective_support_margin(f);
    if (m < 0.25) {
        std::ostringstream os;
        os << "support_margin " << m << " < 0.25: essential support too close to the torus seam";
        throw Error(Status::Domain, os.str());
    }
}

int reflection_terms(double s) { return std::max(3, static_cast<int>(std::ceil(std::abs(s))) + 2); }

/// Half-space B/F/H norms go through a reflection extension (A_p range only).
GridFunction prepare_half(const GridFunction& f, double s, double p, const WeightSpec& w, const char* what) {
    if (w.domain == Domain::Full) return f;
    require_ap(w.gamma, p, what);
    return reflect_extend(f, reflection_terms(s));
}

std::string meta(const char* kind, const Grid& g, int up) {
    std::ostringstream os;
    os << kind << ";midpoint-weighted;nodes=" << g.size() << ";upsample=" << up;
    return os.str();
}

}  // namespace

NormResult lp_norm(const GridFunction& f, double p, const WeightSpec& w, const NormOptions& opt) {
    if (!(p >= 1.0)) throw Error(Status::Domain, "p must be >= 1");
    require_margin(f);
    GridFunction g = resample(f, opt.upsample);
    NormResult r;
    r.value = lp_of_abs(g.grid, fiber_abs(g), p, w);
    r.quadrature = meta("lp", g.grid, opt.upsample);
    return r;
}

NormResult sobolev_norm(const GridFunction& f, int k, double p, const WeightSpec& w, const NormOptions& opt) {
    if (k < 0) throw Error(Status::Arg, "Sobolev order must be >= 0");
    require_margin(f);
    Spectrum s = upsample(to_coeffs(f), opt.upsample);
    NormResult r;
    for (const auto& alpha : multi_indices(f.grid.dim(), k)) {
        Spectrum sa = s;
        differentiate(sa, alpha);
        GridFunction da = from_coeffs(sa);
        r.value += lp_of_abs(da.grid, fiber_abs(da), p, w);
    }
    r.quadrature = meta("sobolev", s.grid, opt.upsample);
    return r;
}

NormResult besov_norm(const GridFunction& f0, double s, double p, double q, const WeightSpec& w,
                      const LpSystem& sys, const NormOptions& opt) {
    if (!(q >= 1.0)) throw Error(Status::Domain, "q must be >= 1");
    if (!(f0.grid == sys.grid())) throw Error(Status::Arg, "function grid differs from LP system grid");
    require_margin(f0);
    GridFunction f = prepare_half(f0, s, p, w, "half-space Besov norm");
    WeightSpec wf(w.gamma, Domain::Full);
    Spectrum base = to_coeffs(f);
    NormResult r;
    r.tail = truncation_tail(base, sys.generator(), sys.blocks());
    Spectrum up = upsample(base, opt.upsample);
    double acc = 0.0;
    for (int n = 0; n <= sys.blocks(); ++n) {
        Spectrum b = up;
        multiply_radial(b, [&](double rho) { return sys.block(n, rho); });
        GridFunction bn = from_coeffs(b);
        double v = std::pow(2.0, n * s) * lp_of_abs(bn.grid, fiber_abs(bn), p, wf);
        if (std::isinf(q))
            acc = std::max(acc, v);
        else
            acc += std::pow(v, q);
    }
    r.value = std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
    r.quadrature = meta("besov", up.grid, opt.upsample);
    return r;
}

NormResult triebel_norm(const GridFunction& f0, double s, double p, double q, const WeightSpec& w,
                        const LpSystem& sys, const NormOptions& opt) {
    if (!(q >= 1.0)) throw Error(Status::Domain, "q must be >= 1");
    if (!(f0.grid == sys.grid())) throw Error(Status::Arg, "function grid differs from LP system grid");
    require_margin(f0);
    GridFunction f = prepare_half(f0, s, p, w, "half-space Triebel-Lizorkin norm");
    WeightSpec wf(w.gamma, Domain::Full);
    Spectrum base = to_coeffs(f);
    NormResult r;
    r.tail = truncation_tail(base, sys.generator(), sys.blocks());
    Spectrum up = upsample(base, opt.upsample);
    std::vector<double> acc(up.grid.size(), 0.0);
    for (int n = 0; n <= sys.blocks(); ++n) {
        Spectrum b = up;
        multiply_radial(b, [&](double rho) { return sys.block(n, rho); });
        GridFunction bn = from_coeffs(b);
        auto a = fiber_abs(bn);
        double scale = std::pow(2.0, n * s);
        for (std::size_t k = 0; k < a.size(); ++k) {
            double v = scale * a[k];
            if (std::isinf(q))
                acc[k] = std::max(acc[k], v);
            else
                acc[k] += std::pow(v, q);
        }
    }
    if (!std::isinf(q))
        for (auto& x : acc) x = std::pow(x, 1.0 / q);
    r.value = lp_of_abs(up.grid, std::move(acc), p, wf);
    r.quadrature = meta("triebel", up.grid, opt.upsample);
    return r;
}

NormResult bessel_norm(const GridFunction& f0, double s, double p, const WeightSpec& w, const NormOptions& opt) {
    require_ap(w.gamma, p, "Bessel potential norm");
    require_margin(f0);
    GridFunction f = prepare_half(f0, s, p, w, "half-space Bessel potential norm");
    Spectrum sp = upsample(to_coeffs(f), opt.upsample);
    bessel(sp, s);
    GridFunction g = from_coeffs(sp);
    NormResult r;
    r.value = lp_of_abs(g.grid, fiber_abs(g), p, WeightSpec(w.gamma, Domain::Full));
    r.quadrature = meta("bessel", g.grid, opt.upsample);
    return r;
}

NormResult normal_mixed_norm(const GridFunction& f, int k, double p, double gamma, const NormOptions& opt) {
    if (f.grid.dim() < 2 || !f.grid.offset) throw Error(Status::Arg, "mixed norms need d >= 2 with an offset normal axis");
    if (k < 0 || !(p >= 1.0) || std::isinf(p)) throw Error(Status::Arg, "mixed norm needs k >= 0 and finite p >= 1");
    require_margin(f);
    WeightSpec w(gamma, Domain::Half);
    Spectrum s = upsample(to_coeffs(f), opt.upsample);
    const Grid& g = s.grid;
    const std::size_t st = g.stride(0);
    auto m0 = axis0_masses(g, gamma);
    std::vector<double> fiber(st, 0.0);
    for (int j = 0; j <= k; ++j) {
        std::vector<int> alpha(static_cast<std::size_t>(g.dim()), 0);
        alpha[0] = j;
        Spectrum sj = s;
        differentiate(sj, alpha);
        auto a = fiber_abs(from_coeffs(sj));
        for (std::size_t t = 0; t < st; ++t) {
            std::vector<double> terms;
            for (int i = 0; i < g.n[0]; ++i) {
                if (!(g.x(0, i) > 0.0)) continue;
                terms.push_back(std::pow(a[static_cast<std::size_t>(i) * st + t], p) * m0[static_cast<std::size_t>(i)]);
            }
            fiber[t] += std::pow(pairwise_sum(terms.data(), terms.size()), 1.0 / p);
        }
    }
    double tang = 1.0;
    for (int a = 1; a < g.dim(); ++a) tang *= g.h(a);
    for (auto& x : fiber) x = std::pow(x, p) * tang;
    NormResult r;
    r.value = std::pow(pairwise_sum(fiber.data(), fiber.size()), 1.0 / p);
    r.quadrature = meta("normal-mixed", g, opt.upsample);
    return r;
}

NormResult tangential_sobolev_norm(const GridFunction& f, int k, double p, double gamma, const NormOptions& opt) {
    if (f.grid.dim() < 2) throw Error(Status::Arg, "tangential norm needs d >= 2");
    if (k < 0) throw Error(Status::Arg, "Sobolev order must be >= 0");
    require_margin(f);
    WeightSpec w(gamma, Domain::Half);
    Spectrum s = upsample(to_coeffs(f), opt.upsample);
    NormResult r;
    for (const auto& beta : multi_indices(f.grid.dim() - 1, k)) {
        std::vector<int> alpha{0};
        alpha.insert(alpha.end(), beta.begin(), beta.end());
        Spectrum sa = s;
        differentiate(sa, alpha);
        GridFunction da = from_coeffs(sa);
        r.value += lp_of_abs(da.grid, fiber_abs(da), p, w);
    }
    r.quadrature = meta("tangential", s.grid, opt.upsample);
    return r;
}

std::vector<double> reflection_coefficients(int terms) {
    if (terms < 1 || terms > 12) throw Error(Status::Arg, "reflection terms must be in [1, 12]");
    Eigen::MatrixXd V(terms, terms);
    Eigen::VectorXd rhs = Eigen::VectorXd::Ones(terms);
    for (int l = 0; l < terms; ++l)
        for (int j = 0; j < terms; ++j) V(l, j) = std::pow(-(2.0 * j + 1.0), l);
    Eigen::VectorXd a = V.fullPivLu().solve(rhs);
    return std::vector<double>(a.data(), a.data() + terms);
}

GridFunction reflect_extend(const GridFunction& f, int terms) {
    const Grid& g = f.grid;
    if (g.dim() == 0 || !g.offset) throw Error(Status::Arg, "reflection needs an offset normal axis");
    auto a = reflection_coefficients(terms);
    GridFunction out = f;
    const int n0 = g.n[0];
    const int half = n0 / 2;
    const std::size_t m = g.stride(0) * static_cast<std::size_t>(f.r);
    for (int i = 0; i < half; ++i) {
        int mirror = half - 1 - i;
        cplx* dst = &out.v[static_cast<std::size_t>(i) * m];
        for (std::size_t j = 0; j < m; ++j) dst[j] = 0.0;
        for (int t = 0; t < terms; ++t) {
            int b = 2 * t + 1;
            int src = half + b * mirror + (b - 1) / 2;
            if (src >= n0) continue;
            const cplx* sp = &f.v[static_cast<std::size_t>(src) * m];
            for (std::size_t j = 0; j < m; ++j) dst[j] += a[static_cast<std::size_t>(t)] * sp[j];
        }
    }
    return out;
}

HardyResult hardy_ratio(const GridFunction& u0, double p, double gamma, const NormOptions& opt) {
    if (u0.grid.dim() != 1 || !u0.grid.offset) throw Error(Status::Arg, "Hardy ratio needs a 1-D offset grid");
    if (!(gamma > -1.0)) throw Error(Status::Domain, "gamma must be > -1");
    if (gamma == p - 1.0) throw Error(Status::Domain, "gamma = p-1 is excluded");
    require_margin(u0);
    Spectrum s = to_coeffs(u0);
    HardyResult res;
    double tail = 0.0;
    Spectrum b = evaluate_axis0(s, 0.0, &tail);
    res.boundary_value = std::abs(b.c[0]);
    if (gamma < p - 1.0 && res.boundary_value > 1e-8 * std::max(1.0, u0.max_abs()))
        throw Error(Status::Domain, "gamma < p-1 requires u(0) = 0");
    Spectrum up = upsample(s, opt.upsample);
    GridFunction u = from_coeffs(up);
    Spectrum dsp = up;
    differentiate(dsp, {1});
    GridFunction du = from_coeffs(dsp);
    if (gamma > p - 1.0) {
        res.numerator = lp_of_abs(u.grid, fiber_abs(u), p, WeightSpec(gamma - p, Domain::Half));
    } else {
        GridFunction q = u;
        for (int i = 0; i < u.grid.n[0]; ++i) q.at(static_cast<std::size_t>(i)) /= u.grid.x(0, i);
        res.numerator = lp_of_abs(q.grid, fiber_abs(q), p, WeightSpec(gamma, Domain::Half));
    }
    res.denominator = lp_of_abs(du.grid, fiber_abs(du), p, WeightSpec(gamma, Domain::Half));
    if (res.denominator == 0.0) throw Error(Status::Numeric, "Hardy ratio with vanishing derivative");
    res.ratio = res.numerator / res.denominator;
    return res;
}

namespace {

std::string csv_num(double x) {
    if (std::isnan(x)) return "";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

std::string norm_rows_csv(const std::vector<NormRow>& rows) {
    std::ostringstream os;
    os << "function_id,family,s_or_k,p,q,gamma,domain,value,tail\n";
    for (const auto& r : rows) {
        if (r.function_id.find_first_of(",\"\n") != std::string::npos)
            throw Error(Status::Arg, "function id must not contain ',', '\"' or newlines: " + r.function_id);
        os << r.function_id << ',' << r.family << ',' << csv_num(r.s_or_k) << ',' << csv_num(r.p) << ','
           << csv_num(r.q) << ',' << csv_num(r.gamma) << ',' << (r.domain == Domain::Half ? "half" : "full") << ','
           << csv_num(r.result.value) << ',' << csv_num(r.result.tail) << '\n';
    }
    return os.str();
}

}  // namespace tracelab
