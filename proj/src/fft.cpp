#include "fft.hpp"

#include "errors.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace tracelab {
namespace {

using PlanKey = std::tuple<std::vector<int>, int, int, int, int>;

struct PlanCache {
    std::mutex mu;
    std::map<PlanKey, fftw_plan> plans;
    ~PlanCache() {
        for (auto& [k, p] : plans) fftw_destroy_plan(p);
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

fftw_plan get_plan(std::vector<cplx>& data, const std::vector<int>& dims, int howmany, int stride, int dist,
                   int sign) {
    PlanCache& pc = cache();
    std::lock_guard<std::mutex> lock(pc.mu);
    PlanKey key{dims, howmany, stride, dist, sign};
    auto it = pc.plans.find(key);
    if (it != pc.plans.end()) return it->second;
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan p = fftw_plan_many_dft(static_cast<int>(dims.size()), dims.data(), howmany, buf, nullptr, stride,
                                     dist, buf, nullptr, stride, dist, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw Error(Status::Internal, "FFTW planning failed");
    pc.plans.emplace(key, p);
    return p;
}

/// Per-slot phase: (-1)^k e^{-i xi_k shift h} for the forward direction.
std::vector<cplx> axis_phase(const Grid& g, int axis) {
    int nn = g.n[axis];
    std::vector<cplx> ph(static_cast<std::size_t>(nn));
    double sh = g.shift(axis) * g.h(axis);
    for (int i = 0; i < nn; ++i) {
        int k = Grid::wavenumber(i, nn);
        double sgn = (k % 2 == 0) ? 1.0 : -1.0;
        ph[static_cast<std::size_t>(i)] = sgn * std::polar(1.0, -g.xi(axis, i) * sh);
    }
    return ph;
}

void apply_phase(const Grid& g, int r, std::vector<cplx>& data, bool forward) {
    std::size_t total = g.size();
    std::vector<std::vector<cplx>> ph;
    for (int a = 0; a < g.dim(); ++a) ph.push_back(axis_phase(g, a));
    double scale = forward ? 1.0 / static_cast<double>(total) : 1.0;
    std::vector<int> idx(static_cast<std::size_t>(g.dim()), 0);
    for (std::size_t node = 0; node < total; ++node) {
        cplx f(scale, 0.0);
        for (int a = 0; a < g.dim(); ++a) f *= ph[a][static_cast<std::size_t>(idx[a])];
        if (!forward) f = std::conj(f);
        for (int c = 0; c < r; ++c) data[node * r + c] *= f;
        for (int a = g.dim() - 1; a >= 0; --a) {
            if (++idx[a] < g.n[a]) break;
            idx[a] = 0;
        }
    }
}

}  // namespace

void dft_inplace(std::vector<cplx>& data, const std::vector<int>& dims, int howmany, int stride, int dist,
                 int sign) {
    if (dims.empty()) return;
    fftw_plan p = get_plan(data, dims, howmany, stride, dist, sign);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, buf, buf);
}

Spectrum to_coeffs(const GridFunction& f) {
    Spectrum s(f.grid, f.r);
    s.c = f.v;
    dft_inplace(s.c, f.grid.n, f.r, f.r, 1, FFTW_FORWARD);
    apply_phase(f.grid, f.r, s.c, true);
    return s;
}

GridFunction from_coeffs(const Spectrum& s, double gamma) {
    GridFunction f(s.grid, s.r, gamma);
    f.v = s.c;
    apply_phase(s.grid, s.r, f.v, false);
    dft_inplace(f.v, s.grid.n, s.r, s.r, 1, FFTW_BACKWARD);
    return f;
}

std::vector<cplx> axis0_coeffs(const GridFunction& f) {
    if (f.grid.dim() == 0) throw Error(Status::Arg, "axis-0 transform of a zero-dimensional grid");
    std::vector<cplx> out = f.v;
    int n0 = f.grid.n[0];
    int m = static_cast<int>(f.grid.stride(0)) * f.r;
    dft_inplace(out, {n0}, m, m, 1, FFTW_FORWARD);
    auto ph = axis_phase(f.grid, 0);
    for (int i = 0; i < n0; ++i) {
        cplx fac = ph[static_cast<std::size_t>(i)] / static_cast<double>(n0);
        for (int j = 0; j < m; ++j) out[static_cast<std::size_t>(i) * m + j] *= fac;
    }
    return out;
}

}  // namespace tracelab
