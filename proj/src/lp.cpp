#include "lp.hpp"

#include "errors.hpp"
#include "fft.hpp"
#include "spectral.hpp"

#include <cmath>
#include <string>

namespace tracelab {

double Ramp::operator()(double t) const {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    double b0 = std::exp(-a / t);
    double b1 = std::exp(-a / (1.0 - t));
    return b1 / (b0 + b1);
}

Jet Ramp::jet(const Jet& t) const {
    int k = t.order();
    if (t.value() <= 0.0) return Jet(k, 1.0);
    if (t.value() >= 1.0) return Jet(k, 0.0);
    Jet u = 1.0 + (-1.0) * t;
    Jet b0 = flat_exp(t, a);
    Jet b1 = flat_exp(u, a);
    return b1 / (b0 + b1);
}

LpGenerator::LpGenerator(double sharpness) {
    if (!(sharpness > 0.0) || !std::isfinite(sharpness))
        throw Error(Status::Arg, "ramp sharpness must be positive and finite");
    ramp_.a = sharpness;
    double prev = 1.0;
    for (int i = 0; i <= 2000; ++i) {
        double rho = 0.9 + 0.7 * i / 2000.0;
        double v = (*this)(rho);
        if (!(v >= 0.0 && v <= 1.0) || v > prev + 1e-15)
            throw Error(Status::Arg, "generator profile is not a monotone ramp in [0,1]");
        if ((rho <= 1.0 && v != 1.0) || (rho >= 1.5 && v != 0.0))
            throw Error(Status::Arg, "generator violates plateau/cutoff");
        prev = v;
    }
}

Jet LpGenerator::jet(double rho, int order) const {
    Jet t = 2.0 * (Jet::variable(rho, order) + Jet(order, -1.0));
    return ramp_.jet(t);
}

LpSystem::LpSystem(LpGenerator gen, int blocks, const Grid& grid) : gen_(gen), N_(blocks), grid_(grid) {
    grid_.validate();
    if (blocks < 0) throw Error(Status::Arg, "block count must be >= 0");
    int mx = max_blocks(grid_);
    if (blocks > mx)
        throw Error(Status::Arg, "block count " + std::to_string(blocks) + " exceeds grid resolution; max admissible N = " +
                                     std::to_string(mx));
}

int LpSystem::max_blocks(const Grid& grid) {
    if (grid.dim() == 0) return 0;
    double ny = grid.max_nyquist();
    int n = 0;
    while (1.5 * std::ldexp(1.0, n) <= ny) ++n;  // 1.5 * 2^((n+1)-1) <= ny
    return n;
}

double LpSystem::block(int n, double rho) const {
    if (n < 0) return 0.0;
    if (n == 0) return gen_(rho);
    return gen_(std::ldexp(rho, -n)) - gen_(std::ldexp(rho, -n + 1));
}

double LpSystem::lowpass(int n, double rho) const {
    if (n < 0) return 0.0;
    return gen_(std::ldexp(rho, -n));
}

double LpSystem::telescoping_residual() const {
    double worst = 0.0;
    double lim = std::ldexp(1.0, N_);
    const int d = grid_.dim();
    for_each_mode(grid_, [&](std::size_t, const double* xi, const int*) {
        double rho = radius(xi, d);
        if (rho > lim) return;
        double s = 0.0;
        for (int n = 0; n <= N_; ++n) s += block(n, rho);
        worst = std::max(worst, std::abs(s - 1.0));
    });
    return worst;
}

void LpSystem::apply_block(Spectrum& s, int n) const {
    if (n < -1 || n > N_) throw Error(Status::Arg, "block index " + std::to_string(n) + " out of range");
    if (!(s.grid == grid_)) throw Error(Status::Arg, "spectrum grid differs from LP system grid");
    multiply_radial(s, [this, n](double rho) { return block(n, rho); });
}

void LpSystem::apply_lowpass(Spectrum& s, int n) const {
    if (!(s.grid == grid_)) throw Error(Status::Arg, "spectrum grid differs from LP system grid");
    multiply_radial(s, [this, n](double rho) { return lowpass(n, rho); });
}

GridFunction LpSystem::block(const GridFunction& f, int n) const {
    Spectrum s = to_coeffs(f);
    apply_block(s, n);
    return from_coeffs(s, f.gamma);
}

}  // namespace tracelab
