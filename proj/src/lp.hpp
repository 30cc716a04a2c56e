#pragma once

#include "grid.hpp"
#include "jet.hpp"

namespace tracelab {

/// Smooth ramp h(t) = B(1-t) / (B(t) + B(1-t)), B(t) = exp(-a/t): 1 for t <= 0, 0 for t >= 1.
struct Ramp {
    double a = 1.0;
    double operator()(double t) const;
    Jet jet(const Jet& t) const;
};

/// Radial generator: 1 on |xi| <= 1, 0 on |xi| >= 3/2, h(2(|xi|-1)) in between.
class LpGenerator {
public:
    explicit LpGenerator(double sharpness = 1.0);
    double sharpness() const { return ramp_.a; }
    double operator()(double rho) const { return ramp_(2.0 * (rho - 1.0)); }
    Jet jet(double rho, int order) const;
    const Ramp& ramp() const { return ramp_; }

private:
    Ramp ramp_;
};

/// Inhomogeneous Littlewood-Paley system phi_0..phi_N realized on a grid.
class LpSystem {
public:
    LpSystem(LpGenerator gen, int blocks, const Grid& grid);

    /// Largest N with 1.5 * 2^(N-1) <= max axis Nyquist.
    static int max_blocks(const Grid& grid);

    const LpGenerator& generator() const { return gen_; }
    int blocks() const { return N_; }
    const Grid& grid() const { return grid_; }

    /// phi_n(rho); n = -1 gives 0.
    double block(int n, double rho) const;
    /// phi(2^-n rho) = sum_{j<=n} phi_j(rho).
    double lowpass(int n, double rho) const;
    /// Max |sum_n phi_n - 1| over grid frequencies with |xi| <= 2^N.
    double telescoping_residual() const;

    void apply_block(Spectrum& s, int n) const;
    void apply_lowpass(Spectrum& s, int n) const;
    GridFunction block(const GridFunction& f, int n) const;

private:
    LpGenerator gen_;
    int N_;
    Grid grid_;
};

}  // namespace tracelab
