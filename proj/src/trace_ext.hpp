#pragma once

#include "grid.hpp"
#include "lp.hpp"

#include <vector>

namespace tracelab {

/// Extension kernels on the normal axis of a full-space grid.
///
/// kernel(j, m) holds the Fourier coefficients (axis-0 slots) of
/// psi_j^m(x1) = x1^m / m! * (F^-1 zeta)(2^j x1), zeta = eta0 for j = 0 and eta
/// for j >= 1, corrected so that d^l psi_j^m(0) = delta_lm for l <= m exactly
/// on the grid. rho(n) holds 2^-n rho_n, normalized to value 1 at x1 = 0.
class EtaFamily {
public:
    EtaFamily(const Grid& full, int top_block, int m_max = 4, double sharpness = 1.0);

    int top_block() const { return J_; }
    int m_max() const { return m_max_; }
    const Grid& grid() const { return grid_; }

    const std::vector<cplx>& kernel(int j, int m) const;
    const std::vector<cplx>& rho(int n) const;

    /// zeta_j and its derivatives at xi (profile before dilation).
    double eta0(double xi, int deriv = 0) const;
    double eta(double xi, int deriv = 0) const;

    /// Grid value of psi_j^m at x1 from the stored series.
    cplx kernel_series(int j, int m, double x1, int deriv = 0) const;
    /// Independent evaluation of x1^m/m! (F^-1 zeta)(2^j x1) by quadrature.
    cplx kernel_profile(int j, int m, double x1) const;

    /// Continuous-profile values (F^-1 eta0)(0), (F^-1 eta)(0).
    double eta0_at_zero() const;
    double eta_at_zero() const;
    /// rho_1(0) after the global rescaling; equals 2.
    double rho1_at_zero() const { return rho1_zero_; }
    double rho_scale() const { return rho_scale_; }
    /// rho_0(0) under the same global rescaling, before the halving of rho_0.
    double rho0_at_zero_unhalved() const { return rho0_unhalved_; }
    /// Largest moment-correction coefficient applied (diagnostic).
    double max_correction() const { return max_corr_; }

private:
    Grid grid_;
    int J_;
    int m_max_;
    LpGenerator gen_;
    double c_eta0_ = 1.0, c_eta_ = 1.0;
    std::vector<std::vector<std::vector<cplx>>> kern_;  // [j][m][k0]
    std::vector<std::vector<cplx>> rho_;
    double rho_scale_ = 1.0, rho1_zero_ = 0.0, rho0_unhalved_ = 0.0, max_corr_ = 0.0;
};

/// Tr_m f = sum_{n<=N} (phi_n * d1^m f)(0, .) with the tail check.
GridFunction trace(const GridFunction& f, const LpSystem& sys, int m = 0, double tol = 1e-8);
/// Direct spectral restriction of d1^m f at x1 = 0 (no LP truncation).
Spectrum trace_spectrum(const Spectrum& f, int m, double* tail = nullptr);

GridFunction ext0(const GridFunction& g, const EtaFamily& eta, const LpSystem& bsys, double tol = 1e-10);
GridFunction ext_m(const GridFunction& g, int m, const EtaFamily& eta, const LpSystem& bsys, double tol = 1e-10);
Spectrum ext_m_spectrum(const Spectrum& g, int m, const EtaFamily& eta, const LpSystem& bsys, double tol = 1e-10);
/// f_j = f_{j-1} + ext_j(g_j - Tr_j f_{j-1}).
GridFunction ext_vector(const std::vector<GridFunction>& g, const EtaFamily& eta, const LpSystem& bsys,
                        double tol = 1e-10);

/// d1^deriv of the boundary-preserving mollification g_n of f (x1 > 0 part;
/// values at x1 < 0 are zero).
GridFunction mollify(const GridFunction& f, int m, double n, int deriv = 0, int quad = 20);
/// Mollifier profile phi: 0 on [0,1/2], 1 on [1, inf).
Jet mollifier_profile(double x, int order);

/// Multiply by the indicator of x1 > 0.
GridFunction indicator_multiply(const GridFunction& f);

}  // namespace tracelab
