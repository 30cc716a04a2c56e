#pragma once

#include "grid.hpp"
#include "lp.hpp"

#include <limits>
#include <string>

namespace tracelab {

enum class Domain { Full, Half };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Power weight |x1|^gamma restricted to a domain.
struct WeightSpec {
    double gamma = 0.0;
    Domain domain = Domain::Full;
    WeightSpec() = default;
    WeightSpec(double g, Domain d);
};

struct NormResult {
    double value = 0.0;
    double tail = 0.0;
    std::string quadrature;
};

struct NormOptions {
    /// Spectral upsampling factor applied to every axis before quadrature.
    int upsample = 1;
};

/// Closed-form mass of |x|^gamma over [a, b].
double weighted_mass(double a, double b, double gamma);
/// Per-node cell masses along axis 0.
std::vector<double> axis0_masses(const Grid& g, double gamma);
/// Deterministic pairwise summation.
double pairwise_sum(const double* x, std::size_t n);

NormResult lp_norm(const GridFunction& f, double p, const WeightSpec& w, const NormOptions& opt = {});
NormResult sobolev_norm(const GridFunction& f, int k, double p, const WeightSpec& w, const NormOptions& opt = {});
NormResult besov_norm(const GridFunction& f, double s, double p, double q, const WeightSpec& w, const LpSystem& sys,
                      const NormOptions& opt = {});
NormResult triebel_norm(const GridFunction& f, double s, double p, double q, const WeightSpec& w,
                        const LpSystem& sys, const NormOptions& opt = {});
NormResult bessel_norm(const GridFunction& f, double s, double p, const WeightSpec& w, const NormOptions& opt = {});

/// Mixed norms on the half-space (d >= 2):
/// normal: ( int ||u(., x~)||^p_{W^{k,p}(R_+, w_gamma)} dx~ )^{1/p},
/// tangential: sum over tangential |beta| <= k of ||d~^beta u||_{L^p(R^d_+, w_gamma)}.
NormResult normal_mixed_norm(const GridFunction& f, int k, double p, double gamma, const NormOptions& opt = {});
NormResult tangential_sobolev_norm(const GridFunction& f, int k, double p, double gamma, const NormOptions& opt = {});

/// Higher-order reflection across x1 = 0: x1 < 0 values rebuilt from x1 > 0
/// as sum_j a_j f(-(2j+1) x1), matching `terms` one-sided derivatives.
GridFunction reflect_extend(const GridFunction& f, int terms);
std::vector<double> reflection_coefficients(int terms);

/// ||u||_{L^p(w_{gamma-p})} / ||u'||_{L^p(w_gamma)} on the half-line (1-D grid).
struct HardyResult {
    double ratio = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    double boundary_value = 0.0;
};
HardyResult hardy_ratio(const GridFunction& u, double p, double gamma, const NormOptions& opt = {});

/// One row of a norm batch export.
struct NormRow {
    std::string function_id;
    std::string family;  // L | W | H | B | F
    double s_or_k = 0.0;
    double p = 2.0;
    double q = 0.0;  // NaN when the family has no q
    double gamma = 0.0;
    Domain domain = Domain::Full;
    NormResult result;
};

/// Header: function_id,family,s_or_k,p,q,gamma,domain,value,tail
std::string norm_rows_csv(const std::vector<NormRow>& rows);

}  // namespace tracelab
