#pragma once

#include <vector>

namespace tracelab {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

/// Gauss-Legendre rule with q points (Newton iteration on std::legendre).
const GaussRule& gauss_legendre(int q);

/// Integral of f over [a, b] with `panels` equal panels of a q-point rule.
template <class F>
auto integrate_gl(F&& f, double a, double b, int q = 16, int panels = 1) {
    const GaussRule& g = gauss_legendre(q);
    double w = (b - a) / panels;
    decltype(f(a)) acc{};
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * w;
        for (std::size_t i = 0; i < g.x.size(); ++i) acc += (0.5 * w * g.w[i]) * f(lo + 0.5 * w * (g.x[i] + 1.0));
    }
    return acc;
}

}  // namespace tracelab
