#pragma once

#include <cmath>
#include <vector>

namespace tracelab {

/// Truncated Taylor series: c[i] = f^{(i)}(x0) / i!.
struct Jet {
    std::vector<double> c;

    explicit Jet(int order = 0, double value = 0.0) : c(static_cast<std::size_t>(order + 1), 0.0) { c[0] = value; }
    static Jet variable(double x0, int order) {
        Jet j(order, x0);
        if (order >= 1) j.c[1] = 1.0;
        return j;
    }
    int order() const { return static_cast<int>(c.size()) - 1; }
    double value() const { return c[0]; }
    double derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c[static_cast<std::size_t>(k)] * f;
    }
};

inline Jet operator+(Jet a, const Jet& b) {
    for (std::size_t i = 0; i < a.c.size(); ++i) a.c[i] += b.c[i];
    return a;
}
inline Jet operator-(Jet a, const Jet& b) {
    for (std::size_t i = 0; i < a.c.size(); ++i) a.c[i] -= b.c[i];
    return a;
}
inline Jet operator*(double s, Jet a) {
    for (auto& x : a.c) x *= s;
    return a;
}
inline Jet operator+(double s, Jet a) {
    a.c[0] += s;
    return a;
}
inline Jet operator*(const Jet& a, const Jet& b) {
    Jet r(a.order());
    for (std::size_t n = 0; n < a.c.size(); ++n) {
        double s = 0.0;
        for (std::size_t k = 0; k <= n; ++k) s += a.c[k] * b.c[n - k];
        r.c[n] = s;
    }
    return r;
}
inline Jet operator/(const Jet& a, const Jet& b) {
    Jet q(a.order());
    for (std::size_t n = 0; n < a.c.size(); ++n) {
        double s = a.c[n];
        for (std::size_t k = 1; k <= n; ++k) s -= b.c[k] * q.c[n - k];
        q.c[n] = s / b.c[0];
    }
    return q;
}
inline Jet exp(const Jet& f) {
    Jet g(f.order());
    g.c[0] = std::exp(f.c[0]);
    for (std::size_t n = 1; n < f.c.size(); ++n) {
        double s = 0.0;
        for (std::size_t k = 1; k <= n; ++k) s += static_cast<double>(k) * f.c[k] * g.c[n - k];
        g.c[n] = s / static_cast<double>(n);
    }
    return g;
}

/// exp(-a/t) for t > 0, identically zero for t <= 0 (flat at the origin).
inline Jet flat_exp(const Jet& t, double a) {
    if (t.value() <= a / 600.0) return Jet(t.order(), 0.0);
    return exp((-a) * (Jet(t.order(), 1.0) / t));
}

}  // namespace tracelab
