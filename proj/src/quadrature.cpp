#include "quadrature.hpp"

#include "errors.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace tracelab {

namespace {

GaussRule build(int q) {
    GaussRule r;
    r.x.resize(static_cast<std::size_t>(q));
    r.w.resize(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p = std::legendre(q, x);
            double pm = std::legendre(q - 1, x);
            double dp = q * (x * p - pm) / (x * x - 1.0);
            double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p = std::legendre(q, x);
        double pm = std::legendre(q - 1, x);
        double dp = q * (x * p - pm) / (x * x - 1.0);
        r.x[static_cast<std::size_t>(i)] = x;
        r.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

}  // namespace

const GaussRule& gauss_legendre(int q) {
    if (q < 1 || q > 128) throw Error(Status::Arg, "Gauss-Legendre order out of range");
    static std::mutex mu;
    static std::map<int, GaussRule> rules;
    std::lock_guard<std::mutex> lock(mu);
    auto it = rules.find(q);
    if (it == rules.end()) it = rules.emplace(q, build(q)).first;
    return it->second;
}

}  // namespace tracelab
