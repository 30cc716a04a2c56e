#include "rational.hpp"

#include <cctype>
#include <numeric>
#include <stdexcept>

namespace tracelab {
namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational overflow");
    return static_cast<std::int64_t>(v);
}

Rational make(i128 n, i128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    i128 a = n < 0 ? -n : n, b = d;
    while (b != 0) { i128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
    return Rational(narrow(n), narrow(d));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    std::int64_t g = std::gcd(num, den);
    if (g > 1) { num /= g; den /= g; }
    num_ = num;
    den_ = den;
}

std::int64_t Rational::floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

Rational operator+(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}
Rational operator-(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}
Rational operator*(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
}
Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
}
bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
}

std::optional<Rational> Rational::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    bool neg = false;
    std::size_t i = 0;
    if (text[0] == '-' || text[0] == '+') { neg = text[0] == '-'; ++i; }
    if (i >= text.size()) return std::nullopt;
    i128 num = 0, den = 1;
    bool any = false, dot = false, slash = false;
    i128 den_part = 0;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            any = true;
            if (slash) {
                den_part = den_part * 10 + (c - '0');
            } else {
                num = num * 10 + (c - '0');
                if (dot) den *= 10;
            }
            if (num > INT64_MAX || den > INT64_MAX || den_part > INT64_MAX) return std::nullopt;
        } else if (c == '.' && !dot && !slash) {
            dot = true;
        } else if (c == '/' && !slash && !dot && any) {
            slash = true;
            any = false;
        } else {
            return std::nullopt;
        }
    }
    if (!any) return std::nullopt;
    if (slash) {
        if (den_part == 0) return std::nullopt;
        den = den_part;
    }
    try {
        return make(neg ? -num : num, den);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace tracelab
