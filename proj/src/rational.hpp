#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tracelab {

/// Exact rational with 64-bit numerator/denominator, always normalized
/// (gcd = 1, denominator > 0). Arithmetic throws std::overflow_error rather
/// than wrapping.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::int64_t floor() const;

    /// "3", "-1/2", "0.75" (decimals are converted exactly).
    static std::optional<Rational> parse(std::string_view text);
    std::string str() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const { return Rational(-num_, den_); }

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend bool operator<(const Rational& a, const Rational& b);
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace tracelab
