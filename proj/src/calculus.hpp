#pragma once

#include "rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tracelab::calc {

enum class Family { Besov, Triebel, Bessel, Sobolev, Lebesgue };
enum class Dom { Full, Half, Boundary };

/// Microscopic integrability q: a finite rational or infinity.
struct QParam {
    bool inf = false;
    Rational v{1};
    static QParam infinity() { return {true, Rational(0)}; }
    friend bool operator==(const QParam&, const QParam&) = default;
};
bool q_less_equal(const QParam& a, const QParam& b);

/// Boundary-condition signature. TraceM is the single condition Tr_m f = 0,
/// System an abstract normal system with orders m_0 < ... < m_n and target
/// dimensions (empty dims: each Y_i = C^r). Zero means all traces vanish.
struct BoundaryCondition {
    enum class Kind { None, Zero, TraceM, System } kind = Kind::None;
    std::vector<int> orders;
    std::vector<int> dims;
    bool present() const { return kind != Kind::None; }
    friend bool operator==(const BoundaryCondition&, const BoundaryCondition&) = default;
};

struct Space {
    Family fam = Family::Besov;
    Rational s{0};  // k for Sobolev, 0 for Lebesgue
    Rational p{2};
    QParam q{};     // used by Besov / Triebel only
    Rational gamma{0};
    int d = 2;
    int r = 1;
    Dom dom = Dom::Full;
    BoundaryCondition bc{};
    friend bool operator==(const Space&, const Space&) = default;
};

std::string family_letter(Family f);
std::string canonical(const Space& s);
std::string canonical(const BoundaryCondition& bc);

struct Citation {
    std::string rule_id;
    std::string anchor;
    std::vector<std::string> assumptions;
};

enum class Truth { False, True, Unknown };

struct QueryResult {
    enum class Kind { Space, Product, Boolean, Class, Identity, Rejected } kind = Kind::Rejected;
    std::vector<Space> spaces;  // one entry for Space, several for Product
    Truth truth = Truth::Unknown;
    std::optional<bool> ap;     // Muckenhoupt flag (validate)
    std::string text;           // rejection reason, class name or identity
    std::vector<Citation> citations;
};

/// Rejection reason if the descriptor violates an invariant, else nothing.
std::optional<std::string> check_space(const Space& s);
bool is_ap(const Space& s);
/// j >= 1 with gamma = j p - 1, or 0.
int excluded_index(const Rational& p, const Rational& gamma);

QueryResult validate(const Space& s);
QueryResult trace_space(const Space& s, int m);
QueryResult trace_vector_space(const Space& s, int m);
QueryResult boundary_trace_space(const Space& s);
QueryResult interpolate(const Space& a, const Space& b, const Rational& theta);
QueryResult embeds(const Space& a, const Space& b, int max_depth = 3);
QueryResult density_class(const Space& s);
QueryResult fubini_split(int k, const Rational& p, const Rational& gamma, int d = 2);

/// Conditions of bc still active at smoothness t (B^{m_i} kept iff m_i + (gamma+1)/p < t).
BoundaryCondition resolve_conditions(const BoundaryCondition& bc, const Rational& t, const Rational& p,
                                     const Rational& gamma);

}  // namespace tracelab::calc
