#include "calculus.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace tracelab::calc {

namespace {

using K = QueryResult::Kind;
using BK = BoundaryCondition::Kind;

// Rule ids and anchors. Anchors restate each rule in formula form.
struct Rule {
    const char* id;
    const char* anchor;
};

constexpr Rule kParams{"params.basic", "p in (1,inf), q in [1,inf], gamma > -1, d >= 1, r >= 1"};
constexpr Rule kAp{"weight.ap", "w_gamma = |x_1|^gamma is A_p iff gamma in (-1, p-1)"};
constexpr Rule kBesselAp{"params.bessel_ap", "H^{s,p}(w_gamma) is defined for A_p weights only"};
constexpr Rule kSobolevExcl{"params.sobolev_excluded", "W^{k,p}(R^d_+, w_gamma): gamma in (-1,inf) \\ {jp-1 : j >= 1}"};
constexpr Rule kLebesgue{"params.lebesgue", "L^p(w_gamma) has smoothness 0"};
constexpr Rule kTraceB{"trace.besov.full", "Tr_m B^s_{p,q}(R^d,w_gamma) = B^{s-m-(gamma+1)/p}_{p,q}(R^{d-1}), s > m+(gamma+1)/p"};
constexpr Rule kTraceBHalf{"trace.besov.half", "Tr_m B^s_{p,q}(R^d_+,w_gamma) = B^{s-m-(gamma+1)/p}_{p,q}(R^{d-1}), gamma in (-1,p-1)"};
constexpr Rule kTraceF{"trace.triebel.full", "Tr_m F^s_{p,q}(R^d,w_gamma) = B^{s-m-(gamma+1)/p}_{p,p}(R^{d-1}), s > m+(gamma+1)/p"};
constexpr Rule kTraceFHalf{"trace.triebel.half", "Tr_m F^s_{p,q}(R^d_+,w_gamma) = B^{s-m-(gamma+1)/p}_{p,p}(R^{d-1}) via reflection, gamma in (-1,p-1)"};
constexpr Rule kTraceH{"trace.bessel", "Tr_m H^{s,p}(O,w_gamma) = B^{s-m-(gamma+1)/p}_{p,p}(R^{d-1}), O in {R^d, R^d_+}, gamma in (-1,p-1), s > 0"};
constexpr Rule kTraceWAp{"trace.sobolev.ap", "Tr_m W^{k,p}(O,w_gamma) = B^{k-m-(gamma+1)/p}_{p,p}(R^{d-1}), O in {R^d, R^d_+}, gamma in (-1,p-1)"};
constexpr Rule kTraceW{"trace.sobolev.half", "Tr_m W^{k,p}(R^d_+,w_gamma) = B^{k-m-(gamma+1)/p}_{p,p}(R^{d-1}), k >= 1, gamma not in {jp-1}"};
constexpr Rule kTraceExt{"trace.extension", "ext_m is a right inverse of Tr_m with Tr_j ext_m = 0 for j < m"};
constexpr Rule kTraceVecH{"traces.bessel", "(Tr_0,...,Tr_m) H^{s,p}(O,w_gamma) = prod_{j<=m} B^{s-j-(gamma+1)/p}_{p,p}(R^{d-1})"};
constexpr Rule kTraceVecW{"traces.sobolev", "(Tr_0,...,Tr_m) W^{k,p}(R^d_+,w_gamma) = prod_{j<=m} B^{k-j-(gamma+1)/p}_{p,p}(R^{d-1})"};
constexpr Rule kTraceVecBF{"traces.componentwise", "(Tr_0,...,Tr_m) maps onto the product of the single trace spaces"};
constexpr Rule kBoundaryH{"boundary.bessel", "B = (B^{m_0},...,B^{m_n}) : H^{s,p}(R^d_+,w_gamma) -> prod_i B^{s-m_i-(gamma+1)/p}_{p,p}(R^{d-1};Y_i) onto, gamma in (-1,p-1)"};
constexpr Rule kBoundaryW{"boundary.sobolev", "B = (B^{m_0},...,B^{m_n}) : W^{k,p}(R^d_+,w_gamma) -> prod_i B^{k-m_i-(gamma+1)/p}_{p,p}(R^{d-1};Y_i) onto, gamma not in {jp-1}"};
constexpr Rule kBoundaryExt{"boundary.extension", "ext_B right inverse of B with Tr_j ext_B = 0 for j < m_n, j not in {m_i}"};
constexpr Rule kIntpTrivial{"interp.trivial", "[X, X]_theta = X"};
constexpr Rule kIntpLW{"interp.sobolev.lebesgue", "[L^p(R^d_+,w_gamma), W^{k,p}(R^d_+,w_gamma)]_{l/k} = W^{l,p}(R^d_+,w_gamma), gamma not in {jp-1}"};
constexpr Rule kIntpLWB{"interp.sobolev.lebesgue_bc", "[L^p(R^d_+,w_gamma), W^{k,p}_B(R^d_+,w_gamma)]_{l/k} = W^{l,p}_B(R^d_+,w_gamma), gamma not in {jp-1}"};
constexpr Rule kIntpW{"interp.sobolev", "[W^{k0,p}, W^{k0+k1,p}]_{l/k1} = W^{k0+l,p} on R^d_+ with w_gamma, k1 >= 2, gamma not in {jp-1}"};
constexpr Rule kIntpW0{"interp.sobolev.zero", "[W^{k0,p}_0, W^{k0+k1,p}_0]_{l/k1} = W^{k0+l,p}_0 on R^d_+ with w_gamma, k1 >= 2, gamma not in {jp-1}"};
constexpr Rule kIntpWB{"interp.sobolev.bc", "[W^{k0,p}(_B), W^{k0+k1,p}_B]_{l/k1} = W^{k0+l,p}_B, B^{m_i} f = 0 kept iff m_i+(gamma+1)/p < k0+l"};
constexpr Rule kIntpH{"interp.bessel", "[H^{s0,p}(w_gamma), H^{s1,p}(w_gamma)]_theta = H^{s_theta,p}(w_gamma), gamma in (-1,p-1)"};
constexpr Rule kIntpH0{"interp.bessel.zero", "[H^{s0,p}_0, H^{s1,p}_0]_theta = H^{s_theta,p}_0, s0,s_theta,s1 not in N_0+(gamma+1)/p, s0 > -1+(gamma+1)/p"};
constexpr Rule kIntpHB{"interp.bessel.bc", "[H^{s0,p}(_B), H^{s1,p}_B]_theta = H^{s_theta,p}_B, s0,s_theta,s1 not in {m_i+(gamma+1)/p}, s0 > -1+(gamma+1)/p"};
constexpr Rule kIntpHW{"interp.bessel_equals_sobolev", "H^{k,p}(R^d_+,w_gamma) = W^{k,p}(R^d_+,w_gamma) for gamma in (-1,p-1)"};
constexpr Rule kIntpLocal{"interp.localisation", "the interpolation identities carry over to bounded smooth domains by localisation"};
constexpr Rule kEmbSearch{"embeds.search", "only sufficient conditions are encoded; no chain found within the depth limit"};
constexpr Rule kEmbId{"embeds.identity", "X embeds into X"};
constexpr Rule kEmbQB{"embeds.besov_q", "B^s_{p,q0}(w) -> B^s_{p,q1}(w) for q0 <= q1"};
constexpr Rule kEmbQF{"embeds.triebel_q", "F^s_{p,q0}(w) -> F^s_{p,q1}(w) for q0 <= q1"};
constexpr Rule kEmbBF{"embeds.besov_triebel", "B^s_{p,min(p,q)}(w) -> F^s_{p,q}(w)"};
constexpr Rule kEmbFB{"embeds.triebel_besov", "F^s_{p,q}(w) -> B^s_{p,max(p,q)}(w)"};
constexpr Rule kEmbFH{"embeds.triebel_bessel", "F^s_{p,1}(w) -> H^{s,p}(w) for w in A_p"};
constexpr Rule kEmbHF{"embeds.bessel_triebel", "H^{s,p}(w) -> F^s_{p,inf}(w) for w in A_p"};
constexpr Rule kEmbFW{"embeds.triebel_sobolev", "F^k_{p,1}(w) -> W^{k,p}(w) for w in A_p"};
constexpr Rule kEmbWF{"embeds.sobolev_triebel", "W^{k,p}(w) -> F^k_{p,inf}(w) for w in A_p"};
constexpr Rule kEmbFL{"embeds.triebel_lebesgue", "F^0_{p,1}(w) -> L^p(w) for w in A_inf"};
constexpr Rule kEmbSobF{"embeds.sobolev_triebel_scale", "F^{s0}_{p0,q0}(w_g0) -> F^{s1}_{p1,q1}(w_g1): p0 <= p1, s0 > s1, g1/p1 <= g0/p0, s0-(d+g0)/p0 = s1-(d+g1)/p1"};
constexpr Rule kEmbSobB{"embeds.sobolev_besov_scale", "B^{s0}_{p0,q0}(w_g0) -> B^{s1}_{p1,q1}(w_g1): as for F and q0 <= q1"};
constexpr Rule kEmbHardy{"embeds.hardy", "W^{k,p}(R^d_+,w_gamma) -> W^{k-1,p}(R^d_+,w_{gamma-p}) for gamma > p-1, k >= 1"};
constexpr Rule kEmbHW{"embeds.bessel_sobolev", "H^{k,p}(R^d_+,w_gamma) = W^{k,p}(R^d_+,w_gamma) for gamma in (-1,p-1)"};
constexpr Rule kEmbLW{"embeds.lebesgue_sobolev", "W^{0,p}(w) = L^p(w)"};
constexpr Rule kDensH0{"density.bessel_zero", "H^{s,p}_0(O,w_gamma) = closure of C_c^inf(O minus boundary), gamma in (-1,p-1), s > -1+(gamma+1)/p, s not in N_0+(gamma+1)/p"};
constexpr Rule kDensHTriv{"density.bessel_no_trace", "H^{s,p}_0(O,w_gamma) = H^{s,p}(O,w_gamma) for s <= (gamma+1)/p"};
constexpr Rule kDensW0{"density.sobolev_zero", "C_c^inf(R^d_+) is dense in W^{k,p}_0(R^d_+,w_gamma)"};
constexpr Rule kDensTrM{"density.sobolev_trace_m", "W^{k,p}_{Tr_m}(R^d_+,w_gamma) = closure of {f in C_c^inf(closed R^d_+): d_1^m f = 0 on the boundary}, gamma not in {jp-1: 1 <= j <= k-m}"};
constexpr Rule kDensCm{"density.sobolev_cm", "W^{k,p}_{Tr_m}(R^d_+,w_gamma) = closure of C^inf_{c,m}(closed R^d_+), (k-m-1)p-1 < gamma < (k-m)p-1"};
constexpr Rule kFubini{"fubini.mixed_derivative", "L^p(R^{d-1};W^{k,p}(R_+,w_gamma)) cap W^{k,p}(R^{d-1};L^p(R_+,w_gamma)) = W^{k,p}(R^d_+,w_gamma), d >= 2, gamma not in {jp-1}"};

Citation cite(const Rule& r, std::vector<std::string> assumptions = {}) {
    return {r.id, r.anchor, std::move(assumptions)};
}

QueryResult rejected(std::string reason, std::vector<Citation> c) {
    QueryResult q;
    q.kind = K::Rejected;
    q.text = std::move(reason);
    q.citations = std::move(c);
    return q;
}

QueryResult space_result(Space s, std::vector<Citation> c) {
    QueryResult q;
    q.kind = K::Space;
    q.spaces = {std::move(s)};
    q.citations = std::move(c);
    return q;
}

Rational one{1};

Rational offset(const Space& s) { return (s.gamma + one) / s.p; }
Rational smoothness(const Space& s) { return s.fam == Family::Lebesgue ? Rational(0) : s.s; }

std::string rs(const Rational& r) { return r.str(); }

std::string dom_str(Dom d) {
    switch (d) {
        case Dom::Full: return "full";
        case Dom::Half: return "half";
        case Dom::Boundary: return "bdry";
    }
    return "?";
}

std::string q_str(const QParam& q) { return q.inf ? "inf" : q.v.str(); }

Space boundary_besov(const Space& src, const Rational& s, const QParam& q, int r) {
    Space t;
    t.fam = Family::Besov;
    t.s = s;
    t.p = src.p;
    t.q = q;
    t.gamma = Rational(0);
    t.d = src.d - 1;
    t.r = r;
    t.dom = Dom::Boundary;
    return t;
}

QParam qp(const Rational& p) { return {false, p}; }

}  // namespace

bool q_less_equal(const QParam& a, const QParam& b) {
    if (b.inf) return true;
    if (a.inf) return false;
    return a.v <= b.v;
}

std::string family_letter(Family f) {
    switch (f) {
        case Family::Besov: return "B";
        case Family::Triebel: return "F";
        case Family::Bessel: return "H";
        case Family::Sobolev: return "W";
        case Family::Lebesgue: return "L";
    }
    return "?";
}

std::string canonical(const BoundaryCondition& bc) {
    switch (bc.kind) {
        case BK::None: return "";
        case BK::Zero: return "0";
        case BK::TraceM: return "Tr" + std::to_string(bc.orders.at(0));
        case BK::System: {
            std::string out = "{";
            for (std::size_t i = 0; i < bc.orders.size(); ++i) {
                if (i) out += ",";
                out += std::to_string(bc.orders[i]);
                if (!bc.dims.empty()) out += ":" + std::to_string(bc.dims[i]);
            }
            return out + "}";
        }
    }
    return "";
}

std::string canonical(const Space& s) {
    std::ostringstream os;
    os << family_letter(s.fam) << "[";
    if (s.fam == Family::Sobolev)
        os << "k=" << rs(s.s) << ",";
    else if (s.fam != Family::Lebesgue)
        os << "s=" << rs(s.s) << ",";
    os << "p=" << rs(s.p);
    if (s.fam == Family::Besov || s.fam == Family::Triebel) os << ",q=" << q_str(s.q);
    os << ",gamma=" << rs(s.gamma) << ",d=" << s.d << ",r=" << s.r << ",dom=" << dom_str(s.dom);
    if (s.bc.present()) os << ",bc=" << canonical(s.bc);
    os << "]";
    return os.str();
}

int excluded_index(const Rational& p, const Rational& gamma) {
    Rational j = (gamma + one) / p;
    if (j.is_integer() && j.num() >= 1) return static_cast<int>(j.num());
    return 0;
}

bool is_ap(const Space& s) { return s.gamma > Rational(-1) && s.gamma < s.p - one; }

std::optional<std::string> check_space(const Space& s) {
    if (!(s.p > one)) return "requires p > 1";
    if ((s.fam == Family::Besov || s.fam == Family::Triebel) && !s.q.inf && s.q.v < one) return "requires q >= 1";
    if (!(s.gamma > Rational(-1))) return "requires gamma > -1";
    if (s.d < 1) return "requires d >= 1";
    if (s.r < 1) return "requires r >= 1";
    if (s.fam == Family::Lebesgue && s.s != Rational(0)) return "Lebesgue requires s = 0";
    if (s.fam == Family::Sobolev && (!s.s.is_integer() || s.s < Rational(0)))
        return "Sobolev requires integer k >= 0";
    if (s.dom == Dom::Boundary && s.gamma != Rational(0)) return "boundary spaces are unweighted (gamma = 0)";
    if (s.bc.present()) {
        if (s.dom != Dom::Half) return "boundary conditions require dom=half";
        if (s.fam != Family::Bessel && s.fam != Family::Sobolev)
            return "boundary conditions are encoded for H and W only";
        const auto& o = s.bc.orders;
        for (std::size_t i = 0; i < o.size(); ++i) {
            if (o[i] < 0) return "boundary orders must be >= 0";
            if (i && o[i] <= o[i - 1]) return "boundary orders must be strictly increasing";
        }
        if (!s.bc.dims.empty()) {
            if (s.bc.dims.size() != o.size()) return "one target dimension per boundary order";
            for (int dm : s.bc.dims)
                if (dm < 1 || dm > s.r) return "boundary target dimensions must lie in [1, r]";
        }
    }
    if (s.fam == Family::Bessel && !is_ap(s)) return "Bessel potential requires A_p weight";
    if (s.fam == Family::Sobolev) {
        if (int j = excluded_index(s.p, s.gamma)) return "gamma = " + std::to_string(j) + "*p-1 excluded";
    }
    return std::nullopt;
}

namespace {

std::vector<Citation> param_citations(const Space& s) {
    std::vector<Citation> c{cite(kParams)};
    if (s.fam == Family::Bessel) c.push_back(cite(kBesselAp));
    if (s.fam == Family::Sobolev) c.push_back(cite(kSobolevExcl));
    if (s.fam == Family::Lebesgue) c.push_back(cite(kLebesgue));
    return c;
}

std::optional<QueryResult> reject_invalid(const Space& s) {
    if (auto why = check_space(s)) return rejected(*why, param_citations(s));
    return std::nullopt;
}

}  // namespace

QueryResult validate(const Space& s) {
    if (auto r = reject_invalid(s)) return *r;
    QueryResult q;
    q.kind = K::Boolean;
    q.truth = Truth::True;
    q.ap = is_ap(s);
    q.citations = param_citations(s);
    q.citations.push_back(cite(kAp, {"gamma = " + rs(s.gamma), "p = " + rs(s.p)}));
    return q;
}

BoundaryCondition resolve_conditions(const BoundaryCondition& bc, const Rational& t, const Rational& p,
                                     const Rational& gamma) {
    Rational off = (gamma + one) / p;
    BoundaryCondition out;
    if (bc.kind == BK::Zero) {
        if (t > off) out.kind = BK::Zero;
        return out;
    }
    if (bc.kind == BK::None) return out;
    for (std::size_t i = 0; i < bc.orders.size(); ++i) {
        if (Rational(bc.orders[i]) + off < t) {
            out.orders.push_back(bc.orders[i]);
            if (!bc.dims.empty()) out.dims.push_back(bc.dims[i]);
        }
    }
    if (out.orders.empty()) return out;
    out.kind = bc.kind;
    return out;
}

QueryResult trace_space(const Space& s, int m) {
    if (auto r = reject_invalid(s)) return *r;
    if (m < 0) return rejected("requires m >= 0", {cite(kParams)});
    if (s.bc.present()) return rejected("trace of a space with boundary conditions is not encoded", {cite(kParams)});
    if (s.dom == Dom::Boundary) return rejected("trace requires dom=full or dom=half", {cite(kParams)});
    if (s.d < 2) return rejected("trace requires d >= 2", {cite(kParams)});

    const Rational thr = Rational(m) + offset(s);
    const Rational sm = smoothness(s);
    std::vector<std::string> as{"s = " + rs(sm), "m + (gamma+1)/p = " + rs(thr)};

    const Rule* rule = nullptr;
    QParam q = qp(s.p);
    switch (s.fam) {
        case Family::Lebesgue:
            rule = &kTraceW;
            break;
        case Family::Besov:
            if (s.dom == Dom::Half && !is_ap(s))
                return rejected("Besov trace on the half-space requires A_p weight", {cite(kTraceBHalf), cite(kAp)});
            rule = s.dom == Dom::Full ? &kTraceB : &kTraceBHalf;
            q = s.q;
            break;
        case Family::Triebel:
            if (s.dom == Dom::Half && !is_ap(s))
                return rejected("Triebel-Lizorkin trace on the half-space requires A_p weight",
                                {cite(kTraceFHalf), cite(kAp)});
            rule = s.dom == Dom::Full ? &kTraceF : &kTraceFHalf;
            break;
        case Family::Bessel:
            rule = &kTraceH;
            break;
        case Family::Sobolev:
            if (s.dom == Dom::Full) {
                if (!is_ap(s)) return rejected("Sobolev trace on R^d requires A_p weight", {cite(kTraceWAp), cite(kAp)});
                rule = &kTraceWAp;
            } else {
                rule = is_ap(s) ? &kTraceWAp : &kTraceW;
            }
            break;
    }
    if (!(sm > thr))
        return rejected("below trace threshold: s = " + rs(sm) + " <= m + (gamma+1)/p = " + rs(thr),
                        {cite(*rule, as)});
    std::vector<Citation> c{cite(*rule, as)};
    if (m > 0 || s.fam != Family::Lebesgue) c.push_back(cite(kTraceExt));
    return space_result(boundary_besov(s, sm - thr, q, s.r), std::move(c));
}

QueryResult trace_vector_space(const Space& s, int m) {
    if (auto r = reject_invalid(s)) return *r;
    if (m < 0) return rejected("requires m >= 0", {cite(kParams)});
    QueryResult out;
    out.kind = K::Product;
    for (int j = 0; j <= m; ++j) {
        QueryResult one_trace = trace_space(s, j);
        if (one_trace.kind == K::Rejected) {
            one_trace.text = "component Tr_" + std::to_string(j) + ": " + one_trace.text;
            return one_trace;
        }
        out.spaces.push_back(one_trace.spaces.front());
        if (j == m) {
            const Rule& r = s.fam == Family::Bessel ? kTraceVecH
                            : s.fam == Family::Sobolev ? kTraceVecW
                                                       : kTraceVecBF;
            out.citations.push_back(cite(r, {"m = " + std::to_string(m)}));
            for (auto& c : one_trace.citations) out.citations.push_back(c);
        }
    }
    return out;
}

QueryResult boundary_trace_space(const Space& s) {
    if (auto r = reject_invalid(s)) return *r;
    if (s.bc.kind != BK::TraceM && s.bc.kind != BK::System)
        return rejected("boundary data requires an order list (bc=Tr<m> or bc={...})", {cite(kParams)});
    const Rule& rule = s.fam == Family::Bessel ? kBoundaryH : kBoundaryW;
    const Rational off = offset(s);
    const int mn = s.bc.orders.back();
    if (s.fam == Family::Sobolev && s.s < one) return rejected("requires k >= 1", {cite(rule)});
    if (!(s.s > Rational(mn) + off))
        return rejected("normal system type requires s > m_n + (gamma+1)/p = " + rs(Rational(mn) + off),
                        {cite(rule)});
    if (s.d < 2) return rejected("trace requires d >= 2", {cite(kParams)});
    QueryResult out;
    out.kind = K::Product;
    for (std::size_t i = 0; i < s.bc.orders.size(); ++i) {
        int dim = s.bc.dims.empty() ? s.r : s.bc.dims[i];
        out.spaces.push_back(boundary_besov(s, s.s - Rational(s.bc.orders[i]) - off, qp(s.p), dim));
    }
    out.citations = {cite(rule, {"m_n = " + std::to_string(mn)}), cite(kBoundaryExt)};
    return out;
}

// ---------------------------------------------------------------- interpolation

namespace {

bool conditions_active(const BoundaryCondition& bc, const Rational& t, const Rational& p, const Rational& g) {
    return resolve_conditions(bc, t, p, g).present();
}

}  // namespace

QueryResult interpolate(const Space& a_in, const Space& b_in, const Rational& theta_in) {
    if (!(theta_in > Rational(0) && theta_in < one)) return rejected("theta must lie in (0,1)", {cite(kParams)});
    if (auto r = reject_invalid(a_in)) return *r;
    if (auto r = reject_invalid(b_in)) return *r;

    std::vector<std::string> mismatch;
    if (a_in.p != b_in.p) mismatch.push_back("p " + rs(a_in.p) + " vs " + rs(b_in.p));
    if (a_in.gamma != b_in.gamma) mismatch.push_back("gamma " + rs(a_in.gamma) + " vs " + rs(b_in.gamma));
    if (a_in.d != b_in.d) mismatch.push_back("d " + std::to_string(a_in.d) + " vs " + std::to_string(b_in.d));
    if (a_in.r != b_in.r) mismatch.push_back("r " + std::to_string(a_in.r) + " vs " + std::to_string(b_in.r));
    if (a_in.dom != b_in.dom) mismatch.push_back("dom " + dom_str(a_in.dom) + " vs " + dom_str(b_in.dom));
    if (!mismatch.empty()) {
        std::string msg = "incompatible pair:";
        for (std::size_t i = 0; i < mismatch.size(); ++i) msg += (i ? "; " : " ") + mismatch[i];
        return rejected(msg, {cite(kParams)});
    }
    if (a_in == b_in) return space_result(a_in, {cite(kIntpTrivial)});

    auto fam_ok = [](Family f) { return f == Family::Lebesgue || f == Family::Sobolev || f == Family::Bessel; };
    if (!fam_ok(a_in.fam) || !fam_ok(b_in.fam))
        return rejected("no complex interpolation rule for Besov or Triebel-Lizorkin endpoints", {cite(kParams)});
    if (a_in.dom == Dom::Boundary) return rejected("no interpolation rule on the boundary", {cite(kParams)});

    Space a = a_in, b = b_in;
    Rational theta = theta_in;
    if (smoothness(a) > smoothness(b)) {
        std::swap(a, b);
        theta = one - theta;
    }
    const Rational s0 = smoothness(a), s1 = smoothness(b);
    if (s0 == s1) return rejected("no rule: endpoints have equal smoothness but differ", {cite(kParams)});
    const Rational st = (one - theta) * s0 + theta * s1;
    const Rational off = offset(a);
    const Rational p = a.p, g = a.gamma;
    const bool ap = is_ap(a);
    const BoundaryCondition& bc = b.bc;

    // Lower endpoint must carry no condition or the same one; an unconditioned lower endpoint
    // is always allowed for systems and allowed for "0" when its conditions are void.
    if (a.bc.present() && a.bc != bc)
        return rejected("no rule: lower endpoint boundary condition differs from the upper one", {cite(kParams)});
    if (!a.bc.present() && bc.kind == BK::Zero && conditions_active(bc, s0, p, g))
        return rejected("no rule: [X, X_0] with active conditions on the lower endpoint", {cite(kParams)});
    const bool any_h = a.fam == Family::Bessel || b.fam == Family::Bessel;
    const std::vector<std::string> as{"theta = " + rs(theta), "s_theta = " + rs(st)};

    // Sobolev rules: integer endpoints with k1 >= 2 and integer l.
    if (!any_h && s0.is_integer() && s1.is_integer()) {
        const Rational k1 = s1 - s0;
        const Rational l = theta * k1;
        if (a.dom != Dom::Half && bc.present())
            return rejected("boundary conditions require dom=half", {cite(kParams)});
        if (k1 >= Rational(2) && l.is_integer() && a.dom == Dom::Half) {
            Space out = b;
            out.fam = Family::Sobolev;
            out.s = st;
            std::vector<Citation> c;
            if (bc.kind == BK::None) {
                c.push_back(cite(s0 == Rational(0) ? kIntpLW : kIntpW, as));
            } else if (bc.kind == BK::Zero) {
                c.push_back(cite(kIntpW0, as));
                out.bc = resolve_conditions(bc, st, p, g);
            } else {
                const int mn = bc.orders.back();
                if (!(s1 > Rational(mn) + off))
                    return rejected("normal system type requires k > m_n + (gamma+1)/p = " + rs(Rational(mn) + off),
                                    {cite(kIntpWB)});
                if (s0 == Rational(0) && !a.bc.present()) c.push_back(cite(kIntpLWB, as));
                c.push_back(cite(kIntpWB, as));
                out.bc = resolve_conditions(bc, st, p, g);
            }
            c.push_back(cite(kIntpLocal));
            return space_result(out, std::move(c));
        }
        if (!ap) {
            if (a.dom == Dom::Full)
                return rejected("no rule: Sobolev interpolation with gamma >= p-1 is encoded on the half-space only",
                                {cite(kIntpW)});
            return rejected("open question: fractional smoothness for gamma >= p-1 (theta*k1 = " + rs(l) +
                                ", k1 = " + rs(k1) + ")",
                            {cite(kIntpW)});
        }
    }
    if (!ap) return rejected("open question: fractional smoothness for gamma >= p-1", {cite(kIntpW)});

    // Bessel potential rules (A_p): W^k = H^k.
    std::vector<Citation> c;
    if (a.fam == Family::Sobolev || b.fam == Family::Sobolev) c.push_back(cite(kIntpHW));
    Space out = b;
    out.fam = Family::Bessel;
    out.s = st;
    if (bc.kind == BK::None) {
        c.push_back(cite(kIntpH, as));
        return space_result(out, std::move(c));
    }
    if (!(s0 > Rational(-1) + off))
        return rejected("requires s_0 > -1 + (gamma+1)/p = " + rs(Rational(-1) + off), {cite(kIntpHB)});
    auto hits = [&](const Rational& t) -> std::optional<int> {
        if (bc.kind == BK::Zero) {
            Rational j = t - off;
            if (j.is_integer() && j >= Rational(0)) return static_cast<int>(j.num());
            return std::nullopt;
        }
        for (int m : bc.orders)
            if (t == Rational(m) + off) return m;
        return std::nullopt;
    };
    const char* names[3] = {"s_0", "s_theta", "s_1"};
    const Rational vals[3] = {s0, st, s1};
    for (int i = 0; i < 3; ++i) {
        if (auto m = hits(vals[i]))
            return rejected(std::string(names[i]) + " = " + std::to_string(*m) + " + (gamma+1)/p excluded",
                            {cite(bc.kind == BK::Zero ? kIntpH0 : kIntpHB, as)});
    }
    c.push_back(cite(bc.kind == BK::Zero ? kIntpH0 : kIntpHB, as));
    out.bc = resolve_conditions(bc, st, p, g);
    return space_result(out, std::move(c));
}

// ---------------------------------------------------------------- embeddings

namespace {

struct Edge {
    Space to;
    const Rule* rule;
};

struct Pools {
    std::vector<Rational> p, gamma;
    std::vector<QParam> q;
};

bool same_base(const Space& a, const Space& b) {
    return a.d == b.d && a.r == b.r && a.dom == b.dom && !a.bc.present() && !b.bc.present();
}

std::vector<Edge> successors(const Space& x, const Pools& pool) {
    std::vector<Edge> out;
    if (x.bc.present()) return out;
    const bool bf = x.fam == Family::Besov || x.fam == Family::Triebel;
    auto with = [&](Family f, Rational s, QParam q) {
        Space y = x;
        y.fam = f;
        y.s = f == Family::Lebesgue ? Rational(0) : s;
        y.q = (f == Family::Besov || f == Family::Triebel) ? q : QParam{};
        return y;
    };
    if (x.dom == Dom::Full) {
        if (bf) {
            for (const auto& q : pool.q)
                if (q_less_equal(x.q, q) && !(q == x.q))
                    out.push_back({with(x.fam, x.s, q), x.fam == Family::Besov ? &kEmbQB : &kEmbQF});
        }
        if (x.fam == Family::Besov) {
            for (const auto& q : pool.q) {
                QParam mn = q_less_equal(q, qp(x.p)) ? q : qp(x.p);
                if (mn == x.q) out.push_back({with(Family::Triebel, x.s, q), &kEmbBF});
            }
        }
        if (x.fam == Family::Triebel) {
            QParam mx = q_less_equal(x.q, qp(x.p)) ? qp(x.p) : x.q;
            out.push_back({with(Family::Besov, x.s, mx), &kEmbFB});
            if (!x.q.inf && x.q.v == one) {
                if (is_ap(x)) out.push_back({with(Family::Bessel, x.s, {}), &kEmbFH});
                if (is_ap(x) && x.s.is_integer() && x.s >= Rational(0))
                    out.push_back({with(Family::Sobolev, x.s, {}), &kEmbFW});
                if (x.s == Rational(0)) out.push_back({with(Family::Lebesgue, x.s, {}), &kEmbFL});
            }
        }
        if (x.fam == Family::Bessel && is_ap(x)) out.push_back({with(Family::Triebel, x.s, QParam::infinity()), &kEmbHF});
        if (x.fam == Family::Sobolev && is_ap(x)) out.push_back({with(Family::Triebel, x.s, QParam::infinity()), &kEmbWF});
        if (bf) {
            const Rational d(x.d);
            for (const auto& p1 : pool.p) {
                if (p1 < x.p) continue;
                for (const auto& g1 : pool.gamma) {
                    if (!(g1 > Rational(-1)) || g1 / p1 > x.gamma / x.p) continue;
                    Rational s1 = x.s - (d + x.gamma) / x.p + (d + g1) / p1;
                    if (!(s1 < x.s)) continue;
                    for (const auto& q1 : pool.q) {
                        if (x.fam == Family::Besov && !q_less_equal(x.q, q1)) continue;
                        Space y = x;
                        y.s = s1;
                        y.p = p1;
                        y.gamma = g1;
                        y.q = q1;
                        out.push_back({y, x.fam == Family::Besov ? &kEmbSobB : &kEmbSobF});
                    }
                }
            }
        }
    }
    if (x.fam == Family::Sobolev && x.s == Rational(0)) out.push_back({with(Family::Lebesgue, x.s, {}), &kEmbLW});
    if (x.fam == Family::Lebesgue) out.push_back({with(Family::Sobolev, Rational(0), {}), &kEmbLW});
    if (x.dom == Dom::Half) {
        if (x.fam == Family::Sobolev && x.gamma > x.p - one && x.s >= one) {
            Space y = x;
            y.s = x.s - one;
            y.gamma = x.gamma - x.p;
            if (y.s == Rational(0)) {
                y.fam = Family::Lebesgue;
            }
            out.push_back({y, &kEmbHardy});
        }
        if (is_ap(x) && x.s.is_integer() && x.s >= Rational(0)) {
            if (x.fam == Family::Bessel) out.push_back({with(Family::Sobolev, x.s, {}), &kEmbHW});
            if (x.fam == Family::Sobolev) out.push_back({with(Family::Bessel, x.s, {}), &kEmbHW});
        }
    }
    return out;
}

}  // namespace

QueryResult embeds(const Space& a, const Space& b, int max_depth) {
    if (auto r = reject_invalid(a)) return *r;
    if (auto r = reject_invalid(b)) return *r;
    QueryResult res;
    res.kind = K::Boolean;
    if (a == b) {
        res.truth = Truth::True;
        res.citations = {cite(kEmbId)};
        return res;
    }
    if (same_base(a, b)) {
        Pools pool;
        pool.p = {a.p};
        if (b.p != a.p) pool.p.push_back(b.p);
        pool.gamma = {a.gamma};
        if (b.gamma != a.gamma) pool.gamma.push_back(b.gamma);
        for (QParam q : {a.q, b.q, QParam{false, one}, QParam::infinity(), qp(a.p), qp(b.p)})
            if (std::find(pool.q.begin(), pool.q.end(), q) == pool.q.end()) pool.q.push_back(q);

        const std::string target = canonical(b);
        std::map<std::string, std::pair<std::string, const Rule*>> parent;  // node -> (parent, rule)
        std::deque<std::pair<Space, int>> frontier{{a, 0}};
        parent[canonical(a)] = {"", nullptr};
        while (!frontier.empty()) {
            auto [x, depth] = frontier.front();
            frontier.pop_front();
            if (depth >= max_depth) continue;
            const std::string xk = canonical(x);
            for (auto& e : successors(x, pool)) {
                if (check_space(e.to)) continue;
                std::string key = canonical(e.to);
                if (parent.count(key)) continue;
                parent[key] = {xk, e.rule};
                if (key == target) {
                    std::vector<Citation> chain;
                    for (std::string k = key; !parent[k].first.empty(); k = parent[k].first)
                        chain.push_back(cite(*parent[k].second, {parent[k].first + " -> " + k}));
                    std::reverse(chain.begin(), chain.end());
                    res.truth = Truth::True;
                    res.citations = std::move(chain);
                    return res;
                }
                frontier.push_back({e.to, depth + 1});
            }
        }
    }
    res.truth = Truth::Unknown;
    res.citations = {cite(kEmbSearch, {"max depth = " + std::to_string(max_depth)})};
    return res;
}

// ---------------------------------------------------------------- density, Fubini

QueryResult density_class(const Space& s) {
    if (auto r = reject_invalid(s)) return *r;
    QueryResult q;
    q.kind = K::Class;
    const Rational off = offset(s);
    if (s.fam == Family::Bessel && s.bc.kind == BK::Zero) {
        if (s.s <= off) {
            q.text = "no trace conditions; space equals unrestricted space";
            q.citations = {cite(kDensHTriv, {"s = " + rs(s.s), "(gamma+1)/p = " + rs(off)})};
            return q;
        }
        Rational j = s.s - off;
        if (j.is_integer())
            return rejected("s = " + rs(j) + " + (gamma+1)/p excluded", {cite(kDensH0)});
        q.text = "C_c^inf(R^d_+)";
        q.citations = {cite(kDensH0)};
        return q;
    }
    if (s.fam == Family::Sobolev && s.bc.kind == BK::Zero) {
        q.text = "C_c^inf(R^d_+)";
        q.citations = {cite(kDensW0)};
        return q;
    }
    if (s.fam == Family::Sobolev && s.bc.kind == BK::TraceM) {
        const int m = s.bc.orders.front();
        const Rational k = s.s;
        if (k < Rational(m)) return rejected("requires k >= m", {cite(kDensTrM)});
        const Rational lo = (k - Rational(m) - one) * s.p - one, hi = (k - Rational(m)) * s.p - one;
        std::vector<std::string> as{"k = " + rs(k), "m = " + std::to_string(m)};
        if (k >= Rational(m + 1) && s.gamma > lo && s.gamma < hi) {
            q.text = "C_c,m^inf(closed R^d_+), m = " + std::to_string(m);
            q.citations = {cite(kDensCm, as)};
            return q;
        }
        q.text = "{f in C_c^inf(closed R^d_+): d_1^" + std::to_string(m) + " f = 0 on the boundary}";
        q.citations = {cite(kDensTrM, as)};
        return q;
    }
    if (s.fam == Family::Bessel && s.bc.kind == BK::None && s.dom == Dom::Full)
        return rejected("density query needs a zero-trace condition (bc=0)", {cite(kDensH0)});
    return rejected("no density rule for this space; expected H with bc=0, W with bc=0 or W with bc=Tr<m>",
                    {cite(kDensH0)});
}

QueryResult fubini_split(int k, const Rational& p, const Rational& gamma, int d) {
    if (!(p > one)) return rejected("requires p > 1", {cite(kFubini)});
    if (!(gamma > Rational(-1))) return rejected("requires gamma > -1", {cite(kFubini)});
    if (k < 0) return rejected("requires k >= 0", {cite(kFubini)});
    if (d < 2) return rejected("requires d >= 2", {cite(kFubini)});
    if (int j = excluded_index(p, gamma)) return rejected("gamma = " + std::to_string(j) + "*p-1 excluded", {cite(kFubini)});
    QueryResult q;
    q.kind = K::Identity;
    Space w;
    w.fam = k == 0 ? Family::Lebesgue : Family::Sobolev;
    w.s = Rational(k);
    w.p = p;
    w.gamma = gamma;
    w.d = d;
    w.dom = Dom::Half;
    q.spaces = {w};
    const std::string ks = std::to_string(k), ps = rs(p), gs = rs(gamma), dm = std::to_string(d - 1);
    if (k == 0)
        q.text = "L^" + ps + "(R^" + std::to_string(d) + "_+,w_" + gs + ") = L^" + ps + " cap L^" + ps;
    else
        q.text = "L^" + ps + "(R^" + dm + ";W^{" + ks + "," + ps + "}(R_+,w_" + gs + ")) cap W^{" + ks + "," + ps +
                 "}(R^" + dm + ";L^" + ps + "(R_+,w_" + gs + ")) = W^{" + ks + "," + ps + "}(R^" +
                 std::to_string(d) + "_+,w_" + gs + ")";
    q.citations = {cite(kFubini, {"k = " + ks, "p = " + ps, "gamma = " + gs})};
    return q;
}

}  // namespace tracelab::calc
