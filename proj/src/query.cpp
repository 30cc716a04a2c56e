#include "query.hpp"

#include "errors.hpp"

#include <json.hpp>

#include <cctype>
#include <set>

namespace tracelab::calc {

namespace {

class Parser {
public:
    explicit Parser(const std::string& t) : t_(t) {}

    [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
        throw Error(Status::Parse, "column " + std::to_string(at + 1) + ": " + msg);
    }
    [[noreturn]] void fail(const std::string& msg) const { fail(msg, i_); }

    void ws() {
        while (i_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[i_]))) ++i_;
    }
    bool done() {
        ws();
        return i_ >= t_.size();
    }
    char peek() const { return i_ < t_.size() ? t_[i_] : '\0'; }
    std::size_t pos() const { return i_; }
    void seek(std::size_t at) { i_ = at; }

    void expect(char c) {
        ws();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++i_;
    }

    std::string ident() {
        ws();
        std::size_t b = i_;
        while (i_ < t_.size() && (std::isalnum(static_cast<unsigned char>(t_[i_])) || t_[i_] == '_')) ++i_;
        if (b == i_) fail("expected identifier");
        return t_.substr(b, i_ - b);
    }

    // Scalar value: everything up to ',', ']', or whitespace; braces are kept balanced.
    std::string value() {
        ws();
        std::size_t b = i_;
        int depth = 0;
        while (i_ < t_.size()) {
            char c = t_[i_];
            if (c == '{') ++depth;
            if (c == '}') --depth;
            if (depth == 0 && (c == ',' || c == ']' || std::isspace(static_cast<unsigned char>(c)))) break;
            ++i_;
        }
        if (depth != 0) fail("unbalanced braces", b);
        if (b == i_) fail("expected value");
        return t_.substr(b, i_ - b);
    }

    Space space() {
        ws();
        const std::size_t start = i_;
        std::string fam = ident();
        Space s;
        if (fam == "B") s.fam = Family::Besov;
        else if (fam == "F") s.fam = Family::Triebel;
        else if (fam == "H") s.fam = Family::Bessel;
        else if (fam == "W") s.fam = Family::Sobolev;
        else if (fam == "L") s.fam = Family::Lebesgue;
        else fail("unknown family '" + fam + "' (expected B, F, H, W or L)", start);
        expect('[');
        std::set<std::string> seen;
        bool have_dom = false;
        ws();
        if (peek() != ']') {
            for (;;) {
                ws();
                const std::size_t kpos = i_;
                std::string key = ident();
                if (!seen.insert(key).second) fail("duplicate key '" + key + "'", kpos);
                expect('=');
                ws();
                const std::size_t vpos = i_;
                std::string v = value();
                assign(s, key, v, kpos, vpos, have_dom);
                ws();
                if (peek() == ',') {
                    ++i_;
                    continue;
                }
                break;
            }
        }
        expect(']');
        const bool smooth_key = seen.count("s") || seen.count("k");
        if (s.fam == Family::Sobolev && !seen.count("k")) fail("W requires k=", start);
        if ((s.fam == Family::Besov || s.fam == Family::Triebel || s.fam == Family::Bessel) && !seen.count("s"))
            fail(fam + " requires s=", start);
        if (s.fam == Family::Sobolev && seen.count("s")) fail("W takes k=, not s=", start);
        if (s.fam != Family::Sobolev && seen.count("k")) fail(fam + " takes s=, not k=", start);
        if (s.fam == Family::Lebesgue && smooth_key && s.s != Rational(0)) fail("L requires s=0", start);
        if (!seen.count("p")) fail(fam + " requires p=", start);
        if ((s.fam == Family::Besov || s.fam == Family::Triebel) && !seen.count("q")) fail(fam + " requires q=", start);
        if (!(s.fam == Family::Besov || s.fam == Family::Triebel) && seen.count("q"))
            fail(fam + " takes no q=", start);
        if (!have_dom) s.dom = (s.fam == Family::Sobolev || s.fam == Family::Lebesgue || s.bc.present()) ? Dom::Half
                                                                                                      : Dom::Full;
        return s;
    }

    Rational rational(const std::string& v, std::size_t at) const {
        auto r = Rational::parse(v);
        if (!r) fail("invalid number '" + v + "'", at);
        return *r;
    }

    int integer(const std::string& v, std::size_t at) const {
        Rational r = rational(v, at);
        if (!r.is_integer() || r.num() > 1000000 || r.num() < -1000000) fail("expected integer, got '" + v + "'", at);
        return static_cast<int>(r.num());
    }

private:
    void assign(Space& s, const std::string& key, const std::string& v, std::size_t kpos, std::size_t vpos,
                bool& have_dom) {
        if (key == "s" || key == "k") {
            s.s = rational(v, vpos);
        } else if (key == "p") {
            s.p = rational(v, vpos);
        } else if (key == "q") {
            if (v == "inf")
                s.q = QParam::infinity();
            else
                s.q = {false, rational(v, vpos)};
        } else if (key == "gamma") {
            s.gamma = rational(v, vpos);
        } else if (key == "d") {
            s.d = integer(v, vpos);
        } else if (key == "r") {
            s.r = integer(v, vpos);
        } else if (key == "dom") {
            have_dom = true;
            if (v == "full") s.dom = Dom::Full;
            else if (v == "half") s.dom = Dom::Half;
            else if (v == "bdry") s.dom = Dom::Boundary;
            else fail("dom must be full, half or bdry", vpos);
        } else if (key == "bc") {
            s.bc = boundary(v, vpos);
        } else {
            fail("unknown key '" + key + "'", kpos);
        }
    }

    BoundaryCondition boundary(const std::string& v, std::size_t at) const {
        BoundaryCondition bc;
        if (v == "0") {
            bc.kind = BoundaryCondition::Kind::Zero;
            return bc;
        }
        if (v.rfind("Tr", 0) == 0) {
            bc.kind = BoundaryCondition::Kind::TraceM;
            bc.orders = {integer(v.substr(2), at + 2)};
            return bc;
        }
        if (v.size() >= 2 && v.front() == '{' && v.back() == '}') {
            bc.kind = BoundaryCondition::Kind::System;
            std::string body = v.substr(1, v.size() - 2);
            std::size_t b = 0;
            bool any_dim = false, any_plain = false;
            while (b <= body.size()) {
                std::size_t e = body.find(',', b);
                if (e == std::string::npos) e = body.size();
                std::string item = body.substr(b, e - b);
                std::size_t colon = item.find(':');
                const std::size_t ipos = at + 1 + b;
                if (colon == std::string::npos) {
                    bc.orders.push_back(integer(item, ipos));
                    any_plain = true;
                } else {
                    bc.orders.push_back(integer(item.substr(0, colon), ipos));
                    bc.dims.push_back(integer(item.substr(colon + 1), ipos + colon + 1));
                    any_dim = true;
                }
                b = e + 1;
            }
            if (any_dim && any_plain) fail("give a dimension for every order or for none", at);
            if (bc.orders.empty()) fail("empty boundary system", at);
            return bc;
        }
        fail("bc must be 0, Tr<m> or {m0,m1,...}", at);
    }

    const std::string& t_;
    std::size_t i_ = 0;
};

const std::set<std::string> kOps{"validate", "trace", "traces", "btrace", "interp", "embeds", "density", "fubini"};

std::string truth_str(Truth t) {
    switch (t) {
        case Truth::True: return "true";
        case Truth::False: return "false";
        case Truth::Unknown: return "unknown";
    }
    return "unknown";
}

}  // namespace

Space parse_space(const std::string& text) {
    Parser p(text);
    Space s = p.space();
    if (!p.done()) p.fail("trailing input");
    return s;
}

Query parse_query(const std::string& text) {
    Parser p(text);
    Query q;
    if (p.done()) p.fail("empty query");
    const std::size_t opos = p.pos();
    q.op = p.ident();
    if (!kOps.count(q.op)) p.fail("unknown operation '" + q.op + "'", opos);
    while (!p.done()) {
        const std::size_t at = p.pos();
        // Lookahead: key=value or FAM[...]
        std::string word = p.ident();
        p.ws();
        if (p.peek() == '=') {
            p.expect('=');
            std::string v = p.value();
            if (q.opts.count(word)) p.fail("duplicate option '" + word + "'", at);
            q.opts[word] = v;
        } else if (p.peek() == '[') {
            p.seek(at);
            q.spaces.push_back(p.space());
        } else {
            p.fail("expected key=value or a space descriptor");
        }
    }
    return q;
}

namespace {

[[noreturn]] void arg_error(const std::string& msg) { throw Error(Status::Parse, msg); }

const std::string& opt(const Query& q, const std::string& key) {
    auto it = q.opts.find(key);
    if (it == q.opts.end()) arg_error(q.op + ": missing option " + key + "=");
    return it->second;
}

Rational opt_rational(const Query& q, const std::string& key) {
    auto r = Rational::parse(opt(q, key));
    if (!r) arg_error(q.op + ": " + key + "= expects a number");
    return *r;
}

int opt_int(const Query& q, const std::string& key, std::optional<int> dflt = std::nullopt) {
    if (!q.opts.count(key)) {
        if (dflt) return *dflt;
        arg_error(q.op + ": missing option " + key + "=");
    }
    Rational r = opt_rational(q, key);
    if (!r.is_integer() || r.num() < -1000 || r.num() > 1000) arg_error(q.op + ": " + key + "= expects a small integer");
    return static_cast<int>(r.num());
}

void expect_shape(const Query& q, std::size_t spaces, std::set<std::string> allowed) {
    if (q.spaces.size() != spaces)
        arg_error(q.op + ": expected " + std::to_string(spaces) + " space descriptor(s), got " +
                  std::to_string(q.spaces.size()));
    for (const auto& [k, v] : q.opts)
        if (!allowed.count(k)) arg_error(q.op + ": unknown option " + k + "=");
}

}  // namespace

QueryResult evaluate(const Query& q) {
    if (q.op == "validate") {
        expect_shape(q, 1, {});
        return validate(q.spaces[0]);
    }
    if (q.op == "trace") {
        expect_shape(q, 1, {"m"});
        return trace_space(q.spaces[0], opt_int(q, "m"));
    }
    if (q.op == "traces") {
        expect_shape(q, 1, {"m"});
        return trace_vector_space(q.spaces[0], opt_int(q, "m"));
    }
    if (q.op == "btrace") {
        expect_shape(q, 1, {});
        return boundary_trace_space(q.spaces[0]);
    }
    if (q.op == "interp") {
        expect_shape(q, 2, {"theta"});
        return interpolate(q.spaces[0], q.spaces[1], opt_rational(q, "theta"));
    }
    if (q.op == "embeds") {
        expect_shape(q, 2, {"depth"});
        int depth = opt_int(q, "depth", 3);
        if (depth < 0 || depth > 6) arg_error("embeds: depth= must lie in [0, 6]");
        return embeds(q.spaces[0], q.spaces[1], depth);
    }
    if (q.op == "density") {
        expect_shape(q, 1, {});
        return density_class(q.spaces[0]);
    }
    if (q.op == "fubini") {
        expect_shape(q, 0, {"k", "p", "gamma", "d"});
        return fubini_split(opt_int(q, "k"), opt_rational(q, "p"), opt_rational(q, "gamma"), opt_int(q, "d", 2));
    }
    arg_error("unknown operation '" + q.op + "'");
}

std::string to_json(const QueryResult& r) {
    using nlohmann::ordered_json;
    ordered_json out;
    ordered_json o;
    using K = QueryResult::Kind;
    switch (r.kind) {
        case K::Space:
            o["kind"] = "space";
            o["space"] = canonical(r.spaces.at(0));
            break;
        case K::Product: {
            o["kind"] = "product";
            ordered_json arr = ordered_json::array();
            for (const auto& s : r.spaces) arr.push_back(canonical(s));
            o["spaces"] = arr;
            break;
        }
        case K::Boolean:
            o["kind"] = "boolean";
            o["value"] = truth_str(r.truth);
            if (r.ap) o["ap"] = *r.ap;
            break;
        case K::Class:
            o["kind"] = "class";
            o["class"] = r.text;
            break;
        case K::Identity:
            o["kind"] = "identity";
            o["identity"] = r.text;
            if (!r.spaces.empty()) o["space"] = canonical(r.spaces.front());
            break;
        case K::Rejected:
            o["kind"] = "rejected";
            o["reason"] = r.text;
            break;
    }
    out["outcome"] = o;
    ordered_json cites = ordered_json::array();
    for (const auto& c : r.citations) {
        ordered_json j;
        j["rule_id"] = c.rule_id;
        j["anchor"] = c.anchor;
        j["assumptions"] = c.assumptions;
        cites.push_back(j);
    }
    out["citations"] = cites;
    return out.dump();
}

std::string run_query(const std::string& text) { return to_json(evaluate(parse_query(text))); }

}  // namespace tracelab::calc
