#include <doctest.h>

#include "calculus.hpp"
#include "errors.hpp"
#include "query.hpp"

#include <json.hpp>

#include <fstream>
#include <limits>

using namespace tracelab;
using namespace tracelab::calc;

namespace {

nlohmann::json ask(const std::string& q) { return nlohmann::json::parse(run_query(q)); }

std::string outcome_space(const std::string& q) {
    auto j = ask(q);
    REQUIRE(j["outcome"]["kind"] == "space");
    return j["outcome"]["space"];
}

bool cites(const nlohmann::json& j, const std::string& rule) {
    for (const auto& c : j["citations"])
        if (c["rule_id"] == rule) return true;
    return false;
}

}  // namespace

TEST_SUITE("rational") {
    TEST_CASE("normalization and arithmetic") {
        CHECK(Rational(6, -4) == Rational(-3, 2));
        CHECK((Rational(1, 2) + Rational(1, 3)) == Rational(5, 6));
        CHECK((Rational(1, 2) * Rational(2, 3)).str() == "1/3");
        CHECK((Rational(3) / Rational(6)).str() == "1/2");
        CHECK(Rational(-7, 2).floor() == -4);
        CHECK(Rational(1, 3) < Rational(1, 2));
    }

    TEST_CASE("parsing") {
        CHECK(*Rational::parse("0.75") == Rational(3, 4));
        CHECK(*Rational::parse("-1/2") == Rational(-1, 2));
        CHECK(*Rational::parse("3") == Rational(3));
        CHECK_FALSE(Rational::parse("1/0"));
        CHECK_FALSE(Rational::parse("abc"));
        CHECK_FALSE(Rational::parse(""));
    }

    TEST_CASE("overflow throws instead of wrapping") {
        Rational big(std::numeric_limits<std::int64_t>::max() / 2);
        CHECK_THROWS(big * Rational(4));
        CHECK_THROWS_AS(Rational(1, 0), std::exception);
    }
}

TEST_SUITE("calculus") {
    TEST_CASE("validation against the admissible weight range") {
        auto w = ask("validate W[k=1,p=2,gamma=1]");
        CHECK(w["outcome"]["kind"] == "rejected");
        CHECK(w["outcome"]["reason"] == "gamma = 1*p-1 excluded");
        auto b = ask("validate B[s=1,p=2,q=2,gamma=0.5]");
        CHECK(b["outcome"]["kind"] == "boolean");
        CHECK(b["outcome"]["value"] == "true");
        CHECK(b["outcome"]["ap"] == true);
        auto h = ask("validate H[s=1,p=2,gamma=3]");
        CHECK(h["outcome"]["reason"] == "Bessel potential requires A_p weight");
    }

    TEST_CASE("trace spaces") {
        CHECK(outcome_space("trace m=0 B[s=2,p=2,q=1,gamma=0]") == "B[s=3/2,p=2,q=1,gamma=0,d=1,r=1,dom=bdry]");
        CHECK(outcome_space("trace m=1 F[s=3,p=3,q=inf,gamma=2,d=3]") == "B[s=1,p=3,q=3,gamma=0,d=2,r=1,dom=bdry]");
        auto r = ask("trace m=1 W[k=1,p=2,gamma=0]");
        CHECK(r["outcome"]["kind"] == "rejected");
    }

    TEST_CASE("vector trace product") {
        auto r = ask("traces m=1 W[k=3,p=2,gamma=0]");
        REQUIRE(r["outcome"]["kind"] == "product");
        CHECK(r["outcome"]["spaces"][0] == "B[s=5/2,p=2,q=2,gamma=0,d=1,r=1,dom=bdry]");
        CHECK(r["outcome"]["spaces"][1] == "B[s=3/2,p=2,q=2,gamma=0,d=1,r=1,dom=bdry]");
    }

    TEST_CASE("interpolation") {
        CHECK(outcome_space("interp L[p=2,gamma=1/2] W[k=4,p=2,gamma=1/2] theta=1/2") ==
              "W[k=2,p=2,gamma=1/2,d=2,r=1,dom=half]");
        CHECK(outcome_space("interp L[p=2,gamma=1/2] W[k=4,p=2,gamma=1/2,bc=Tr0] theta=1/2") ==
              "W[k=2,p=2,gamma=1/2,d=2,r=1,dom=half,bc=Tr0]");
        // the Dirichlet condition survives since 0 + 1/2 < 1
        CHECK(outcome_space("interp H[s=0,p=2,gamma=0,dom=half] H[s=2,p=2,gamma=0,bc=Tr0] theta=1/2") ==
              "H[s=1,p=2,gamma=0,d=2,r=1,dom=half,bc=Tr0]");
        CHECK(ask("interp H[s=0,p=2,gamma=0,dom=half] H[s=1,p=2,gamma=0,bc=Tr0] theta=1/2")["outcome"]["kind"] ==
              "rejected");
    }

    TEST_CASE("embeddings") {
        CHECK(ask("embeds F[s=2,p=2,q=2,gamma=2] F[s=1,p=2,q=2,gamma=0]")["outcome"]["value"] == "true");
        CHECK(ask("embeds F[s=2,p=2,q=1,gamma=1/2] W[k=2,p=2,gamma=1/2,dom=full]")["outcome"]["value"] == "true");
        CHECK(ask("embeds B[s=1,p=2,q=1,gamma=0] B[s=1,p=2,q=3,gamma=0]")["outcome"]["value"] == "true");
        CHECK(ask("embeds B[s=1,p=2,q=3,gamma=0] B[s=1,p=2,q=1,gamma=0]")["outcome"]["value"] == "unknown");
    }

    TEST_CASE("density classes") {
        CHECK(ask("density H[s=3/4,p=2,gamma=0,bc=0]")["outcome"]["class"] == "C_c^inf(R^d_+)");
        CHECK(ask("density H[s=1/4,p=2,gamma=0,bc=0]")["outcome"]["class"] ==
              "no trace conditions; space equals unrestricted space");
    }

    TEST_CASE("fubini") {
        auto ok = ask("fubini k=2 p=2 gamma=3");
        CHECK(ok["outcome"]["kind"] == "rejected");  // 3 = 2p - 1 is excluded
        auto id = ask("fubini k=2 p=2 gamma=5/2");
        CHECK(id["outcome"]["kind"] == "identity");
        CHECK(ask("fubini k=1 p=2 gamma=1")["outcome"]["kind"] == "rejected");
    }

    TEST_CASE("every answer carries citations") {
        auto r = ask("trace m=0 B[s=2,p=2,q=1,gamma=0]");
        CHECK(r["citations"].size() >= 1);
        for (const auto& c : r["citations"]) {
            CHECK(c["rule_id"].is_string());
            CHECK(c["anchor"].is_string());
        }
    }

    TEST_CASE("parse errors carry a column") {
        try {
            parse_query("trace m=1 F[s=3,p=3,q=inf,gamma=2,d=3");
            FAIL("expected a parse error");
        } catch (const Error& e) {
            CHECK(e.status() == Status::Parse);
            CHECK(std::string(e.what()).find("column") != std::string::npos);
        }
        CHECK_THROWS_AS(parse_query("frobnicate B[s=1]"), Error);
        CHECK_THROWS_AS(parse_space("Q[s=1,p=2]"), Error);
        CHECK_THROWS_AS(parse_space("B[s=1,p=2,q=2,gamma=x]"), Error);
    }

    TEST_CASE("canonical form round trips") {
        for (const char* t : {"B[s=3/2,p=2,q=1,gamma=0,d=1,r=1,dom=bdry]", "W[k=2,p=2,gamma=1/2,d=2,r=1,dom=half,bc=Tr0]",
                              "F[s=1,p=3,q=inf,gamma=2,d=3,r=2,dom=full]"})
            CHECK(canonical(parse_space(t)) == t);
    }

    TEST_CASE("golden file") {
        std::ifstream in(TRACELAB_SOURCE_DIR "/tests/golden/calculus.json");
        REQUIRE(in);
        auto golden = nlohmann::json::parse(in);
        CHECK(golden.size() >= 30);
        for (const auto& e : golden) {
            CAPTURE(e["query"].get<std::string>());
            auto got = ask(e["query"]);
            CHECK(got["outcome"] == e["expect"]);
            CHECK(cites(got, e["rule"]));
        }
    }
}
