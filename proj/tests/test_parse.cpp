#include <catch2/catch_amalgamated.hpp>

#include "expeq/cli.hpp"
#include "expeq/eqparse.hpp"
#include "expeq/groupfile.hpp"
#include "helpers.hpp"

using namespace expeq;
using namespace testutil;

namespace {

const char* kSpecText = R"(
group Z2 = finite { table = [[0,1],[1,0]] identity = 0 names = [e,t] }
group Za = integers { gen = a }
group Zb = integers { gen = b }
group Dinf = vc { quotient = Z2 eps = {1,-1} cocycle = {{0,0},{0,0}} }
group F2 = free_product(Za, Zb)
)";

}  // namespace

TEST_CASE("group file parsing") {
    GroupFile gf = parse_group_file(kSpecText);
    REQUIRE(gf.groups.size() == 5);
    REQUIRE(gf.find("Z2")->is_finite());
    REQUIRE(gf.find("Za")->is_integers());
    REQUIRE(gf.find("Za")->integers().gen == "a");
    REQUIRE(gf.find("Dinf")->is_vc());
    REQUIRE(gf.find("Dinf")->vc().eps == std::vector<int>{1, -1});
    REQUIRE(gf.find("F2")->is_free_product());
    REQUIRE(gf.find("F2")->free_product().factors.size() == 2);
    REQUIRE(gf.find("nope") == nullptr);
}

TEST_CASE("group file errors") {
    REQUIRE_THROWS_AS(parse_group_file("group X = finite { identity = 0 }"), ParseError);
    REQUIRE_THROWS_AS(parse_group_file("group X = vc { eps = {1} cocycle = {{0}} }"), ParseError);
    REQUIRE_THROWS_AS(parse_group_file("group X = free_product(Y)"), ParseError);
    REQUIRE_THROWS_AS(parse_group_file("group X = integers group X = integers"), ParseError);
    REQUIRE_THROWS_AS(parse_group_file(""), ParseError);
    // invalid table caught by validation
    REQUIRE_THROWS_AS(parse_group_file("group X = finite { table = [[0,1],[1,1]] identity = 0 }"),
                      ParseError);
    // nested free product
    REQUIRE_THROWS_AS(
        parse_group_file("group A = integers group F = free_product(A) group G = free_product(F)"),
        ParseError);
}

TEST_CASE("generator binding") {
    GroupFile gf = parse_group_file(kSpecText);
    auto t = bind_generators(*gf.find("Dinf"));
    REQUIRE(t.gens.count("t") == 1);
    REQUIRE(t.gens.count("h") == 1);
    REQUIRE(std::get<VcElt>(t.gens["t"]) == VcElt{1, 0});
    REQUIRE(std::get<VcElt>(t.gens["h"]) == VcElt{0, 1});
    auto f = bind_generators(*gf.find("F2"));
    REQUIRE(f.gens.count("a") == 1);
    REQUIRE(f.gens.count("b") == 1);
    // collision across factors is rejected
    GroupSpec clash = free_product({zgroup("a"), zgroup("a")});
    REQUIRE_THROWS_AS(bind_generators(clash), ParseError);
}

TEST_CASE("equation parsing over the infinite dihedral group") {
    GroupFile gf = parse_group_file(kSpecText);
    const GroupSpec& d = *gf.find("Dinf");
    auto eq = parse_equation("t * h^x1 * t * h^x2 = 1", d);
    REQUIRE(eq.arity() == 2);
    REQUIRE(eq.vars == std::vector<std::string>{"x1", "x2"});
    REQUIRE(std::get<VcElt>(eq.terms[0].coeff) == VcElt{1, 0});
    REQUIRE(std::get<VcElt>(eq.terms[0].base) == VcElt{0, 1});
    REQUIRE(std::get<VcElt>(eq.terms[1].coeff) == VcElt{1, 0});

    // pair literals
    auto eq2 = parse_equation("(t, 3) * h^x1 = 1", d);
    REQUIRE(std::get<VcElt>(eq2.terms[0].coeff) == VcElt{1, 3});
    auto eq3 = parse_equation("(1, -2) * h^x1 = 1", d);
    REQUIRE(std::get<VcElt>(eq3.terms[0].coeff) == VcElt{0, -2});
}

TEST_CASE("equation parsing over free products") {
    GroupFile gf = parse_group_file(kSpecText);
    const GroupSpec& f2 = *gf.find("F2");
    auto eq = parse_equation("(a b)^x1 * b^-1 a^-1 ^x2 = 1", f2);
    REQUIRE(eq.arity() == 2);
    GroupElement ab = mul(f2, std::get<FreeElt>(bind_generators(f2).gens["a"]),
                          std::get<FreeElt>(bind_generators(f2).gens["b"]));
    REQUIRE(eq.terms[0].base == ab);
    REQUIRE(eq.terms[1].base == inv(f2, ab));
    REQUIRE(render_equation(eq) == "(a*b)^x1 * (b^-1*a^-1)^x2 = 1");
}

TEST_CASE("coefficient folding and cyclic rotation of trailing constants") {
    GroupFile gf = parse_group_file(kSpecText);
    const GroupSpec& f2 = *gf.find("F2");
    // a * b^x1 * a^2 = 1: trailing a^2 rotates to the front coefficient a^3
    auto eq = parse_equation("a * b^x1 * a^2 = 1", f2);
    REQUIRE(eq.arity() == 1);
    FreeElt a3;
    a3.syllables.push_back({0, IntElt{3}});
    REQUIRE(eq.terms[0].coeff == GroupElement{a3});
    // consecutive constant terms merge
    auto eq2 = parse_equation("a * b * a^x1 = 1", f2);
    REQUIRE(std::get<FreeElt>(eq2.terms[0].coeff).syllables.size() == 2);
}

TEST_CASE("identity bases") {
    GroupFile gf = parse_group_file(kSpecText);
    auto eq = parse_equation("1^x1 * a^x2 = 1", *gf.find("F2"));
    REQUIRE(is_identity(eq.spec, eq.terms[0].base));
    REQUIRE(!is_identity(eq.spec, eq.terms[1].base));
}

TEST_CASE("equation parse errors") {
    GroupFile gf = parse_group_file(kSpecText);
    const GroupSpec& f2 = *gf.find("F2");
    REQUIRE_THROWS_AS(parse_equation("a^x1 * b^x2 * a^-1^x3 = 1", f2), ParseError);
    REQUIRE_THROWS_AS(parse_equation("c^x1 = 1", f2), ParseError);
    REQUIRE_THROWS_AS(parse_equation("a^x1 * b^x1 = 1", f2), ParseError);
    REQUIRE_THROWS_AS(parse_equation("= 1", f2), ParseError);
    REQUIRE_THROWS_AS(parse_equation("a^x1 = 2", f2), ParseError);
    REQUIRE_THROWS_AS(parse_equation("a^x1", f2), ParseError);
    REQUIRE_THROWS_AS(parse_equation("a * b = 1", f2), ParseError);  // no variables
    REQUIRE_THROWS_AS(parse_equation("a^x1 = 1 junk", f2), ParseError);
}

TEST_CASE("round trip: print then re-parse is the identity") {
    GroupFile gf = parse_group_file(kSpecText);
    Rng rng(400);
    const GroupSpec& f2 = *gf.find("F2");
    std::vector<std::string> samples = {
        "a^x1 * b^x2 * a^-1 ^x3 * b^-1 ^x4 = 1",
        "(a b)^x1 * b^-1 a^-1 ^x2 = 1",
        "a^3 * b^x1 * a^-2 b^2 * (a b a)^x2 = 1",
        "1^x1 * a^x2 = 1",
    };
    for (const auto& text : samples) {
        auto eq = parse_equation(text, f2);
        auto eq2 = parse_equation(render_equation(eq), f2);
        REQUIRE(eq.vars == eq2.vars);
        REQUIRE(eq.terms.size() == eq2.terms.size());
        for (std::size_t i = 0; i < eq.terms.size(); ++i) {
            REQUIRE(eq.terms[i].coeff == eq2.terms[i].coeff);
            REQUIRE(eq.terms[i].base == eq2.terms[i].base);
        }
    }
    const GroupSpec& d = *gf.find("Dinf");
    auto eq = parse_equation("t * h^x1 * (t, -3) * h^x2 = 1", d);
    auto eq2 = parse_equation(render_equation(eq), d);
    REQUIRE(eq.terms[1].coeff == eq2.terms[1].coeff);
}

TEST_CASE("semilinear text round trip") {
    Rng rng(401);
    for (int rep = 0; rep < 50; ++rep) {
        std::size_t dim = 1 + static_cast<std::size_t>(rng.pick(0, 3));
        ZSemilinearSet s(dim);
        std::size_t pieces = static_cast<std::size_t>(rng.pick(0, 3));
        for (std::size_t p = 0; p < pieces; ++p) {
            Vec base(dim);
            for (auto& v : base) v = rng.pick(-9, 9);
            std::vector<Vec> periods(static_cast<std::size_t>(rng.pick(0, 2)));
            for (auto& per : periods) {
                per.resize(dim);
                for (auto& v : per) v = rng.pick(-9, 9);
            }
            s.pieces.push_back(ZLinearSet(std::move(base), std::move(periods)));
        }
        ZSemilinearSet back = parse_semilinear(render(s), dim);
        REQUIRE(back == s);
    }
    REQUIRE(parse_semilinear("EMPTY", 3).empty_set());
    REQUIRE_THROWS_AS(parse_semilinear("base (1,2) + Z*(1)", 2), ParseError);
    REQUIRE_THROWS_AS(parse_semilinear("nonsense", 2), ParseError);
}

TEST_CASE("vector text round trip") {
    REQUIRE(parse_vec("(1,-2,3)") == Vec{1, -2, 3});
    REQUIRE(parse_vec("()") == Vec{});
    REQUIRE_THROWS_AS(parse_vec("(1,2"), ParseError);
}
