#ifndef EXPEQ_GROUPFILE_HPP
#define EXPEQ_GROUPFILE_HPP

#include <cctype>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "expeq/groups.hpp"

namespace expeq {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Shared tokenizer for the spec-file and equation grammars.  `glued` marks
// tokens not preceded by whitespace; the equation grammar needs it to tell a
// nested exponent from a variable exponent.
struct Token {
    enum class Kind { Ident, Int, Punct, End } kind = Kind::End;
    std::string text;
    long long value = 0;
    std::size_t pos = 0;
    bool glued = false;
};

inline std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> out;
    std::size_t i = 0;
    bool glued = false;
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            glued = false;
            continue;
        }
        if (c == '#') {  // comment to end of line
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        Token t;
        t.pos = i;
        t.glued = glued;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            t.kind = Token::Kind::Ident;
            t.text = src.substr(i, j - i);
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '-' && i + 1 < src.size() &&
                    std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i + 1;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            t.kind = Token::Kind::Int;
            t.text = src.substr(i, j - i);
            t.value = std::stoll(t.text);
            i = j;
        } else {
            t.kind = Token::Kind::Punct;
            t.text = std::string(1, c);
            ++i;
        }
        out.push_back(std::move(t));
        glued = true;
    }
    Token end;
    end.pos = src.size();
    out.push_back(end);
    return out;
}

struct TokenStream {
    std::vector<Token> toks;
    std::size_t at = 0;

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = at + ahead;
        return i < toks.size() ? toks[i] : toks.back();
    }
    const Token& next() {
        const Token& t = peek();
        if (at + 1 < toks.size()) ++at;
        return t;
    }
    bool accept(const std::string& punct) {
        if (peek().kind == Token::Kind::Punct && peek().text == punct) {
            next();
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at position " + std::to_string(peek().pos));
    }
    void expect(const std::string& punct) {
        if (!accept(punct)) fail("expected '" + punct + "'");
    }
    long long expect_int() {
        if (peek().kind != Token::Kind::Int) fail("expected integer");
        return next().value;
    }
    std::string expect_ident() {
        if (peek().kind != Token::Kind::Ident) fail("expected identifier");
        return next().text;
    }
    bool accept_ident(const std::string& word) {
        if (peek().kind == Token::Kind::Ident && peek().text == word) {
            next();
            return true;
        }
        return false;
    }
    bool at_end() const { return peek().kind == Token::Kind::End; }
};

inline std::vector<long long> parse_int_list(TokenStream& ts, const std::string& open,
                                             const std::string& close) {
    ts.expect(open);
    std::vector<long long> out;
    if (!ts.accept(close)) {
        out.push_back(ts.expect_int());
        while (ts.accept(",")) out.push_back(ts.expect_int());
        ts.expect(close);
    }
    return out;
}

}  // namespace detail

// Named groups from one spec file, in definition order.
struct GroupFile {
    std::vector<std::pair<std::string, GroupSpec>> groups;

    const GroupSpec* find(const std::string& name) const {
        for (const auto& [n, g] : groups)
            if (n == name) return &g;
        return nullptr;
    }
};

// Format, one definition per `group` keyword:
//   group <name> = finite { table = [[0,1],[1,0]] identity = 0 names = [e,t] }
//   group <name> = integers                   (optionally { gen = a })
//   group <name> = vc { quotient = <finite name> eps = {1,-1} cocycle = {{0,0},{0,0}} }
//   group <name> = free_product(<name>, <name>, ...)
inline GroupFile parse_group_file(const std::string& src) {
    detail::TokenStream ts{detail::tokenize(src)};
    GroupFile out;
    while (!ts.at_end()) {
        if (!ts.accept_ident("group")) ts.fail("expected 'group'");
        std::string name = ts.expect_ident();
        if (out.find(name)) ts.fail("duplicate group name '" + name + "'");
        ts.expect("=");
        std::string kind = ts.expect_ident();
        GroupSpec spec;
        if (kind == "finite") {
            FiniteSpec f;
            ts.expect("{");
            bool have_table = false;
            while (!ts.accept("}")) {
                std::string key = ts.expect_ident();
                ts.expect("=");
                if (key == "table") {
                    ts.expect("[");
                    do {
                        auto row = detail::parse_int_list(ts, "[", "]");
                        f.table.emplace_back(row.begin(), row.end());
                    } while (ts.accept(","));
                    ts.expect("]");
                    have_table = true;
                } else if (key == "identity") {
                    f.identity = static_cast<int>(ts.expect_int());
                } else if (key == "names") {
                    ts.expect("[");
                    if (!ts.accept("]")) {
                        f.names.push_back(ts.expect_ident());
                        while (ts.accept(",")) f.names.push_back(ts.expect_ident());
                        ts.expect("]");
                    }
                } else {
                    ts.fail("unknown finite-group key '" + key + "'");
                }
            }
            if (!have_table) ts.fail("finite group '" + name + "' needs a table");
            spec = GroupSpec{std::move(f)};
        } else if (kind == "integers") {
            IntegersSpec z;
            if (ts.accept("{")) {
                while (!ts.accept("}")) {
                    std::string key = ts.expect_ident();
                    ts.expect("=");
                    if (key == "gen")
                        z.gen = ts.expect_ident();
                    else
                        ts.fail("unknown integers key '" + key + "'");
                }
            }
            spec = GroupSpec{std::move(z)};
        } else if (kind == "vc") {
            VcSpec v;
            ts.expect("{");
            bool have_q = false;
            while (!ts.accept("}")) {
                std::string key = ts.expect_ident();
                ts.expect("=");
                if (key == "quotient") {
                    std::string qname = ts.expect_ident();
                    const GroupSpec* q = out.find(qname);
                    if (!q || !q->is_finite()) ts.fail("quotient '" + qname + "' is not a defined finite group");
                    v.quotient = q->finite();
                    have_q = true;
                } else if (key == "eps") {
                    auto vals = detail::parse_int_list(ts, "{", "}");
                    v.eps.assign(vals.begin(), vals.end());
                } else if (key == "cocycle") {
                    ts.expect("{");
                    do {
                        v.cocycle.push_back(detail::parse_int_list(ts, "{", "}"));
                    } while (ts.accept(","));
                    ts.expect("}");
                } else if (key == "h") {
                    v.hgen = ts.expect_ident();
                } else {
                    ts.fail("unknown vc key '" + key + "'");
                }
            }
            if (!have_q) ts.fail("vc group '" + name + "' needs a quotient");
            spec = GroupSpec{std::move(v)};
        } else if (kind == "free_product") {
            FreeProductSpec f;
            ts.expect("(");
            do {
                std::string fname = ts.expect_ident();
                const GroupSpec* fac = out.find(fname);
                if (!fac) ts.fail("unknown factor group '" + fname + "'");
                if (fac->is_free_product()) ts.fail("nested free products are not allowed");
                f.factors.push_back(*fac);
            } while (ts.accept(","));
            ts.expect(")");
            spec = GroupSpec{std::move(f)};
        } else {
            ts.fail("unknown group kind '" + kind + "'");
        }
        auto problems = validate_spec(spec);
        if (!problems.empty())
            throw ParseError("group '" + name + "': " + problems.front());
        out.groups.emplace_back(std::move(name), std::move(spec));
    }
    if (out.groups.empty()) throw ParseError("no group definitions found");
    return out;
}

// ---------------------------------------------------------------------------
// Generator binding: the symbols usable in equation text for one group
// ---------------------------------------------------------------------------

struct GeneratorTable {
    std::map<std::string, GroupElement> gens;
};

namespace detail {

inline void bind_leaf(const GroupSpec& s, GeneratorTable& t,
                      const std::function<GroupElement(const LeafElt&)>& embed) {
    auto add = [&](const std::string& name, const LeafElt& e) {
        if (!t.gens.emplace(name, embed(e)).second)
            throw ParseError("generator name collision: '" + name + "'");
    };
    if (s.is_finite()) {
        const auto& f = s.finite();
        for (int i = 0; i < static_cast<int>(f.size()); ++i)
            if (i != f.identity) add(finite_name(f, i), FiniteElt{i});
        return;
    }
    if (s.is_integers()) {
        add(s.integers().gen, IntElt{1});
        return;
    }
    const auto& v = s.vc();
    for (int q = 0; q < static_cast<int>(v.quotient.size()); ++q)
        if (q != v.quotient.identity) add(finite_name(v.quotient, q), VcElt{q, 0});
    add(v.hgen, VcElt{v.quotient.identity, 1});
}

}  // namespace detail

inline GeneratorTable bind_generators(const GroupSpec& s) {
    GeneratorTable t;
    if (!s.is_free_product()) {
        detail::bind_leaf(s, t, [](const LeafElt& e) { return detail::from_leaf(e); });
        return t;
    }
    const auto& fps = s.free_product();
    for (std::size_t k = 0; k < fps.factors.size(); ++k)
        detail::bind_leaf(fps.factors[k], t, [&, k](const LeafElt& e) -> GroupElement {
            FreeElt w;
            if (!leaf::is_identity(fps.factors[k], e)) w.syllables.push_back({k, e});
            return w;
        });
    return t;
}

}  // namespace expeq

#endif
