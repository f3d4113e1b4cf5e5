#ifndef EXPEQ_EQPARSE_HPP
#define EXPEQ_EQPARSE_HPP

#include <set>
#include <string>
#include <vector>

#include "expeq/equation.hpp"
#include "expeq/groupfile.hpp"

namespace expeq {

// Equation grammar:
//   equation := term ("*" term)* "=" "1"
//   term     := word | word "^" var
//   word     := atom+
//   atom     := generator | generator "^" int | "1"
//             | "(" word ")" | "(" word ")" "^" int
//             | "(" quotient-elt "," int ")"            (virtually cyclic pair)
// A "^" directly after an integer exponent is rejected (nested exponents);
// `a^-1 ^x` with whitespace reads as word a^-1 raised to the variable x.
namespace detail {

class EquationParser {
  public:
    EquationParser(const std::string& text, const GroupSpec& spec)
        : ts_{tokenize(text)}, spec_(spec), gens_(bind_generators(spec)) {}

    ExponentialEquation parse() {
        ExponentialEquation eq;
        eq.spec = spec_;
        GroupElement pending = identity(spec_);
        if (ts_.peek().kind == Token::Kind::Punct && ts_.peek().text == "=")
            ts_.fail("empty left side");
        std::set<std::string> seen_vars;
        for (;;) {
            auto [value, var] = parse_term();
            if (var.empty()) {
                pending = mul(spec_, pending, value);
            } else {
                if (!seen_vars.insert(var).second) ts_.fail("repeated variable '" + var + "'");
                eq.terms.push_back({pending, value});
                eq.vars.push_back(var);
                pending = identity(spec_);
            }
            if (ts_.accept("*")) continue;
            ts_.expect("=");
            if (!(ts_.peek().kind == Token::Kind::Int && ts_.peek().value == 1))
                ts_.fail("right side must be 1");
            ts_.next();
            if (!ts_.at_end()) ts_.fail("trailing input");
            break;
        }
        if (eq.terms.empty()) ts_.fail("equation has no variable terms");
        if (!is_identity(spec_, pending)) {
            // trailing constant: rotate to the front (w*c = 1 iff c*w = 1)
            eq.terms.front().coeff = mul(spec_, pending, eq.terms.front().coeff);
        }
        return eq;
    }

  private:
    TokenStream ts_;
    const GroupSpec& spec_;
    GeneratorTable gens_;

    bool starts_atom() const {
        const Token& t = ts_.peek();
        if (t.kind == Token::Kind::Ident) return true;
        if (t.kind == Token::Kind::Int && t.value == 1) return true;
        return t.kind == Token::Kind::Punct && t.text == "(";
    }

    GroupElement lookup(const std::string& name) {
        auto it = gens_.gens.find(name);
        if (it == gens_.gens.end()) ts_.fail("unknown symbol '" + name + "'");
        return it->second;
    }

    // returns (value, variable-or-empty)
    std::pair<GroupElement, std::string> parse_term() {
        GroupElement w = identity(spec_);
        bool any = false;
        for (;;) {
            if (starts_atom()) {
                w = mul(spec_, w, parse_atom());
                any = true;
                continue;
            }
            if (ts_.peek().kind == Token::Kind::Punct && ts_.peek().text == "^") {
                if (!any) ts_.fail("exponent with no preceding word");
                ts_.next();
                std::string var = ts_.expect_ident();
                return {w, var};
            }
            break;
        }
        if (!any) ts_.fail("expected a term");
        return {w, ""};
    }

    GroupElement parse_atom() {
        const Token& t = ts_.peek();
        if (t.kind == Token::Kind::Int && t.value == 1) {
            ts_.next();
            return identity(spec_);
        }
        if (t.kind == Token::Kind::Ident) {
            GroupElement g = lookup(ts_.next().text);
            return apply_int_exponent(g);
        }
        ts_.expect("(");
        if (is_pair_literal()) return parse_pair();
        GroupElement w = identity(spec_);
        bool any = false;
        for (;;) {
            if (starts_atom()) {
                w = mul(spec_, w, parse_atom());
                any = true;
                continue;
            }
            // atoms inside parentheses may be separated by '*'
            if (any && ts_.peek().kind == Token::Kind::Punct && ts_.peek().text == "*") {
                ts_.next();
                w = mul(spec_, w, parse_atom());
                continue;
            }
            break;
        }
        if (!any) ts_.fail("empty parenthesized word");
        ts_.expect(")");
        // the exponent after ')' may be the variable; leave that to the caller
        if (ts_.peek().kind == Token::Kind::Punct && ts_.peek().text == "^" &&
            ts_.peek(1).kind == Token::Kind::Int) {
            ts_.next();
            long long k = ts_.expect_int();
            w = pow(spec_, w, k);
            check_no_nested_exponent();
        }
        return w;
    }

    GroupElement apply_int_exponent(GroupElement g) {
        if (ts_.peek().kind == Token::Kind::Punct && ts_.peek().text == "^" &&
            ts_.peek(1).kind == Token::Kind::Int) {
            ts_.next();
            long long k = ts_.expect_int();
            g = pow(spec_, g, k);
            check_no_nested_exponent();
        }
        return g;
    }

    void check_no_nested_exponent() {
        // "a^-1^x" is malformed; a later unglued "^x" applies to the word
        if (ts_.peek().kind == Token::Kind::Punct && ts_.peek().text == "^" && ts_.peek().glued)
            ts_.fail("malformed exponent nesting");
    }

    bool is_pair_literal() const {
        // after '(': IDENT or INT, then ','
        const Token& a = ts_.peek();
        if (a.kind != Token::Kind::Ident && a.kind != Token::Kind::Int) return false;
        const Token& b = ts_.peek(1);
        return b.kind == Token::Kind::Punct && b.text == ",";
    }

    GroupElement parse_pair() {
        std::size_t pos = ts_.peek().pos;
        std::string qname;
        bool q_is_one = false;
        if (ts_.peek().kind == Token::Kind::Int) {
            if (ts_.next().value != 1) throw ParseError("pair quotient part must be 1 or a name at position " + std::to_string(pos));
            q_is_one = true;
        } else {
            qname = ts_.next().text;
        }
        ts_.expect(",");
        long long m = ts_.expect_int();
        ts_.expect(")");
        auto build = [&](const VcSpec& v, std::size_t factor, bool wrap) -> GroupElement {
            int q = v.quotient.identity;
            if (!q_is_one) {
                q = -1;
                for (int i = 0; i < static_cast<int>(v.quotient.size()); ++i)
                    if (finite_name(v.quotient, i) == qname) q = i;
                if (q < 0) return FiniteElt{-1};  // sentinel: not this factor
            }
            VcElt e{q, m};
            if (!wrap) return e;
            FreeElt w;
            if (!(e == vcg::identity(v))) w.syllables.push_back({factor, e});
            return w;
        };
        if (spec_.is_vc()) {
            GroupElement g = build(spec_.vc(), 0, false);
            if (auto* f = std::get_if<FiniteElt>(&g); f && f->index == -1)
                throw ParseError("unknown quotient element '" + qname + "' at position " + std::to_string(pos));
            return g;
        }
        if (spec_.is_free_product()) {
            const auto& fps = spec_.free_product();
            for (std::size_t k = 0; k < fps.factors.size(); ++k) {
                if (!fps.factors[k].is_vc()) continue;
                GroupElement g = build(fps.factors[k].vc(), k, true);
                if (auto* f = std::get_if<FiniteElt>(&g); f && f->index == -1) continue;
                return g;
            }
        }
        throw ParseError("pair literal needs a virtually cyclic backend at position " + std::to_string(pos));
    }
};

}  // namespace detail

inline ExponentialEquation parse_equation(const std::string& text, const GroupSpec& spec) {
    return detail::EquationParser(text, spec).parse();
}

inline std::string render_equation(const ExponentialEquation& eq) {
    std::string out;
    for (std::size_t i = 0; i < eq.terms.size(); ++i) {
        if (i) out += " * ";
        std::string c = render(eq.spec, eq.terms[i].coeff);
        if (c != "1") out += c + " * ";
        std::string b = render(eq.spec, eq.terms[i].base);
        bool bare = b.find('*') == std::string::npos && b.find('^') == std::string::npos;
        out += (bare ? b : "(" + b + ")") + "^" + eq.vars[i];
    }
    out += " = 1";
    return out;
}

}  // namespace expeq

#endif
