#ifndef EXPEQ_CLI_HPP
#define EXPEQ_CLI_HPP

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "expeq/eqparse.hpp"
#include "expeq/groupfile.hpp"
#include "expeq/solvers.hpp"

namespace expeq {

// ---------------------------------------------------------------------------
// Text round-trips for semilinear sets and vectors
// ---------------------------------------------------------------------------

inline Vec parse_vec(detail::TokenStream& ts) {
    auto vals = detail::parse_int_list(ts, "(", ")");
    return Vec(vals.begin(), vals.end());
}

inline Vec parse_vec(const std::string& text) {
    detail::TokenStream ts{detail::tokenize(text)};
    Vec v = parse_vec(ts);
    if (!ts.at_end()) ts.fail("trailing input after vector");
    return v;
}

// Inverse of render(ZSemilinearSet): one `base (...) + Z*(...)...` line per
// piece, or the single line EMPTY.  `dimension` disambiguates EMPTY.
inline ZSemilinearSet parse_semilinear(const std::string& text, std::size_t dimension) {
    detail::TokenStream ts{detail::tokenize(text)};
    if (ts.accept_ident("EMPTY")) {
        if (!ts.at_end()) ts.fail("trailing input after EMPTY");
        return ZSemilinearSet::empty(dimension);
    }
    ZSemilinearSet s(dimension);
    while (!ts.at_end()) {
        if (!ts.accept_ident("base")) ts.fail("expected 'base'");
        Vec base = parse_vec(ts);
        if (base.size() != dimension) ts.fail("base arity mismatch");
        std::vector<Vec> periods;
        while (ts.accept("+")) {
            if (!ts.accept_ident("Z")) ts.fail("expected 'Z'");
            ts.expect("*");
            Vec p = parse_vec(ts);
            if (p.size() != dimension) ts.fail("period arity mismatch");
            periods.push_back(std::move(p));
        }
        s.pieces.push_back(ZLinearSet(std::move(base), std::move(periods)));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Result rendering
// ---------------------------------------------------------------------------

inline std::string render_inline(const ZSemilinearSet& s) {
    if (s.pieces.empty()) return "EMPTY";
    std::string out;
    for (std::size_t i = 0; i < s.pieces.size(); ++i) {
        if (i) out += " ; ";
        out += render(s.pieces[i]);
    }
    return out;
}

inline std::string render(const SolveResult& r) {
    std::ostringstream out;
    if (const auto* ex = std::get_if<ExactResult>(&r)) {
        out << "EXACT\n" << render(ex->set) << "\n";
        out << "decomposition " << ex->decomposition.size() << " terms\n";
        for (const auto& t : ex->decomposition)
            out << "N = { " << render_inline(t.lox) << " } M = { " << render_inline(t.ell) << " }\n";
        out << "coordinates " << render(Vec(ex->coord_perm.begin(), ex->coord_perm.end())) << "\n";
        return out.str();
    }
    const auto& emp = std::get<EmpiricalResult>(r);
    out << "EMPIRICAL box=" << render(emp.box.lo) << ":" << render(emp.box.hi)
        << " verified=" << (emp.sampled_verified ? "true" : "false") << "\n";
    out << render(emp.candidate) << "\n";
    out << "box solutions " << emp.box_solutions.size() << "\n";
    return out.str();
}

inline std::string render(const Certificate& c) {
    std::ostringstream out;
    out << "solution " << render(c.solution) << "\n";
    out << "pairing " << render(c.pairing) << "\n";
    for (const auto& line : c.block_checks) out << "check " << line << "\n";
    for (const auto& line : c.gap_checks) out << "check " << line << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Command-line front end (kept header-side so exit codes are testable
// in-process)
// ---------------------------------------------------------------------------

namespace cli {

constexpr int kExitExact = 0;
constexpr int kExitEmpty = 1;
constexpr int kExitEmpirical = 2;
constexpr int kExitUsage = 64;

struct Options {
    std::string command;
    std::vector<std::string> positional;
    std::string group_file;
    std::string group_name;  // default: last group in the file
    std::string box_text;
    std::string mode = "empirical";
    std::string expect_file;
    long long seed = 0;
};

inline Options parse_args(const std::vector<std::string>& args) {
    Options o;
    if (args.empty()) throw ParseError("missing subcommand");
    o.command = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        auto value = [&]() -> const std::string& {
            if (i + 1 >= args.size()) throw ParseError("flag " + a + " needs a value");
            return args[++i];
        };
        if (a == "--group")
            o.group_file = value();
        else if (a == "--name")
            o.group_name = value();
        else if (a == "--box")
            o.box_text = value();
        else if (a == "--mode")
            o.mode = value();
        else if (a == "--expect")
            o.expect_file = value();
        else if (a == "--seed")
            o.seed = std::stoll(value());
        else if (a.rfind("--", 0) == 0)
            throw ParseError("unknown flag " + a);
        else
            o.positional.push_back(a);
    }
    if (o.mode != "exact" && o.mode != "empirical") throw ParseError("--mode must be exact or empirical");
    return o;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline const GroupSpec& pick_group(const GroupFile& gf, const std::string& name) {
    if (name.empty()) return gf.groups.back().second;
    const GroupSpec* g = gf.find(name);
    if (!g) throw ParseError("no group named '" + name + "' in spec file");
    return *g;
}

// box text: "lo:hi" applied to all variables, or "lo:hi,lo:hi,..."
inline Box parse_box(const std::string& text, std::size_t n) {
    if (text.empty()) return Box::cube(n, 5);
    Box b;
    std::stringstream ss(text);
    std::string part;
    std::vector<std::pair<Int, Int>> ranges;
    while (std::getline(ss, part, ',')) {
        auto colon = part.find(':');
        if (colon == std::string::npos) throw ParseError("box range needs lo:hi, got " + part);
        Int lo = std::stoll(part.substr(0, colon));
        Int hi = std::stoll(part.substr(colon + 1));
        if (lo > hi) throw ParseError("box range lo > hi");
        ranges.push_back({lo, hi});
    }
    if (ranges.size() == 1) ranges.assign(n, ranges[0]);
    if (ranges.size() != n) throw ParseError("box has " + std::to_string(ranges.size()) +
                                             " ranges for " + std::to_string(n) + " variables");
    for (auto [lo, hi] : ranges) {
        b.lo.push_back(lo);
        b.hi.push_back(hi);
    }
    return b;
}

inline int command_solve(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.positional.size() != 1) throw ParseError("solve needs exactly one equation argument");
    GroupFile gf = parse_group_file(read_file(o.group_file));
    const GroupSpec& g = pick_group(gf, o.group_name);
    ExponentialEquation eq = parse_equation(o.positional[0], g);
    out << "equation: " << render_equation(eq) << "\n";
    out << "seed: " << o.seed << "\n";
    SolveOptions so;
    if (!o.box_text.empty()) {
        so.empirical_box = parse_box(o.box_text, eq.arity());
        so.have_box = true;
    }
    if (o.mode == "exact") {
        // probe without running the oracle: leaf and elliptic routes are exact
        bool exact_route = !g.is_free_product();
        if (!exact_route) {
            exact_route = true;
            bool lox = false;
            for (const auto& t : eq.terms)
                if (!is_identity(g, t.base) &&
                    classify(g, t.base).kind == Classification::Kind::Loxodromic)
                    lox = true;
            if (lox) {
                auto probe = detail::try_loxodromic_exact(eq);
                exact_route = probe.has_value();
                if (exact_route) {
                    out << render(SolveResult{*probe});
                    return probe->set.empty_set() ? kExitEmpty : kExitExact;
                }
            }
        }
        if (!exact_route) {
            err << "no exact route for this equation (exact-only mode)\n";
            return kExitEmpirical;
        }
    }
    SolveResult r = solve(eq, so);
    out << render(r);
    if (const auto* ex = std::get_if<ExactResult>(&r))
        return ex->set.empty_set() ? kExitEmpty : kExitExact;
    return kExitEmpirical;
}

inline int command_compare(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.positional.size() != 1) throw ParseError("compare needs exactly one equation argument");
    GroupFile gf = parse_group_file(read_file(o.group_file));
    const GroupSpec& g = pick_group(gf, o.group_name);
    ExponentialEquation eq = parse_equation(o.positional[0], g);
    out << "equation: " << render_equation(eq) << "\n";
    out << "seed: " << o.seed << "\n";
    Box box = parse_box(o.box_text, eq.arity());
    std::vector<Vec> truth = solve_bounded(eq, box);

    ZSemilinearSet claimed(eq.arity());
    if (!o.expect_file.empty()) {
        claimed = parse_semilinear(read_file(o.expect_file), eq.arity());
    } else {
        SolveOptions so{box, true};
        SolveResult r = solve(eq, so);
        claimed = std::holds_alternative<ExactResult>(r) ? std::get<ExactResult>(r).set
                                                         : std::get<EmpiricalResult>(r).candidate;
    }
    PreparedMembership member(claimed);
    std::set<Vec> truth_set(truth.begin(), truth.end());
    std::vector<Vec> missing, extra;
    Vec p = box.lo;
    for (;;) {
        bool is_truth = truth_set.count(p) != 0;
        bool claims = member.contains(p);
        if (claims && !is_truth) extra.push_back(p);
        if (!claims && is_truth) missing.push_back(p);
        std::size_t j = 0;
        while (j < p.size() && p[j] == box.hi[j]) p[j] = box.lo[j], ++j;
        if (j == p.size()) break;
        ++p[j];
    }
    if (missing.empty() && extra.empty()) {
        out << "PASS (" << truth.size() << " box solutions)\n";
        return 0;
    }
    out << "FAIL\n";
    for (const auto& q : missing) out << "missing " << render(q) << "\n";
    for (const auto& q : extra) out << "extra " << render(q) << "\n";
    (void)err;
    return 1;
}

inline int command_certify(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.positional.size() != 2)
        throw ParseError("certify needs an equation and a solution vector");
    GroupFile gf = parse_group_file(read_file(o.group_file));
    const GroupSpec& g = pick_group(gf, o.group_name);
    ExponentialEquation eq = parse_equation(o.positional[0], g);
    Vec solution = parse_vec(o.positional[1]);
    if (solution.size() != eq.arity()) throw ParseError("solution arity mismatch");
    out << "equation: " << render_equation(eq) << "\n";
    if (!evaluate(eq, solution)) {
        out << "not a solution; substituted normal form: "
            << render(g, substitute(eq, solution)) << "\n";
        return 1;
    }
    Certificate c = extract_certificate(eq, solution);
    out << render(c);
    if (!is_noncrossing(c.pairing)) {
        err << "internal error: crossing pairing\n";
        return 1;
    }
    return 0;
}

inline int command_catalan(const Options& o, std::ostream& out) {
    if (o.positional.size() != 1) throw ParseError("catalan needs one argument n");
    std::size_t n = static_cast<std::size_t>(std::stoull(o.positional[0]));
    if (n > 12) throw ParseError("catalan enumeration capped at n = 12");
    auto all = enumerate_noncrossing(n);
    out << "C_" << n << " = " << all.size() << "\n";
    for (const auto& p : all) out << render(p) << "\n";
    return all.size() == catalan_count(n) ? 0 : 1;
}

inline int command_validate_group(const Options& o, std::ostream& out) {
    if (o.positional.size() != 1) throw ParseError("validate-group needs one file argument");
    GroupFile gf = parse_group_file(read_file(o.positional[0]));  // throws on invalid
    for (const auto& [name, spec] : gf.groups) {
        const char* kind = spec.is_finite()       ? "finite"
                           : spec.is_integers()   ? "integers"
                           : spec.is_vc()         ? "vc"
                                                  : "free_product";
        out << name << ": " << kind << " OK\n";
    }
    return 0;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        Options o = parse_args(args);
        if (o.command == "solve") return command_solve(o, out, err);
        if (o.command == "compare") return command_compare(o, out, err);
        if (o.command == "certify") return command_certify(o, out, err);
        if (o.command == "catalan") return command_catalan(o, out);
        if (o.command == "validate-group") return command_validate_group(o, out);
        throw ParseError("unknown subcommand '" + o.command + "'");
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace cli

}  // namespace expeq

#endif
