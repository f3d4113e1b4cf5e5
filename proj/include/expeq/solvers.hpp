#ifndef EXPEQ_SOLVERS_HPP
#define EXPEQ_SOLVERS_HPP

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "expeq/catalan.hpp"
#include "expeq/equation.hpp"
#include "expeq/groups.hpp"
#include "expeq/semilinear.hpp"

namespace expeq {

// ---------------------------------------------------------------------------
// Leaf solvers
// ---------------------------------------------------------------------------

// Over Z: with a_i = h^{c_i}, g_i = h^{s_i} the equation is sum s_i x_i = -sum c_i.
inline ZSemilinearSet solve_integer(const ExponentialEquation& eq) {
    if (!eq.spec.is_integers()) throw std::invalid_argument("solve_integer: backend is not Z");
    const std::size_t n = eq.arity();
    Int rhs = 0;
    std::vector<Vec> cols;
    for (const auto& t : eq.terms) {
        rhs -= std::get<IntElt>(t.coeff).power;
        cols.push_back({std::get<IntElt>(t.base).power});
    }
    auto sol = intlin::solve(cols, {rhs});
    if (!sol) return ZSemilinearSet::empty(n);
    ZSemilinearSet r(n);
    std::vector<Vec> periods;
    for (auto& k : sol->kernel) periods.push_back(std::move(k));
    r.pieces.push_back(ZLinearSet(std::move(sol->particular), std::move(periods)));
    return r;
}

// Finite backend: enumerate residues modulo the base orders.
inline ZSemilinearSet solve_finite(const ExponentialEquation& eq) {
    if (!eq.spec.is_finite()) throw std::invalid_argument("solve_finite: backend is not finite");
    const std::size_t n = eq.arity();
    std::vector<long long> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = *order(eq.spec, eq.terms[i].base);
    ZSemilinearSet r(n);
    Vec k(n, 0);
    for (;;) {
        if (evaluate(eq, k)) {
            std::vector<Vec> periods;
            for (std::size_t i = 0; i < n; ++i) {
                Vec p(n, 0);
                p[i] = d[i];
                periods.push_back(std::move(p));
            }
            r.pieces.push_back(ZLinearSet(k, std::move(periods)));
        }
        std::size_t j = 0;
        while (j < n && k[j] == d[j] - 1) k[j++] = 0;
        if (j == n) break;
        ++k[j];
    }
    return r;
}

// Virtually cyclic backend.  Substitute x_i = N y_i + k_i with N = |Q|; each
// residue tuple reduces to a one-row linear Diophantine equation over the
// infinite cyclic kernel H generated by h = (1,1).
inline ZSemilinearSet solve_virtually_cyclic(const ExponentialEquation& eq) {
    if (!eq.spec.is_vc()) throw std::invalid_argument("solve_virtually_cyclic: backend is not vc");
    const VcSpec& vc = eq.spec.vc();
    const long long N = static_cast<long long>(vc.quotient.size());
    const std::size_t n = eq.arity();
    std::vector<long long> s(n);  // g_i^N = h^{s_i}
    for (std::size_t i = 0; i < n; ++i) {
        VcElt gN = vcg::pow(vc, std::get<VcElt>(eq.terms[i].base), N);
        s[i] = gN.shift;
    }
    ZSemilinearSet result(n);
    Vec k(n, 0);
    for (;;) {
        // prefixes f_i = a_1 g_1^{k_1} ... a_{i-1} g_{i-1}^{k_{i-1}} a_i
        std::vector<VcElt> f(n);
        VcElt acc = vcg::identity(vc);
        for (std::size_t i = 0; i < n; ++i) {
            acc = vcg::mul(vc, acc, std::get<VcElt>(eq.terms[i].coeff));
            f[i] = acc;
            acc = vcg::mul(vc, acc, vcg::pow(vc, std::get<VcElt>(eq.terms[i].base), k[i]));
        }
        // acc = f_n g_n^{k_n}; a residue tuple survives only if it lies in H
        if (acc.q == vc.quotient.identity) {
            std::vector<Vec> cols;
            for (std::size_t i = 0; i < n; ++i) {
                long long sigma = vc.eps[fin::inv(vc.quotient, f[i].q)];  // f_i h f_i^{-1} = h^sigma
                cols.push_back({sigma * s[i]});
            }
            if (auto sol = intlin::solve(cols, {-acc.shift})) {
                Vec base(n);
                for (std::size_t i = 0; i < n; ++i) base[i] = N * sol->particular[i] + k[i];
                std::vector<Vec> periods;
                for (const auto& ker : sol->kernel) {
                    Vec p(n);
                    for (std::size_t i = 0; i < n; ++i) p[i] = N * ker[i];
                    periods.push_back(std::move(p));
                }
                result.pieces.push_back(ZLinearSet(std::move(base), std::move(periods)));
            }
        }
        std::size_t j = 0;
        while (j < n && k[j] == N - 1) k[j++] = 0;
        if (j == n) break;
        ++k[j];
    }
    return result;
}

// Dispatch a one-backend ("leaf") equation to its exact solver.
inline ZSemilinearSet solve_leaf(const ExponentialEquation& eq) {
    if (eq.spec.is_integers()) return solve_integer(eq);
    if (eq.spec.is_finite()) return solve_finite(eq);
    if (eq.spec.is_vc()) return solve_virtually_cyclic(eq);
    throw std::invalid_argument("solve_leaf: free product is not a leaf backend");
}

// ---------------------------------------------------------------------------
// Finitary equations a g^x = 1
// ---------------------------------------------------------------------------

inline ZSemilinearSet solve_finitary(const GroupSpec& spec, const GroupElement& a, const GroupElement& g) {
    auto singleton = [](Int x) { return ZSemilinearSet::singleton({x}); };
    if (auto d = order(spec, g)) {
        ZSemilinearSet r(1);
        for (long long x0 = 0; x0 < *d; ++x0)
            if (is_identity(spec, mul(spec, a, pow(spec, g, x0))))
                r.pieces.push_back(ZLinearSet({x0}, {{*d}}));
        return r;
    }
    GroupElement target = inv(spec, a);  // need g^x = a^{-1}
    if (spec.is_integers()) {
        long long sv = std::get<IntElt>(g).power;
        long long c = std::get<IntElt>(target).power;
        if (c % sv != 0) return ZSemilinearSet::empty(1);
        return singleton(c / sv);
    }
    if (spec.is_vc()) {
        const VcSpec& vc = spec.vc();
        VcElt ge = std::get<VcElt>(g), tg = std::get<VcElt>(target);
        long long r = fin::order(vc.quotient, ge.q);
        VcElt gr = vcg::pow(vc, ge, r);  // (1, M), M != 0 since g has infinite order
        ZSemilinearSet out(1);
        for (long long s = 0; s < r; ++s) {
            VcElt gs = vcg::pow(vc, ge, s);
            if (gs.q != tg.q) continue;
            // (1, jM) * g^s = (q_s, eps(q_s) j M + m_s)
            long long num = tg.shift - gs.shift;
            long long den = vc.eps[gs.q] * gr.shift;
            if (num % den == 0) out.pieces.push_back(ZLinearSet({num / den * r + s}, {}));
        }
        return out;
    }
    // free product, g of infinite order
    Classification c = classify(spec, g);
    if (c.kind == Classification::Kind::EllipticInFactor) {
        // g = u gh u^{-1}; reduce to a discrete log in the factor
        GroupElement t = mul(spec, mul(spec, inv(spec, c.conjugator), target), c.conjugator);
        const auto& fac = spec.free_product().factors[*c.factor];
        const auto& syl = std::get<FreeElt>(t).syllables;
        GroupElement ft;
        if (syl.empty())
            ft = identity(fac);
        else if (syl.size() == 1 && syl[0].factor == *c.factor)
            ft = detail::from_leaf(syl[0].elt);
        else
            return ZSemilinearSet::empty(1);
        return solve_finitary(fac, inv(fac, ft), c.image);
    }
    // loxodromic: syllable-length discrete log with a direct check
    long long bound =
        static_cast<long long>(std::get<FreeElt>(target).syllables.size()) / 2 + 2;
    ZSemilinearSet out(1);
    for (long long x = -bound; x <= bound; ++x)
        if (pow(spec, g, x) == target) {
            out.pieces.push_back(ZLinearSet({x}, {}));
            break;  // infinite order: at most one exponent matches
        }
    return out;
}

// ---------------------------------------------------------------------------
// Elliptic reduction over free products (associated systems)
// ---------------------------------------------------------------------------

// One position of the expanded equation: either a pinned coefficient syllable
// (var < 0, exponent fixed to 1) or a variable-bearing factor element.
struct ExpandedTerm {
    std::size_t factor = 0;
    LeafElt elt;
    int var = -1;
};

struct EllipticExpansion {
    std::vector<ExpandedTerm> terms;
    std::vector<int> free_vars;  // variables whose base is the identity
};

// Conjugate every base into its factor, fold the conjugators into the
// coefficients, and split the resulting coefficients into syllables.
// Returns nothing if some base is loxodromic.
inline std::optional<EllipticExpansion> expand_elliptic(const ExponentialEquation& eq) {
    if (!eq.spec.is_free_product()) throw std::invalid_argument("expand_elliptic needs a free product");
    const std::size_t n = eq.arity();
    EllipticExpansion out;
    std::vector<GroupElement> conj(n, identity(eq.spec));  // h_i per variable position
    std::vector<std::optional<std::pair<std::size_t, LeafElt>>> image(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (is_identity(eq.spec, eq.terms[i].base)) {
            out.free_vars.push_back(static_cast<int>(i));
            continue;
        }
        Classification c = classify(eq.spec, eq.terms[i].base);
        if (c.kind == Classification::Kind::Loxodromic) return std::nullopt;
        conj[i] = c.conjugator;
        image[i] = {*c.factor, detail::to_leaf(c.image)};
    }
    // coefficient before variable i (cyclically folded): h_{prev}^{-1} a_i h_i,
    // with identity-base positions absorbing their a_i into the next coefficient
    GroupElement pending = identity(eq.spec);
    std::vector<std::size_t> var_pos;
    for (std::size_t i = 0; i < n; ++i)
        if (image[i]) var_pos.push_back(i);
    if (var_pos.empty()) {
        // no genuine bases: the equation is the constant  a_1 ... a_n = 1
        GroupElement w = identity(eq.spec);
        for (const auto& t : eq.terms) w = mul(eq.spec, w, t.coeff);
        for (const auto& syl : std::get<FreeElt>(w).syllables)
            out.terms.push_back({syl.factor, syl.elt, -1});
        return out;
    }
    GroupElement wrap = inv(eq.spec, conj[var_pos.back()]);  // cyclic fold of the last conjugator
    std::size_t vi = 0;
    GroupElement coeff = wrap;
    for (std::size_t i = 0; i < n; ++i) {
        coeff = mul(eq.spec, coeff, eq.terms[i].coeff);
        if (!image[i]) continue;  // identity base: its variable is free, a_i flows on
        coeff = mul(eq.spec, coeff, conj[i]);
        for (const auto& syl : std::get<FreeElt>(coeff).syllables)
            out.terms.push_back({syl.factor, syl.elt, -1});
        out.terms.push_back({image[i]->first, image[i]->second, static_cast<int>(i)});
        coeff = inv(eq.spec, conj[i]);
        ++vi;
    }
    // trailing coefficient (conj_last^{-1} * trailing a's * wrap^{-1}) is empty by
    // construction: the wrap was chosen so the cyclic product closes at 1 * ... * 1
    GroupElement tail = coeff;
    // anything left beyond conj_last^{-1} still has to be emitted
    tail = mul(eq.spec, tail, inv(eq.spec, wrap));
    for (const auto& syl : std::get<FreeElt>(tail).syllables)
        out.terms.push_back({syl.factor, syl.elt, -1});
    return out;
}

struct BlockEquation {
    std::size_t factor = 0;
    ExponentialEquation eq;        // over the factor backend
    std::vector<int> vars;         // global variable indices, ascending
};

struct AssociatedSystem {
    CatalanPermutation sigma;              // over the expanded term positions
    std::vector<GroupElement> connecting;  // all identity in the free-product case
    std::vector<BlockEquation> blocks;     // variable-bearing block equations
    std::vector<std::string> gaps;         // verified constant identities
    std::vector<int> free_vars;
};

namespace detail {

// Build the block equation (over the factor backend) for one block of
// positions; constants between variables fold into the coefficients, with the
// trailing run rotated to the front (u v = 1 iff v u = 1).
inline std::optional<BlockEquation> make_block_equation(const GroupSpec& spec,
                                                        const std::vector<ExpandedTerm>& terms,
                                                        const std::vector<int>& block,
                                                        const std::vector<std::string>& var_names,
                                                        std::vector<std::string>* gap_log) {
    const std::size_t lambda = terms[block[0] - 1].factor;
    const GroupSpec& fac = spec.free_product().factors[lambda];
    bool has_var = false;
    for (int pos : block)
        if (terms[pos - 1].var >= 0) has_var = true;
    if (!has_var) {
        LeafElt prod = leaf::identity(fac);
        for (int pos : block) prod = leaf::mul(fac, prod, terms[pos - 1].elt);
        if (!leaf::is_identity(fac, prod)) return std::nullopt;  // failed (**) identity: discard
        if (gap_log) {
            std::ostringstream msg;
            msg << "gap {";
            for (std::size_t i = 0; i < block.size(); ++i) msg << (i ? "," : "") << block[i];
            msg << "} = 1";
            gap_log->push_back(msg.str());
        }
        return BlockEquation{lambda, ExponentialEquation{fac, {}, {}}, {}};
    }
    BlockEquation be;
    be.factor = lambda;
    be.eq.spec = fac;
    LeafElt run = leaf::identity(fac);
    for (int pos : block) {
        const ExpandedTerm& t = terms[pos - 1];
        if (t.var < 0) {
            run = leaf::mul(fac, run, t.elt);
        } else {
            be.eq.terms.push_back({detail::from_leaf(run), detail::from_leaf(t.elt)});
            be.eq.vars.push_back(var_names[t.var]);
            be.vars.push_back(t.var);
            run = leaf::identity(fac);
        }
    }
    // rotate the trailing constant run to the front
    be.eq.terms.front().coeff =
        detail::from_leaf(leaf::mul(fac, run, detail::to_leaf(be.eq.terms.front().coeff)));
    return be;
}

}  // namespace detail

// Enumerate the surviving (sigma, b)-systems of an all-elliptic free-product
// equation.  Connecting elements are trivial: the free-product relative metric
// is infinite off the identity, so the finite balls degenerate to {1}.
template <class Callback>
void for_each_associated_system(const ExponentialEquation& eq, const Callback& cb) {
    auto exp = expand_elliptic(eq);
    if (!exp) throw std::invalid_argument("equation has a loxodromic base");
    const std::size_t N = exp->terms.size();
    if (N == 0) {
        AssociatedSystem sys;
        sys.sigma = CatalanPermutation{0, {}};
        sys.free_vars = exp->free_vars;
        cb(sys);
        return;
    }
    std::vector<int> positions(N);
    std::iota(positions.begin(), positions.end(), 1);
    auto partner_ok = [&](int first, int cand) {
        return exp->terms[first - 1].factor == exp->terms[cand - 1].factor;
    };
    auto block_ok = [&](const std::vector<int>& block) {
        bool has_var = false;
        for (int pos : block)
            if (exp->terms[pos - 1].var >= 0) has_var = true;
        if (has_var) return true;
        // all-pinned block: the product must already be the identity
        const GroupSpec& fac = eq.spec.free_product().factors[exp->terms[block[0] - 1].factor];
        LeafElt prod = leaf::identity(fac);
        for (int pos : block) prod = leaf::mul(fac, prod, exp->terms[pos - 1].elt);
        return leaf::is_identity(fac, prod);
    };
    enumerate_noncrossing_filtered(
        positions,
        [&](const std::vector<std::vector<int>>& blocks) {
            AssociatedSystem sys;
            NonCrossingPartition part;
            part.n = N;
            part.blocks = blocks;
            std::sort(part.blocks.begin(), part.blocks.end());
            sys.sigma = permutation_from_partition(part);
            sys.connecting.assign(N, identity(eq.spec));
            sys.free_vars = exp->free_vars;
            for (const auto& block : part.blocks) {
                auto be = detail::make_block_equation(eq.spec, exp->terms, block, eq.vars, &sys.gaps);
                if (!be) return true;  // failed gap identity: skip this system
                if (!be->vars.empty()) sys.blocks.push_back(std::move(*be));
            }
            return cb(sys);
        },
        block_ok, partner_ok);
}

inline std::vector<AssociatedSystem> reduce_elliptic(const ExponentialEquation& eq) {
    std::vector<AssociatedSystem> out;
    for_each_associated_system(eq, [&](const AssociatedSystem& s) {
        out.push_back(s);
        return true;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Solve results
// ---------------------------------------------------------------------------

struct DecompTerm {
    ZSemilinearSet lox;  // over the loxodromic coordinates, ascending
    ZSemilinearSet ell;  // over the elliptic coordinates, ascending
    bool operator==(const DecompTerm&) const = default;
};

struct ExactResult {
    ZSemilinearSet set;
    std::vector<DecompTerm> decomposition;
    std::vector<std::size_t> coord_perm;  // slot -> variable coordinate
};

struct EmpiricalResult {
    Box box;
    std::vector<Vec> box_solutions;
    ZSemilinearSet candidate;
    bool sampled_verified = false;
};

using SolveResult = std::variant<ExactResult, EmpiricalResult>;

inline bool is_exact(const SolveResult& r) { return std::holds_alternative<ExactResult>(r); }

// ---------------------------------------------------------------------------
// Progression fitting for the empirical mode
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Vec> lattice_points_in_box(const Vec& base, const std::vector<Vec>& periods,
                                              const Box& box, std::size_t cap = 200000) {
    std::vector<Vec> out;
    const std::size_t d = periods.size();
    Int span = 0;
    for (std::size_t i = 0; i < box.lo.size(); ++i) span = std::max(span, box.hi[i] - box.lo[i]);
    std::vector<Int> zmax(d, 0);
    for (std::size_t j = 0; j < d; ++j) {
        Int m = 0;
        for (Int v : periods[j]) m = std::max(m, std::llabs(v));
        zmax[j] = m == 0 ? 0 : span / m + 1;
    }
    Vec z(d);
    for (std::size_t j = 0; j < d; ++j) z[j] = -zmax[j];
    for (;;) {
        Vec p = base;
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t i = 0; i < p.size(); ++i) p[i] += z[j] * periods[j][i];
        bool inside = true;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] < box.lo[i] || p[i] > box.hi[i]) inside = false;
        if (inside) {
            out.push_back(std::move(p));
            if (out.size() > cap) return out;
        }
        std::size_t j = 0;
        while (j < d && z[j] == zmax[j]) z[j] = -zmax[j], ++j;
        if (j == d) break;
        ++z[j];
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace detail

// Greedy affine-lattice fitting: cover the box solutions by pieces whose box
// restriction consists of solutions only.  Deterministic: points are processed
// in lexicographic order; at most n periods per piece.
inline ZSemilinearSet detect_progressions_set(std::vector<Vec> points, const Box& box) {
    const std::size_t n = box.lo.size();
    ZSemilinearSet out(n);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    std::set<Vec> all(points.begin(), points.end());
    std::set<Vec> remaining = all;
    while (!remaining.empty()) {
        Vec p0 = *remaining.begin();
        std::vector<Vec> periods;
        std::vector<Vec> covered{p0};
        bool improved = true;
        while (improved && periods.size() < n) {
            improved = false;
            std::vector<std::pair<std::pair<Int, Vec>, Vec>> cands;
            for (const auto& p : remaining) {
                if (p == p0) continue;
                Vec d(n);
                Int norm = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    d[i] = p[i] - p0[i];
                    norm = std::max(norm, std::llabs(d[i]));
                }
                cands.push_back({{norm, d}, d});
            }
            std::sort(cands.begin(), cands.end());
            for (const auto& [key, d] : cands) {
                auto test = periods;
                test.push_back(d);
                auto pts = detail::lattice_points_in_box(p0, test, box);
                bool ok = pts.size() > covered.size();
                for (const auto& q : pts)
                    if (!all.count(q)) ok = false;
                if (ok) {
                    periods = test;
                    covered = pts;
                    improved = true;
                    break;
                }
            }
        }
        out.pieces.push_back(ZLinearSet(p0, periods));
        for (const auto& q : covered) remaining.erase(q);
    }
    return out;
}

inline std::pair<ZSemilinearSet, bool> detect_progressions(const ExponentialEquation& eq,
                                                           const std::vector<Vec>& points, const Box& box) {
    ZSemilinearSet candidate = detect_progressions_set(points, box);
    // extrapolation sampling: parameters up to 3x the box radius
    Int radius = 0;
    for (std::size_t i = 0; i < box.lo.size(); ++i)
        radius = std::max({radius, std::llabs(box.lo[i]), std::llabs(box.hi[i])});
    Int reach = 3 * std::max<Int>(radius, 1);
    bool verified = true;
    for (const auto& piece : candidate.pieces) {
        const std::size_t d = piece.periods.size();
        std::vector<Vec> samples;
        if (d == 0) {
            samples.push_back(Vec{});
        } else {
            for (std::size_t j = 0; j < d && samples.size() < 64; ++j)
                for (Int v : {-reach, -reach / 2, Int(1), reach / 2, reach}) {
                    Vec z(d, 0);
                    z[j] = v;
                    samples.push_back(z);
                }
        }
        for (const auto& z : samples) {
            Vec p = piece.base;
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t i = 0; i < p.size(); ++i) p[i] += z[j] * piece.periods[j][i];
            if (!evaluate(eq, p)) {
                verified = false;
                break;
            }
        }
        if (!verified) break;
    }
    return {candidate, verified};
}

// ---------------------------------------------------------------------------
// Full dispatcher
// ---------------------------------------------------------------------------

namespace detail {

// Reorder helper: current coordinate order `cur` -> ascending order of `cur`.
inline ZSemilinearSet sort_coordinates(const ZSemilinearSet& s, const std::vector<int>& cur) {
    std::vector<int> sorted = cur;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> perm(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i)
        perm[i] = std::lower_bound(sorted.begin(), sorted.end(), cur[i]) - sorted.begin();
    return reorder(s, perm);
}

inline bool factor_is_infinite(const GroupSpec& fac) { return fac.is_integers() || fac.is_vc(); }

// Exact path for loxodromic equations: all bases share a primitive root up to
// computable conjugation and the folded coefficients are powers of that root.
inline std::optional<ExactResult> try_loxodromic_exact(const ExponentialEquation& eq) {
    const auto& fps = eq.spec.free_product();
    const std::size_t n = eq.arity();
    std::vector<int> lox, freev;
    for (std::size_t i = 0; i < n; ++i) {
        if (is_identity(eq.spec, eq.terms[i].base)) {
            freev.push_back(static_cast<int>(i));
            continue;
        }
        Classification c = classify(eq.spec, eq.terms[i].base);
        if (c.kind != Classification::Kind::Loxodromic) return std::nullopt;
        lox.push_back(static_cast<int>(i));
    }
    if (lox.empty()) return std::nullopt;
    // reference primitive-root core
    auto [r0, k0] = primitive_root(eq.spec, eq.terms[lox[0]].base);
    auto rf = fp::cyclic_normal_form(fps, std::get<FreeElt>(r0));
    const std::vector<Syllable> ref = rf.core.syllables;
    FreeElt ref_elt{ref};
    auto ref_inv = fp::inv(fps, ref_elt);
    const std::size_t L = ref.size();
    // per loxodromic position: g_i = t_i * ref^{e_i k_i} * t_i^{-1}
    std::vector<GroupElement> t(n, identity(eq.spec));
    std::vector<long long> mult(n, 0);
    for (int i : lox) {
        auto [ri, ki] = primitive_root(eq.spec, eq.terms[i].base);
        auto rfi = fp::cyclic_normal_form(fps, std::get<FreeElt>(ri));
        const auto& core_i = rfi.core.syllables;
        if (core_i.size() != L) return std::nullopt;
        bool found = false;
        for (int sgn : {1, -1}) {
            const auto& pattern = sgn == 1 ? ref_elt.syllables : ref_inv.syllables;
            for (std::size_t rot = 0; rot < L && !found; ++rot) {
                bool match = true;
                for (std::size_t j = 0; j < L && match; ++j)
                    if (!(core_i[j] == pattern[(j + rot) % L])) match = false;
                if (match) {
                    // rotated core = prefix^{-1} pattern prefix, prefix = first `rot` syllables
                    FreeElt prefix;
                    prefix.syllables.assign(pattern.begin(), pattern.begin() + rot);
                    GroupElement ti = fp::mul(fps, rfi.conjugator, fp::inv(fps, prefix));
                    t[i] = ti;
                    mult[i] = sgn * ki;
                    found = true;
                }
            }
            if (found) break;
        }
        if (!found) return std::nullopt;
    }
    // fold coefficients: d_i = t_{prev}^{-1} a_i t_i must be powers of the root
    GroupElement wrap = inv(eq.spec, t[lox.back()]);
    GroupElement run = wrap;
    Int rhs = 0;
    std::vector<Vec> cols;
    std::vector<int> cur;
    auto root_power_of = [&](const GroupElement& w) -> std::optional<long long> {
        const auto& syl = std::get<FreeElt>(w).syllables;
        if (syl.empty()) return 0;
        // cyclically reduced cores of length >= 2 never cancel when powered
        long long m = static_cast<long long>(syl.size()) / static_cast<long long>(L);
        for (long long cand : {m, -m})
            if (fp::pow(fps, ref_elt, cand) == std::get<FreeElt>(w)) return cand;
        return std::nullopt;
    };
    for (std::size_t i = 0; i < n; ++i) {
        run = mul(eq.spec, run, eq.terms[i].coeff);
        if (is_identity(eq.spec, eq.terms[i].base)) continue;
        run = mul(eq.spec, run, t[i]);
        auto m = root_power_of(run);
        if (!m) return std::nullopt;
        rhs -= *m;
        cols.push_back({mult[i]});
        cur.push_back(static_cast<int>(i));
        run = inv(eq.spec, t[i]);
    }
    GroupElement tail = mul(eq.spec, run, inv(eq.spec, wrap));
    auto mtail = root_power_of(tail);
    if (!mtail) return std::nullopt;
    rhs -= *mtail;
    auto sol = intlin::solve(cols, {rhs});
    ExactResult res;
    res.set = ZSemilinearSet::empty(n);
    // slots: loxodromic coordinates ascending, then free ones
    res.coord_perm.clear();
    for (int i : lox) res.coord_perm.push_back(static_cast<std::size_t>(i));
    for (int i : freev) res.coord_perm.push_back(static_cast<std::size_t>(i));
    if (!sol) return res;  // provably empty
    ZSemilinearSet nset(lox.size());
    {
        std::vector<Vec> periods;
        for (auto& kvec : sol->kernel) periods.push_back(kvec);
        nset.pieces.push_back(ZLinearSet(sol->particular, periods));
        nset = sort_coordinates(nset, cur);
    }
    ZSemilinearSet mset = ZSemilinearSet::full(freev.size());
    res.decomposition.push_back({nset, mset});
    res.set = reorder(concat(nset, mset), res.coord_perm);
    return res;
}

}  // namespace detail

struct SolveOptions {
    Box empirical_box;  // used when the exact routes do not apply
    bool have_box = false;
    unsigned long long volume_cap = 10'000'000ULL;
};

inline SolveResult solve(const ExponentialEquation& eq, const SolveOptions& opts = {}) {
    const std::size_t n = eq.arity();
    if (!eq.spec.is_free_product()) {
        ExactResult res;
        res.set = solve_leaf(eq);
        res.coord_perm.resize(n);
        std::iota(res.coord_perm.begin(), res.coord_perm.end(), 0);
        if (!res.set.empty_set()) {
            // leaf groups are their own peripheral subgroup: everything elliptic
            ZSemilinearSet none(0);
            none.pieces.push_back(ZLinearSet(Vec{}, {}));
            res.decomposition.push_back({none, res.set});
        }
        return res;
    }

    // all-elliptic route through associated systems
    bool all_elliptic = true;
    for (const auto& t : eq.terms) {
        if (is_identity(eq.spec, t.base)) continue;
        if (classify(eq.spec, t.base).kind == Classification::Kind::Loxodromic) all_elliptic = false;
    }
    if (all_elliptic) {
        const auto& fps = eq.spec.free_product();
        ExactResult res;
        res.set = ZSemilinearSet::empty(n);
        // global loxodromic/elliptic coordinate split: variables sitting in an
        // infinite factor go to the N side, finite factors and free variables
        // to the M side
        std::vector<int> lvars, evars;
        std::vector<std::size_t> var_factor(n, SIZE_MAX);
        for (std::size_t i = 0; i < n; ++i) {
            if (is_identity(eq.spec, eq.terms[i].base)) {
                evars.push_back(static_cast<int>(i));
                continue;
            }
            Classification c = classify(eq.spec, eq.terms[i].base);
            var_factor[i] = *c.factor;
            if (detail::factor_is_infinite(fps.factors[*c.factor]))
                lvars.push_back(static_cast<int>(i));
            else
                evars.push_back(static_cast<int>(i));
        }
        for (int i : lvars) res.coord_perm.push_back(static_cast<std::size_t>(i));
        for (int i : evars) res.coord_perm.push_back(static_cast<std::size_t>(i));
        std::set<std::string> seen;
        for_each_associated_system(eq, [&](const AssociatedSystem& sys) {
            ZSemilinearSet nset(0), mset(0);
            nset.pieces.push_back(ZLinearSet(Vec{}, {}));
            mset.pieces.push_back(ZLinearSet(Vec{}, {}));
            std::vector<int> ncur, mcur;
            for (const auto& blk : sys.blocks) {
                ZSemilinearSet bs = solve_leaf(blk.eq);
                if (bs.empty_set()) return true;  // system contributes nothing
                if (detail::factor_is_infinite(fps.factors[blk.factor])) {
                    nset = concat(nset, bs);
                    ncur.insert(ncur.end(), blk.vars.begin(), blk.vars.end());
                } else {
                    mset = concat(mset, bs);
                    mcur.insert(mcur.end(), blk.vars.begin(), blk.vars.end());
                }
            }
            for (int fv : sys.free_vars) {
                mset = concat(mset, ZSemilinearSet::full(1));
                mcur.push_back(fv);
            }
            nset = detail::sort_coordinates(nset, ncur);
            mset = detail::sort_coordinates(mset, mcur);
            std::string key = render(nset) + "|" + render(mset);
            if (!seen.insert(key).second) return true;
            res.decomposition.push_back({nset, mset});
            ZSemilinearSet piece = reorder(concat(nset, mset), res.coord_perm);
            for (auto& p : piece.pieces) {
                bool dup = false;
                for (const auto& q : res.set.pieces)
                    if (p == q) dup = true;
                if (!dup) res.set.pieces.push_back(std::move(p));
            }
            return true;
        });
        return res;
    }

    if (auto exact = detail::try_loxodromic_exact(eq)) return *exact;

    // empirical fallback
    Box box = opts.have_box ? opts.empirical_box : Box::cube(n, 5);
    EmpiricalResult emp;
    emp.box = box;
    emp.box_solutions = solve_bounded(eq, box, opts.volume_cap);
    auto [cand, ok] = detect_progressions(eq, emp.box_solutions, box);
    emp.candidate = std::move(cand);
    emp.sampled_verified = ok;
    return emp;
}

// ---------------------------------------------------------------------------
// Certificates (non-crossing cancellation witnesses)
// ---------------------------------------------------------------------------

struct Certificate {
    Vec solution;
    NonCrossingPartition pairing;  // over variable positions 1..n
    std::vector<std::string> block_checks;
    std::vector<std::string> gap_checks;
};

inline Certificate extract_certificate(const ExponentialEquation& eq, const Vec& solution) {
    if (!eq.spec.is_free_product())
        throw std::invalid_argument("certificates are defined over free products");
    if (!evaluate(eq, solution)) throw std::invalid_argument("not a solution");
    const std::size_t n = eq.arity();
    const auto& fps = eq.spec.free_product();

    // disjoint-set over variable positions
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

    struct Entry {
        std::size_t factor;
        LeafElt elt;
        std::vector<int> tags;
    };
    std::vector<Entry> stack;
    Certificate cert;
    cert.solution = solution;

    auto record = [&](const std::vector<int>& tags) {
        std::ostringstream msg;
        if (tags.empty()) {
            cert.gap_checks.push_back("coefficient run cancels to 1");
            return;
        }
        msg << "block {";
        std::vector<int> t = tags;
        std::sort(t.begin(), t.end());
        for (std::size_t i = 0; i < t.size(); ++i) msg << (i ? "," : "") << (t[i] + 1);
        msg << "} cancels to 1";
        cert.block_checks.push_back(msg.str());
    };

    auto push = [&](Entry e) {
        for (;;) {
            if (stack.empty() || stack.back().factor != e.factor) {
                stack.push_back(std::move(e));
                return;
            }
            Entry top = std::move(stack.back());
            stack.pop_back();
            const GroupSpec& fac = fps.factors[e.factor];
            LeafElt merged = leaf::mul(fac, top.elt, e.elt);
            std::vector<int> tags = top.tags;
            tags.insert(tags.end(), e.tags.begin(), e.tags.end());
            for (std::size_t i = 1; i < tags.size(); ++i) unite(tags[0], tags[i]);
            if (leaf::is_identity(fac, merged)) {
                record(tags);
                return;
            }
            e = Entry{e.factor, merged, std::move(tags)};
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& syl : std::get<FreeElt>(eq.terms[i].coeff).syllables)
            push({syl.factor, syl.elt, {}});
        GroupElement gp = pow(eq.spec, eq.terms[i].base, solution[i]);
        for (const auto& syl : std::get<FreeElt>(gp).syllables)
            push({syl.factor, syl.elt, {static_cast<int>(i)}});
    }
    if (!stack.empty()) throw std::logic_error("verified solution failed to cancel");

    std::map<int, std::vector<int>> classes;
    for (std::size_t i = 0; i < n; ++i) classes[find(static_cast<int>(i))].push_back(static_cast<int>(i) + 1);
    cert.pairing.n = n;
    for (auto& [root, members] : classes) cert.pairing.blocks.push_back(members);
    std::sort(cert.pairing.blocks.begin(), cert.pairing.blocks.end());
    return cert;
}

// ---------------------------------------------------------------------------
// Generalized (in)equations
// ---------------------------------------------------------------------------

struct GeneralizedAtom {
    ExponentialEquation eq;
    std::vector<std::size_t> var_map;  // equation variable j -> shared tuple index
    bool negated = false;
};

struct GeneralizedSystem {
    std::vector<GeneralizedAtom> atoms;
};

struct GeneralizedProblem {
    GroupSpec spec;
    std::vector<std::string> vars;
    std::vector<GeneralizedSystem> systems;  // disjunction of conjunctions
};

struct GeneralizedEmpirical {
    Box box;
    std::vector<Vec> points;
};

using GeneralizedResult = std::variant<DifferenceNormalForm, GeneralizedEmpirical>;

inline bool evaluate_atom(const GeneralizedAtom& a, const Vec& shared_point) {
    Vec p(a.eq.arity());
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = shared_point[a.var_map[j]];
    bool sat = evaluate(a.eq, p);
    return a.negated ? !sat : sat;
}

inline bool evaluate_generalized(const GeneralizedProblem& gp, const Vec& point) {
    for (const auto& sys : gp.systems) {
        bool all = true;
        for (const auto& a : sys.atoms)
            if (!evaluate_atom(a, point)) all = false;
        if (all) return true;
    }
    return false;
}

// Extend an atom's solution set to the shared variable tuple: unused shared
// coordinates are free.
inline ZSemilinearSet extend_to_tuple(const ZSemilinearSet& s, const std::vector<std::size_t>& var_map,
                                      std::size_t total) {
    const std::size_t m = var_map.size();
    ZSemilinearSet cur = s;
    // slots mapped to the same shared variable: equate with the first
    // occurrence (diagonal intersection), then project the duplicate away
    std::vector<std::size_t> keep;
    std::vector<std::size_t> first(total, static_cast<std::size_t>(-1));
    for (std::size_t j = 0; j < m; ++j) {
        if (first[var_map[j]] == static_cast<std::size_t>(-1)) {
            first[var_map[j]] = j;
            keep.push_back(j);
            continue;
        }
        std::size_t j0 = first[var_map[j]];
        std::vector<Vec> periods;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == j || i == j0) continue;
            Vec e(m, 0);
            e[i] = 1;
            periods.push_back(std::move(e));
        }
        Vec diag(m, 0);
        diag[j] = diag[j0] = 1;
        periods.push_back(std::move(diag));
        ZSemilinearSet d(m);
        d.pieces.push_back(ZLinearSet(Vec(m, 0), std::move(periods)));
        cur = intersect(cur, d);
    }
    if (keep.size() != m) {
        ZSemilinearSet proj(keep.size());
        for (const auto& piece : cur.pieces) {
            Vec base(keep.size());
            for (std::size_t i = 0; i < keep.size(); ++i) base[i] = piece.base[keep[i]];
            std::vector<Vec> periods(piece.periods.size());
            for (std::size_t p = 0; p < periods.size(); ++p) {
                periods[p].resize(keep.size());
                for (std::size_t i = 0; i < keep.size(); ++i)
                    periods[p][i] = piece.periods[p][keep[i]];
            }
            proj.pieces.push_back(ZLinearSet(std::move(base), std::move(periods)));
        }
        cur = std::move(proj);
    }
    const std::size_t u = keep.size();
    ZSemilinearSet ext = concat(cur, ZSemilinearSet::full(total - u));
    std::vector<std::size_t> perm(total);
    std::vector<bool> used(total, false);
    for (std::size_t i = 0; i < u; ++i) {
        perm[i] = var_map[keep[i]];
        used[var_map[keep[i]]] = true;
    }
    std::size_t slot = u;
    for (std::size_t i = 0; i < total; ++i)
        if (!used[i]) perm[slot++] = i;
    return reorder(ext, perm);
}

inline GeneralizedResult solve_generalized(const GeneralizedProblem& gp, const SolveOptions& opts = {}) {
    const std::size_t N = gp.vars.size();
    DifferenceNormalForm dnf;
    dnf.dimension = N;
    for (const auto& sys : gp.systems) {
        ZSemilinearSet pos = ZSemilinearSet::full(N);
        ZSemilinearSet neg = ZSemilinearSet::empty(N);
        for (const auto& atom : sys.atoms) {
            SolveResult r = solve(atom.eq, opts);
            if (!is_exact(r)) {
                // any empirical atom downgrades the whole problem
                Box box = opts.have_box ? opts.empirical_box : Box::cube(N, 4);
                GeneralizedEmpirical emp;
                emp.box = box;
                Vec p = box.lo;
                for (;;) {
                    if (evaluate_generalized(gp, p)) emp.points.push_back(p);
                    std::size_t j = 0;
                    while (j < N && p[j] == box.hi[j]) p[j] = box.lo[j], ++j;
                    if (j == N) break;
                    ++p[j];
                }
                return emp;
            }
            ZSemilinearSet s = extend_to_tuple(std::get<ExactResult>(r).set, atom.var_map, N);
            if (atom.negated)
                neg = set_union(neg, s);
            else
                pos = intersect(pos, s);
        }
        dnf.terms.push_back({std::move(pos), std::move(neg)});
    }
    return dnf;
}

}  // namespace expeq

#endif
