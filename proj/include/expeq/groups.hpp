#ifndef EXPEQ_GROUPS_HPP
#define EXPEQ_GROUPS_HPP

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace expeq {

// ---------------------------------------------------------------------------
// Group backends
// ---------------------------------------------------------------------------

struct FiniteSpec {
    std::vector<std::vector<int>> table;  // table[a][b] = a*b
    int identity = 0;
    std::vector<std::string> names;  // element names; defaults e0, e1, ...

    std::size_t size() const { return table.size(); }
};

struct IntegersSpec {
    std::string gen = "h";
};

// Extension of Z by a finite quotient Q: elements t_q h^m with
// (q1,m1)*(q2,m2) = (q1 q2, c(q1,q2) + eps(q2) m1 + m2).
struct VcSpec {
    FiniteSpec quotient;
    std::vector<int> eps;                        // eps[q] in {+1,-1}
    std::vector<std::vector<long long>> cocycle;  // cocycle[q1][q2]
    std::string hgen = "h";
};

struct GroupSpec;

struct FreeProductSpec {
    std::vector<GroupSpec> factors;  // each factor is Finite, Integers, or Vc
};

struct GroupSpec {
    std::variant<FiniteSpec, IntegersSpec, VcSpec, FreeProductSpec> data;

    bool is_finite() const { return std::holds_alternative<FiniteSpec>(data); }
    bool is_integers() const { return std::holds_alternative<IntegersSpec>(data); }
    bool is_vc() const { return std::holds_alternative<VcSpec>(data); }
    bool is_free_product() const { return std::holds_alternative<FreeProductSpec>(data); }

    const FiniteSpec& finite() const { return std::get<FiniteSpec>(data); }
    const IntegersSpec& integers() const { return std::get<IntegersSpec>(data); }
    const VcSpec& vc() const { return std::get<VcSpec>(data); }
    const FreeProductSpec& free_product() const { return std::get<FreeProductSpec>(data); }
};

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

struct FiniteElt {
    int index = 0;
    bool operator==(const FiniteElt&) const = default;
};

struct IntElt {
    long long power = 0;  // the element h^power
    bool operator==(const IntElt&) const = default;
};

struct VcElt {
    int q = 0;
    long long shift = 0;  // the element t_q h^shift
    bool operator==(const VcElt&) const = default;
};

using LeafElt = std::variant<FiniteElt, IntElt, VcElt>;

struct Syllable {
    std::size_t factor = 0;
    LeafElt elt;
    bool operator==(const Syllable&) const = default;
};

// Normal form: no identity syllables, adjacent syllables in distinct factors.
struct FreeElt {
    std::vector<Syllable> syllables;
    bool operator==(const FreeElt&) const = default;
};

using GroupElement = std::variant<FiniteElt, IntElt, VcElt, FreeElt>;

inline bool eq(const GroupElement& a, const GroupElement& b) { return a == b; }

// ---------------------------------------------------------------------------
// Finite group helpers
// ---------------------------------------------------------------------------

namespace fin {

inline int mul(const FiniteSpec& s, int a, int b) { return s.table[a][b]; }

inline int inv(const FiniteSpec& s, int a) {
    for (int b = 0; b < static_cast<int>(s.size()); ++b)
        if (mul(s, a, b) == s.identity) return b;
    throw std::invalid_argument("no inverse in finite table");
}

inline long long order(const FiniteSpec& s, int a) {
    long long k = 1;
    int x = a;
    while (x != s.identity) {
        x = mul(s, x, a);
        ++k;
    }
    return k;
}

inline int pow(const FiniteSpec& s, int a, long long k) {
    long long d = order(s, a);
    k %= d;
    if (k < 0) k += d;
    int x = s.identity;
    for (long long i = 0; i < k; ++i) x = mul(s, x, a);
    return x;
}

}  // namespace fin

// ---------------------------------------------------------------------------
// Virtually cyclic helpers
// ---------------------------------------------------------------------------

namespace vcg {

inline VcElt mul(const VcSpec& s, const VcElt& a, const VcElt& b) {
    return {fin::mul(s.quotient, a.q, b.q),
            s.cocycle[a.q][b.q] + s.eps[b.q] * a.shift + b.shift};
}

inline VcElt identity(const VcSpec& s) { return {s.quotient.identity, 0}; }

inline VcElt inv(const VcSpec& s, const VcElt& a) {
    int qi = fin::inv(s.quotient, a.q);
    return {qi, -s.cocycle[a.q][qi] - s.eps[qi] * a.shift};
}

inline VcElt pow(const VcSpec& s, const VcElt& a, long long k) {
    // (q,m)^r lands in H = {(1,m)} for r = order of q; then (1,M)^j = (1,jM)
    long long r = fin::order(s.quotient, a.q);
    VcElt step = identity(s);
    for (long long i = 0; i < r; ++i) step = mul(s, step, a);
    long long j = k >= 0 ? k / r : -((-k + r - 1) / r);
    long long rem = k - j * r;
    VcElt x{s.quotient.identity, j * step.shift};
    for (long long i = 0; i < rem; ++i) x = mul(s, x, a);
    return x;
}

inline std::optional<long long> order(const VcSpec& s, const VcElt& a) {
    long long r = fin::order(s.quotient, a.q);
    VcElt x = identity(s);
    for (long long i = 0; i < r; ++i) x = mul(s, x, a);
    if (x.shift == 0) return r;
    return std::nullopt;  // infinite
}

}  // namespace vcg

// ---------------------------------------------------------------------------
// Leaf dispatch
// ---------------------------------------------------------------------------

namespace leaf {

inline LeafElt identity(const GroupSpec& s) {
    if (s.is_finite()) return FiniteElt{s.finite().identity};
    if (s.is_integers()) return IntElt{0};
    if (s.is_vc()) return vcg::identity(s.vc());
    throw std::invalid_argument("leaf identity on free product");
}

inline bool is_identity(const GroupSpec& s, const LeafElt& a) { return a == identity(s); }

inline LeafElt mul(const GroupSpec& s, const LeafElt& a, const LeafElt& b) {
    if (s.is_finite()) return FiniteElt{fin::mul(s.finite(), std::get<FiniteElt>(a).index, std::get<FiniteElt>(b).index)};
    if (s.is_integers()) return IntElt{std::get<IntElt>(a).power + std::get<IntElt>(b).power};
    return vcg::mul(s.vc(), std::get<VcElt>(a), std::get<VcElt>(b));
}

inline LeafElt inv(const GroupSpec& s, const LeafElt& a) {
    if (s.is_finite()) return FiniteElt{fin::inv(s.finite(), std::get<FiniteElt>(a).index)};
    if (s.is_integers()) return IntElt{-std::get<IntElt>(a).power};
    return vcg::inv(s.vc(), std::get<VcElt>(a));
}

inline LeafElt pow(const GroupSpec& s, const LeafElt& a, long long k) {
    if (s.is_finite()) return FiniteElt{fin::pow(s.finite(), std::get<FiniteElt>(a).index, k)};
    if (s.is_integers()) return IntElt{std::get<IntElt>(a).power * k};
    return vcg::pow(s.vc(), std::get<VcElt>(a), k);
}

inline std::optional<long long> order(const GroupSpec& s, const LeafElt& a) {
    if (s.is_finite()) return fin::order(s.finite(), std::get<FiniteElt>(a).index);
    if (s.is_integers()) return std::get<IntElt>(a).power == 0 ? std::optional<long long>(1) : std::nullopt;
    return vcg::order(s.vc(), std::get<VcElt>(a));
}

}  // namespace leaf

// ---------------------------------------------------------------------------
// Free product normal-form arithmetic
// ---------------------------------------------------------------------------

namespace fp {

inline void append_reduced(const FreeProductSpec& s, std::vector<Syllable>& acc, const Syllable& syl) {
    const GroupSpec& fac = s.factors[syl.factor];
    if (leaf::is_identity(fac, syl.elt)) return;
    if (!acc.empty() && acc.back().factor == syl.factor) {
        LeafElt m = leaf::mul(fac, acc.back().elt, syl.elt);
        acc.pop_back();
        if (!leaf::is_identity(fac, m)) acc.push_back({syl.factor, m});
        return;
    }
    acc.push_back(syl);
}

inline FreeElt mul(const FreeProductSpec& s, const FreeElt& a, const FreeElt& b) {
    FreeElt r = a;
    std::size_t i = 0;
    // cancellation can cascade back through r
    for (; i < b.syllables.size(); ++i) {
        const Syllable& syl = b.syllables[i];
        if (!r.syllables.empty() && r.syllables.back().factor == syl.factor) {
            append_reduced(s, r.syllables, syl);
        } else {
            // the remainder of b is already reduced against itself
            r.syllables.insert(r.syllables.end(), b.syllables.begin() + i, b.syllables.end());
            return r;
        }
    }
    return r;
}

inline FreeElt inv(const FreeProductSpec& s, const FreeElt& a) {
    FreeElt r;
    for (auto it = a.syllables.rbegin(); it != a.syllables.rend(); ++it)
        r.syllables.push_back({it->factor, leaf::inv(s.factors[it->factor], it->elt)});
    return r;
}

// g = conjugator * core * conjugator^{-1}; core cyclically reduced.
struct CyclicForm {
    FreeElt conjugator;
    FreeElt core;
};

inline CyclicForm cyclic_normal_form(const FreeProductSpec& s, const FreeElt& g) {
    CyclicForm f;
    f.core = g;
    auto& w = f.core.syllables;
    while (w.size() >= 2 && w.front().factor == w.back().factor) {
        Syllable head = w.front();
        f.conjugator.syllables.push_back(head);
        w.erase(w.begin());
        const GroupSpec& fac = s.factors[head.factor];
        LeafElt m = leaf::mul(fac, w.back().elt, head.elt);
        w.pop_back();
        if (!leaf::is_identity(fac, m)) {
            w.push_back({head.factor, m});
            break;  // first and last now in distinct factors (or size 1)
        }
    }
    return f;
}

inline FreeElt pow(const FreeProductSpec& s, const FreeElt& a, long long k) {
    if (k == 0 || a.syllables.empty()) return FreeElt{};
    CyclicForm f = cyclic_normal_form(s, a);
    FreeElt core = k > 0 ? f.core : inv(s, f.core);
    long long reps = k > 0 ? k : -k;
    FreeElt body;
    if (core.syllables.size() == 1) {
        const Syllable& syl = core.syllables[0];
        LeafElt p = leaf::pow(s.factors[syl.factor], syl.elt, reps);
        if (!leaf::is_identity(s.factors[syl.factor], p)) body.syllables.push_back({syl.factor, p});
    } else {
        body.syllables.reserve(core.syllables.size() * reps);
        for (long long i = 0; i < reps; ++i)
            body.syllables.insert(body.syllables.end(), core.syllables.begin(), core.syllables.end());
    }
    return mul(s, mul(s, f.conjugator, body), inv(s, f.conjugator));
}

}  // namespace fp

// ---------------------------------------------------------------------------
// Uniform element operations
// ---------------------------------------------------------------------------

inline GroupElement identity(const GroupSpec& s) {
    if (s.is_free_product()) return FreeElt{};
    LeafElt e = leaf::identity(s);
    return std::visit([](auto v) -> GroupElement { return v; }, e);
}

inline bool is_identity(const GroupSpec& s, const GroupElement& g) { return g == identity(s); }

namespace detail {
inline LeafElt to_leaf(const GroupElement& g) {
    if (auto* f = std::get_if<FiniteElt>(&g)) return *f;
    if (auto* i = std::get_if<IntElt>(&g)) return *i;
    if (auto* v = std::get_if<VcElt>(&g)) return *v;
    throw std::invalid_argument("free-product element where a leaf element was expected");
}
inline GroupElement from_leaf(const LeafElt& e) {
    return std::visit([](auto v) -> GroupElement { return v; }, e);
}
}  // namespace detail

inline GroupElement mul(const GroupSpec& s, const GroupElement& a, const GroupElement& b) {
    if (s.is_free_product())
        return fp::mul(s.free_product(), std::get<FreeElt>(a), std::get<FreeElt>(b));
    return detail::from_leaf(leaf::mul(s, detail::to_leaf(a), detail::to_leaf(b)));
}

inline GroupElement inv(const GroupSpec& s, const GroupElement& a) {
    if (s.is_free_product()) return fp::inv(s.free_product(), std::get<FreeElt>(a));
    return detail::from_leaf(leaf::inv(s, detail::to_leaf(a)));
}

inline GroupElement pow(const GroupSpec& s, const GroupElement& a, long long k) {
    if (s.is_free_product()) return fp::pow(s.free_product(), std::get<FreeElt>(a), k);
    return detail::from_leaf(leaf::pow(s, detail::to_leaf(a), k));
}

// Least k > 0 with g^k = 1, or nullopt for infinite order.
inline std::optional<long long> order(const GroupSpec& s, const GroupElement& g);

// g = conjugator * core * conjugator^{-1} with cyclically reduced core.
struct CyclicForm {
    GroupElement conjugator;
    GroupElement core;
};

inline CyclicForm cyclic_normal_form(const GroupSpec& s, const GroupElement& g) {
    if (!s.is_free_product()) throw std::invalid_argument("cyclic_normal_form needs a free product");
    auto f = fp::cyclic_normal_form(s.free_product(), std::get<FreeElt>(g));
    return {f.conjugator, f.core};
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

struct Classification {
    enum class Kind { EllipticInFactor, Torsion, Loxodromic } kind;
    std::optional<std::size_t> factor;      // set for free-product elliptic/torsion
    GroupElement conjugator;                // ambient: conj^{-1} g conj = embedded image
    GroupElement image;                     // leaf element of the factor (or g itself for leaves)
    std::optional<long long> torsion_order;  // set for Torsion
};

inline Classification classify(const GroupSpec& s, const GroupElement& g) {
    Classification c{Classification::Kind::EllipticInFactor, std::nullopt, identity(s), g, std::nullopt};
    if (!s.is_free_product()) {
        auto d = leaf::order(s, detail::to_leaf(g));
        if (d) {
            c.kind = Classification::Kind::Torsion;
            c.torsion_order = *d;
        }
        return c;
    }
    const auto& fps = s.free_product();
    const auto& w = std::get<FreeElt>(g).syllables;
    if (w.empty()) {
        c.kind = Classification::Kind::Torsion;
        c.torsion_order = 1;
        return c;
    }
    auto f = fp::cyclic_normal_form(fps, std::get<FreeElt>(g));
    if (f.core.syllables.size() >= 2) {
        c.kind = Classification::Kind::Loxodromic;
        return c;
    }
    const Syllable& syl = f.core.syllables[0];
    c.factor = syl.factor;
    c.conjugator = f.conjugator;
    c.image = detail::from_leaf(syl.elt);
    auto d = leaf::order(fps.factors[syl.factor], syl.elt);
    if (d) {
        c.kind = Classification::Kind::Torsion;
        c.torsion_order = *d;
    }
    return c;
}

inline std::optional<long long> order(const GroupSpec& s, const GroupElement& g) {
    if (!s.is_free_product()) return leaf::order(s, detail::to_leaf(g));
    Classification c = classify(s, g);
    if (c.kind == Classification::Kind::Loxodromic) return std::nullopt;
    if (c.torsion_order) return *c.torsion_order;
    return std::nullopt;
}

// Primitive root of a loxodromic free-product element: g = r^k, r not a
// proper power.  The cyclically reduced core is tested for syllable-exact
// periodicity; no shorter period can exist in a free product.
inline std::pair<GroupElement, long long> primitive_root(const GroupSpec& s, const GroupElement& g) {
    Classification c = classify(s, g);
    if (c.kind != Classification::Kind::Loxodromic)
        throw std::invalid_argument("primitive_root: element is not loxodromic");
    const auto& fps = s.free_product();
    auto f = fp::cyclic_normal_form(fps, std::get<FreeElt>(g));
    const auto& w = f.core.syllables;
    const std::size_t L = w.size();
    for (std::size_t p = 1; p <= L; ++p) {
        if (L % p != 0) continue;
        bool periodic = true;
        for (std::size_t i = p; i < L && periodic; ++i)
            if (!(w[i] == w[i % p])) periodic = false;
        if (!periodic) continue;
        FreeElt root_core;
        root_core.syllables.assign(w.begin(), w.begin() + p);
        GroupElement r = fp::mul(fps, fp::mul(fps, f.conjugator, root_core), fp::inv(fps, f.conjugator));
        return {r, static_cast<long long>(L / p)};
    }
    throw std::logic_error("unreachable: L is always a period of itself");
}

// Relative metric of a free-product factor, specialized: an admissible path
// from 1 to a nontrivial factor element would make a multi-syllable normal
// form equal a single syllable.  So the distance is 0 on the identity and
// infinite elsewhere (nullopt).
inline std::optional<long long> hat_distance(const GroupSpec& s, std::size_t lambda, const GroupElement& h) {
    if (!s.is_free_product()) throw std::invalid_argument("hat_distance needs a free product");
    const auto& fac = s.free_product().factors.at(lambda);
    LeafElt e = detail::to_leaf(h);
    if (leaf::is_identity(fac, e)) return 0;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Spec validation
// ---------------------------------------------------------------------------

inline void validate_into(const GroupSpec& s, const std::string& prefix, std::vector<std::string>& out) {
    if (s.is_finite()) {
        const auto& f = s.finite();
        const std::size_t q = f.size();
        if (q == 0) {
            out.push_back(prefix + "finite group of size 0");
            return;
        }
        for (const auto& row : f.table)
            if (row.size() != q) {
                out.push_back(prefix + "multiplication table is not square");
                return;
            }
        for (std::size_t a = 0; a < q; ++a)
            for (std::size_t b = 0; b < q; ++b)
                if (f.table[a][b] < 0 || f.table[a][b] >= static_cast<int>(q)) {
                    out.push_back(prefix + "table entry out of range");
                    return;
                }
        if (f.identity < 0 || f.identity >= static_cast<int>(q)) {
            out.push_back(prefix + "identity index out of range");
            return;
        }
        for (std::size_t a = 0; a < q; ++a) {
            if (f.table[a][f.identity] != static_cast<int>(a) || f.table[f.identity][a] != static_cast<int>(a))
                out.push_back(prefix + "declared identity is not an identity at index " + std::to_string(a));
        }
        for (std::size_t a = 0; a < q; ++a) {
            std::vector<bool> row(q, false), col(q, false);
            for (std::size_t b = 0; b < q; ++b) {
                row[f.table[a][b]] = true;
                col[f.table[b][a]] = true;
            }
            for (std::size_t b = 0; b < q; ++b)
                if (!row[b] || !col[b]) {
                    out.push_back(prefix + "row/column " + std::to_string(a) + " is not a permutation");
                    break;
                }
        }
        for (std::size_t a = 0; a < q; ++a)
            for (std::size_t b = 0; b < q; ++b)
                for (std::size_t c = 0; c < q; ++c)
                    if (f.table[f.table[a][b]][c] != f.table[a][f.table[b][c]]) {
                        out.push_back(prefix + "non-associative triple (" + std::to_string(a) + "," +
                                      std::to_string(b) + "," + std::to_string(c) + ")");
                        return;
                    }
        return;
    }
    if (s.is_integers()) return;
    if (s.is_vc()) {
        const auto& v = s.vc();
        GroupSpec qspec{v.quotient};
        std::size_t before = out.size();
        validate_into(qspec, prefix + "quotient: ", out);
        if (out.size() != before) return;
        const std::size_t q = v.quotient.size();
        if (v.eps.size() != q || v.cocycle.size() != q) {
            out.push_back(prefix + "eps/cocycle size mismatch");
            return;
        }
        for (const auto& row : v.cocycle)
            if (row.size() != q) {
                out.push_back(prefix + "cocycle row size mismatch");
                return;
            }
        for (std::size_t a = 0; a < q; ++a)
            if (v.eps[a] != 1 && v.eps[a] != -1)
                out.push_back(prefix + "eps value must be +1 or -1");
        const int e = v.quotient.identity;
        if (v.eps[e] != 1) out.push_back(prefix + "eps(1) must be 1");
        for (std::size_t a = 0; a < q; ++a)
            for (std::size_t b = 0; b < q; ++b)
                if (v.eps[fin::mul(v.quotient, static_cast<int>(a), static_cast<int>(b))] != v.eps[a] * v.eps[b]) {
                    out.push_back(prefix + "eps is not a homomorphism");
                    a = b = q;
                }
        for (std::size_t a = 0; a < q; ++a)
            if (v.cocycle[e][a] != 0 || v.cocycle[a][e] != 0) {
                out.push_back(prefix + "cocycle must vanish on the identity");
                break;
            }
        for (std::size_t a = 0; a < q; ++a)
            for (std::size_t b = 0; b < q; ++b)
                for (std::size_t c = 0; c < q; ++c) {
                    long long lhs = v.cocycle[fin::mul(v.quotient, (int)a, (int)b)][c] +
                                    v.eps[c] * v.cocycle[a][b];
                    long long rhs = v.cocycle[a][fin::mul(v.quotient, (int)b, (int)c)] + v.cocycle[b][c];
                    if (lhs != rhs) {
                        out.push_back(prefix + "cocycle condition fails at (" + std::to_string(a) + "," +
                                      std::to_string(b) + "," + std::to_string(c) + ")");
                        return;
                    }
                }
        return;
    }
    const auto& fp = s.free_product();
    if (fp.factors.empty()) {
        out.push_back(prefix + "free product needs at least one factor");
        return;
    }
    for (std::size_t i = 0; i < fp.factors.size(); ++i) {
        if (fp.factors[i].is_free_product()) {
            out.push_back(prefix + "nested free products are not allowed");
            continue;
        }
        validate_into(fp.factors[i], prefix + "factor " + std::to_string(i) + ": ", out);
    }
}

inline std::vector<std::string> validate_spec(const GroupSpec& s) {
    std::vector<std::string> out;
    validate_into(s, "", out);
    return out;
}

// ---------------------------------------------------------------------------
// Element rendering (diagnostics and certificate output)
// ---------------------------------------------------------------------------

inline std::string finite_name(const FiniteSpec& s, int idx) {
    if (idx < static_cast<int>(s.names.size()) && !s.names[idx].empty()) return s.names[idx];
    return "e" + std::to_string(idx);
}

inline std::string render(const GroupSpec& s, const GroupElement& g) {
    if (s.is_finite()) return finite_name(s.finite(), std::get<FiniteElt>(g).index);
    if (s.is_integers()) {
        long long m = std::get<IntElt>(g).power;
        if (m == 0) return "1";
        if (m == 1) return s.integers().gen;
        return s.integers().gen + "^" + std::to_string(m);
    }
    if (s.is_vc()) {
        const auto& v = s.vc();
        const auto& e = std::get<VcElt>(g);
        std::string out;
        if (e.q != v.quotient.identity) out = finite_name(v.quotient, e.q);
        if (e.shift != 0) {
            if (!out.empty()) out += "*";
            out += v.hgen;
            if (e.shift != 1) out += "^" + std::to_string(e.shift);
        }
        return out.empty() ? "1" : out;
    }
    const auto& fps = s.free_product();
    const auto& w = std::get<FreeElt>(g).syllables;
    if (w.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += "*";
        out += render(fps.factors[w[i].factor], detail::from_leaf(w[i].elt));
    }
    return out;
}

}  // namespace expeq

#endif
