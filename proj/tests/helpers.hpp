#ifndef EXPEQ_TEST_HELPERS_HPP
#define EXPEQ_TEST_HELPERS_HPP

#include <random>
#include <vector>

#include "expeq/equation.hpp"
#include "expeq/groups.hpp"

namespace testutil {

using namespace expeq;

inline GroupSpec zgroup(const std::string& gen = "h") { return GroupSpec{IntegersSpec{gen}}; }

inline FiniteSpec cyclic_table(int n) {
    FiniteSpec f;
    f.table.assign(n, std::vector<int>(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) f.table[a][b] = (a + b) % n;
    return f;
}

inline GroupSpec zmod(int n) { return GroupSpec{cyclic_table(n)}; }

// infinite dihedral as a Z-by-(Z/2) extension with the sign action
inline GroupSpec dinf() {
    VcSpec v;
    v.quotient = cyclic_table(2);
    v.quotient.names = {"e", "t"};
    v.eps = {1, -1};
    v.cocycle = {{0, 0}, {0, 0}};
    return GroupSpec{v};
}

// Z written as an extension of Z/2 with trivial action and a carry cocycle
inline GroupSpec ztwisted() {
    VcSpec v;
    v.quotient = cyclic_table(2);
    v.eps = {1, 1};
    v.cocycle = {{0, 0}, {0, 1}};
    return GroupSpec{v};
}

// Z/3 with trivial action and zero cocycle: Z/3 x Z
inline GroupSpec z3xz() {
    VcSpec v;
    v.quotient = cyclic_table(3);
    v.eps = {1, 1, 1};
    v.cocycle = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    return GroupSpec{v};
}

inline GroupSpec free_product(std::vector<GroupSpec> factors) {
    FreeProductSpec f;
    f.factors = std::move(factors);
    return GroupSpec{f};
}

inline GroupElement syl(const GroupSpec& fp, std::size_t factor, const LeafElt& e) {
    FreeElt w;
    if (!leaf::is_identity(fp.free_product().factors[factor], e)) w.syllables.push_back({factor, e});
    return w;
}

// deterministic random elements for corpus generation
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(unsigned long long seed) : eng(seed) {}
    long long pick(long long lo, long long hi) {
        return std::uniform_int_distribution<long long>(lo, hi)(eng);
    }
};

inline LeafElt random_leaf(const GroupSpec& s, Rng& rng, long long span = 2) {
    if (s.is_finite()) return FiniteElt{static_cast<int>(rng.pick(0, s.finite().size() - 1))};
    if (s.is_integers()) return IntElt{rng.pick(-span, span)};
    const auto& v = s.vc();
    return VcElt{static_cast<int>(rng.pick(0, v.quotient.size() - 1)), rng.pick(-span, span)};
}

// random free-product element with at most `len` syllables
inline GroupElement random_word(const GroupSpec& s, Rng& rng, int len) {
    if (!s.is_free_product()) return detail::from_leaf(random_leaf(s, rng));
    const auto& fps = s.free_product();
    GroupElement w = identity(s);
    for (int i = 0; i < len; ++i) {
        std::size_t k = static_cast<std::size_t>(rng.pick(0, fps.factors.size() - 1));
        w = mul(s, w, syl(s, k, random_leaf(fps.factors[k], rng)));
    }
    return w;
}

// random element conjugate into a factor (elliptic or torsion base)
inline GroupElement random_elliptic(const GroupSpec& s, Rng& rng) {
    const auto& fps = s.free_product();
    std::size_t k = static_cast<std::size_t>(rng.pick(0, fps.factors.size() - 1));
    GroupElement core = syl(s, k, random_leaf(fps.factors[k], rng));
    GroupElement u = random_word(s, rng, static_cast<int>(rng.pick(0, 2)));
    return mul(s, mul(s, u, core), inv(s, u));
}

}  // namespace testutil

#endif
