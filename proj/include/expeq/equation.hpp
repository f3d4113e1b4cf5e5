#ifndef EXPEQ_EQUATION_HPP
#define EXPEQ_EQUATION_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "expeq/groups.hpp"
#include "expeq/semilinear.hpp"

namespace expeq {

// One term a_i g_i^{x_i} of the equation a_1 g_1^{x_1} ... a_n g_n^{x_n} = 1.
struct EqTerm {
    GroupElement coeff;
    GroupElement base;
};

struct ExponentialEquation {
    GroupSpec spec;
    std::vector<EqTerm> terms;
    std::vector<std::string> vars;  // variable names, one per term, all distinct

    std::size_t arity() const { return terms.size(); }
};

inline GroupElement substitute(const ExponentialEquation& eq, const Vec& point) {
    if (point.size() != eq.arity()) throw std::invalid_argument("solution arity mismatch");
    GroupElement w = identity(eq.spec);
    for (std::size_t i = 0; i < eq.terms.size(); ++i) {
        w = mul(eq.spec, w, eq.terms[i].coeff);
        w = mul(eq.spec, w, pow(eq.spec, eq.terms[i].base, point[i]));
    }
    return w;
}

inline bool evaluate(const ExponentialEquation& eq, const Vec& point) {
    return is_identity(eq.spec, substitute(eq, point));
}

struct Box {
    Vec lo, hi;  // inclusive, one entry per variable

    static Box cube(std::size_t n, Int radius) {
        return {Vec(n, -radius), Vec(n, radius)};
    }
    unsigned long long volume() const {
        unsigned long long v = 1;
        for (std::size_t i = 0; i < lo.size(); ++i) v *= static_cast<unsigned long long>(hi[i] - lo[i] + 1);
        return v;
    }
};

// Exhaustive exact evaluation over a finite box; the oracle everything else
// is checked against.
inline std::vector<Vec> solve_bounded(const ExponentialEquation& eq, const Box& box,
                                      unsigned long long volume_cap = 10'000'000ULL) {
    if (box.lo.size() != eq.arity() || box.hi.size() != eq.arity())
        throw std::invalid_argument("box arity mismatch");
    if (box.volume() > volume_cap)
        throw std::invalid_argument("box volume " + std::to_string(box.volume()) +
                                    " exceeds cap " + std::to_string(volume_cap));
    std::vector<Vec> out;
    const std::size_t n = eq.arity();
    // prefix products let the innermost variable move cheaply
    std::vector<GroupElement> prefix(n + 1, identity(eq.spec));
    Vec p = box.lo;
    auto rebuild_from = [&](std::size_t k) {
        for (std::size_t i = k; i < n; ++i) {
            GroupElement t = mul(eq.spec, prefix[i], eq.terms[i].coeff);
            prefix[i + 1] = mul(eq.spec, t, pow(eq.spec, eq.terms[i].base, p[i]));
        }
    };
    rebuild_from(0);
    for (;;) {
        if (is_identity(eq.spec, prefix[n])) out.push_back(p);
        std::size_t j = n;
        while (j > 0 && p[j - 1] == box.hi[j - 1]) {
            --j;
            p[j] = box.lo[j];
        }
        if (j == 0) break;
        ++p[j - 1];
        rebuild_from(j - 1);
    }
    return out;
}

}  // namespace expeq

#endif
