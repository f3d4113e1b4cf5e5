#ifndef EXPEQ_SEMILINEAR_HPP
#define EXPEQ_SEMILINEAR_HPP

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "expeq/intlinalg.hpp"

namespace expeq {

using intlin::Int;
using intlin::Vec;

// One Z-linear piece { base + periods * z | z integer }.  Never empty as a set.
struct ZLinearSet {
    std::size_t dimension = 0;
    Vec base;
    std::vector<Vec> periods;

    ZLinearSet() = default;
    ZLinearSet(Vec b, std::vector<Vec> p) : dimension(b.size()), base(std::move(b)), periods(std::move(p)) {
        for (const auto& v : periods)
            if (v.size() != dimension) throw std::invalid_argument("period length mismatch");
    }

    bool operator==(const ZLinearSet&) const = default;
};

// Finite union of Z-linear pieces; an empty piece list is the empty set.
struct ZSemilinearSet {
    std::size_t dimension = 0;
    std::vector<ZLinearSet> pieces;

    ZSemilinearSet() = default;
    explicit ZSemilinearSet(std::size_t n) : dimension(n) {}
    ZSemilinearSet(std::size_t n, std::vector<ZLinearSet> ps) : dimension(n), pieces(std::move(ps)) {
        for (const auto& p : pieces)
            if (p.dimension != dimension) throw std::invalid_argument("piece dimension mismatch");
    }

    static ZSemilinearSet empty(std::size_t n) { return ZSemilinearSet(n); }
    static ZSemilinearSet singleton(Vec p) {
        ZSemilinearSet s(p.size());
        s.pieces.push_back(ZLinearSet(std::move(p), {}));
        return s;
    }
    static ZSemilinearSet full(std::size_t n) {
        std::vector<Vec> periods;
        for (std::size_t i = 0; i < n; ++i) {
            Vec e(n, 0);
            e[i] = 1;
            periods.push_back(std::move(e));
        }
        ZSemilinearSet s(n);
        s.pieces.push_back(ZLinearSet(Vec(n, 0), std::move(periods)));
        return s;
    }

    bool empty_set() const { return pieces.empty(); }
    bool operator==(const ZSemilinearSet&) const = default;
};

// Union of differences: ∪ (positive \ subtracted).
struct DifferenceNormalForm {
    std::size_t dimension = 0;
    std::vector<std::pair<ZSemilinearSet, ZSemilinearSet>> terms;
};

namespace detail {
inline void check_dim(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("dimension mismatch");
}
}  // namespace detail

// Precomputed echelon form of one piece; answers many membership queries fast.
class PreparedPiece {
  public:
    explicit PreparedPiece(const ZLinearSet& s)
        : base_(s.base), ech_(intlin::column_echelon(s.periods, s.dimension)) {}

    bool contains(const Vec& p) const {
        Vec c(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) c[i] = p[i] - base_[i];
        return intlin::echelon_solve(ech_, std::move(c)).has_value();
    }

  private:
    Vec base_;
    intlin::Echelon ech_;
};

class PreparedMembership {
  public:
    explicit PreparedMembership(const ZSemilinearSet& s) {
        for (const auto& p : s.pieces) pieces_.emplace_back(p);
    }
    bool contains(const Vec& p) const {
        for (const auto& piece : pieces_)
            if (piece.contains(p)) return true;
        return false;
    }

  private:
    std::vector<PreparedPiece> pieces_;
};

inline bool contains(const ZLinearSet& s, const Vec& p) {
    detail::check_dim(s.dimension, p.size());
    return PreparedPiece(s).contains(p);
}

inline bool contains(const ZSemilinearSet& s, const Vec& p) {
    detail::check_dim(s.dimension, p.size());
    for (const auto& piece : s.pieces)
        if (contains(piece, p)) return true;
    return false;
}

inline ZSemilinearSet set_union(const ZSemilinearSet& s, const ZSemilinearSet& t) {
    detail::check_dim(s.dimension, t.dimension);
    ZSemilinearSet r = s;
    r.pieces.insert(r.pieces.end(), t.pieces.begin(), t.pieces.end());
    return r;
}

inline ZSemilinearSet concat(const ZSemilinearSet& s, const ZSemilinearSet& t) {
    ZSemilinearSet r(s.dimension + t.dimension);
    for (const auto& a : s.pieces)
        for (const auto& b : t.pieces) {
            Vec base = a.base;
            base.insert(base.end(), b.base.begin(), b.base.end());
            std::vector<Vec> periods;
            for (const auto& p : a.periods) {
                Vec v = p;
                v.resize(r.dimension, 0);
                periods.push_back(std::move(v));
            }
            for (const auto& q : b.periods) {
                Vec v(s.dimension, 0);
                v.insert(v.end(), q.begin(), q.end());
                periods.push_back(std::move(v));
            }
            r.pieces.push_back(ZLinearSet(std::move(base), std::move(periods)));
        }
    return r;
}

// perm[i] is the destination coordinate of source coordinate i, so
// p ∈ reorder(S, perm)  ⇔  perm⁻¹(p) ∈ S.
inline ZSemilinearSet reorder(const ZSemilinearSet& s, const std::vector<std::size_t>& perm) {
    if (perm.size() != s.dimension) throw std::invalid_argument("permutation size mismatch");
    std::vector<bool> seen(s.dimension, false);
    for (std::size_t v : perm) {
        if (v >= s.dimension || seen[v]) throw std::invalid_argument("not a permutation");
        seen[v] = true;
    }
    auto apply = [&](const Vec& v) {
        Vec r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) r[perm[i]] = v[i];
        return r;
    };
    ZSemilinearSet r(s.dimension);
    for (const auto& piece : s.pieces) {
        std::vector<Vec> periods;
        for (const auto& p : piece.periods) periods.push_back(apply(p));
        r.pieces.push_back(ZLinearSet(apply(piece.base), std::move(periods)));
    }
    return r;
}

inline std::optional<ZLinearSet> intersect(const ZLinearSet& a, const ZLinearSet& b) {
    detail::check_dim(a.dimension, b.dimension);
    // Solve A1 z1 - A2 z2 = b2 - b1; the common points are b1 + A1 z1.
    std::vector<Vec> cols = a.periods;
    for (const auto& p : b.periods) {
        Vec v(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) v[i] = -p[i];
        cols.push_back(std::move(v));
    }
    Vec c(a.dimension);
    for (std::size_t i = 0; i < a.dimension; ++i) c[i] = b.base[i] - a.base[i];
    auto sol = intlin::solve(cols, c);
    if (!sol) return std::nullopt;
    const std::size_t d1 = a.periods.size();
    auto map_through_a = [&](const Vec& w) {
        Vec r(a.dimension, 0);
        for (std::size_t j = 0; j < d1; ++j)
            for (std::size_t i = 0; i < a.dimension; ++i) r[i] += w[j] * a.periods[j][i];
        return r;
    };
    Vec base = map_through_a(sol->particular);
    for (std::size_t i = 0; i < a.dimension; ++i) base[i] += a.base[i];
    std::vector<Vec> periods;
    for (const auto& k : sol->kernel) {
        Vec v = map_through_a(k);
        bool zero = std::all_of(v.begin(), v.end(), [](Int x) { return x == 0; });
        if (!zero) periods.push_back(std::move(v));
    }
    return ZLinearSet(std::move(base), std::move(periods));
}

inline ZSemilinearSet intersect(const ZSemilinearSet& s, const ZSemilinearSet& t) {
    detail::check_dim(s.dimension, t.dimension);
    ZSemilinearSet r(s.dimension);
    for (const auto& a : s.pieces)
        for (const auto& b : t.pieces)
            if (auto piece = intersect(a, b)) r.pieces.push_back(std::move(*piece));
    return r;
}

inline bool contains(const DifferenceNormalForm& d, const Vec& p) {
    detail::check_dim(d.dimension, p.size());
    for (const auto& [pos, neg] : d.terms)
        if (contains(pos, p) && !contains(neg, p)) return true;
    return false;
}

struct NaturalWitness {
    enum class Kind { Empty, Witness, Unknown } kind = Kind::Empty;
    Vec point;           // valid for Witness
    Int bound = 0;       // exhausted search bound for Unknown
};

// Search for a member of S ∩ N^n.  Empty is only reported when provable:
// every piece either has no periods and a negative base entry, or some
// coordinate is constant-negative across all its periods.
inline NaturalWitness natural_witness(const ZSemilinearSet& s, Int bound = 8) {
    auto nonneg = [](const Vec& v) {
        return std::all_of(v.begin(), v.end(), [](Int x) { return x >= 0; });
    };
    bool all_proved_empty = true;
    for (const auto& piece : s.pieces) {
        if (piece.periods.empty()) {
            if (nonneg(piece.base)) return {NaturalWitness::Kind::Witness, piece.base, 0};
            continue;  // single negative point: provably no natural member
        }
        bool proved = false;
        for (std::size_t i = 0; i < piece.dimension; ++i) {
            if (piece.base[i] >= 0) continue;
            bool frozen = true;
            for (const auto& p : piece.periods)
                if (p[i] != 0) frozen = false;
            if (frozen) {
                proved = true;
                break;
            }
        }
        if (proved) continue;
        // bounded enumeration over the parameter lattice
        const std::size_t d = piece.periods.size();
        Vec z(d, -bound);
        for (;;) {
            Vec p = piece.base;
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t i = 0; i < piece.dimension; ++i) p[i] += z[j] * piece.periods[j][i];
            if (nonneg(p)) return {NaturalWitness::Kind::Witness, std::move(p), 0};
            std::size_t j = 0;
            while (j < d && z[j] == bound) z[j++] = -bound;
            if (j == d) break;
            ++z[j];
        }
        all_proved_empty = false;
    }
    if (all_proved_empty) return {NaturalWitness::Kind::Empty, {}, 0};
    return {NaturalWitness::Kind::Unknown, {}, bound};
}

// Sound equality on a finite box; the supported substitute for set equality.
inline bool equal_on_box(const ZSemilinearSet& s, const ZSemilinearSet& t, const Vec& lo, const Vec& hi) {
    detail::check_dim(s.dimension, t.dimension);
    if (s.dimension == 0) return s.empty_set() == t.empty_set();
    PreparedMembership ms(s), mt(t);
    Vec p = lo;
    for (;;) {
        if (ms.contains(p) != mt.contains(p)) return false;
        std::size_t j = 0;
        while (j < p.size() && p[j] == hi[j]) p[j] = lo[j], ++j;
        if (j == p.size()) return true;
        ++p[j];
    }
}

// --- textual rendering (the CLI's machine-readable output) ---

inline std::string render(const Vec& v) {
    std::ostringstream out;
    out << '(';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ',';
        out << v[i];
    }
    out << ')';
    return out.str();
}

inline std::string render(const ZLinearSet& s) {
    std::ostringstream out;
    out << "base " << render(s.base);
    for (const auto& p : s.periods) out << " + Z*" << render(p);
    return out.str();
}

inline std::string render(const ZSemilinearSet& s) {
    if (s.pieces.empty()) return "EMPTY";
    std::ostringstream out;
    for (std::size_t i = 0; i < s.pieces.size(); ++i) {
        if (i) out << '\n';
        out << render(s.pieces[i]);
    }
    return out.str();
}

}  // namespace expeq

#endif
