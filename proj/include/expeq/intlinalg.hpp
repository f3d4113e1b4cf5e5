#ifndef EXPEQ_INTLINALG_HPP
#define EXPEQ_INTLINALG_HPP

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <vector>

namespace expeq::intlin {

using Int = long long;
using Vec = std::vector<Int>;

// General solution of an integer linear system A x = c:
// x = particular + integer combinations of the kernel basis.
struct GeneralSolution {
    Vec particular;
    std::vector<Vec> kernel;
};

// Column echelon form of A (given by columns) with a unimodular transform,
// A * U = H.  Pivot list pairs (row, column) in elimination order.
struct Echelon {
    std::vector<Vec> h;        // columns of H, length n each
    std::vector<Vec> u;        // columns of U, length d each
    std::vector<std::pair<std::size_t, std::size_t>> pivots;
};

inline Echelon column_echelon(std::vector<Vec> cols, std::size_t n) {
    const std::size_t d = cols.size();
    Echelon e;
    e.u.assign(d, Vec(d, 0));
    for (std::size_t j = 0; j < d; ++j) e.u[j][j] = 1;
    std::size_t col = 0;
    for (std::size_t row = 0; row < n && col < d; ++row) {
        // gcd elimination across columns col..d-1 in this row
        for (;;) {
            std::size_t best = d;
            for (std::size_t j = col; j < d; ++j)
                if (cols[j][row] != 0 &&
                    (best == d || std::llabs(cols[j][row]) < std::llabs(cols[best][row])))
                    best = j;
            if (best == d) break;
            std::swap(cols[best], cols[col]);
            std::swap(e.u[best], e.u[col]);
            bool clean = true;
            for (std::size_t j = col + 1; j < d; ++j) {
                if (cols[j][row] == 0) continue;
                Int q = cols[j][row] / cols[col][row];
                if (q != 0) {
                    for (std::size_t r = 0; r < n; ++r) cols[j][r] -= q * cols[col][r];
                    for (std::size_t r = 0; r < d; ++r) e.u[j][r] -= q * e.u[col][r];
                }
                if (cols[j][row] != 0) clean = false;
            }
            if (clean) break;
        }
        if (cols[col][row] != 0) {
            if (cols[col][row] < 0) {
                for (auto& v : cols[col]) v = -v;
                for (auto& v : e.u[col]) v = -v;
            }
            e.pivots.emplace_back(row, col);
            ++col;
        }
    }
    e.h = std::move(cols);
    return e;
}

// Decide solvability of H y = c along the echelon structure; returns y on the
// pivot columns (free columns set to zero) or nothing.
inline std::optional<Vec> echelon_solve(const Echelon& e, Vec c) {
    const std::size_t d = e.h.size();
    Vec y(d, 0);
    for (auto [row, col] : e.pivots) {
        Int p = e.h[col][row];
        if (c[row] % p != 0) return std::nullopt;
        Int t = c[row] / p;
        y[col] = t;
        if (t != 0)
            for (std::size_t r = 0; r < c.size(); ++r) c[r] -= t * e.h[col][r];
    }
    for (Int v : c)
        if (v != 0) return std::nullopt;
    return y;
}

// Solve A x = c over the integers.  A is given by its columns (each of length
// c.size()).  Kernel vectors span all integer solutions of A x = 0.
inline std::optional<GeneralSolution> solve(const std::vector<Vec>& cols, const Vec& c) {
    const std::size_t n = c.size();
    const std::size_t d = cols.size();
    Echelon e = column_echelon(cols, n);
    auto y = echelon_solve(e, c);
    if (!y) return std::nullopt;
    GeneralSolution sol;
    sol.particular.assign(d, 0);
    for (std::size_t j = 0; j < d; ++j)
        if ((*y)[j] != 0)
            for (std::size_t r = 0; r < d; ++r) sol.particular[r] += (*y)[j] * e.u[j][r];
    std::vector<bool> pivot_col(d, false);
    for (auto [row, col] : e.pivots) {
        (void)row;
        pivot_col[col] = true;
    }
    for (std::size_t j = 0; j < d; ++j)
        if (!pivot_col[j]) sol.kernel.push_back(e.u[j]);
    return sol;
}

inline Int gcd(Int a, Int b) {
    a = std::llabs(a);
    b = std::llabs(b);
    while (b) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace expeq::intlin

#endif
