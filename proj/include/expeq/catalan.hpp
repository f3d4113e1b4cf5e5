#ifndef EXPEQ_CATALAN_HPP
#define EXPEQ_CATALAN_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace expeq {

// Partition of {1..n} into disjoint sorted blocks, no two of them crossing.
struct NonCrossingPartition {
    std::size_t n = 0;
    std::vector<std::vector<int>> blocks;

    bool operator==(const NonCrossingPartition&) const = default;
};

// Bijection of {1..n} whose orbits, cycled in increasing order, are the blocks
// of a non-crossing partition.
struct CatalanPermutation {
    std::size_t n = 0;
    std::vector<int> mapping;  // mapping[i-1] = sigma(i)

    bool operator==(const CatalanPermutation&) const = default;
};

inline void require_partition(const NonCrossingPartition& p) {
    std::vector<bool> seen(p.n, false);
    std::size_t total = 0;
    for (const auto& b : p.blocks) {
        if (b.empty()) throw std::invalid_argument("empty block");
        if (!std::is_sorted(b.begin(), b.end())) throw std::invalid_argument("unsorted block");
        for (int v : b) {
            if (v < 1 || v > static_cast<int>(p.n) || seen[v - 1])
                throw std::invalid_argument("not a partition of {1..n}");
            seen[v - 1] = true;
        }
        total += b.size();
    }
    if (total != p.n) throw std::invalid_argument("blocks do not cover {1..n}");
}

inline bool is_noncrossing(const NonCrossingPartition& p) {
    require_partition(p);
    // two blocks cross iff elements interleave as k < s < l < t
    for (std::size_t i = 0; i < p.blocks.size(); ++i)
        for (std::size_t j = i + 1; j < p.blocks.size(); ++j)
            for (std::size_t a = 0; a + 1 < p.blocks[i].size(); ++a) {
                int k = p.blocks[i][a], l = p.blocks[i][a + 1];
                for (int s : p.blocks[j])
                    if (k < s && s < l) {
                        for (int t : p.blocks[j])
                            if (t < k || t > l) return false;
                    }
            }
    return true;
}

// Enumerate non-crossing partitions of an arbitrary sorted position list.
// block_ok may reject a completed block (pruning the whole branch);
// partner_ok may reject a candidate companion for the block opened at `first`.
namespace detail {

using Blocks = std::vector<std::vector<int>>;
using EmitFn = std::function<bool(Blocks&)>;
using BlockOkFn = std::function<bool(const std::vector<int>&)>;
using PartnerOkFn = std::function<bool(int, int)>;

// type-erased callbacks: the recursion builds fresh emit closures per level
inline bool ncp_rec(const std::vector<int>& pos, Blocks& acc, const EmitFn& emit,
                    const BlockOkFn& block_ok, const PartnerOkFn& partner_ok) {
    if (pos.empty()) return emit(acc);
    int first = pos[0];
    // choose companions i1<i2<... of `first`; the gaps between consecutive
    // chosen elements must be partitioned independently (non-crossing)
    std::vector<int> block{first};
    std::vector<std::vector<int>> gaps;  // one region per chosen companion gap
    std::function<bool(std::size_t)> choose = [&](std::size_t from) -> bool {
        {  // close the block here; the tail after the last member is one region
            if (block_ok(block)) {
                acc.push_back(block);
                // solve regions left-to-right: all gaps, then the tail
                std::function<bool(std::size_t, const std::vector<int>&)> regions =
                    [&](std::size_t gi, const std::vector<int>& tail) -> bool {
                    if (gi == gaps.size())
                        return ncp_rec(tail, acc, emit, block_ok, partner_ok);
                    return ncp_rec(gaps[gi], acc,
                                   [&](Blocks&) { return regions(gi + 1, tail); }, block_ok,
                                   partner_ok);
                };
                std::vector<int> tail(pos.begin() + from, pos.end());
                // drop block members from the tail region
                std::vector<int> tail2;
                for (int v : tail)
                    if (std::find(block.begin(), block.end(), v) == block.end()) tail2.push_back(v);
                if (!regions(0, tail2)) {
                    acc.pop_back();
                    return false;
                }
                acc.pop_back();
            }
        }
        for (std::size_t i = from; i < pos.size(); ++i) {
            if (!partner_ok(first, pos[i])) continue;
            block.push_back(pos[i]);
            gaps.emplace_back(pos.begin() + from, pos.begin() + i);
            if (!choose(i + 1)) return false;
            gaps.pop_back();
            block.pop_back();
        }
        return true;
    };
    return choose(1);
}

}  // namespace detail

// emit returns false to stop enumeration early.
template <class Emit, class BlockOk, class PartnerOk>
void enumerate_noncrossing_filtered(const std::vector<int>& positions, const Emit& emit,
                                    const BlockOk& block_ok, const PartnerOk& partner_ok) {
    detail::Blocks acc;
    detail::ncp_rec(positions, acc,
                    [&](detail::Blocks& a) { return emit(a); }, block_ok, partner_ok);
}

inline std::vector<NonCrossingPartition> enumerate_noncrossing(std::size_t n) {
    std::vector<int> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[i] = static_cast<int>(i + 1);
    std::vector<NonCrossingPartition> out;
    enumerate_noncrossing_filtered(
        pos,
        [&](const detail::Blocks& b) {
            NonCrossingPartition p;
            p.n = n;
            p.blocks = b;
            std::sort(p.blocks.begin(), p.blocks.end());
            out.push_back(std::move(p));
            return true;
        },
        [](const std::vector<int>&) { return true; }, [](int, int) { return true; });
    std::sort(out.begin(), out.end(),
              [](const NonCrossingPartition& a, const NonCrossingPartition& b) {
                  return a.blocks < b.blocks;
              });
    return out;
}

inline unsigned long long catalan_count(std::size_t n) {
    // C_n = binom(2n, n) / (n + 1), computed without overflow for desk n
    unsigned long long c = 1;
    for (std::size_t i = 0; i < n; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
    return c;
}

inline CatalanPermutation permutation_from_partition(const NonCrossingPartition& p) {
    if (!is_noncrossing(p)) throw std::invalid_argument("crossing partition");
    CatalanPermutation s;
    s.n = p.n;
    s.mapping.assign(p.n, 0);
    for (const auto& b : p.blocks)
        for (std::size_t i = 0; i < b.size(); ++i) s.mapping[b[i] - 1] = b[(i + 1) % b.size()];
    return s;
}

inline NonCrossingPartition orbits_of(const CatalanPermutation& s) {
    NonCrossingPartition p;
    p.n = s.n;
    std::vector<bool> seen(s.n, false);
    for (std::size_t i = 1; i <= s.n; ++i) {
        if (seen[i - 1]) continue;
        std::vector<int> orbit;
        int j = static_cast<int>(i);
        do {
            orbit.push_back(j);
            seen[j - 1] = true;
            j = s.mapping[j - 1];
        } while (j != static_cast<int>(i));
        std::sort(orbit.begin(), orbit.end());
        p.blocks.push_back(std::move(orbit));
    }
    std::sort(p.blocks.begin(), p.blocks.end());
    return p;
}

inline std::string render(const NonCrossingPartition& p) {
    std::ostringstream out;
    out << '{';
    for (std::size_t i = 0; i < p.blocks.size(); ++i) {
        if (i) out << ',';
        out << '{';
        for (std::size_t j = 0; j < p.blocks[i].size(); ++j) {
            if (j) out << ',';
            out << p.blocks[i][j];
        }
        out << '}';
    }
    out << '}';
    return out.str();
}

}  // namespace expeq

#endif
