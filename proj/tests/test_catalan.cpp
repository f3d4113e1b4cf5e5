#include <catch2/catch_amalgamated.hpp>

#include "expeq/catalan.hpp"

using namespace expeq;

TEST_CASE("closed-form counts") {
    unsigned long long expected[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796};
    for (std::size_t n = 0; n <= 10; ++n) REQUIRE(catalan_count(n) == expected[n]);
}

TEST_CASE("enumeration count matches the formula") {
    for (std::size_t n = 0; n <= 8; ++n)
        REQUIRE(enumerate_noncrossing(n).size() == catalan_count(n));
}

TEST_CASE("enumerated partitions are valid, non-crossing, distinct") {
    for (std::size_t n = 1; n <= 6; ++n) {
        auto all = enumerate_noncrossing(n);
        for (const auto& p : all) {
            REQUIRE(p.n == n);
            REQUIRE(is_noncrossing(p));
        }
        for (std::size_t i = 1; i < all.size(); ++i) REQUIRE(!(all[i] == all[i - 1]));
    }
}

TEST_CASE("crossing detection") {
    NonCrossingPartition cross{4, {{1, 3}, {2, 4}}};
    REQUIRE(!is_noncrossing(cross));
    NonCrossingPartition nest{4, {{1, 4}, {2, 3}}};
    REQUIRE(is_noncrossing(nest));
    NonCrossingPartition singletons{3, {{1}, {2}, {3}}};
    REQUIRE(is_noncrossing(singletons));
}

TEST_CASE("partition validation rejects malformed input") {
    REQUIRE_THROWS_AS(is_noncrossing(NonCrossingPartition{3, {{1, 2}}}), std::invalid_argument);
    REQUIRE_THROWS_AS(is_noncrossing(NonCrossingPartition{2, {{1}, {1, 2}}}), std::invalid_argument);
    REQUIRE_THROWS_AS(is_noncrossing(NonCrossingPartition{2, {{2, 1}}}), std::invalid_argument);
    REQUIRE_THROWS_AS(is_noncrossing(NonCrossingPartition{2, {{1, 2}, {}}}), std::invalid_argument);
}

TEST_CASE("permutation round trip") {
    for (std::size_t n = 1; n <= 6; ++n)
        for (const auto& p : enumerate_noncrossing(n)) {
            CatalanPermutation s = permutation_from_partition(p);
            // bijection check
            std::vector<bool> hit(n, false);
            for (int v : s.mapping) {
                REQUIRE(v >= 1);
                REQUIRE(v <= static_cast<int>(n));
                hit[v - 1] = true;
            }
            for (bool b : hit) REQUIRE(b);
            REQUIRE(orbits_of(s) == p);
        }
}

TEST_CASE("orbit cycling is increasing") {
    NonCrossingPartition p{5, {{1, 3, 4}, {2}, {5}}};
    CatalanPermutation s = permutation_from_partition(p);
    REQUIRE(s.mapping == std::vector<int>{3, 2, 4, 1, 5});
}

TEST_CASE("crossing partition rejected by permutation builder") {
    NonCrossingPartition cross{4, {{1, 3}, {2, 4}}};
    REQUIRE_THROWS_AS(permutation_from_partition(cross), std::invalid_argument);
}

TEST_CASE("filtered enumeration prunes blocks and partners") {
    // positions of two colors; blocks must be single-colored
    std::vector<int> pos{1, 2, 3, 4};
    auto color = [](int p) { return p % 2; };
    int count = 0;
    enumerate_noncrossing_filtered(
        pos,
        [&](const std::vector<std::vector<int>>& blocks) {
            for (const auto& b : blocks)
                for (int v : b) REQUIRE(color(v) == color(b[0]));
            ++count;
            return true;
        },
        [](const std::vector<int>&) { return true; },
        [&](int a, int b) { return color(a) == color(b); });
    // partitions of {1,2,3,4} with single-color non-crossing blocks:
    // {1,3} pairing forbids {2,4} (crossing), so: all singletons, {1,3} only,
    // {2,4} only
    REQUIRE(count == 3);
}

TEST_CASE("early stop") {
    int seen = 0;
    std::vector<int> pos{1, 2, 3, 4, 5};
    enumerate_noncrossing_filtered(
        pos, [&](const std::vector<std::vector<int>>&) { return ++seen < 7; },
        [](const std::vector<int>&) { return true; }, [](int, int) { return true; });
    REQUIRE(seen == 7);
}

TEST_CASE("partition text form") {
    NonCrossingPartition p{4, {{1, 3}, {2}, {4}}};
    REQUIRE(render(p) == "{{1,3},{2},{4}}");
}
