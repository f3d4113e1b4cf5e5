#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "expeq/semilinear.hpp"

using namespace expeq;

namespace {

ZSemilinearSet random_set(std::mt19937_64& rng, std::size_t dim, std::size_t max_pieces = 3) {
    std::uniform_int_distribution<Int> val(-4, 4);
    ZSemilinearSet s(dim);
    std::size_t pieces = 1 + rng() % max_pieces;
    for (std::size_t p = 0; p < pieces; ++p) {
        Vec base(dim);
        for (auto& v : base) v = val(rng);
        std::vector<Vec> periods(rng() % 4);
        for (auto& per : periods) {
            per.resize(dim);
            for (auto& v : per) v = val(rng);
        }
        s.pieces.push_back(ZLinearSet(std::move(base), std::move(periods)));
    }
    return s;
}

Vec random_point(std::mt19937_64& rng, std::size_t dim, Int radius) {
    std::uniform_int_distribution<Int> val(-radius, radius);
    Vec p(dim);
    for (auto& v : p) v = val(rng);
    return p;
}

}  // namespace

TEST_CASE("basic membership") {
    // {(1,2) + t(2,0)}: all (1+2t, 2)
    ZLinearSet s({1, 2}, {{2, 0}});
    REQUIRE(contains(s, {1, 2}));
    REQUIRE(contains(s, {5, 2}));
    REQUIRE(contains(s, {-3, 2}));
    REQUIRE(!contains(s, {2, 2}));
    REQUIRE(!contains(s, {1, 3}));
}

TEST_CASE("union membership is pointwise or") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 40; ++rep) {
        std::size_t dim = 1 + rng() % 4;
        auto s = random_set(rng, dim), t = random_set(rng, dim);
        auto u = set_union(s, t);
        for (int k = 0; k < 25; ++k) {
            Vec p = random_point(rng, dim, 8);
            REQUIRE(contains(u, p) == (contains(s, p) || contains(t, p)));
        }
    }
}

TEST_CASE("intersection membership is pointwise and") {
    std::mt19937_64 rng(22);
    for (int rep = 0; rep < 40; ++rep) {
        std::size_t dim = 1 + rng() % 3;
        auto s = random_set(rng, dim), t = random_set(rng, dim);
        auto u = intersect(s, t);
        for (int k = 0; k < 25; ++k) {
            Vec p = random_point(rng, dim, 8);
            REQUIRE(contains(u, p) == (contains(s, p) && contains(t, p)));
        }
    }
}

TEST_CASE("diagonal intersect even-first-coordinate") {
    // {(t,t)} cap {(2u,v)} = {(2w,2w)}
    ZSemilinearSet diag(2, {ZLinearSet({0, 0}, {{1, 1}})});
    ZSemilinearSet even(2, {ZLinearSet({0, 0}, {{2, 0}, {0, 1}})});
    auto both = intersect(diag, even);
    for (Int x = -10; x <= 10; ++x)
        for (Int y = -10; y <= 10; ++y) {
            bool expect = (x == y) && (x % 2 == 0);
            REQUIRE(contains(both, {x, y}) == expect);
        }
}

TEST_CASE("concat membership factorizes") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 40; ++rep) {
        std::size_t d1 = 1 + rng() % 2, d2 = 1 + rng() % 2;
        auto s = random_set(rng, d1), t = random_set(rng, d2);
        auto c = concat(s, t);
        REQUIRE(c.dimension == d1 + d2);
        REQUIRE(c.pieces.size() == s.pieces.size() * t.pieces.size());
        for (int k = 0; k < 25; ++k) {
            Vec p = random_point(rng, d1, 7), q = random_point(rng, d2, 7);
            Vec pq = p;
            pq.insert(pq.end(), q.begin(), q.end());
            REQUIRE(contains(c, pq) == (contains(s, p) && contains(t, q)));
        }
    }
}

TEST_CASE("reorder is a faithful coordinate permutation action") {
    std::mt19937_64 rng(24);
    for (int rep = 0; rep < 40; ++rep) {
        std::size_t dim = 2 + rng() % 3;
        auto s = random_set(rng, dim);
        std::vector<std::size_t> perm(dim), rho(dim);
        std::iota(perm.begin(), perm.end(), 0);
        std::iota(rho.begin(), rho.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::shuffle(rho.begin(), rho.end(), rng);
        auto r = reorder(s, perm);
        // p in reorder(S, perm) iff perm^{-1}(p) in S
        for (int k = 0; k < 20; ++k) {
            Vec p = random_point(rng, dim, 6);
            Vec pre(dim);
            for (std::size_t i = 0; i < dim; ++i) pre[i] = p[perm[i]];
            REQUIRE(contains(r, p) == contains(s, pre));
        }
        // group action: perm∘rho applied at once vs in two steps
        std::vector<std::size_t> comp(dim);
        for (std::size_t i = 0; i < dim; ++i) comp[i] = perm[rho[i]];
        auto two = reorder(reorder(s, rho), perm);
        auto one = reorder(s, comp);
        for (int k = 0; k < 20; ++k) {
            Vec p = random_point(rng, dim, 6);
            REQUIRE(contains(two, p) == contains(one, p));
        }
        // inverse restores membership
        std::vector<std::size_t> inv(dim);
        for (std::size_t i = 0; i < dim; ++i) inv[perm[i]] = i;
        auto back = reorder(r, inv);
        for (Int x = -5; x <= 5; ++x)
            for (Int y = -5; y <= 5; ++y) {
                Vec p(dim, 0);
                p[0] = x;
                p[dim - 1] = y;
                REQUIRE(contains(back, p) == contains(s, p));
            }
    }
}

TEST_CASE("union with itself is box-equal to itself") {
    std::mt19937_64 rng(25);
    auto s = random_set(rng, 2);
    auto u = set_union(s, s);
    REQUIRE(equal_on_box(s, u, {-6, -6}, {6, 6}));
}

TEST_CASE("natural witness") {
    // constant negative coordinate, no periods: provably empty over N
    ZSemilinearSet neg(1, {ZLinearSet({-3}, {})});
    REQUIRE(natural_witness(neg).kind == NaturalWitness::Kind::Empty);

    // base negative but period escapes: witness found
    ZSemilinearSet esc(1, {ZLinearSet({-3}, {{2}})});
    auto w = natural_witness(esc);
    REQUIRE(w.kind == NaturalWitness::Kind::Witness);
    REQUIRE(w.point[0] >= 0);
    REQUIRE((w.point[0] + 3) % 2 == 0);

    // frozen negative coordinate among periods: provably empty
    ZSemilinearSet frozen(2, {ZLinearSet({-1, 0}, {{0, 1}})});
    REQUIRE(natural_witness(frozen).kind == NaturalWitness::Kind::Empty);

    // nonnegative base is its own witness
    ZSemilinearSet pos(2, {ZLinearSet({1, 2}, {})});
    auto w2 = natural_witness(pos);
    REQUIRE(w2.kind == NaturalWitness::Kind::Witness);
    REQUIRE(w2.point == Vec{1, 2});
}

TEST_CASE("render format") {
    ZLinearSet s({1, -2}, {{3, 0}, {0, 1}});
    REQUIRE(render(s) == "base (1,-2) + Z*(3,0) + Z*(0,1)");
    REQUIRE(render(ZSemilinearSet::empty(2)) == "EMPTY");
    ZSemilinearSet two(1, {ZLinearSet({0}, {}), ZLinearSet({5}, {{7}})});
    REQUIRE(render(two) == "base (0)\nbase (5) + Z*(7)");
}

TEST_CASE("difference normal form membership") {
    DifferenceNormalForm d;
    d.dimension = 1;
    ZSemilinearSet all = ZSemilinearSet::full(1);
    ZSemilinearSet even(1, {ZLinearSet({0}, {{2}})});
    d.terms.push_back({all, even});
    REQUIRE(contains(d, {3}));
    REQUIRE(!contains(d, {4}));
}
