#include <catch_amalgamated.hpp>

#include <random>

#include "ftl/fuzzy.hpp"
#include "oracles.hpp"

using namespace ftl;
using Catch::Matchers::WithinAbs;

namespace {

const AlphaGrid G = AlphaGrid::uniform(11);

void require_cuts(const FuzzyNumber& u, const oracle::Cuts& c, double tol = 1e-12) {
    REQUIRE(u.levels() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        REQUIRE_THAT(u.lower()[i], WithinAbs(c[i].first, tol));
        REQUIRE_THAT(u.upper()[i], WithinAbs(c[i].second, tol));
    }
}

FuzzyNumber random_number(std::mt19937_64& rng) {
    return oracle::to_fuzzy(oracle::random_trapezoid(rng, G.size()), G);
}

}  // namespace

TEST_CASE("alpha grid shape") {
    REQUIRE(G.size() == 11);
    REQUIRE(G[0] == 0.0);
    REQUIRE(G[10] == 1.0);
    REQUIRE_THROWS_AS(AlphaGrid({0.0, 0.5}), InvalidShape);
    REQUIRE_THROWS_AS(AlphaGrid({0.0, 0.6, 0.5, 1.0}), InvalidShape);
    REQUIRE_THROWS_AS(AlphaGrid::uniform(1), InvalidShape);
    REQUIRE(AlphaGrid::uniform(5) == AlphaGrid({0.0, 0.25, 0.5, 0.75, 1.0}));
}

TEST_CASE("trapezoid constructor") {
    require_cuts(make_trapezoid(0, 0, 0, 0, G), oracle::trapezoid(0, 0, 0, 0, 11));
    const auto t = make_trapezoid(-1, 0, 0, 1, G);
    REQUIRE(t.cut(0).lower == -1.0);
    REQUIRE(t.cut(0).upper == 1.0);
    REQUIRE(t.cut(10).lower == 0.0);
    REQUIRE(t.cut(10).upper == 0.0);
    const auto q = make_trapezoid(1, 2, 3, 5, G);
    REQUIRE_THAT(q.cut(5).lower, WithinAbs(1.5, 1e-12));
    REQUIRE_THAT(q.cut(5).upper, WithinAbs(4.0, 1e-12));
    REQUIRE_THROWS_AS(make_trapezoid(1, 0, 2, 3, G), InvalidShape);
    REQUIRE_THROWS_AS(make_trapezoid(0, 1, 3, 2, G), InvalidShape);
}

TEST_CASE("constructor rejects malformed cuts") {
    REQUIRE_THROWS_AS(FuzzyNumber(G, std::vector<double>(11, 1.0), std::vector<double>(11, 0.0)),
                      InvalidShape);
    std::vector<double> lo(11, 0.0);
    std::vector<double> hi(11, 1.0);
    hi[5] = 2.0;  // grows with alpha
    REQUIRE_THROWS_AS(FuzzyNumber(G, lo, hi), InvalidShape);
    REQUIRE_FALSE(FuzzyNumber::try_from_cuts(G, lo, hi));
    REQUIRE_THROWS_AS(FuzzyNumber(G, {0.0}, {1.0}), InvalidShape);
    hi[5] = std::numeric_limits<double>::infinity();
    REQUIRE_THROWS_AS(FuzzyNumber(G, lo, hi), InvalidShape);
}

TEST_CASE("addition") {
    const auto tri = make_triangle(-1, 0, 1, G);
    REQUIRE(add(tri, FuzzyNumber::zero(G)) == tri);
    require_cuts(add(tri, tri), oracle::triangle(-2, 0, 2, 11));
    require_cuts(add(FuzzyNumber::crisp(2, G), FuzzyNumber::crisp(3, G)), oracle::trapezoid(5, 5, 5, 5, 11));
    REQUIRE_THROWS_AS(add(tri, FuzzyNumber::zero(AlphaGrid::uniform(5))), IncompatibleGrids);
}

TEST_CASE("scalar multiplication") {
    const auto tri = make_triangle(-1, 0, 1, G);
    REQUIRE(scale(1, tri) == tri);
    require_cuts(scale(-1, tri), oracle::triangle(-1, 0, 1, 11));
    require_cuts(scale(0.5, tri), oracle::triangle(-0.5, 0, 0.5, 11));
    require_cuts(scale(-2, make_triangle(0, 1, 3, G)), oracle::triangle(-6, -2, 0, 11));
}

TEST_CASE("gH difference examples") {
    const auto tri = make_triangle(-1, 0, 1, G);
    const auto self = gh_difference(tri, tri);
    REQUIRE(self);
    REQUIRE(norm(*self) == 0.0);

    const auto u = FuzzyNumber(G, std::vector<double>(11, 1.0), std::vector<double>(11, 3.0));
    const auto v = FuzzyNumber(G, std::vector<double>(11, 0.0), std::vector<double>(11, 1.0));
    const auto w = gh_difference(u, v);
    REQUIRE(w);
    require_cuts(*w, oracle::trapezoid(1, 1, 2, 2, 11));
    REQUIRE(add(v, *w) == u);

    const auto box = FuzzyNumber(G, std::vector<double>(11, 0.0), std::vector<double>(11, 1.0));
    REQUIRE_FALSE(gh_difference(box, make_triangle(0, 0.5, 1, G)));
    REQUIRE_THROWS_AS(gh_difference(box, FuzzyNumber::zero(AlphaGrid::uniform(3))), IncompatibleGrids);
}

TEST_CASE("hausdorff on intervals") {
    REQUIRE(hausdorff_interval({0, 1}, {0, 1}) == 0.0);
    REQUIRE(hausdorff_interval({0, 1}, {0, 2}) == 1.0);
    REQUIRE(hausdorff_interval({0, 1}, {3, 4}) == 3.0);
}

TEST_CASE("distance and norm examples") {
    const auto a = make_triangle(0, 1, 2, G);
    const auto b = make_triangle(3, 4, 5, G);
    REQUIRE(dist(a, a) == 0.0);
    REQUIRE_THAT(dist(a, b), WithinAbs(3.0, 1e-12));
    const auto z = FuzzyNumber::zero(G);
    REQUIRE_THAT(vec_dist(FuzzyVector{a, z}, FuzzyVector{b, z}), WithinAbs(3.0, 1e-12));
    REQUIRE(norm(FuzzyVector::zero(3, G)) == 0.0);
    REQUIRE(norm(make_triangle(-1, 0, 1, G)) == 1.0);
    REQUIRE_THROWS_AS(vec_dist(FuzzyVector{a}, FuzzyVector{a, z}), DimensionMismatch);
}

TEST_CASE("randomized: metric axioms and translation invariance") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> k(-4, 4);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto ru = oracle::random_trapezoid(rng, 11);
        const auto rv = oracle::random_trapezoid(rng, 11);
        const auto rw = oracle::random_trapezoid(rng, 11);
        const auto u = oracle::to_fuzzy(ru, G);
        const auto v = oracle::to_fuzzy(rv, G);
        const auto w = oracle::to_fuzzy(rw, G);
        REQUIRE(dist(u, u) == 0.0);
        REQUIRE_THAT(dist(u, v), WithinAbs(oracle::d_inf(ru, rv), 1e-12));
        REQUIRE(dist(u, v) == dist(v, u));
        REQUIRE(dist(u, w) <= dist(u, v) + dist(v, w) + 1e-12);
        REQUIRE_THAT(dist(add(u, w), add(v, w)), WithinAbs(dist(u, v), 1e-12));
        const double s = k(rng);
        REQUIRE_THAT(dist(scale(s, u), scale(s, v)), WithinAbs(std::abs(s) * dist(u, v), 1e-12));
        REQUIRE_THAT(norm(scale(s, u)), WithinAbs(std::abs(s) * norm(u), 1e-12));
        require_cuts(add(u, v), oracle::plus(ru, rv));
        require_cuts(scale(s, u), oracle::times(s, ru));
    }
}

TEST_CASE("randomized: subadditivity and norm triangle inequality") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto u = random_number(rng);
        const auto v = random_number(rng);
        const auto w = random_number(rng);
        const auto e = random_number(rng);
        REQUIRE(dist(add(u, v), add(w, e)) <= dist(u, w) + dist(v, e) + 1e-12);
        REQUIRE(norm(add(u, v)) <= norm(u) + norm(v) + 1e-12);
        REQUIRE_THAT(vec_dist(FuzzyVector{u}, FuzzyVector::zero(1, G)), WithinAbs(norm(u), 1e-12));
    }
}

TEST_CASE("randomized: gH difference round trip and nesting") {
    std::mt19937_64 rng(13);
    std::size_t existing = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        const auto ru = oracle::random_trapezoid(rng, 11);
        const auto rv = oracle::random_trapezoid(rng, 11);
        const auto u = oracle::to_fuzzy(ru, G);
        const auto v = oracle::to_fuzzy(rv, G);
        const auto w = gh_difference(u, v);
        const auto expected = oracle::gh(ru, rv);
        REQUIRE(w.has_value() == oracle::valid(expected));
        if (!w) {
            continue;
        }
        ++existing;
        require_cuts(*w, expected);
        for (std::size_t i = 0; i < 11; ++i) {
            const bool first = std::abs(rv[i].first + w->lower()[i] - ru[i].first) <= 1e-12 &&
                               std::abs(rv[i].second + w->upper()[i] - ru[i].second) <= 1e-12;
            const bool second = std::abs(ru[i].first - w->upper()[i] - rv[i].first) <= 1e-12 &&
                                std::abs(ru[i].second - w->lower()[i] - rv[i].second) <= 1e-12;
            REQUIRE((first || second));
        }
    }
    REQUIRE(existing > 100);
}

TEST_CASE("crisp reduction") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> x(-10, 10);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = x(rng);
        const double b = x(rng);
        const double k = x(rng);
        const auto ca = FuzzyNumber::crisp(a, G);
        const auto cb = FuzzyNumber::crisp(b, G);
        REQUIRE_THAT(add(ca, cb).center(), WithinAbs(a + b, 1e-12));
        REQUIRE(add(ca, cb).is_crisp());
        REQUIRE_THAT(scale(k, ca).center(), WithinAbs(k * a, 1e-12));
        REQUIRE_THAT(gh_difference(ca, cb)->center(), WithinAbs(a - b, 1e-12));
        REQUIRE_THAT(dist(ca, cb), WithinAbs(std::abs(a - b), 1e-12));
    }
}

TEST_CASE("fuzzy vectors need one grid") {
    REQUIRE_THROWS_AS(FuzzyVector(std::vector<FuzzyNumber>{}), DimensionMismatch);
    REQUIRE_THROWS_AS((FuzzyVector{FuzzyNumber::zero(G), FuzzyNumber::zero(AlphaGrid::uniform(3))}),
                      IncompatibleGrids);
    const FuzzyVector u{make_triangle(-1, 0, 1, G), make_triangle(0, 2, 5, G)};
    REQUIRE(norm(u) == 5.0);
    REQUIRE(gh_difference(u, u));
    REQUIRE(norm(*gh_difference(u, u)) == 0.0);
}
