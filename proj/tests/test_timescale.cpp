#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ftl/timescale.hpp"

using namespace ftl;
using Catch::Matchers::WithinAbs;

TEST_CASE("integer scale") {
    const auto ts = TimeScale::integer(10);
    REQUIRE(ts.size() == 10);
    REQUIRE(ts.sigma(5) == 6.0);
    REQUIRE(ts.mu(5) == 1.0);
    REQUIRE_THROWS_AS(ts.sigma(9), NoSuccessor);
    REQUIRE_THROWS_AS(ts.sigma(2.5), UnknownPoint);
    REQUIRE(ts.describe() == "integer(10)");
}

TEST_CASE("q-scale") {
    const auto ts = TimeScale::qscale(1, 2, 8);
    REQUIRE(ts.sigma(4) == 8.0);
    REQUIRE(ts.mu(4) == 4.0);
    REQUIRE_THROWS_AS(TimeScale::qscale(1, 1, 5), InvalidShape);
}

TEST_CASE("interval union") {
    const auto ts = TimeScale::intervals({{0, 1}, {2, 3}}, 0.1);
    REQUIRE(ts.size() == 22);
    REQUIRE(ts.sigma(1.0) == 2.0);
    REQUIRE_THAT(ts.mu(0.5), WithinAbs(0.1, 1e-12));
    REQUIRE(ts.right_scattered_at(ts.index_of(0.5)));

    const auto fine = TimeScale::intervals({{0, 1e-5}}, 1e-7);
    REQUIRE(fine.right_dense_at(3));
    REQUIRE(fine.has_right_dense_points());
    REQUIRE_FALSE(ts.has_right_dense_points());
}

TEST_CASE("construction errors") {
    REQUIRE_THROWS_AS(TimeScale({1.0}), InvalidShape);
    REQUIRE_THROWS_AS(TimeScale({0.0, 2.0, 1.0}), InvalidShape);
    REQUIRE_THROWS_AS(TimeScale({0.0, 1.0}, 0.0), InvalidShape);
    REQUIRE_THROWS_AS(TimeScale::uniform(0, -1, 4), InvalidShape);
}

TEST_CASE("sigma is monotone") {
    for (const auto& ts : {TimeScale::integer(20), TimeScale::qscale(0.5, 1.5, 20),
                           TimeScale::intervals({{0, 1}, {1.5, 2}, {4, 5}}, 0.25)}) {
        for (std::size_t i = 0; i + 2 < ts.size(); ++i) {
            REQUIRE(ts.sigma(ts[i]) <= ts.sigma(ts[i + 1]));
            REQUIRE(ts.mu_at(i) >= 0.0);
        }
    }
}

TEST_CASE("delta derivative") {
    const auto z = TimeScale::explicit_points({-3, -2, -1, 0, 1, 2, 3, 4, 5});
    REQUIRE(delta_derivative(z, [](double t) { return t * t; }, 3) == 7.0);
    REQUIRE(delta_derivative(z, [](double) { return 4.0; }, 0) == 0.0);
    const auto q = TimeScale::qscale(1, 3, 6);
    for (std::size_t i = 0; i + 1 < q.size(); ++i) {
        REQUIRE_THAT(delta_derivative(q, [](double t) { return t; }, q[i]), WithinAbs(1.0, 1e-12));
    }
    REQUIRE_THROWS_AS(delta_derivative(z, [](double t) { return t; }, 5), NoSuccessor);
}

TEST_CASE("delta derivative is linear") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> c(-2, 2);
    const auto ts = TimeScale::qscale(1, 1.3, 15);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = c(rng);
        const double b = c(rng);
        auto f = [a](double t) { return a * t * t + std::sin(t); };
        auto g = [b](double t) { return b * std::exp(-t); };
        for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
            const double lhs = delta_derivative(ts, [&](double t) { return f(t) + g(t); }, ts[i]);
            const double rhs = delta_derivative(ts, f, ts[i]) + delta_derivative(ts, g, ts[i]);
            REQUIRE_THAT(lhs, WithinAbs(rhs, 1e-9 * (1 + std::abs(lhs))));
        }
    }
}

TEST_CASE("upper Dini derivative") {
    const auto ts = TimeScale::integer(10);
    auto f = [](double t) { return std::sqrt(t); };
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        REQUIRE(upper_dini(ts, f, ts[i]) == delta_derivative(ts, f, ts[i]));
    }
    REQUIRE(upper_dini(ts, [](double) { return 1.0; }, 3) == 0.0);

    std::vector<double> p;
    for (int i = -20; i <= 20; ++i) {
        p.push_back(i * 1e-8);
    }
    const auto dense = TimeScale::explicit_points(p);
    REQUIRE(dense.right_dense(0.0));
    REQUIRE_THAT(upper_dini(dense, [](double t) { return std::abs(t); }, 0.0), WithinAbs(1.0, 1e-9));
    // -|t| has forward quotients -1 at 0.
    REQUIRE_THAT(upper_dini(dense, [](double t) { return -std::abs(t); }, 0.0), WithinAbs(-1.0, 1e-9));
    // The sup picks the largest quotient among the next samples.
    auto kink = [](double t) { return t <= 2e-8 ? 0.0 : (t - 2e-8) * 5; };
    REQUIRE_THAT(upper_dini(dense, kink, 0.0), WithinAbs(5.0 * (8e-8 - 2e-8) / 8e-8, 1e-6));
}

TEST_CASE("regressive functions") {
    const auto ts = TimeScale::integer(5);
    REQUIRE_THROWS_AS(RegressiveFn::constant(ts, -1.0), NonRegressive);
    const auto one = RegressiveFn::constant(ts, 1.0);
    const auto m = ominus(one);
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        REQUIRE(m(ts[i]) == -0.5);
        REQUIRE(circle_minus(one, one)(ts[i]) == 0.0);
    }
    REQUIRE_THROWS_AS(circle_plus(one, RegressiveFn::constant(TimeScale::integer(6), 1.0)),
                      InvalidShape);
}

TEST_CASE("regressive identities on random pairs") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> coef(-0.4, 0.4);
    const std::vector<TimeScale> scales{TimeScale::integer(12), TimeScale::qscale(1, 1.5, 12),
                                        TimeScale::intervals({{0, 1}, {2, 4}}, 0.2)};
    for (int trial = 0; trial < 100; ++trial) {
        const double a = coef(rng), b = coef(rng), c = coef(rng), d = coef(rng);
        for (const auto& ts : scales) {
            // Bounded so that 1 + mu p stays away from zero on every scale.
            const RegressiveFn p(ts, [a, b](double t) { return a + b * std::sin(t); });
            const RegressiveFn q(ts, [c, d](double t) { return c + d * std::cos(t); });
            const auto pq = circle_plus(p, q);
            const auto pmq = circle_minus(p, q);
            const auto p_plus_mq = circle_plus(p, ominus(q));
            const auto mm = ominus(ominus(p));
            const auto flip = ominus(circle_minus(q, p));
            for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
                const double t = ts[i];
                const double mu = ts.mu_at(i);
                REQUIRE_THAT(pq(t), WithinAbs(p(t) + q(t) + mu * p(t) * q(t), 1e-12));
                REQUIRE_THAT(circle_minus(p, p)(t), WithinAbs(0.0, 1e-12));
                REQUIRE_THAT(p_plus_mq(t), WithinAbs(pmq(t), 1e-12 * (1 + std::abs(pmq(t)))));
                REQUIRE_THAT(mm(t), WithinAbs(p(t), 1e-12 * (1 + std::abs(p(t)))));
                REQUIRE_THAT(flip(t), WithinAbs(pmq(t), 1e-12 * (1 + std::abs(pmq(t)))));
                REQUIRE_THAT(ominus(RegressiveFn::constant(ts, 1.0))(t),
                             WithinAbs(-1.0 / (1.0 + mu), 1e-12));
            }
        }
    }
}
