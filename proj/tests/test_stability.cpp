#include <catch_amalgamated.hpp>

#include <random>

#include "ftl/stability.hpp"
#include "oracles.hpp"

using namespace ftl;
using Catch::Matchers::WithinAbs;

namespace {

const AlphaGrid G = AlphaGrid::uniform(11);

FuzzyVector tri(double a, double b, double c) { return FuzzyVector{make_triangle(a, b, c, G)}; }
FuzzyVector crisp(double x) { return FuzzyVector{FuzzyNumber::crisp(x, G)}; }

ScalarHybridSystem example_comparison(const HybridFuzzySystem& sys, double r0) {
    const auto ts = sys.scale();
    return ScalarHybridSystem(
        ts, sys.switch_times(), [ts](double t, double w, double wk) { return (w + wk) / (1 + ts.mu(t)); },
        [](std::size_t, double x) { return x; }, r0);
}

/// u(t+1) = u(t)/2 on N0.
HybridFuzzySystem contraction(std::size_t n = 21) {
    const auto ts = TimeScale::integer(n);
    return HybridFuzzySystem(
        ts, {0}, [ts](double t, const FuzzyVector& u, const FuzzyVector&) { return scale(-1.0 / (1 + ts.mu(t)), u); },
        [](std::size_t, double, const FuzzyVector& u) { return u; }, 10, crisp(0.5));
}

ScalarHybridSystem contraction_comparison(const HybridFuzzySystem& sys) {
    const auto ts = sys.scale();
    return ScalarHybridSystem(
        ts, sys.switch_times(), [ts](double t, double r, double) { return -r / (1 + ts.mu(t)); },
        [](std::size_t, double x) { return x; }, 0.5);
}

}  // namespace

TEST_CASE("Dini derivative along solutions") {
    const auto V = LyapunovFn::norm_fn();
    const auto crisp_sol = solve(build_example_system(G, 2, 5, crisp(1)), StepMode::expansive, 5);
    REQUIRE(dini_along_solution(V, crisp_sol.trajectory, 0) == -0.5);
    const auto tri_sol = solve(build_example_system(G, 2, 5, tri(-1, 0, 1)), StepMode::expansive, 5);
    REQUIRE(dini_along_solution(V, tri_sol.trajectory, 0) == 0.5);
    const LyapunovFn constant{[](double, const FuzzyVector&) { return 3.0; }, 0.0};
    REQUIRE(dini_along_solution(constant, tri_sol.trajectory, 2) == 0.0);
    REQUIRE_THROWS_AS(dini_along_solution(V, tri_sol.trajectory, 5), NoSuccessor);

    // Right-scattered: exactly the delta quotient of m(t) = V(t, u(t)).
    for (std::size_t i = 0; i < 5; ++i) {
        const double q = V(i + 1.0, tri_sol.trajectory[i + 1]) - V(double(i), tri_sol.trajectory[i]);
        REQUIRE_THAT(dini_along_solution(V, tri_sol.trajectory, double(i)), WithinAbs(q, 1e-12));
    }
}

TEST_CASE("Dini derivative is bounded by the norm of the derivative") {
    const auto V = LyapunovFn::norm_fn();
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const auto u0 = draw_fuzzy_vector(SampleFamily::mixed, 1, G, 1.0, rng);
        const auto sol = solve(build_example_system(G, 10, 5, u0), StepMode::expansive, 50);
        for (std::size_t i = 0; i < 50; ++i) {
            const auto d = delta_h_derivative(sol.trajectory, double(i));
            REQUIRE(std::holds_alternative<FuzzyVector>(d));
            REQUIRE(dini_along_solution(V, sol.trajectory, double(i)) <=
                    norm(std::get<FuzzyVector>(d)) + 1e-12);
        }
    }
}

TEST_CASE("comparison bound on the switched example") {
    const auto sys = build_example_system(G, 10, 5, tri(-1, 0, 1));
    const auto sol = solve(sys, StepMode::expansive, 50);
    const auto r = solve_comparison(example_comparison(sys, 1.0), 50);
    const auto rep = verify_comparison_bound(LyapunovFn::norm_fn(), sol.trajectory, r, 1e-9);
    REQUIRE(rep.holds());
    REQUIRE(std::vector<double>(rep.v.begin(), rep.v.begin() + 3) == std::vector<double>{1, 1.5, 2.25});
    REQUIRE(std::vector<double>(rep.r.begin(), rep.r.begin() + 3) == std::vector<double>{1, 2, 3.5});

    const auto low = solve_comparison(example_comparison(sys, 0.5), 50);
    const auto skipped = verify_comparison_bound(LyapunovFn::norm_fn(), sol.trajectory, low, 1e-9);
    REQUIRE_FALSE(skipped.precondition_ok);
    REQUIRE(skipped.violations.empty());

    const auto short_r = solve_comparison(example_comparison(sys, 1.0), 10);
    REQUIRE_THROWS_AS(verify_comparison_bound(LyapunovFn::norm_fn(), sol.trajectory, short_r, 1e-9),
                      DimensionMismatch);
}

TEST_CASE("matched crisp contraction gives equality") {
    const auto sys = contraction();
    const auto sol = solve(sys, StepMode::expansive, 20);
    const auto r = solve_comparison(contraction_comparison(sys), 20);
    const auto rep = verify_comparison_bound(LyapunovFn::norm_fn(), sol.trajectory, r, 1e-12);
    REQUIRE(rep.holds());
    for (std::size_t i = 0; i < rep.v.size(); ++i) {
        REQUIRE(rep.v[i] == rep.r[i]);
    }
}

TEST_CASE("crisp equivalence of comparison and fuzzy solvers") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> c(-0.5, 0.5);
    const auto ts = TimeScale::qscale(1, 1.1, 20);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = c(rng), x0 = 0.5 + c(rng);
        HybridFuzzySystem fz(
            ts, {ts[0]}, [a](double, const FuzzyVector& u, const FuzzyVector&) { return scale(a, u); },
            [](std::size_t, double, const FuzzyVector& u) { return u; }, 10, crisp(x0));
        ScalarHybridSystem sc(ts, {ts[0]}, [a](double, double r, double) { return a * r; },
                              [](std::size_t, double x) { return x; }, x0);
        const auto u = solve(fz, StepMode::expansive, ts.back());
        const auto r = solve_comparison(sc, ts.back());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            REQUIRE_THAT(u.trajectory[i][0].center(), WithinAbs(r.values[i], 1e-12));
        }
    }
}

TEST_CASE("initial-condition sampling") {
    SamplingSpec spec{300, 42, SampleFamily::mixed, true};
    const auto s = sample_initial_conditions(2, G, 1.5, spec);
    REQUIRE(s.size() > 300);
    std::size_t probes = 0;
    for (const auto& x : s) {
        REQUIRE(norm(x.u0) < 1.5);
        REQUIRE(norm(x.u0) > 0.0);
        REQUIRE(x.u0.dim() == 2);
        probes += x.probe;
    }
    REQUIRE(probes == s.size() - 300);
    const auto again = sample_initial_conditions(2, G, 1.5, spec);
    for (std::size_t i = 0; i < s.size(); ++i) {
        REQUIRE(again[i].u0 == s[i].u0);
        REQUIRE(again[i].seed == s[i].seed);
    }
    for (auto fam : {SampleFamily::triangular, SampleFamily::trapezoidal, SampleFamily::crisp}) {
        const auto t = sample_initial_conditions(1, G, 1.0, {50, 1, fam, false});
        REQUIRE(t.size() == 50);
        if (fam == SampleFamily::crisp) {
            for (const auto& x : t) REQUIRE(x.u0[0].is_crisp());
        }
    }
}

TEST_CASE("contraction is practically stable in every sense") {
    const auto sys = contraction();
    StabilityQuery q;
    q.lambda = 1;
    q.A = 2;
    q.B = 0.1;
    q.T0 = 4;
    q.sampling = {200, 7, SampleFamily::crisp, true};
    q.modes = {StepMode::expansive, StepMode::contractive};
    const auto v = check_practical_stability(sys, contraction_comparison(sys), LyapunovFn::norm_fn(),
                                             ClassKPair::identity(), q, 20);
    REQUIRE(v.hypotheses.passed());
    for (const auto* p : {&v.practical, &v.quasi, &v.strong, &v.asymptotic}) {
        REQUIRE(p->direct == Outcome::holds_on_samples);
        REQUIRE(p->comparison == Outcome::holds_on_samples);
        REQUIRE(p->implied);
    }
    REQUIRE(v.inconsistencies.empty());
    REQUIRE(v.exit_code() == 0);
    REQUIRE(v.solver_failures == 0);
}

TEST_CASE("switched example with A = 2 is violated at t = 2") {
    const auto sys = build_example_system(G, 20, 5, tri(-1, 0, 1));
    StabilityQuery q;
    q.lambda = 1;
    q.A = 2;
    q.sampling = {200, 1, SampleFamily::triangular, true};
    const auto v = check_practical_stability(sys, example_comparison(sys, 1), LyapunovFn::norm_fn(),
                                             ClassKPair::identity(), q, 10);
    REQUIRE(v.hypotheses.passed());
    REQUIRE(v.practical.direct == Outcome::violated);
    REQUIRE(v.practical.witness);
    REQUIRE(v.practical.witness->t == 2.0);
    REQUIRE_THAT(v.practical.witness->value, WithinAbs(2.25, 1e-9));
    REQUIRE(v.practical.comparison == Outcome::violated);
    REQUIRE(v.inconsistencies.empty());
    REQUIRE(v.exit_code() == 1);
    REQUIRE(v.quasi.direct == Outcome::not_tested);
}

TEST_CASE("failed hypotheses stop the direct test") {
    const auto sys = contraction();
    StabilityQuery q;
    q.lambda = 1;
    q.A = 2;
    ClassKPair k{[](double x) { return 3 * x; }, [](double x) { return x; }};  // a(1) = 3 >= b(2)
    const auto v = check_practical_stability(sys, contraction_comparison(sys), LyapunovFn::norm_fn(), k, q, 20);
    REQUIRE_FALSE(v.hypotheses.a_lambda_lt_b_A);
    REQUIRE(v.exit_code() == 2);
    REQUIRE(v.practical.direct == Outcome::not_tested);

    ClassKPair not_k{[](double x) { return x + 1; }, [](double x) { return x; }};
    const auto w = check_practical_stability(sys, contraction_comparison(sys), LyapunovFn::norm_fn(), not_k, q, 20);
    REQUIRE_FALSE(w.hypotheses.class_k.a_ok);
    REQUIRE(w.exit_code() == 2);

    // V = 2 D breaks the upper sandwich bound a(D) = D.
    const LyapunovFn twice{[](double, const FuzzyVector& u) { return 2 * norm(u); }, 2.0};
    const auto s = check_practical_stability(sys, contraction_comparison(sys), twice, ClassKPair::identity(), q, 20);
    REQUIRE_FALSE(s.hypotheses.sandwich.ok);
    REQUIRE(s.exit_code() == 2);

    // Declared Lipschitz constant too small.
    const LyapunovFn tight{[](double, const FuzzyVector& u) { return norm(u); }, 0.5};
    const auto l = check_practical_stability(sys, contraction_comparison(sys), tight, ClassKPair::identity(), q, 20);
    REQUIRE_FALSE(l.hypotheses.lipschitz.ok);
    REQUIRE(l.exit_code() == 2);
}

TEST_CASE("Dini condition failure is reported") {
    const auto sys = build_example_system(G, 2, 5, tri(-1, 0, 1));
    // g = 0 cannot dominate the expansive growth of V.
    ScalarHybridSystem comp(sys.scale(), sys.switch_times(), [](double, double, double) { return 0.0; },
                            [](std::size_t, double x) { return x; }, 1.0);
    StabilityQuery q;
    q.sampling.count = 20;
    const auto v = check_practical_stability(sys, comp, LyapunovFn::norm_fn(), ClassKPair::identity(), q, 10);
    REQUIRE_FALSE(v.hypotheses.condition_two.ok);
    REQUIRE(v.hypotheses.condition_two.witness);
    REQUIRE(v.exit_code() == 2);
}

TEST_CASE("query validation") {
    StabilityQuery q;
    q.lambda = 2;
    q.A = 1;
    REQUIRE_THROWS_AS(q.validate(), ConfigError);
    q = {};
    q.lambda = 20;
    q.A = 30;
    REQUIRE_THROWS_AS(q.validate(), ConfigError);
    q = {};
    q.modes.clear();
    REQUIRE_THROWS_AS(q.validate(), ConfigError);
    q = {};
    q.T0 = 1000;
    const auto sys = contraction();
    REQUIRE_THROWS_AS(check_practical_stability(sys, contraction_comparison(sys), LyapunovFn::norm_fn(),
                                                ClassKPair::identity(), q, 20),
                      ConfigError);
}

TEST_CASE("verdicts are deterministic") {
    const auto sys = build_example_system(G, 20, 5, tri(-1, 0, 1));
    StabilityQuery q;
    q.sampling = {100, 99, SampleFamily::mixed, true};
    q.modes = {StepMode::expansive, StepMode::contractive};
    auto run = [&] {
        return check_practical_stability(sys, example_comparison(sys, 1), LyapunovFn::norm_fn(),
                                         ClassKPair::identity(), q, 10);
    };
    const auto a = run();
    const auto b = run();
    REQUIRE(a.practical.witness->sample == b.practical.witness->sample);
    REQUIRE(a.practical.witness->u0 == b.practical.witness->u0);
    REQUIRE(a.practical.violating_trajectories == b.practical.violating_trajectories);
    REQUIRE(a.hypotheses.sandwich.worst_margin == b.hypotheses.sandwich.worst_margin);
    REQUIRE(a.solver_failures == b.solver_failures);
}
