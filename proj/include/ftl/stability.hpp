#pragma once

// Lyapunov machinery for hybrid fuzzy systems: Dini derivative of V along
// solutions, comparison-bound verification, and practical-stability verdicts
// backed by the comparison system and by direct Monte-Carlo simulation.
//
// Nothing here proves stability. Every positive outcome means "holds on the
// sampled initial conditions, modes and horizon".

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "ftl/comparison.hpp"
#include "ftl/error.hpp"
#include "ftl/fuzzy.hpp"
#include "ftl/hukuhara.hpp"
#include "ftl/hybrid.hpp"
#include "ftl/timescale.hpp"

namespace ftl {

struct LyapunovFn {
    std::function<double(double t, const FuzzyVector& u)> V;
    /// Declared local Lipschitz constant in u, if any.
    std::optional<double> lipschitz;

    double operator()(double t, const FuzzyVector& u) const { return V(t, u); }

    /// V(t, u) = D_inf(u, 0~).
    static LyapunovFn norm_fn() {
        return {[](double, const FuzzyVector& u) { return norm(u); }, 1.0};
    }
};

struct ClassKPair {
    std::function<double(double)> a;
    std::function<double(double)> b;

    static ClassKPair identity() {
        auto id = [](double x) { return x; };
        return {id, id};
    }
};

enum class SampleFamily { triangular, trapezoidal, crisp, mixed };

inline const char* to_string(SampleFamily f) {
    switch (f) {
        case SampleFamily::triangular: return "triangular";
        case SampleFamily::trapezoidal: return "trapezoidal";
        case SampleFamily::crisp: return "crisp";
        case SampleFamily::mixed: return "mixed";
    }
    return "?";
}

inline SampleFamily sample_family_from_string(const std::string& s) {
    if (s == "triangular") return SampleFamily::triangular;
    if (s == "trapezoidal") return SampleFamily::trapezoidal;
    if (s == "crisp") return SampleFamily::crisp;
    if (s == "mixed") return SampleFamily::mixed;
    throw ConfigError("unknown sample family '" + s +
                      "' (expected triangular|trapezoidal|crisp|mixed)");
}

struct SamplingSpec {
    std::size_t count = 200;
    std::uint64_t seed = 1;
    SampleFamily family = SampleFamily::triangular;
    /// Adds deterministic symmetric/crisp initial conditions at radius
    /// lambda (1 - kBoundaryShrink) ahead of the random draws.
    bool boundary_probes = true;
};

/// Relative shrink applied to boundary probes of open balls.
inline constexpr double kBoundaryShrink = 1e-12;

struct StabilityQuery {
    double lambda = 1.0;
    double A = 2.0;
    std::optional<double> B;
    std::optional<double> T0;
    double rho = 10.0;
    SamplingSpec sampling;
    std::vector<StepMode> modes{StepMode::expansive};
    std::size_t comparison_grid = 32;
    std::size_t monotonicity_samples = 1000;
    MonotonicityBox box;

    void validate() const {
        if (!(lambda > 0.0 && lambda < A)) {
            throw ConfigError("stability query needs 0 < lambda < A");
        }
        if (!(lambda < rho)) {
            throw ConfigError("stability query needs lambda < rho");
        }
        if (B && !(*B > 0.0)) {
            throw ConfigError("B must be positive");
        }
        if (T0 && !(*T0 > 0.0)) {
            throw ConfigError("T0 must be positive");
        }
        if (modes.empty()) {
            throw ConfigError("at least one step mode is required");
        }
        if (comparison_grid < 1) {
            throw ConfigError("comparison grid needs at least one start value");
        }
    }
};

// ---------------------------------------------------------------------------
// Dini derivative along a solution

/// Upper Dini derivative of m(s) = V(s, u(s)) at stored point t. Exact
/// quotient at right-scattered t; at right-dense t the sup of the forward
/// quotients (m(s) - m(t)) / (s - t) over the next stored samples.
inline double dini_along_solution(const LyapunovFn& V, const FuzzyTrajectory& traj, double t,
                                  std::size_t samples = kDefaultDiniSamples) {
    const auto& ts = traj.scale();
    const std::size_t i = ts.index_of(t);
    if (i + 1 >= traj.size()) {
        throw NoSuccessor(t);
    }
    const double v_t = V(ts[i], traj[i]);
    const double quotient = (V(ts[i + 1], traj[i + 1]) - v_t) / (ts[i + 1] - ts[i]);
    if (ts.right_scattered_at(i)) {
        return quotient;
    }
    double best = quotient;
    for (std::size_t s = i + 2; s < traj.size() && s <= i + samples; ++s) {
        best = std::max(best, (V(ts[s], traj[s]) - v_t) / (ts[s] - ts[i]));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Comparison bound

struct BoundViolation {
    double t = 0.0;
    double v = 0.0;
    double r = 0.0;
    double margin = 0.0;  // r - V, negative here
};

struct BoundReport {
    bool precondition_ok = false;  // V(t0, u0) <= r0 + tol
    std::vector<double> times;
    std::vector<double> v;
    std::vector<double> r;
    std::vector<BoundViolation> violations;

    bool holds() const { return precondition_ok && violations.empty(); }
};

/// Pointwise check V(t, u(t)) <= r(t) + tol. Skipped (precondition_ok false)
/// when V(t0, u0) > r0 + tol.
inline BoundReport verify_comparison_bound(const LyapunovFn& V, const FuzzyTrajectory& fuzzy,
                                           const ScalarTrajectory& scalar, double tol) {
    const auto a = fuzzy.scale().points();
    const auto b = scalar.ts.points();
    if (fuzzy.size() != scalar.size() || !std::equal(a.begin(), a.begin() + fuzzy.size(), b.begin())) {
        throw DimensionMismatch("fuzzy and scalar trajectories cover different points");
    }
    BoundReport rep;
    for (std::size_t i = 0; i < fuzzy.size(); ++i) {
        rep.times.push_back(fuzzy.time(i));
        rep.v.push_back(V(fuzzy.time(i), fuzzy[i]));
        rep.r.push_back(scalar.values[i]);
    }
    rep.precondition_ok = rep.v.front() <= rep.r.front() + tol;
    if (!rep.precondition_ok) {
        return rep;
    }
    for (std::size_t i = 0; i < fuzzy.size(); ++i) {
        if (rep.v[i] > rep.r[i] + tol) {
            rep.violations.push_back({rep.times[i], rep.v[i], rep.r[i], rep.r[i] - rep.v[i]});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Initial-condition sampling

struct InitialSample {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    bool probe = false;
    FuzzyVector u0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 1));
}

inline double uniform01_open(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double x = 0.0;
    while (x == 0.0) {
        x = u(rng);
    }
    return x;
}

/// Random shape with unit-scale core and widths, not yet normalised.
inline FuzzyNumber random_shape(SampleFamily family, const AlphaGrid& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> core(-1.0, 1.0);
    std::uniform_real_distribution<double> width(0.0, 1.0);
    switch (family) {
        case SampleFamily::crisp:
            return FuzzyNumber::crisp(core(rng), grid);
        case SampleFamily::triangular: {
            const double c = core(rng);
            const double l = width(rng);
            const double r = width(rng);
            return make_triangle(c - l, c, c + r, grid);
        }
        case SampleFamily::trapezoidal: {
            const double c = core(rng);
            const double h = 0.5 * width(rng);
            const double l = width(rng);
            const double r = width(rng);
            return make_trapezoid(c - h - l, c - h, c + h, c + h + r, grid);
        }
        case SampleFamily::mixed:
            break;
    }
    throw ConfigError("mixed family must be resolved before drawing a shape");
}

inline std::vector<FuzzyNumber> probe_shapes(SampleFamily family, double r, const AlphaGrid& grid) {
    switch (family) {
        case SampleFamily::triangular:
            return {make_triangle(-r, 0.0, r, grid)};
        case SampleFamily::trapezoidal:
            return {make_trapezoid(-r, -0.5 * r, 0.5 * r, r, grid)};
        case SampleFamily::crisp:
            return {FuzzyNumber::crisp(r, grid), FuzzyNumber::crisp(-r, grid)};
        case SampleFamily::mixed:
            return {make_triangle(-r, 0.0, r, grid), make_trapezoid(-r, -0.5 * r, 0.5 * r, r, grid),
                    FuzzyNumber::crisp(r, grid), FuzzyNumber::crisp(-r, grid)};
    }
    return {};
}

}  // namespace detail

/// One random fuzzy vector from the family, rescaled so that D_inf(u, 0~) equals
/// `radius_fraction * radius`.
inline FuzzyVector draw_fuzzy_vector(SampleFamily family, std::size_t dim, const AlphaGrid& grid,
                                     double radius, std::mt19937_64& rng) {
    for (;;) {
        SampleFamily f = family;
        if (f == SampleFamily::mixed) {
            std::uniform_int_distribution<int> pick(0, 2);
            f = static_cast<SampleFamily>(pick(rng));
        }
        std::vector<FuzzyNumber> comps;
        comps.reserve(dim);
        for (std::size_t c = 0; c < dim; ++c) {
            comps.push_back(detail::random_shape(f, grid, rng));
        }
        FuzzyVector u(std::move(comps));
        const double n = norm(u);
        const double target = radius * detail::uniform01_open(rng);
        if (n > 1e-9) {
            return scale(target / n, u);
        }
    }
}

/// Boundary probes first (if enabled), then `count` random draws with
/// D_inf(u0, 0~) uniform in (0, lambda). Each sample carries its own seed.
inline std::vector<InitialSample> sample_initial_conditions(std::size_t dim, const AlphaGrid& grid,
                                                            double lambda,
                                                            const SamplingSpec& spec) {
    std::vector<InitialSample> out;
    std::size_t index = 0;
    if (spec.boundary_probes) {
        const double r = lambda * (1.0 - kBoundaryShrink);
        for (auto& shape : detail::probe_shapes(spec.family, r, grid)) {
            out.push_back({index, detail::derive_seed(spec.seed, index), true,
                           FuzzyVector(std::vector<FuzzyNumber>(dim, shape))});
            ++index;
        }
    }
    for (std::size_t s = 0; s < spec.count; ++s, ++index) {
        const std::uint64_t seed = detail::derive_seed(spec.seed, index);
        std::mt19937_64 rng(seed);
        out.push_back({index, seed, false, draw_fuzzy_vector(spec.family, dim, grid, lambda, rng)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Verdict

enum class Outcome { holds_on_samples, violated, not_tested };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::holds_on_samples: return "holds-on-samples";
        case Outcome::violated: return "violated";
        case Outcome::not_tested: return "not-tested";
    }
    return "?";
}

struct Witness {
    std::size_t sample = 0;
    std::uint64_t seed = 0;
    StepMode mode = StepMode::expansive;
    double t = 0.0;
    double value = 0.0;      // D_inf(u(t), 0~)
    double threshold = 0.0;  // A or B
    std::optional<FuzzyVector> u0;
};

struct ScalarWitness {
    double r0 = 0.0;
    double t = 0.0;
    double r = 0.0;
    double threshold = 0.0;  // b(A) or b(B)
};

struct PropertyResult {
    Outcome direct = Outcome::not_tested;
    std::optional<Witness> witness;
    std::size_t violating_trajectories = 0;
    Outcome comparison = Outcome::not_tested;
    std::optional<ScalarWitness> comparison_witness;
    /// Hypotheses hold on samples and the comparison system has the property.
    bool implied = false;
    std::string note;
};

struct ClassKCheck {
    bool a_ok = false;
    bool b_ok = false;
    std::string detail;
};

struct SandwichCheck {
    std::size_t samples = 0;
    double worst_margin = std::numeric_limits<double>::infinity();  // min over samples
    bool ok = true;
    struct Fail {
        double t;
        double d;
        double b_of_d;
        double v;
        double a_of_d;
    };
    std::optional<Fail> witness;
};

struct ConditionTwoCheck {
    std::size_t checks = 0;
    double worst_margin = std::numeric_limits<double>::infinity();  // min of g - D+V
    bool ok = true;
    struct Fail {
        std::size_t sample;
        StepMode mode;
        double t;
        double dini;
        double g;
    };
    std::optional<Fail> witness;
};

struct LipschitzCheck {
    std::size_t pairs = 0;
    double estimate = 0.0;
    std::optional<double> declared;
    bool required = false;  // the scale has right-dense points
    bool ok = true;
};

struct HypothesisReport {
    ClassKCheck class_k;
    double a_lambda = 0.0;
    double b_A = 0.0;
    bool a_lambda_lt_b_A = false;
    SandwichCheck sandwich;
    MonotonicityReport monotonicity;
    ConditionTwoCheck condition_two;
    LipschitzCheck lipschitz;
    std::vector<std::string> failures;

    bool passed() const { return failures.empty(); }
};

struct Verdict {
    StabilityQuery query;
    double horizon = 0.0;
    HypothesisReport hypotheses;
    PropertyResult practical;
    PropertyResult quasi;
    PropertyResult strong;
    PropertyResult asymptotic;
    std::vector<std::string> inconsistencies;
    std::size_t trajectories = 0;
    std::size_t solver_failures = 0;
    std::size_t comparison_runs = 0;
    bool comparison_approximate = false;
    std::vector<std::string> notes;

    /// 0 all tested properties hold on samples, 1 violation witnessed,
    /// 2 hypotheses failed (nothing tested).
    int exit_code() const {
        if (!hypotheses.passed()) {
            return 2;
        }
        for (const auto* p : {&practical, &quasi, &strong, &asymptotic}) {
            if (p->direct == Outcome::violated) {
                return 1;
            }
        }
        return 0;
    }
};

namespace detail {

struct Property {
    double threshold;
    std::size_t from;  // first point index the bound applies to
};

/// Earliest index in [from, n) whose value reaches the threshold.
inline std::optional<std::size_t> first_breach(const std::vector<double>& d, double threshold,
                                               std::size_t from) {
    for (std::size_t i = from; i < d.size(); ++i) {
        if (!(d[i] < threshold)) {
            return i;
        }
    }
    return std::nullopt;
}

inline bool witness_before(const Witness& a, const Witness& b) {
    return std::tie(a.t, a.sample, a.mode) < std::tie(b.t, b.sample, b.mode);
}

inline void record(PropertyResult& p, Witness w) {
    ++p.violating_trajectories;
    if (!p.witness || witness_before(w, *p.witness)) {
        p.witness = std::move(w);
    }
}

inline ClassKCheck check_class_k(const ClassKPair& k, double upto) {
    ClassKCheck out;
    auto check = [&](const std::function<double(double)>& f, const char* name) {
        if (std::abs(f(0.0)) > kEndpointTol) {
            out.detail += std::string(name) + "(0) != 0; ";
            return false;
        }
        constexpr std::size_t n = 256;
        double prev = f(0.0);
        for (std::size_t i = 1; i <= n; ++i) {
            const double x = upto * static_cast<double>(i) / static_cast<double>(n);
            const double y = f(x);
            if (!std::isfinite(y) || !(y > prev)) {
                out.detail += std::string(name) + " not strictly increasing near x = " +
                              std::to_string(x) + "; ";
                return false;
            }
            prev = y;
        }
        return true;
    };
    out.a_ok = check(k.a, "a");
    out.b_ok = check(k.b, "b");
    return out;
}

}  // namespace detail

/// Practical-stability check of a hybrid fuzzy system.
///
/// 1. Hypotheses on samples: class-K a, b; a(lambda) < b(A); the sandwich
///    b(D) <= V <= a(D) on S(A); monotonicity of g and psi_k; the Dini
///    condition D+V <= g(t, V, psi_k(V_k)) along every simulated trajectory;
///    a Lipschitz spot check of V (only required with right-dense points).
/// 2. The comparison system from a grid of r0 in [0, a(lambda)).
/// 3. Direct simulation from sampled u0 with D_inf(u0, 0~) < lambda.
/// Any property that the comparison system has while hypotheses pass must
/// also hold in step 3; otherwise it is listed under inconsistencies.
inline Verdict check_practical_stability(const HybridFuzzySystem& sys,
                                         const ScalarHybridSystem& comp, const LyapunovFn& V,
                                         const ClassKPair& kpair, const StabilityQuery& q,
                                         double horizon) {
    q.validate();
    const auto& ts = sys.scale();
    const std::size_t end = ts.index_of(horizon);
    {
        const auto a = ts.points();
        const auto b = comp.scale().points();
        if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) {
            throw ConfigError("fuzzy and comparison systems use different time scales");
        }
    }

    std::optional<std::size_t> tail_from;
    if (q.T0) {
        const auto i = ts.find(ts.front() + *q.T0);
        if (!i) {
            throw ConfigError("t0 + T0 is not a point of the time scale");
        }
        if (*i > end) {
            throw ConfigError("t0 + T0 lies beyond the horizon");
        }
        tail_from = *i;
    }
    const bool quasi_tested = q.B && tail_from;

    Verdict out;
    out.query = q;
    out.horizon = ts[end];
    auto& hyp = out.hypotheses;

    // Class K and the a(lambda) < b(A) gate.
    hyp.class_k = detail::check_class_k(kpair, std::max(q.A, q.rho));
    if (!hyp.class_k.a_ok || !hyp.class_k.b_ok) {
        hyp.failures.push_back("class-K: " + hyp.class_k.detail);
    }
    hyp.a_lambda = kpair.a(q.lambda);
    hyp.b_A = kpair.b(q.A);
    hyp.a_lambda_lt_b_A = hyp.a_lambda < hyp.b_A;
    if (!hyp.a_lambda_lt_b_A) {
        hyp.failures.push_back("a(lambda) = " + std::to_string(hyp.a_lambda) +
                               " is not below b(A) = " + std::to_string(hyp.b_A));
    }

    // Monotonicity of the comparison right-hand side.
    hyp.monotonicity =
        check_monotonicity_hypothesis(comp, q.monotonicity_samples, q.sampling.seed, q.box);
    if (!hyp.monotonicity.passed()) {
        hyp.failures.push_back("monotonicity: " + std::to_string(hyp.monotonicity.violations.size()) +
                               " violating samples");
    }

    const AlphaGrid& grid = sys.u0().grid();
    const std::size_t dim = sys.u0().dim();
    const auto samples = sample_initial_conditions(dim, grid, q.lambda, q.sampling);
    if (samples.empty()) {
        throw ConfigError("sampling produced no initial conditions");
    }

    auto sandwich_point = [&](double t, const FuzzyVector& u) {
        const double d = norm(u);
        if (!(d < q.A)) {
            return;
        }
        const double v = V(t, u);
        const double lo = kpair.b(d);
        const double hi = kpair.a(d);
        const double tol = 1e-12 * (1.0 + std::abs(v));
        const double margin = std::min(v - lo, hi - v);
        ++hyp.sandwich.samples;
        if (margin < hyp.sandwich.worst_margin) {
            hyp.sandwich.worst_margin = margin;
        }
        if (margin < -tol && hyp.sandwich.ok) {
            hyp.sandwich.ok = false;
            hyp.sandwich.witness = SandwichCheck::Fail{t, d, lo, v, hi};
        }
    };

    // Direct simulation; also feeds the sandwich and Dini-condition checks.
    std::vector<std::tuple<std::size_t, StepMode, std::vector<double>>> norms;
    for (const auto& s : samples) {
        const HybridFuzzySystem run = sys.with_initial(s.u0);
        for (const StepMode mode : q.modes) {
            ++out.trajectories;
            std::optional<HybridSolution> sol;
            try {
                sol.emplace(solve(run, mode, horizon));
            } catch (const StepFailure&) {
                ++out.solver_failures;
                continue;
            }
            const auto& traj = sol->trajectory;
            std::vector<double> d(traj.size());
            std::vector<double> vs(traj.size());
            for (std::size_t i = 0; i < traj.size(); ++i) {
                d[i] = norm(traj[i]);
                vs[i] = V(traj.time(i), traj[i]);
                sandwich_point(traj.time(i), traj[i]);
            }
            const auto& sw = run.switch_index();
            for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
                const std::size_t k = sol->segment[i];
                const double vk = vs[sw[k]];
                const double g = comp.g(traj.time(i), vs[i], comp.psi(k, vk));
                const double dv = dini_along_solution(V, traj, traj.time(i));
                const double margin = g - dv;
                auto& c2 = hyp.condition_two;
                ++c2.checks;
                c2.worst_margin = std::min(c2.worst_margin, margin);
                if (margin < -1e-9 * (1.0 + std::abs(g) + std::abs(dv)) && c2.ok) {
                    c2.ok = false;
                    c2.witness = ConditionTwoCheck::Fail{s.index, mode, traj.time(i), dv, g};
                }
            }
            norms.emplace_back(s.index, mode, std::move(d));
        }
    }
    if (norms.empty()) {
        throw ConfigError("no sampled initial condition produced a solution");
    }

    // Extra sandwich samples across S(A) at random stored times.
    {
        std::mt19937_64 rng(detail::derive_seed(q.sampling.seed, 0xA11CEULL));
        std::uniform_int_distribution<std::size_t> pick_t(0, end);
        for (std::size_t s = 0; s < q.sampling.count; ++s) {
            const double t = ts[pick_t(rng)];
            sandwich_point(t, draw_fuzzy_vector(q.sampling.family, dim, grid, q.A, rng));
        }
    }
    if (!hyp.sandwich.ok) {
        hyp.failures.push_back("sandwich b(D) <= V <= a(D) violated on S(A)");
    }
    if (!hyp.condition_two.ok) {
        hyp.failures.push_back("Dini condition D+V <= g(t, V, psi_k(V_k)) violated");
    }

    // Lipschitz spot check.
    {
        auto& lip = hyp.lipschitz;
        lip.declared = V.lipschitz;
        for (std::size_t i = 0; i < end; ++i) {
            lip.required = lip.required || ts.right_dense_at(i);
        }
        std::mt19937_64 rng(detail::derive_seed(q.sampling.seed, 0x11B5ULL));
        std::uniform_int_distribution<std::size_t> pick_t(0, end);
        const double radius = q.rho * (1.0 - kBoundaryShrink);
        for (std::size_t s = 0; s < q.sampling.count; ++s) {
            const double t = ts[pick_t(rng)];
            const FuzzyVector u1 = draw_fuzzy_vector(q.sampling.family, dim, grid, radius, rng);
            const FuzzyVector u2 = draw_fuzzy_vector(q.sampling.family, dim, grid, radius, rng);
            const double du = vec_dist(u1, u2);
            if (du <= 1e-12) {
                continue;
            }
            ++lip.pairs;
            lip.estimate = std::max(lip.estimate, std::abs(V(t, u1) - V(t, u2)) / du);
        }
        if (lip.declared && lip.estimate > *lip.declared * (1.0 + 1e-9)) {
            lip.ok = false;
            hyp.failures.push_back("Lipschitz estimate " + std::to_string(lip.estimate) +
                                   " exceeds declared constant");
        }
    }

    const bool gates = hyp.passed();
    const double bB = q.B ? kpair.b(*q.B) : 0.0;

    // Comparison system from a grid of starts in [0, a(lambda)).
    {
        std::vector<double> starts;
        for (std::size_t i = 0; i < q.comparison_grid; ++i) {
            starts.push_back(hyp.a_lambda * static_cast<double>(i) /
                             static_cast<double>(q.comparison_grid));
        }
        if (q.sampling.boundary_probes) {
            starts.push_back(hyp.a_lambda * (1.0 - kBoundaryShrink));
        }
        bool prac = true;
        bool quasi = true;
        for (const double r0 : starts) {
            if (!(r0 >= 0.0)) {
                continue;
            }
            const ScalarTrajectory r = solve_comparison(comp.with_start(r0), horizon);
            ++out.comparison_runs;
            out.comparison_approximate = out.comparison_approximate || r.approximate;
            if (auto i = detail::first_breach(r.values, hyp.b_A, 0); i && prac) {
                prac = false;
                out.practical.comparison_witness = ScalarWitness{r0, ts[*i], r.values[*i], hyp.b_A};
            }
            if (quasi_tested) {
                if (auto i = detail::first_breach(r.values, bB, *tail_from); i && quasi) {
                    quasi = false;
                    out.quasi.comparison_witness = ScalarWitness{r0, ts[*i], r.values[*i], bB};
                }
            }
        }
        const auto to_outcome = [](bool ok) {
            return ok ? Outcome::holds_on_samples : Outcome::violated;
        };
        out.practical.comparison = to_outcome(prac);
        out.asymptotic.comparison = tail_from ? to_outcome(prac) : Outcome::not_tested;
        if (tail_from) {
            out.asymptotic.comparison_witness = out.practical.comparison_witness;
        }
        if (quasi_tested) {
            out.quasi.comparison = to_outcome(quasi);
            out.strong.comparison = to_outcome(prac && quasi);
            out.strong.comparison_witness =
                prac ? out.quasi.comparison_witness : out.practical.comparison_witness;
        }
    }

    // Direct outcomes.
    if (gates) {
        const auto u0_of = [&](std::size_t index) { return samples[index].u0; };
        bool prac = true;
        bool quasi = true;
        for (const auto& [index, mode, d] : norms) {
            const std::uint64_t seed = samples[index].seed;
            if (auto i = detail::first_breach(d, q.A, 0)) {
                prac = false;
                detail::record(out.practical,
                               {index, seed, mode, ts[*i], d[*i], q.A, u0_of(index)});
            }
            if (quasi_tested) {
                if (auto i = detail::first_breach(d, *q.B, *tail_from)) {
                    quasi = false;
                    detail::record(out.quasi, {index, seed, mode, ts[*i], d[*i], *q.B, u0_of(index)});
                }
            }
        }
        const auto to_outcome = [](bool ok) {
            return ok ? Outcome::holds_on_samples : Outcome::violated;
        };
        out.practical.direct = to_outcome(prac);
        if (tail_from) {
            out.asymptotic.direct = out.practical.direct;
            out.asymptotic.witness = out.practical.witness;
            out.asymptotic.violating_trajectories = out.practical.violating_trajectories;
            out.asymptotic.note = "tail bound D(u(t), 0~) < A for t >= t0 + T0, together with "
                                  "the practical bound";
        } else {
            out.asymptotic.note = "T0 not given";
        }
        if (quasi_tested) {
            out.quasi.direct = to_outcome(quasi);
            out.strong.direct = to_outcome(prac && quasi);
            out.strong.witness = prac ? out.quasi.witness : out.practical.witness;
            out.strong.violating_trajectories =
                out.practical.violating_trajectories + out.quasi.violating_trajectories;
        } else {
            out.quasi.note = "B and T0 not both given";
            out.strong.note = out.quasi.note;
        }
        for (auto* p : {&out.practical, &out.quasi, &out.strong, &out.asymptotic}) {
            p->implied = p->comparison == Outcome::holds_on_samples;
        }
        const std::pair<const char*, const PropertyResult*> named[] = {
            {"practically stable", &out.practical},
            {"practically quasi-stable", &out.quasi},
            {"strongly practically stable", &out.strong},
            {"practically asymptotically stable", &out.asymptotic}};
        for (const auto& [name, p] : named) {
            if (p->implied && p->direct == Outcome::violated) {
                out.inconsistencies.push_back(std::string(name) +
                                              ": implied by the comparison system but violated "
                                              "by direct simulation");
            }
        }
    } else {
        for (auto* p : {&out.practical, &out.quasi, &out.strong, &out.asymptotic}) {
            p->direct = Outcome::not_tested;
            p->note = "hypotheses failed; see hypothesis report";
        }
    }

    out.notes.push_back("quantifier over all solutions approximated by sampled u0 and step modes");
    if (out.comparison_approximate) {
        out.notes.push_back("comparison solution at right-dense points is an Euler approximation "
                            "of the maximal solution");
    }
    return out;
}

}  // namespace ftl
