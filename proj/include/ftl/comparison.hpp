#pragma once

// Scalar comparison hybrid system r^Delta = g(t, r, psi_k(r_k)) and checks of
// its monotonicity hypotheses.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ftl/error.hpp"
#include "ftl/hybrid.hpp"
#include "ftl/timescale.hpp"

namespace ftl {

/// g(t, r, v).
using ScalarRhs = std::function<double(double t, double r, double v)>;
/// psi_k(r_k).
using SwitchPsi = std::function<double(std::size_t k, double r_k)>;

/// Raised when g yields a non-finite value.
class BlowUp : public Error {
public:
    BlowUp(double t, double r)
        : Error("comparison right-hand side is non-finite at t = " + std::to_string(t) +
                ", r = " + std::to_string(r)),
          t_(t) {}
    double t() const { return t_; }

private:
    double t_;
};

class ScalarHybridSystem {
public:
    ScalarHybridSystem(TimeScale ts, std::vector<double> switch_times, ScalarRhs g, SwitchPsi psi,
                       double r0)
        : ts_(std::move(ts)),
          switch_times_(std::move(switch_times)),
          switch_idx_(switch_indices(ts_, switch_times_)),
          g_(std::move(g)),
          psi_(std::move(psi)),
          r0_(r0) {
        if (!(r0_ >= 0.0)) {
            throw ConfigError("comparison start r0 must be >= 0");
        }
    }

    const TimeScale& scale() const { return ts_; }
    const std::vector<double>& switch_times() const { return switch_times_; }
    const std::vector<std::size_t>& switch_index() const { return switch_idx_; }
    double r0() const { return r0_; }
    double g(double t, double r, double v) const { return g_(t, r, v); }
    double psi(std::size_t k, double r_k) const { return psi_(k, r_k); }

    ScalarHybridSystem with_start(double r0) const {
        return ScalarHybridSystem(ts_, switch_times_, g_, psi_, r0);
    }

private:
    TimeScale ts_;
    std::vector<double> switch_times_;
    std::vector<std::size_t> switch_idx_;
    ScalarRhs g_;
    SwitchPsi psi_;
    double r0_;
};

struct ScalarTrajectory {
    TimeScale ts;
    std::vector<double> values;
    std::vector<std::size_t> segment;
    /// True when any step crossed a right-dense point, where the Euler
    /// recursion only approximates the maximal solution.
    bool approximate = false;

    std::size_t size() const { return values.size(); }
};

/// Euler recursion r(sigma) = r + mu g(t, r, psi_k(r_k)) with psi_k frozen at
/// segment entry and r_k = r_{k-1}(t_k).
inline ScalarTrajectory solve_comparison(const ScalarHybridSystem& sys, double horizon) {
    const auto& ts = sys.scale();
    const std::size_t end = ts.index_of(horizon);
    const auto& sw = sys.switch_index();
    ScalarTrajectory out{ts, {sys.r0()}, {0}, false};
    out.values.reserve(end + 1);
    std::size_t k = 0;
    double v = sys.psi(0, sys.r0());
    for (std::size_t i = 0; i < end; ++i) {
        if (k + 1 < sw.size() && sw[k + 1] == i) {
            ++k;
            v = sys.psi(k, out.values[i]);
        }
        const double r = out.values[i];
        const double g = sys.g(ts[i], r, v);
        if (!std::isfinite(g) || !std::isfinite(v)) {
            throw BlowUp(ts[i], r);
        }
        out.approximate = out.approximate || ts.right_dense_at(i);
        out.values.push_back(r + ts.mu_at(i) * g);
        out.segment.push_back(k + 1 < sw.size() && sw[k + 1] == i + 1 ? k + 1 : k);
    }
    return out;
}

/// Sampling box for the monotonicity check.
struct MonotonicityBox {
    double r_min = 0.0;
    double r_max = 10.0;
    double v_min = 0.0;
    double v_max = 10.0;
};

struct MonotonicityViolation {
    std::string condition;  // "g*mu+r in r", "g in v", "psi in v"
    double t = 0.0;
    std::size_t k = 0;
    double r = 0.0;
    double v = 0.0;
    double lo_arg = 0.0;
    double hi_arg = 0.0;
    double lo_value = 0.0;
    double hi_value = 0.0;
};

struct MonotonicityReport {
    std::size_t samples = 0;
    std::vector<MonotonicityViolation> violations;
    bool passed() const { return violations.empty(); }
};

/// Randomized check that g(t,r,v) mu(t) + r is nondecreasing in r, g is
/// nondecreasing in v, and every psi_k is nondecreasing.
inline MonotonicityReport check_monotonicity_hypothesis(const ScalarHybridSystem& sys,
                                                        std::size_t samples, std::uint64_t seed,
                                                        const MonotonicityBox& box = {}) {
    if (samples < 1) {
        throw ConfigError("monotonicity check needs at least one sample");
    }
    const auto& ts = sys.scale();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_t(0, ts.size() - 2);
    std::uniform_int_distribution<std::size_t> pick_k(0, sys.switch_index().size() - 1);
    std::uniform_real_distribution<double> ur(box.r_min, box.r_max);
    std::uniform_real_distribution<double> uv(box.v_min, box.v_max);
    auto tol = [](double a, double b) { return 1e-12 * (1.0 + std::abs(a) + std::abs(b)); };

    MonotonicityReport rep;
    rep.samples = samples;
    for (std::size_t s = 0; s < samples; ++s) {
        const std::size_t i = pick_t(rng);
        const double t = ts[i];
        const double mu = ts.mu_at(i);
        double r1 = ur(rng);
        double r2 = ur(rng);
        double v1 = uv(rng);
        double v2 = uv(rng);
        if (r1 > r2) {
            std::swap(r1, r2);
        }
        if (v1 > v2) {
            std::swap(v1, v2);
        }
        const std::size_t k = pick_k(rng);

        const double a1 = sys.g(t, r1, v1) * mu + r1;
        const double a2 = sys.g(t, r2, v1) * mu + r2;
        if (a1 > a2 + tol(a1, a2)) {
            rep.violations.push_back({"g*mu+r in r", t, k, r1, v1, r1, r2, a1, a2});
        }
        const double b1 = sys.g(t, r1, v1);
        const double b2 = sys.g(t, r1, v2);
        if (b1 > b2 + tol(b1, b2)) {
            rep.violations.push_back({"g in v", t, k, r1, v1, v1, v2, b1, b2});
        }
        const double p1 = sys.psi(k, v1);
        const double p2 = sys.psi(k, v2);
        if (p1 > p2 + tol(p1, p2)) {
            rep.violations.push_back({"psi in v", t, k, r1, v1, v1, v2, p1, p2});
        }
    }
    return rep;
}

}  // namespace ftl
