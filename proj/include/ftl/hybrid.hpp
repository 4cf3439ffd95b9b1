#pragma once

// Hybrid fuzzy dynamic systems with piecewise-constant switching and their
// Hukuhara-Euler solver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ftl/error.hpp"
#include "ftl/fuzzy.hpp"
#include "ftl/hukuhara.hpp"
#include "ftl/timescale.hpp"

namespace ftl {

/// f(t, u, lambda).
using HybridRhs =
    std::function<FuzzyVector(double t, const FuzzyVector& u, const FuzzyVector& lambda)>;

/// lambda_k(t_k, u_k); k is the segment index.
using SwitchMap = std::function<FuzzyVector(std::size_t k, double t_k, const FuzzyVector& u_k)>;

enum class StepMode { expansive, contractive };

inline const char* to_string(StepMode m) {
    return m == StepMode::expansive ? "expansive" : "contractive";
}

inline StepMode step_mode_from_string(const std::string& s) {
    if (s == "expansive") {
        return StepMode::expansive;
    }
    if (s == "contractive") {
        return StepMode::contractive;
    }
    throw ConfigError("unknown step mode '" + s + "' (expected expansive|contractive)");
}

/// Switch instants as point indices; the first must be the first point.
inline std::vector<std::size_t> switch_indices(const TimeScale& ts,
                                               const std::vector<double>& switch_times) {
    if (switch_times.empty()) {
        throw ConfigError("at least one switch time (t0) is required");
    }
    std::vector<std::size_t> idx;
    idx.reserve(switch_times.size());
    for (const double t : switch_times) {
        const auto i = ts.find(t);
        if (!i) {
            throw ConfigError("switch time " + std::to_string(t) + " is not a stored point");
        }
        if (!idx.empty() && *i <= idx.back()) {
            throw ConfigError("switch times must be strictly increasing");
        }
        idx.push_back(*i);
    }
    if (idx.front() != 0) {
        throw ConfigError("first switch time must be the first point of the time scale");
    }
    return idx;
}

class HybridFuzzySystem {
public:
    HybridFuzzySystem(TimeScale ts, std::vector<double> switch_times, HybridRhs rhs,
                      SwitchMap switch_map, double rho, FuzzyVector u0)
        : ts_(std::move(ts)),
          switch_times_(std::move(switch_times)),
          switch_idx_(switch_indices(ts_, switch_times_)),
          rhs_(std::move(rhs)),
          switch_map_(std::move(switch_map)),
          rho_(rho),
          u0_(std::move(u0)) {
        if (!(rho_ > 0.0)) {
            throw ConfigError("rho must be positive");
        }
        if (!(norm(u0_) < rho_)) {
            throw ConfigError("initial condition lies outside S(rho): D(u0, 0) = " +
                              std::to_string(norm(u0_)) + " >= " + std::to_string(rho_));
        }
    }

    const TimeScale& scale() const { return ts_; }
    const std::vector<double>& switch_times() const { return switch_times_; }
    const std::vector<std::size_t>& switch_index() const { return switch_idx_; }
    double rho() const { return rho_; }
    const FuzzyVector& u0() const { return u0_; }

    FuzzyVector rhs(double t, const FuzzyVector& u, const FuzzyVector& lambda) const {
        return rhs_(t, u, lambda);
    }
    FuzzyVector switch_value(std::size_t k, double t_k, const FuzzyVector& u_k) const {
        return switch_map_(k, t_k, u_k);
    }

    /// Same system started from a different initial condition.
    HybridFuzzySystem with_initial(FuzzyVector u0) const {
        return HybridFuzzySystem(ts_, switch_times_, rhs_, switch_map_, rho_, std::move(u0));
    }

    /// Segment containing point index i: the largest k with t_k <= t_i.
    std::size_t segment_of(std::size_t i) const {
        auto it = std::upper_bound(switch_idx_.begin(), switch_idx_.end(), i);
        return static_cast<std::size_t>(it - switch_idx_.begin()) - 1;
    }

private:
    TimeScale ts_;
    std::vector<double> switch_times_;
    std::vector<std::size_t> switch_idx_;
    HybridRhs rhs_;
    SwitchMap switch_map_;
    double rho_;
    FuzzyVector u0_;
};

/// One Hukuhara-Euler step from u with increment mu * f.
///
/// expansive:   u(sigma) = u ⊕ mu f
/// contractive: u(sigma) solves u = u(sigma) ⊕ (-1)(mu f), i.e. the
///              Hukuhara difference u ⊖H (-mu f); throws StepFailure when it
///              does not exist.
inline FuzzyVector euler_step(StepMode mode, double t, double mu, const FuzzyVector& u,
                              const FuzzyVector& f) {
    const FuzzyVector inc = scale(mu, f);
    if (mode == StepMode::expansive) {
        return add(u, inc);
    }
    if (inc.dim() != u.dim()) {
        throw DimensionMismatch("right-hand side dimension differs from state dimension");
    }
    std::vector<FuzzyNumber> out;
    out.reserve(u.dim());
    for (std::size_t c = 0; c < u.dim(); ++c) {
        const auto& x = u[c];
        const auto& d = inc[c];
        std::vector<double> lo(x.levels());
        std::vector<double> hi(x.levels());
        for (std::size_t a = 0; a < x.levels(); ++a) {
            lo[a] = x.lower()[a] + d.upper()[a];
            hi[a] = x.upper()[a] + d.lower()[a];
        }
        auto next = FuzzyNumber::try_from_cuts(x.grid(), std::move(lo), std::move(hi));
        if (!next) {
            throw StepFailure(t, "Hukuhara difference does not exist in component " +
                                     std::to_string(c));
        }
        out.push_back(std::move(*next));
    }
    return FuzzyVector(std::move(out));
}

struct HybridSolution {
    FuzzyTrajectory trajectory;
    std::vector<std::size_t> segment;         // per point
    std::vector<FuzzyVector> switch_values;   // lambda_k per entered segment
    std::vector<double> residual;             // per step: d(Delta_H u, f), NaN if undefined
    StepMode mode = StepMode::expansive;
};

namespace detail {

inline void require_finite(double t, const FuzzyVector& u) {
    for (const auto& c : u.components()) {
        for (std::size_t a = 0; a < c.levels(); ++a) {
            if (!std::isfinite(c.lower()[a]) || !std::isfinite(c.upper()[a])) {
                throw SolverAbort(t, "state became non-finite");
            }
        }
    }
}

inline double step_residual(const TimeScale& ts, std::size_t i, const FuzzyVector& u,
                            const FuzzyVector& next, const FuzzyVector& f) {
    auto d = gh_difference(next, u);
    if (!d) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return vec_dist(scale(1.0 / ts.mu_at(i), *d), f);
}

}  // namespace detail

/// Steps the frozen-lambda dynamics from point index `first` to `last`
/// starting at u_start. Returns the values at first..last inclusive.
inline std::vector<FuzzyVector> solve_segment(const HybridFuzzySystem& sys, StepMode mode,
                                              std::size_t first, std::size_t last,
                                              const FuzzyVector& u_start,
                                              const FuzzyVector& lambda,
                                              std::vector<double>* residual = nullptr) {
    const auto& ts = sys.scale();
    std::vector<FuzzyVector> out{u_start};
    out.reserve(last - first + 1);
    for (std::size_t i = first; i < last; ++i) {
        const FuzzyVector& u = out.back();
        std::optional<FuzzyVector> f;
        std::optional<FuzzyVector> next;
        try {
            f.emplace(sys.rhs(ts[i], u, lambda));
            next.emplace(euler_step(mode, ts[i], ts.mu_at(i), u, *f));
        } catch (const InvalidShape& e) {
            throw SolverAbort(ts[i], std::string("state left the space of fuzzy numbers: ") + e.what());
        }
        detail::require_finite(ts[i + 1], *next);
        if (residual) {
            residual->push_back(detail::step_residual(ts, i, u, *next, *f));
        }
        out.push_back(std::move(*next));
    }
    return out;
}

/// Piecewise solution up to `horizon`. lambda_k is evaluated once at
/// (t_k, u(t_k)); the value at t_{k+1} comes from segment k and becomes u_{k+1}.
inline HybridSolution solve(const HybridFuzzySystem& sys, StepMode mode, double horizon) {
    const auto& ts = sys.scale();
    const std::size_t end = ts.index_of(horizon);
    const auto& sw = sys.switch_index();

    std::vector<FuzzyVector> values{sys.u0()};
    std::vector<std::size_t> segment{0};
    std::vector<FuzzyVector> lambdas;
    std::vector<double> residual;

    for (std::size_t k = 0; k < sw.size() && sw[k] < end; ++k) {
        const std::size_t first = sw[k];
        const std::size_t last = (k + 1 < sw.size()) ? std::min(sw[k + 1], end) : end;
        const FuzzyVector u_k = values.back();
        lambdas.push_back(sys.switch_value(k, ts[first], u_k));
        auto part = solve_segment(sys, mode, first, last, u_k, lambdas.back(), &residual);
        for (std::size_t j = 1; j < part.size(); ++j) {
            values.push_back(std::move(part[j]));
            segment.push_back(sys.segment_of(first + j));
        }
    }
    return HybridSolution{FuzzyTrajectory(ts, std::move(values)), std::move(segment),
                          std::move(lambdas), std::move(residual), mode};
}

/// The switched system  Delta_H u = ⊖r u ⊕ eta(t) lambda_k(u_k)  on N0 with
/// eta = 1/(1+mu), lambda_0 = 0~ and lambda_k(tau) = tau for k >= 1. Switch
/// instants are tau_k = k * switch_gap, k = 0..n_switches.
inline HybridFuzzySystem build_example_system(const AlphaGrid& grid, int n_switches, int switch_gap,
                                              FuzzyVector u0, double rho = 10.0,
                                              std::size_t points = 0) {
    if (n_switches < 1 || switch_gap < 1) {
        throw ConfigError("example system needs n_switches >= 1 and switch_gap >= 1");
    }
    if (!(u0.grid() == grid)) {
        throw IncompatibleGrids("initial condition does not use the requested grid");
    }
    const std::size_t n = std::max<std::size_t>(
        points, static_cast<std::size_t>(n_switches) * static_cast<std::size_t>(switch_gap) + 1);
    TimeScale ts = TimeScale::integer(n);
    std::vector<double> sw;
    for (int k = 0; k <= n_switches; ++k) {
        sw.push_back(static_cast<double>(k * switch_gap));
    }
    HybridRhs rhs = [ts](double t, const FuzzyVector& u, const FuzzyVector& lambda) {
        const double eta = 1.0 / (1.0 + ts.mu(t));
        return add(scale(-eta, u), scale(eta, lambda));
    };
    SwitchMap lam = [](std::size_t k, double, const FuzzyVector& u_k) {
        return k == 0 ? FuzzyVector::zero(u_k.dim(), u_k.grid()) : u_k;
    };
    return HybridFuzzySystem(std::move(ts), std::move(sw), std::move(rhs), std::move(lam), rho,
                             std::move(u0));
}

}  // namespace ftl
