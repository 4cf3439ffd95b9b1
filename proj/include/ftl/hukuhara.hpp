#pragma once

// Delta-Hukuhara derivative of sampled fuzzy trajectories.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ftl/error.hpp"
#include "ftl/fuzzy.hpp"
#include "ftl/timescale.hpp"

namespace ftl {

/// One fuzzy vector per stored point, for a prefix of the time scale.
class FuzzyTrajectory {
public:
    FuzzyTrajectory(TimeScale ts, std::vector<FuzzyVector> values)
        : ts_(std::move(ts)), values_(std::move(values)) {
        if (values_.empty() || values_.size() > ts_.size()) {
            throw DimensionMismatch("trajectory length must be in [1, scale size]");
        }
        for (const auto& v : values_) {
            if (v.dim() != values_.front().dim()) {
                throw DimensionMismatch("trajectory values have mixed dimensions");
            }
            if (!(v.grid() == values_.front().grid())) {
                throw IncompatibleGrids("trajectory values use different alpha grids");
            }
        }
    }

    const TimeScale& scale() const { return ts_; }
    std::size_t size() const { return values_.size(); }
    double time(std::size_t i) const { return ts_[i]; }
    const FuzzyVector& operator[](std::size_t i) const { return values_[i]; }
    const FuzzyVector& at(double t) const { return values_.at(ts_.index_of(t)); }
    std::span<const FuzzyVector> values() const { return values_; }
    std::size_t dim() const { return values_.front().dim(); }

private:
    TimeScale ts_;
    std::vector<FuzzyVector> values_;
};

struct NotDifferentiable {
    double t = 0.0;
    std::string reason;
};

using DerivativeOutcome = std::variant<FuzzyVector, NotDifferentiable>;

struct HukuharaOptions {
    /// Relative agreement tolerance for forward/backward quotients at
    /// right-dense points: |fwd - bwd| <= tol * (1 + magnitude).
    double dense_tolerance = 1e-6;
};

namespace detail {

inline std::size_t require_nonterminal(const FuzzyTrajectory& traj, double t) {
    const std::size_t i = traj.scale().index_of(t);
    if (i + 1 >= traj.size()) {
        throw NoSuccessor(t);
    }
    return i;
}

/// (later ⊖gH earlier) / h, or nullopt when the gH-difference is missing.
inline std::optional<FuzzyVector> gh_quotient(const FuzzyVector& later, const FuzzyVector& earlier,
                                              double h) {
    auto diff = gh_difference(later, earlier);
    if (!diff) {
        return std::nullopt;
    }
    return scale(1.0 / h, *diff);
}

}  // namespace detail

/// Delta-Hukuhara derivative at a stored non-terminal point t.
///
/// Right-scattered: [f(sigma(t)) ⊖gH f(t)] / mu(t). Right-dense: forward and
/// backward gH quotients at the sampled spacing must agree within the
/// configured tolerance; the forward quotient is returned.
inline DerivativeOutcome delta_h_derivative(const FuzzyTrajectory& traj, double t,
                                            const HukuharaOptions& opts = {}) {
    const auto& ts = traj.scale();
    const std::size_t i = detail::require_nonterminal(traj, t);
    const double h = ts.mu_at(i);
    auto forward = detail::gh_quotient(traj[i + 1], traj[i], h);
    if (!forward) {
        return NotDifferentiable{ts[i], "gH-difference f(sigma(t)) - f(t) does not exist"};
    }
    if (ts.right_scattered_at(i) || !ts.left_dense_at(i)) {
        return *forward;
    }
    const double hb = ts[i] - ts[i - 1];
    auto backward = detail::gh_quotient(traj[i], traj[i - 1], hb);
    if (!backward) {
        return NotDifferentiable{ts[i], "gH-difference f(t) - f(t-h) does not exist"};
    }
    const double gap = vec_dist(*forward, *backward);
    const double mag = std::max(norm(*forward), norm(*backward));
    if (gap > opts.dense_tolerance * (1.0 + mag)) {
        return NotDifferentiable{ts[i], "forward and backward quotients differ by " +
                                            std::to_string(gap)};
    }
    return *forward;
}

/// Outcome of checking a candidate against the defining inequalities.
enum class VerifyOutcome { holds, fails, inconclusive };

/// Checks both inequality families of the derivative definition at every
/// sampled h in the stored neighbourhood of t:
///
///   d[f(t+h) ⊖gH f(sigma(t)), D (h - mu)] <= eps |h - mu|
///   d[f(sigma(t)) ⊖gH f(t-h), D (mu + h)] <= eps (mu + h)
///
/// The neighbourhood radius is mu(t) at right-scattered points and
/// `dense_samples` spacings at right-dense points. Returns inconclusive when a
/// needed gH-difference does not exist.
inline VerifyOutcome verify_derivative_definition(const FuzzyTrajectory& traj, double t,
                                                  const FuzzyVector& candidate, double eps,
                                                  std::size_t dense_samples = kDefaultDiniSamples) {
    if (!(eps > 0.0)) {
        throw InvalidShape("eps must be positive");
    }
    const auto& ts = traj.scale();
    const std::size_t i = detail::require_nonterminal(traj, t);
    const double mu = ts.mu_at(i);
    const double radius =
        ts.right_scattered_at(i) ? mu : static_cast<double>(dense_samples) * mu;
    const double tol = 1e-12 * (1.0 + norm(candidate));
    const FuzzyVector& f_sigma = traj[i + 1];

    std::vector<double> hs{0.0};
    for (std::size_t j = i + 1; j < traj.size() && ts[j] - ts[i] <= radius * (1 + 1e-12); ++j) {
        hs.push_back(ts[j] - ts[i]);
    }
    for (std::size_t j = i; j-- > 0 && ts[i] - ts[j] <= radius * (1 + 1e-12);) {
        hs.push_back(ts[i] - ts[j]);
    }
    std::sort(hs.begin(), hs.end());
    hs.erase(std::unique(hs.begin(), hs.end()), hs.end());

    bool ok = true;
    for (const double h : hs) {
        if (auto j = ts.find(ts[i] + h); j && *j < traj.size()) {
            auto diff = gh_difference(traj[*j], f_sigma);
            if (!diff) {
                return VerifyOutcome::inconclusive;
            }
            const double lhs = vec_dist(*diff, scale(h - mu, candidate));
            ok = ok && lhs <= eps * std::abs(h - mu) + tol;
        }
        if (auto j = ts.find(ts[i] - h)) {
            auto diff = gh_difference(f_sigma, traj[*j]);
            if (!diff) {
                return VerifyOutcome::inconclusive;
            }
            const double lhs = vec_dist(*diff, scale(mu + h, candidate));
            ok = ok && lhs <= eps * (mu + h) + tol;
        }
    }
    return ok ? VerifyOutcome::holds : VerifyOutcome::fails;
}

}  // namespace ftl
