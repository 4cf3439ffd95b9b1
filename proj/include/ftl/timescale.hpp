#pragma once

// Finite sampled time scales: forward jump, graininess, point classification,
// delta and upper Dini derivatives of real functions, and the regressive
// "circle" algebra.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ftl/error.hpp"

namespace ftl {

enum class ScaleKind { integer, uniform, qscale, intervals, explicit_points };

/// Generator description kept alongside the points for metadata output.
struct ScaleTag {
    ScaleKind kind = ScaleKind::explicit_points;
    std::vector<double> params;
    std::vector<std::pair<double, double>> intervals;
};

inline constexpr double kDefaultDenseThreshold = 1e-6;
inline constexpr std::size_t kDefaultDiniSamples = 8;

class TimeScale {
public:
    TimeScale(std::vector<double> points, double dense_threshold = kDefaultDenseThreshold,
              ScaleTag tag = {})
        : points_(std::make_shared<const std::vector<double>>(std::move(points))),
          dense_threshold_(dense_threshold),
          tag_(std::move(tag)) {
        const auto& p = *points_;
        if (p.size() < 2) {
            throw InvalidShape("time scale needs at least two points");
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (!std::isfinite(p[i])) {
                throw InvalidShape("time scale points must be finite");
            }
            if (i > 0 && !(p[i] > p[i - 1])) {
                throw InvalidShape("time scale points must be strictly increasing");
            }
        }
        if (!(dense_threshold_ > 0.0)) {
            throw InvalidShape("dense threshold must be positive");
        }
    }

    /// {0, 1, ..., n-1}.
    static TimeScale integer(std::size_t n) {
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = static_cast<double>(i);
        }
        return TimeScale(std::move(p), kDefaultDenseThreshold,
                         {ScaleKind::integer, {static_cast<double>(n)}, {}});
    }

    /// {t0 + i h : i = 0..n-1}.
    static TimeScale uniform(double t0, double h, std::size_t n,
                             double dense_threshold = kDefaultDenseThreshold) {
        if (!(h > 0.0)) {
            throw InvalidShape("uniform scale needs h > 0");
        }
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = t0 + static_cast<double>(i) * h;
        }
        return TimeScale(std::move(p), dense_threshold,
                         {ScaleKind::uniform, {t0, h, static_cast<double>(n)}, {}});
    }

    /// {t0 q^i : i = 0..n-1} with t0 > 0, q > 1.
    static TimeScale qscale(double t0, double q, std::size_t n) {
        if (!(t0 > 0.0) || !(q > 1.0)) {
            throw InvalidShape("q-scale needs t0 > 0 and q > 1");
        }
        std::vector<double> p(n);
        double t = t0;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = t;
            t *= q;
        }
        return TimeScale(std::move(p), kDefaultDenseThreshold,
                         {ScaleKind::qscale, {t0, q, static_cast<double>(n)}, {}});
    }

    /// Union of closed intervals, each sampled with spacing at most `resolution`
    /// (endpoints included). The dense threshold defaults to the sampling
    /// spacing's classification rule: spacing <= threshold is right-dense.
    static TimeScale intervals(std::vector<std::pair<double, double>> ivs, double resolution,
                               double dense_threshold = kDefaultDenseThreshold) {
        if (!(resolution > 0.0)) {
            throw InvalidShape("interval resolution must be positive");
        }
        std::vector<double> p;
        for (const auto& [a, b] : ivs) {
            if (!(a <= b)) {
                throw InvalidShape("interval needs a <= b");
            }
            const auto steps = static_cast<std::size_t>(std::ceil((b - a) / resolution - 1e-9));
            if (steps == 0) {
                p.push_back(a);
                continue;
            }
            for (std::size_t j = 0; j <= steps; ++j) {
                p.push_back(a + ((b - a) * static_cast<double>(j)) / static_cast<double>(steps));
            }
        }
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
        ScaleTag tag{ScaleKind::intervals, {resolution}, ivs};
        return TimeScale(std::move(p), dense_threshold, std::move(tag));
    }

    static TimeScale explicit_points(std::vector<double> points,
                                     double dense_threshold = kDefaultDenseThreshold) {
        return TimeScale(std::move(points), dense_threshold, {ScaleKind::explicit_points, {}, {}});
    }

    std::size_t size() const { return points_->size(); }
    std::span<const double> points() const { return *points_; }
    double operator[](std::size_t i) const { return (*points_)[i]; }
    double front() const { return points_->front(); }
    double back() const { return points_->back(); }
    double dense_threshold() const { return dense_threshold_; }
    const ScaleTag& tag() const { return tag_; }

    /// Index of a stored point, matched to a relative tolerance of 1e-12.
    std::optional<std::size_t> find(double t) const {
        const auto& p = *points_;
        const double tol = 1e-12 * (1.0 + std::abs(t));
        auto it = std::lower_bound(p.begin(), p.end(), t - tol);
        if (it != p.end() && std::abs(*it - t) <= tol) {
            return static_cast<std::size_t>(it - p.begin());
        }
        return std::nullopt;
    }

    std::size_t index_of(double t) const {
        if (auto i = find(t)) {
            return *i;
        }
        throw UnknownPoint(t);
    }

    bool contains(double t) const { return find(t).has_value(); }
    bool is_terminal(std::size_t i) const { return i + 1 >= size(); }

    /// Index of the forward jump of point i.
    std::size_t sigma_index(std::size_t i) const {
        if (i >= size()) {
            throw UnknownPoint(std::numeric_limits<double>::quiet_NaN());
        }
        if (is_terminal(i)) {
            throw NoSuccessor((*points_)[i]);
        }
        return i + 1;
    }

    double sigma(double t) const { return (*points_)[sigma_index(index_of(t))]; }
    double mu_at(std::size_t i) const { return (*points_)[sigma_index(i)] - (*points_)[i]; }
    double mu(double t) const { return mu_at(index_of(t)); }

    /// Graininess with the bounded-scale convention sigma(max T) = max T.
    double graininess_or_zero(std::size_t i) const { return is_terminal(i) ? 0.0 : mu_at(i); }

    bool right_dense_at(std::size_t i) const { return mu_at(i) <= dense_threshold_; }
    bool right_scattered_at(std::size_t i) const { return !right_dense_at(i); }
    bool right_dense(double t) const { return right_dense_at(index_of(t)); }

    bool left_dense_at(std::size_t i) const {
        return i > 0 && (*points_)[i] - (*points_)[i - 1] <= dense_threshold_;
    }

    bool has_right_dense_points() const {
        for (std::size_t i = 0; i + 1 < size(); ++i) {
            if (right_dense_at(i)) {
                return true;
            }
        }
        return false;
    }

    std::string describe() const {
        auto num = [](double x) {
            std::string s = std::to_string(x);
            s.erase(s.find_last_not_of('0') + 1);
            if (!s.empty() && s.back() == '.') {
                s.pop_back();
            }
            return s;
        };
        const auto& q = tag_.params;
        switch (tag_.kind) {
            case ScaleKind::integer:
                return "integer(" + num(q[0]) + ")";
            case ScaleKind::uniform:
                return "uniform(" + num(q[0]) + "," + num(q[1]) + "," + num(q[2]) + ")";
            case ScaleKind::qscale:
                return "qscale(" + num(q[0]) + "," + num(q[1]) + "," + num(q[2]) + ")";
            case ScaleKind::intervals: {
                std::string s = "intervals([";
                for (std::size_t i = 0; i < tag_.intervals.size(); ++i) {
                    s += (i ? ",[" : "[") + num(tag_.intervals[i].first) + "," +
                         num(tag_.intervals[i].second) + "]";
                }
                return s + "]," + num(q[0]) + ")";
            }
            case ScaleKind::explicit_points:
                break;
        }
        return "explicit(" + std::to_string(size()) + " points)";
    }

private:
    std::shared_ptr<const std::vector<double>> points_;
    double dense_threshold_;
    ScaleTag tag_;
};

/// [f(sigma(t)) - f(t)] / mu(t). At right-dense points the sampled spacing
/// stands in for the limit.
template <class F>
double delta_derivative(const TimeScale& ts, F&& f, double t) {
    const std::size_t i = ts.index_of(t);
    const std::size_t j = ts.sigma_index(i);
    return (f(ts[j]) - f(ts[i])) / (ts[j] - ts[i]);
}

/// Upper Delta-Dini derivative. Right-scattered points use the delta quotient.
/// At right-dense points sigma(t) = t, so the quotient is
/// [f(t) - f(s)] / (t - s); the sup runs over the next `samples` stored s > t.
template <class F>
double upper_dini(const TimeScale& ts, F&& f, double t,
                  std::size_t samples = kDefaultDiniSamples) {
    const std::size_t i = ts.index_of(t);
    const std::size_t j = ts.sigma_index(i);
    const double f_t = f(ts[i]);
    const double quotient = (f(ts[j]) - f_t) / (ts[j] - ts[i]);
    if (ts.right_scattered_at(i)) {
        return quotient;
    }
    double best = quotient;
    for (std::size_t s = j + 1; s < ts.size() && s < j + samples; ++s) {
        best = std::max(best, (f_t - f(ts[s])) / (ts[i] - ts[s]));
    }
    return best;
}

/// A real function on a time scale with 1 + mu(t) p(t) != 0 at every
/// non-terminal sampled point.
class RegressiveFn {
public:
    RegressiveFn(TimeScale ts, std::function<double(double)> p)
        : ts_(std::move(ts)), p_(std::move(p)) {
        for (std::size_t i = 0; i + 1 < ts_.size(); ++i) {
            const double v = 1.0 + ts_.mu_at(i) * p_(ts_[i]);
            if (std::abs(v) <= kRegressiveTol || !std::isfinite(v)) {
                throw NonRegressive(ts_[i], v);
            }
        }
    }

    static RegressiveFn constant(TimeScale ts, double c) {
        return RegressiveFn(std::move(ts), [c](double) { return c; });
    }

    double operator()(double t) const { return p_(t); }
    const TimeScale& scale() const { return ts_; }

    static constexpr double kRegressiveTol = 1e-12;

private:
    TimeScale ts_;
    std::function<double(double)> p_;
};

namespace detail {

inline void require_same_scale(const RegressiveFn& p, const RegressiveFn& q) {
    const auto a = p.scale().points();
    const auto b = q.scale().points();
    if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) {
        throw InvalidShape("regressive functions live on different time scales");
    }
}

inline std::function<double(double)> graininess_fn(const TimeScale& ts) {
    return [ts](double t) { return ts.graininess_or_zero(ts.index_of(t)); };
}

}  // namespace detail

/// p ⊕ q = p + q + mu p q.
inline RegressiveFn circle_plus(const RegressiveFn& p, const RegressiveFn& q) {
    detail::require_same_scale(p, q);
    auto mu = detail::graininess_fn(p.scale());
    return RegressiveFn(p.scale(), [p, q, mu](double t) {
        const double a = p(t);
        const double b = q(t);
        return a + b + mu(t) * a * b;
    });
}

/// p ⊖ q = (p - q) / (1 + mu q).
inline RegressiveFn circle_minus(const RegressiveFn& p, const RegressiveFn& q) {
    detail::require_same_scale(p, q);
    auto mu = detail::graininess_fn(p.scale());
    return RegressiveFn(p.scale(), [p, q, mu](double t) {
        const double b = q(t);
        return (p(t) - b) / (1.0 + mu(t) * b);
    });
}

/// ⊖p = 0 ⊖ p = -p / (1 + mu p).
inline RegressiveFn ominus(const RegressiveFn& p) {
    return circle_minus(RegressiveFn::constant(p.scale(), 0.0), p);
}

}  // namespace ftl
