#pragma once

// Fuzzy numbers and box-valued fuzzy vectors in alpha-cut representation.
//
// A fuzzy number is stored as one closed interval per level of a shared
// AlphaGrid. Level sets are nested: lower endpoints never decrease and upper
// endpoints never increase as alpha grows. Every operation acts level-wise.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftl/error.hpp"

namespace ftl {

/// Absolute tolerance for endpoint comparisons.
inline constexpr double kEndpointTol = 1e-12;

class AlphaGrid {
public:
    explicit AlphaGrid(std::vector<double> levels)
        : levels_(std::make_shared<const std::vector<double>>(std::move(levels))) {
        const auto& l = *levels_;
        if (l.size() < 2) {
            throw InvalidShape("alpha grid needs at least two levels");
        }
        if (l.front() != 0.0 || l.back() != 1.0) {
            throw InvalidShape("alpha grid must start at 0 and end at 1");
        }
        for (std::size_t i = 1; i < l.size(); ++i) {
            if (!(l[i] > l[i - 1])) {
                throw InvalidShape("alpha grid must be strictly increasing");
            }
        }
    }

    /// m uniformly spaced levels 0, 1/(m-1), ..., 1.
    static AlphaGrid uniform(std::size_t m = 11) {
        if (m < 2) {
            throw InvalidShape("alpha grid needs at least two levels");
        }
        std::vector<double> l(m);
        for (std::size_t i = 0; i < m; ++i) {
            l[i] = static_cast<double>(i) / static_cast<double>(m - 1);
        }
        return AlphaGrid(std::move(l));
    }

    std::size_t size() const { return levels_->size(); }
    double operator[](std::size_t i) const { return (*levels_)[i]; }
    std::span<const double> levels() const { return *levels_; }

    friend bool operator==(const AlphaGrid& a, const AlphaGrid& b) {
        return a.levels_ == b.levels_ || *a.levels_ == *b.levels_;
    }

private:
    std::shared_ptr<const std::vector<double>> levels_;
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Hausdorff distance between two closed bounded intervals.
inline double hausdorff_interval(Interval a, Interval b) {
    return std::max(std::abs(a.lower - b.lower), std::abs(a.upper - b.upper));
}

class FuzzyNumber {
public:
    /// Builds from explicit level endpoints; throws InvalidShape unless the
    /// cuts are finite, nonempty and nested (within kEndpointTol).
    FuzzyNumber(AlphaGrid grid, std::vector<double> lower, std::vector<double> upper)
        : grid_(std::move(grid)), lower_(std::move(lower)), upper_(std::move(upper)) {
        if (auto why = check_cuts(grid_, lower_, upper_)) {
            throw InvalidShape(*why);
        }
    }

    /// nullopt when the cuts do not form a valid fuzzy number.
    static std::optional<FuzzyNumber> try_from_cuts(AlphaGrid grid, std::vector<double> lower,
                                                    std::vector<double> upper) {
        if (check_cuts(grid, lower, upper)) {
            return std::nullopt;
        }
        return FuzzyNumber(Unchecked{}, std::move(grid), std::move(lower), std::move(upper));
    }

    static FuzzyNumber crisp(double x, const AlphaGrid& grid) {
        return FuzzyNumber(grid, std::vector<double>(grid.size(), x),
                           std::vector<double>(grid.size(), x));
    }

    static FuzzyNumber zero(const AlphaGrid& grid) { return crisp(0.0, grid); }

    const AlphaGrid& grid() const { return grid_; }
    std::size_t levels() const { return lower_.size(); }
    std::span<const double> lower() const { return lower_; }
    std::span<const double> upper() const { return upper_; }
    Interval cut(std::size_t i) const { return {lower_[i], upper_[i]}; }

    bool is_crisp(double tol = kEndpointTol) const {
        return std::abs(upper_.front() - lower_.front()) <= tol;
    }

    /// Core value when crisp; midpoint of the support otherwise.
    double center() const { return 0.5 * (lower_.back() + upper_.back()); }

    friend bool operator==(const FuzzyNumber& a, const FuzzyNumber& b) {
        return a.grid_ == b.grid_ && a.lower_ == b.lower_ && a.upper_ == b.upper_;
    }

private:
    struct Unchecked {};
    FuzzyNumber(Unchecked, AlphaGrid grid, std::vector<double> lower, std::vector<double> upper)
        : grid_(std::move(grid)), lower_(std::move(lower)), upper_(std::move(upper)) {}

    static std::optional<std::string> check_cuts(const AlphaGrid& grid,
                                                 const std::vector<double>& lower,
                                                 const std::vector<double>& upper) {
        if (lower.size() != grid.size() || upper.size() != grid.size()) {
            return "cut count does not match alpha grid";
        }
        for (std::size_t i = 0; i < lower.size(); ++i) {
            if (!std::isfinite(lower[i]) || !std::isfinite(upper[i])) {
                return "non-finite endpoint at level " + std::to_string(i);
            }
            if (lower[i] > upper[i] + kEndpointTol) {
                return "empty cut at level " + std::to_string(i);
            }
            if (i > 0 && (lower[i] < lower[i - 1] - kEndpointTol ||
                          upper[i] > upper[i - 1] + kEndpointTol)) {
                return "cuts not nested at level " + std::to_string(i);
            }
        }
        return std::nullopt;
    }

    AlphaGrid grid_;
    std::vector<double> lower_;
    std::vector<double> upper_;
};

/// Trapezoid with support [a, d] and core [b, c].
inline FuzzyNumber make_trapezoid(double a, double b, double c, double d, const AlphaGrid& grid) {
    if (!(a <= b && b <= c && c <= d)) {
        throw InvalidShape("trapezoid requires a <= b <= c <= d");
    }
    std::vector<double> lo(grid.size());
    std::vector<double> hi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double alpha = grid[i];
        lo[i] = a + alpha * (b - a);
        hi[i] = d - alpha * (d - c);
    }
    return FuzzyNumber(grid, std::move(lo), std::move(hi));
}

inline FuzzyNumber make_triangle(double a, double b, double c, const AlphaGrid& grid) {
    return make_trapezoid(a, b, b, c, grid);
}

namespace detail {

inline void require_same_grid(const FuzzyNumber& u, const FuzzyNumber& v) {
    if (!(u.grid() == v.grid())) {
        throw IncompatibleGrids("fuzzy numbers use different alpha grids");
    }
}

}  // namespace detail

inline FuzzyNumber add(const FuzzyNumber& u, const FuzzyNumber& v) {
    detail::require_same_grid(u, v);
    const std::size_t m = u.levels();
    std::vector<double> lo(m);
    std::vector<double> hi(m);
    for (std::size_t i = 0; i < m; ++i) {
        lo[i] = u.lower()[i] + v.lower()[i];
        hi[i] = u.upper()[i] + v.upper()[i];
    }
    return FuzzyNumber(u.grid(), std::move(lo), std::move(hi));
}

inline FuzzyNumber scale(double k, const FuzzyNumber& u) {
    const std::size_t m = u.levels();
    std::vector<double> lo(m);
    std::vector<double> hi(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double a = k * u.lower()[i];
        const double b = k * u.upper()[i];
        lo[i] = std::min(a, b);
        hi[i] = std::max(a, b);
    }
    return FuzzyNumber(u.grid(), std::move(lo), std::move(hi));
}

/// Generalized Hukuhara difference u ⊖gH v. Returns nullopt when the
/// level-wise min/max intervals fail to nest, i.e. the difference does not
/// exist. Throws IncompatibleGrids on grid mismatch.
inline std::optional<FuzzyNumber> gh_difference(const FuzzyNumber& u, const FuzzyNumber& v) {
    detail::require_same_grid(u, v);
    const std::size_t m = u.levels();
    std::vector<double> lo(m);
    std::vector<double> hi(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double dl = u.lower()[i] - v.lower()[i];
        const double du = u.upper()[i] - v.upper()[i];
        lo[i] = std::min(dl, du);
        hi[i] = std::max(dl, du);
    }
    return FuzzyNumber::try_from_cuts(u.grid(), std::move(lo), std::move(hi));
}

/// Supremum over grid levels of the Hausdorff distance between cuts.
inline double dist(const FuzzyNumber& u, const FuzzyNumber& v) {
    detail::require_same_grid(u, v);
    double d = 0.0;
    for (std::size_t i = 0; i < u.levels(); ++i) {
        d = std::max(d, hausdorff_interval(u.cut(i), v.cut(i)));
    }
    return d;
}

/// Tuple of fuzzy numbers on one grid; level sets are axis-aligned boxes.
class FuzzyVector {
public:
    explicit FuzzyVector(std::vector<FuzzyNumber> components) : components_(std::move(components)) {
        if (components_.empty()) {
            throw DimensionMismatch("fuzzy vector needs at least one component");
        }
        for (const auto& c : components_) {
            if (!(c.grid() == components_.front().grid())) {
                throw IncompatibleGrids("fuzzy vector components use different alpha grids");
            }
        }
    }

    FuzzyVector(std::initializer_list<FuzzyNumber> components)
        : FuzzyVector(std::vector<FuzzyNumber>(components)) {}

    static FuzzyVector zero(std::size_t n, const AlphaGrid& grid) {
        return FuzzyVector(std::vector<FuzzyNumber>(n, FuzzyNumber::zero(grid)));
    }

    std::size_t dim() const { return components_.size(); }
    const AlphaGrid& grid() const { return components_.front().grid(); }
    const FuzzyNumber& operator[](std::size_t i) const { return components_[i]; }
    std::span<const FuzzyNumber> components() const { return components_; }

    friend bool operator==(const FuzzyVector&, const FuzzyVector&) = default;

private:
    std::vector<FuzzyNumber> components_;
};

namespace detail {

inline void require_same_shape(const FuzzyVector& u, const FuzzyVector& v) {
    if (u.dim() != v.dim()) {
        throw DimensionMismatch("fuzzy vectors have dimensions " + std::to_string(u.dim()) +
                                " and " + std::to_string(v.dim()));
    }
    if (!(u.grid() == v.grid())) {
        throw IncompatibleGrids("fuzzy vectors use different alpha grids");
    }
}

}  // namespace detail

inline FuzzyVector add(const FuzzyVector& u, const FuzzyVector& v) {
    detail::require_same_shape(u, v);
    std::vector<FuzzyNumber> out;
    out.reserve(u.dim());
    for (std::size_t i = 0; i < u.dim(); ++i) {
        out.push_back(add(u[i], v[i]));
    }
    return FuzzyVector(std::move(out));
}

inline FuzzyVector scale(double k, const FuzzyVector& u) {
    std::vector<FuzzyNumber> out;
    out.reserve(u.dim());
    for (const auto& c : u.components()) {
        out.push_back(scale(k, c));
    }
    return FuzzyVector(std::move(out));
}

/// Component-wise gH-difference; nullopt if any component does not exist.
inline std::optional<FuzzyVector> gh_difference(const FuzzyVector& u, const FuzzyVector& v) {
    detail::require_same_shape(u, v);
    std::vector<FuzzyNumber> out;
    out.reserve(u.dim());
    for (std::size_t i = 0; i < u.dim(); ++i) {
        auto w = gh_difference(u[i], v[i]);
        if (!w) {
            return std::nullopt;
        }
        out.push_back(std::move(*w));
    }
    return FuzzyVector(std::move(out));
}

/// D_inf under the max-norm on R^n: the largest component distance.
inline double vec_dist(const FuzzyVector& u, const FuzzyVector& v) {
    detail::require_same_shape(u, v);
    double d = 0.0;
    for (std::size_t i = 0; i < u.dim(); ++i) {
        d = std::max(d, dist(u[i], v[i]));
    }
    return d;
}

/// D_inf(u, 0~). For a single number this is the largest endpoint magnitude.
inline double norm(const FuzzyNumber& u) {
    double d = 0.0;
    for (std::size_t i = 0; i < u.levels(); ++i) {
        d = std::max({d, std::abs(u.lower()[i]), std::abs(u.upper()[i])});
    }
    return d;
}

inline double norm(const FuzzyVector& u) {
    double d = 0.0;
    for (const auto& c : u.components()) {
        d = std::max(d, norm(c));
    }
    return d;
}

}  // namespace ftl
