#pragma once

// Reference computations written without the library: plain arrays of
// (lower, upper) pairs and hand recursions. Tests compare library output
// against these.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "ftl/fuzzy.hpp"

namespace oracle {

using Cut = std::pair<double, double>;
using Cuts = std::vector<Cut>;

inline std::vector<double> alphas(std::size_t m) {
    std::vector<double> a(m);
    for (std::size_t i = 0; i < m; ++i) {
        a[i] = double(i) / double(m - 1);
    }
    return a;
}

/// Level sets of the trapezoid (a, b, c, d) at levels alpha.
inline Cuts trapezoid(double a, double b, double c, double d, std::size_t m) {
    Cuts out;
    for (double al : alphas(m)) {
        out.emplace_back(a + al * (b - a), d - al * (d - c));
    }
    return out;
}

inline Cuts triangle(double a, double b, double c, std::size_t m) { return trapezoid(a, b, b, c, m); }

inline Cuts cuts_of(const ftl::FuzzyNumber& u) {
    Cuts out;
    for (std::size_t i = 0; i < u.levels(); ++i) {
        out.emplace_back(u.lower()[i], u.upper()[i]);
    }
    return out;
}

inline ftl::FuzzyNumber to_fuzzy(const Cuts& c, const ftl::AlphaGrid& grid) {
    std::vector<double> lo;
    std::vector<double> hi;
    for (const auto& [l, h] : c) {
        lo.push_back(l);
        hi.push_back(h);
    }
    return ftl::FuzzyNumber(grid, lo, hi);
}

inline double hausdorff(Cut x, Cut y) {
    return std::max(std::fabs(x.first - y.first), std::fabs(x.second - y.second));
}

inline double d_inf(const Cuts& u, const Cuts& v) {
    double best = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        best = std::max(best, hausdorff(u[i], v[i]));
    }
    return best;
}

inline Cuts plus(const Cuts& u, const Cuts& v) {
    Cuts out;
    for (std::size_t i = 0; i < u.size(); ++i) {
        out.emplace_back(u[i].first + v[i].first, u[i].second + v[i].second);
    }
    return out;
}

inline Cuts times(double k, const Cuts& u) {
    Cuts out;
    for (const auto& [l, h] : u) {
        const double a = k * l;
        const double b = k * h;
        out.emplace_back(std::min(a, b), std::max(a, b));
    }
    return out;
}

/// True when each cut is a proper interval and cuts shrink as alpha grows.
inline bool valid(const Cuts& c, double tol = 1e-12) {
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i].first > c[i].second + tol) return false;
        if (i > 0 && (c[i].first < c[i - 1].first - tol || c[i].second > c[i - 1].second + tol)) {
            return false;
        }
    }
    return true;
}

/// gH difference at each level; the result is a fuzzy number only when the
/// level intervals nest.
inline Cuts gh(const Cuts& u, const Cuts& v) {
    Cuts out;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double a = u[i].first - v[i].first;
        const double b = u[i].second - v[i].second;
        out.emplace_back(std::min(a, b), std::max(a, b));
    }
    return out;
}

/// Random trapezoid with support inside [-scale, scale].
inline Cuts random_trapezoid(std::mt19937_64& rng, std::size_t m, double scale = 5.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    double p[4] = {u(rng), u(rng), u(rng), u(rng)};
    std::sort(p, p + 4);
    return trapezoid(p[0], p[1], p[2], p[3], m);
}

/// Crisp scalar Euler recursion x(t+1) = x + mu f(t, x, lam_k), lam_k frozen
/// at segment entry from lam_of(k, x(t_k)).
template <class F, class L>
std::vector<double> euler(const std::vector<double>& t, const std::vector<std::size_t>& switches,
                          double x0, F f, L lam_of) {
    std::vector<double> x{x0};
    std::size_t k = 0;
    double lam = lam_of(0, x0);
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (k + 1 < switches.size() && switches[k + 1] == i) {
            ++k;
            lam = lam_of(k, x[i]);
        }
        x.push_back(x[i] + (t[i + 1] - t[i]) * f(t[i], x[i], lam));
    }
    return x;
}

}  // namespace oracle
