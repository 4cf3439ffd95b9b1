#pragma once

// CSV and JSON artifacts. Column order is frozen; see kSchemaVersion.

#include <charconv>
#include <cstddef>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "ftl/comparison.hpp"
#include "ftl/error.hpp"
#include "ftl/fuzzy.hpp"
#include "ftl/hybrid.hpp"
#include "ftl/stability.hpp"

namespace ftl::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr const char* kTrajectoryHeader = "t,segment_k,component,alpha,lower,upper";
inline constexpr const char* kComparisonHeader = "t,segment_k,V,r,margin";
inline constexpr const char* kDerivativeHeader = "t,component,alpha,lower,upper";
inline constexpr const char* kDiniHeader = "t,V,dini";

/// Shortest decimal text that reads back to the same double.
inline std::string fmt(double x) {
    if (x == 0.0) {
        return "0";  // folds -0
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline double parse_number(const std::string& s) {
    double x = 0.0;
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, x);
    if (res.ec != std::errc{} || res.ptr != end) {
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw ConfigError("CSV: bad number '" + s + "'");
    }
    return x;
}

inline void write_trajectory_csv(std::ostream& os, const HybridSolution& sol) {
    const auto& tr = sol.trajectory;
    os << kTrajectoryHeader << '\n';
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const FuzzyVector& u = tr[i];
        for (std::size_t c = 0; c < u.dim(); ++c) {
            for (std::size_t a = 0; a < u[c].levels(); ++a) {
                os << fmt(tr.time(i)) << ',' << sol.segment[i] << ',' << c << ','
                   << fmt(u.grid()[a]) << ',' << fmt(u[c].lower()[a]) << ','
                   << fmt(u[c].upper()[a]) << '\n';
            }
        }
    }
}

struct ComparisonRow {
    double t;
    std::size_t segment;
    double V;
    double r;
    double margin;  // r - V
};

inline std::vector<ComparisonRow> comparison_rows(const LyapunovFn& V, const HybridSolution& sol,
                                                  const ScalarTrajectory& r) {
    std::vector<ComparisonRow> rows;
    const auto& tr = sol.trajectory;
    const std::size_t n = std::min(tr.size(), r.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double v = V(tr.time(i), tr[i]);
        rows.push_back({tr.time(i), sol.segment[i], v, r.values[i], r.values[i] - v});
    }
    return rows;
}

inline void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows) {
    os << kComparisonHeader << '\n';
    for (const auto& r : rows) {
        os << fmt(r.t) << ',' << r.segment << ',' << fmt(r.V) << ',' << fmt(r.r) << ','
           << fmt(r.margin) << '\n';
    }
}

struct DerivativeRow {
    double t;
    std::optional<FuzzyVector> value;  // empty when not differentiable
    double dini;
    double V;
};

inline void write_derivative_csv(std::ostream& os, const std::vector<DerivativeRow>& rows) {
    os << kDerivativeHeader << '\n';
    for (const auto& r : rows) {
        if (!r.value) {
            continue;
        }
        const FuzzyVector& d = *r.value;
        for (std::size_t c = 0; c < d.dim(); ++c) {
            for (std::size_t a = 0; a < d[c].levels(); ++a) {
                os << fmt(r.t) << ',' << c << ',' << fmt(d.grid()[a]) << ','
                   << fmt(d[c].lower()[a]) << ',' << fmt(d[c].upper()[a]) << '\n';
            }
        }
    }
}

inline void write_dini_csv(std::ostream& os, const std::vector<DerivativeRow>& rows) {
    os << kDiniHeader << '\n';
    for (const auto& r : rows) {
        os << fmt(r.t) << ',' << fmt(r.V) << ',' << fmt(r.dini) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Loaders

namespace detail {

inline std::vector<std::vector<std::string>> read_csv(std::istream& is, const char* header) {
    std::string line;
    if (!std::getline(is, line) || line != header) {
        throw ConfigError(std::string("CSV: expected header '") + header + "'");
    }
    std::vector<std::vector<std::string>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace detail

struct LoadedTrajectory {
    std::vector<double> times;
    std::vector<std::size_t> segment;
    std::vector<FuzzyVector> values;
};

/// Rebuilds a trajectory from trajectory.csv on the alpha grid stored in it.
inline LoadedTrajectory load_trajectory_csv(std::istream& is) {
    const auto rows = detail::read_csv(is, kTrajectoryHeader);
    LoadedTrajectory out;
    if (rows.empty()) {
        return out;
    }
    std::vector<double> alphas;
    std::size_t dim = 0;
    for (const auto& r : rows) {
        if (r.size() != 6) {
            throw ConfigError("CSV: trajectory rows need 6 columns");
        }
        if (parse_number(r[0]) != parse_number(rows[0][0])) {
            break;
        }
        const std::size_t c = std::stoul(r[2]);
        dim = std::max(dim, c + 1);
        if (c == 0) {
            alphas.push_back(parse_number(r[3]));
        }
    }
    const std::size_t m = alphas.size();
    const std::size_t per_point = m * dim;
    if (rows.size() % per_point != 0) {
        throw ConfigError("CSV: trajectory has a ragged row count");
    }
    // Reuse the uniform grid object when the levels match it exactly, so the
    // loaded values compare equal to in-memory ones.
    AlphaGrid grid = AlphaGrid::uniform(m);
    for (std::size_t a = 0; a < m; ++a) {
        if (grid[a] != alphas[a]) {
            throw ConfigError("CSV: alpha levels are not a uniform grid");
        }
    }
    for (std::size_t p = 0; p < rows.size() / per_point; ++p) {
        std::vector<FuzzyNumber> comps;
        for (std::size_t c = 0; c < dim; ++c) {
            std::vector<double> lo(m);
            std::vector<double> hi(m);
            for (std::size_t a = 0; a < m; ++a) {
                const auto& r = rows[p * per_point + c * m + a];
                lo[a] = parse_number(r[4]);
                hi[a] = parse_number(r[5]);
            }
            comps.emplace_back(grid, std::move(lo), std::move(hi));
        }
        const auto& first = rows[p * per_point];
        out.times.push_back(parse_number(first[0]));
        out.segment.push_back(std::stoul(first[1]));
        out.values.emplace_back(std::move(comps));
    }
    return out;
}

inline std::vector<ComparisonRow> load_comparison_csv(std::istream& is) {
    std::vector<ComparisonRow> out;
    for (const auto& r : detail::read_csv(is, kComparisonHeader)) {
        if (r.size() != 5) {
            throw ConfigError("CSV: comparison rows need 5 columns");
        }
        out.push_back({parse_number(r[0]), std::stoul(r[1]), parse_number(r[2]),
                       parse_number(r[3]), parse_number(r[4])});
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

using nlohmann::ordered_json;

inline ordered_json num(double x) {
    if (std::isfinite(x)) {
        return x;
    }
    return fmt(x);  // JSON has no inf/nan
}

inline ordered_json fuzzy_json(const FuzzyVector& u) {
    ordered_json comps = ordered_json::array();
    for (const auto& c : u.components()) {
        ordered_json lo = ordered_json::array();
        ordered_json hi = ordered_json::array();
        for (std::size_t a = 0; a < c.levels(); ++a) {
            lo.push_back(c.lower()[a]);
            hi.push_back(c.upper()[a]);
        }
        comps.push_back({{"lower", lo}, {"upper", hi}});
    }
    return comps;
}

inline ordered_json property_json(const PropertyResult& p) {
    ordered_json j;
    j["direct"] = to_string(p.direct);
    j["violating_trajectories"] = p.violating_trajectories;
    if (p.witness) {
        const auto& w = *p.witness;
        ordered_json wj;
        wj["sample"] = w.sample;
        wj["seed"] = w.seed;
        wj["mode"] = to_string(w.mode);
        wj["t"] = w.t;
        wj["D_inf"] = num(w.value);
        wj["threshold"] = w.threshold;
        if (w.u0) {
            wj["u0"] = fuzzy_json(*w.u0);
        }
        j["witness"] = wj;
    } else {
        j["witness"] = nullptr;
    }
    j["comparison"] = to_string(p.comparison);
    if (p.comparison_witness) {
        const auto& w = *p.comparison_witness;
        j["comparison_witness"] = {
            {"r0", w.r0}, {"t", w.t}, {"r", num(w.r)}, {"threshold", w.threshold}};
    } else {
        j["comparison_witness"] = nullptr;
    }
    j["implied"] = p.implied;
    j["note"] = p.note;
    return j;
}

}  // namespace detail

inline nlohmann::ordered_json verdict_json(const Verdict& v) {
    using detail::num;
    using nlohmann::ordered_json;
    const auto& h = v.hypotheses;
    ordered_json hyp;
    hyp["passed"] = h.passed();
    hyp["failures"] = h.failures;
    hyp["class_k"] = {{"a", h.class_k.a_ok}, {"b", h.class_k.b_ok}, {"detail", h.class_k.detail}};
    hyp["a_lambda"] = num(h.a_lambda);
    hyp["b_A"] = num(h.b_A);
    hyp["a_lambda_lt_b_A"] = h.a_lambda_lt_b_A;
    {
        ordered_json s;
        s["samples"] = h.sandwich.samples;
        s["worst_margin"] = num(h.sandwich.worst_margin);
        s["ok"] = h.sandwich.ok;
        if (h.sandwich.witness) {
            const auto& w = *h.sandwich.witness;
            s["witness"] = {{"t", w.t}, {"D_inf", w.d}, {"b", num(w.b_of_d)}, {"V", num(w.v)},
                            {"a", num(w.a_of_d)}};
        } else {
            s["witness"] = nullptr;
        }
        hyp["sandwich"] = s;
    }
    {
        ordered_json m;
        m["samples"] = h.monotonicity.samples;
        m["passed"] = h.monotonicity.passed();
        ordered_json viol = ordered_json::array();
        for (std::size_t i = 0; i < std::min<std::size_t>(h.monotonicity.violations.size(), 5); ++i) {
            const auto& x = h.monotonicity.violations[i];
            viol.push_back({{"condition", x.condition}, {"t", x.t}, {"k", x.k}, {"r", x.r},
                            {"v", x.v}, {"lo_arg", x.lo_arg}, {"hi_arg", x.hi_arg},
                            {"lo_value", num(x.lo_value)}, {"hi_value", num(x.hi_value)}});
        }
        m["violations"] = viol;
        m["violation_count"] = h.monotonicity.violations.size();
        hyp["monotonicity"] = m;
    }
    {
        ordered_json c;
        c["checks"] = h.condition_two.checks;
        c["worst_margin"] = num(h.condition_two.worst_margin);
        c["ok"] = h.condition_two.ok;
        if (h.condition_two.witness) {
            const auto& w = *h.condition_two.witness;
            c["witness"] = {{"sample", w.sample}, {"mode", to_string(w.mode)}, {"t", w.t},
                            {"dini", num(w.dini)}, {"g", num(w.g)}};
        } else {
            c["witness"] = nullptr;
        }
        hyp["condition_two"] = c;
    }
    hyp["lipschitz"] = {{"pairs", h.lipschitz.pairs},
                        {"estimate", num(h.lipschitz.estimate)},
                        {"declared", h.lipschitz.declared ? ordered_json(*h.lipschitz.declared)
                                                          : ordered_json(nullptr)},
                        {"required", h.lipschitz.required},
                        {"ok", h.lipschitz.ok}};

    const auto& q = v.query;
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["query"] = {{"lambda", q.lambda},
                  {"A", q.A},
                  {"B", q.B ? ordered_json(*q.B) : ordered_json(nullptr)},
                  {"T0", q.T0 ? ordered_json(*q.T0) : ordered_json(nullptr)},
                  {"rho", q.rho},
                  {"samples", q.sampling.count},
                  {"seed", q.sampling.seed},
                  {"family", to_string(q.sampling.family)},
                  {"boundary_probes", q.sampling.boundary_probes},
                  {"modes", [&] {
                       ordered_json m = ordered_json::array();
                       for (auto x : q.modes) m.push_back(to_string(x));
                       return m;
                   }()},
                  {"comparison_grid", q.comparison_grid}};
    j["horizon"] = v.horizon;
    j["exit_code"] = v.exit_code();
    j["hypotheses"] = hyp;
    j["properties"] = {{"practical", detail::property_json(v.practical)},
                       {"quasi", detail::property_json(v.quasi)},
                       {"strong", detail::property_json(v.strong)},
                       {"asymptotic", detail::property_json(v.asymptotic)}};
    j["inconsistencies"] = v.inconsistencies;
    j["trajectories"] = v.trajectories;
    j["solver_failures"] = v.solver_failures;
    j["comparison_runs"] = v.comparison_runs;
    j["comparison_approximate"] = v.comparison_approximate;
    j["notes"] = v.notes;
    return j;
}

/// Writes text to path, failing loudly.
inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw ConfigError("cannot write '" + path + "'");
    }
    os << text;
    if (!os) {
        throw ConfigError("write failed for '" + path + "'");
    }
}

}  // namespace ftl::cli
