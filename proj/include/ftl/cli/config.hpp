#pragma once

// Run configuration: INI-style file with sections, catalog defaults, and
// construction of the fuzzy / comparison systems from DSL sources.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftl/comparison.hpp"
#include "ftl/dsl.hpp"
#include "ftl/error.hpp"
#include "ftl/fuzzy.hpp"
#include "ftl/hybrid.hpp"
#include "ftl/stability.hpp"
#include "ftl/timescale.hpp"

namespace ftl::cli {

struct RunConfig {
    std::string catalog;  // empty for a fully custom system

    // [timescale]
    std::string timescale = "integer(101)";
    double dense_threshold = kDefaultDenseThreshold;
    std::vector<double> switch_times{0.0};

    // [system]
    std::size_t dim = 1;
    std::string f = "crisp(0)";
    std::map<std::size_t, std::string> f_component;
    std::string u0 = "crisp(0)";
    std::map<std::size_t, std::string> u0_component;
    std::string switch_map = "u_k";
    std::map<std::size_t, std::string> switch_map_segment;
    double rho = 10.0;

    // [solver]
    std::size_t alpha_levels = 11;
    StepMode mode = StepMode::expansive;
    double horizon = 10.0;

    // [lyapunov]
    std::string V = "d";
    std::string g = "0";
    std::string psi = "x";
    std::string a = "x";
    std::string b = "x";
    std::optional<double> r0;  // defaults to V(t0, u0)
    std::optional<double> lipschitz;

    // [stability]
    double lambda = 1.0;
    double A = 2.0;
    std::optional<double> B;
    std::optional<double> T0;
    std::size_t samples = 200;
    std::uint64_t seed = 1;
    SampleFamily family = SampleFamily::triangular;
    std::vector<StepMode> modes{StepMode::expansive};
    std::size_t comparison_grid = 32;
    std::size_t monotonicity_samples = 1000;
    bool boundary_probes = true;
    double bound_tolerance = 1e-9;

    // [output]
    std::string out_dir = "out";
};

// ---------------------------------------------------------------------------
// Parsing helpers

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) {
        return {};
    }
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& s) {
    try {
        std::size_t used = 0;
        const double x = std::stod(trim(s), &used);
        if (used != trim(s).size()) {
            throw std::invalid_argument(s);
        }
        return x;
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' expects a number, got '" + s + "'");
    }
}

inline std::uint64_t to_uint(const std::string& key, const std::string& s) {
    const double x = to_double(key, s);
    if (x < 0 || x != std::floor(x)) {
        throw ConfigError("'" + key + "' expects a non-negative integer, got '" + s + "'");
    }
    return static_cast<std::uint64_t>(x);
}

inline bool to_bool(const std::string& key, const std::string& s) {
    const auto v = trim(s);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError("'" + key + "' expects true|false, got '" + s + "'");
}

inline std::vector<double> to_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!trim(item).empty()) {
            out.push_back(to_double(key, item));
        }
    }
    return out;
}

/// Splits "name[3]" into ("name", 3).
inline std::pair<std::string, std::optional<std::size_t>> indexed_key(const std::string& key) {
    const auto open = key.find('[');
    if (open == std::string::npos || key.back() != ']') {
        return {key, std::nullopt};
    }
    const std::string idx = key.substr(open + 1, key.size() - open - 2);
    return {key.substr(0, open), static_cast<std::size_t>(to_uint(key, idx))};
}

inline std::vector<StepMode> to_modes(const std::string& s) {
    const auto v = trim(s);
    if (v == "both") {
        return {StepMode::expansive, StepMode::contractive};
    }
    return {step_mode_from_string(v)};
}

inline std::string modes_string(const std::vector<StepMode>& modes) {
    if (modes.size() == 2) {
        return "both";
    }
    return to_string(modes.front());
}

}  // namespace detail

/// Copy of ts with a different dense threshold.
inline TimeScale with_threshold(const TimeScale& ts, double dense_threshold) {
    return TimeScale(std::vector<double>(ts.points().begin(), ts.points().end()), dense_threshold,
                     ts.tag());
}

/// Parses "integer(n)", "uniform(t0,h,n)", "qscale(t0,q,n)",
/// "intervals([[a,b],...],resolution)" or "explicit([t0,t1,...])".
inline TimeScale parse_timescale(const std::string& spec, double dense_threshold = kDefaultDenseThreshold) {
    const std::string s = detail::trim(spec);
    const auto open = s.find('(');
    if (open == std::string::npos || s.back() != ')') {
        throw ConfigError("malformed time scale '" + spec + "'");
    }
    const std::string name = detail::trim(s.substr(0, open));
    nlohmann::json args;
    try {
        args = nlohmann::json::parse("[" + s.substr(open + 1, s.size() - open - 2) + "]");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed time scale arguments in '" + spec + "': " + e.what());
    }
    auto num = [&](std::size_t i) {
        if (i >= args.size() || !args[i].is_number()) {
            throw ConfigError("time scale '" + spec + "': argument " + std::to_string(i + 1) +
                              " must be a number");
        }
        return args[i].get<double>();
    };
    auto count = [&](std::size_t i) {
        const double x = num(i);
        if (x < 2 || x != std::floor(x)) {
            throw ConfigError("time scale '" + spec + "': point count must be an integer >= 2");
        }
        return static_cast<std::size_t>(x);
    };
    auto arity = [&](std::size_t n) {
        if (args.size() != n) {
            throw ConfigError("time scale '" + name + "' takes " + std::to_string(n) + " argument(s)");
        }
    };
    try {
        if (name == "integer") {
            arity(1);
            return with_threshold(TimeScale::integer(count(0)), dense_threshold);
        }
        if (name == "uniform") {
            arity(3);
            return TimeScale::uniform(num(0), num(1), count(2), dense_threshold);
        }
        if (name == "qscale") {
            arity(3);
            return with_threshold(TimeScale::qscale(num(0), num(1), count(2)), dense_threshold);
        }
        if (name == "intervals") {
            arity(2);
            std::vector<std::pair<double, double>> ivs;
            if (!args[0].is_array()) {
                throw ConfigError("intervals(...) expects a list of [a,b] pairs");
            }
            for (const auto& iv : args[0]) {
                if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
                    throw ConfigError("intervals(...) expects a list of [a,b] pairs");
                }
                ivs.emplace_back(iv[0].get<double>(), iv[1].get<double>());
            }
            return TimeScale::intervals(std::move(ivs), num(1), dense_threshold);
        }
        if (name == "explicit") {
            arity(1);
            if (!args[0].is_array()) {
                throw ConfigError("explicit(...) expects a list of points");
            }
            std::vector<double> p;
            for (const auto& x : args[0]) {
                if (!x.is_number()) {
                    throw ConfigError("explicit(...) expects numeric points");
                }
                p.push_back(x.get<double>());
            }
            return TimeScale::explicit_points(std::move(p), dense_threshold);
        }
    } catch (const InvalidShape& e) {
        throw ConfigError("time scale '" + spec + "': " + e.what());
    }
    throw ConfigError("unknown time scale generator '" + name +
                      "' (expected integer|uniform|qscale|intervals|explicit)");
}

// ---------------------------------------------------------------------------
// Catalog

/// Switched system Delta_H u = ⊖r u ⊕ eta(t) lambda_k(u_k) on N0 with
/// lambda_0 = 0~ and lambda_k = u_k afterwards; comparison
/// g = (w + w_k) / (1 + mu).
inline RunConfig catalog_switched() {
    RunConfig c;
    c.catalog = "switched";
    c.timescale = "integer(101)";
    for (int k = 0; k <= 20; ++k) {
        c.switch_times.push_back(5.0 * k);
    }
    c.switch_times.erase(c.switch_times.begin());
    c.f = "circminus(u) fadd smul(eta(t), lam)";
    c.switch_map = "u_k";
    c.switch_map_segment[0] = "crisp(0)";
    c.u0 = "tri(-1, 0, 1)";
    c.g = "(w + w_k) * eta(t)";
    c.psi = "x";
    c.lipschitz = 1.0;
    c.lambda = 1.0;
    c.A = 2.0;
    c.family = SampleFamily::triangular;
    c.modes = {StepMode::expansive};
    return c;
}

/// Unswitched contraction Delta u = ⊖r u, i.e. u(t+1) = u(t)/2 on N0.
inline RunConfig catalog_contraction() {
    RunConfig c;
    c.catalog = "contraction";
    c.timescale = "integer(101)";
    c.switch_times = {0.0};
    c.f = "circminus(u)";
    c.switch_map = "crisp(0)";
    c.u0 = "crisp(0.5)";
    c.g = "-r * eta(t)";
    c.psi = "x";
    c.lipschitz = 1.0;
    c.lambda = 1.0;
    c.A = 2.0;
    c.B = 0.1;
    c.T0 = 4.0;
    c.family = SampleFamily::crisp;
    c.modes = {StepMode::expansive, StepMode::contractive};
    return c;
}

/// Zero dynamics: every solution is constant.
inline RunConfig catalog_zero() {
    RunConfig c;
    c.catalog = "zero";
    c.timescale = "integer(101)";
    c.switch_times = {0.0, 10.0, 20.0};
    c.f = "crisp(0)";
    c.switch_map = "u_k";
    c.u0 = "trap(-0.5, -0.25, 0.25, 0.5)";
    c.g = "0";
    c.psi = "x";
    c.lipschitz = 1.0;
    c.lambda = 1.0;
    c.A = 2.0;
    c.B = 1.5;
    c.T0 = 5.0;
    c.family = SampleFamily::mixed;
    c.modes = {StepMode::expansive, StepMode::contractive};
    return c;
}

inline std::vector<std::string> catalog_names() { return {"contraction", "switched", "zero"}; }

inline RunConfig catalog_config(const std::string& name) {
    if (name == "switched") return catalog_switched();
    if (name == "contraction") return catalog_contraction();
    if (name == "zero") return catalog_zero();
    throw ConfigError("unknown catalog system '" + name + "'");
}

// ---------------------------------------------------------------------------
// Config file

/// Reads an INI file. A `catalog` key in [system] selects a catalog entry whose
/// settings act as defaults for everything else in the file.
inline RunConfig load_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    RunConfig c;
    if (auto sys = tree.get_child_optional("system")) {
        for (const auto& [key, node] : *sys) {
            if (key == "catalog") {
                c = catalog_config(detail::trim(node.data()));
            }
        }
    }
    for (const auto& [section, body] : tree) {
        if (!body.data().empty() && body.empty()) {
            throw ConfigError("config key '" + section + "' must live in a section");
        }
        for (const auto& [raw_key, node] : body) {
            const std::string value = detail::trim(node.data());
            const std::string full = section + "." + raw_key;
            const auto [key, idx] = detail::indexed_key(raw_key);
            auto bad = [&]() { throw ConfigError("unknown config key '" + full + "'"); };
            if (section == "timescale") {
                if (key == "spec") c.timescale = value;
                else if (key == "dense_threshold") c.dense_threshold = detail::to_double(full, value);
                else if (key == "switch_times") c.switch_times = detail::to_list(full, value);
                else bad();
            } else if (section == "system") {
                if (key == "catalog") continue;
                if (key == "dim") c.dim = detail::to_uint(full, value);
                else if (key == "f") (idx ? c.f_component[*idx] : c.f) = value;
                else if (key == "u0") (idx ? c.u0_component[*idx] : c.u0) = value;
                else if (key == "switch_map") (idx ? c.switch_map_segment[*idx] : c.switch_map) = value;
                else if (key == "rho") c.rho = detail::to_double(full, value);
                else bad();
            } else if (section == "solver") {
                if (key == "alpha_levels") c.alpha_levels = detail::to_uint(full, value);
                else if (key == "mode") c.mode = step_mode_from_string(value);
                else if (key == "horizon") c.horizon = detail::to_double(full, value);
                else bad();
            } else if (section == "lyapunov") {
                if (key == "V") c.V = value;
                else if (key == "g") c.g = value;
                else if (key == "psi") c.psi = value;
                else if (key == "a") c.a = value;
                else if (key == "b") c.b = value;
                else if (key == "r0") c.r0 = value == "auto" ? std::nullopt : std::optional(detail::to_double(full, value));
                else if (key == "lipschitz") c.lipschitz = value == "none" ? std::nullopt : std::optional(detail::to_double(full, value));
                else bad();
            } else if (section == "stability") {
                if (key == "lambda") c.lambda = detail::to_double(full, value);
                else if (key == "A") c.A = detail::to_double(full, value);
                else if (key == "B") c.B = value == "none" ? std::nullopt : std::optional(detail::to_double(full, value));
                else if (key == "T0") c.T0 = value == "none" ? std::nullopt : std::optional(detail::to_double(full, value));
                else if (key == "samples") c.samples = detail::to_uint(full, value);
                else if (key == "seed") c.seed = detail::to_uint(full, value);
                else if (key == "family") c.family = sample_family_from_string(value);
                else if (key == "modes") c.modes = detail::to_modes(value);
                else if (key == "grid") c.comparison_grid = detail::to_uint(full, value);
                else if (key == "monotonicity_samples") c.monotonicity_samples = detail::to_uint(full, value);
                else if (key == "boundary_probes") c.boundary_probes = detail::to_bool(full, value);
                else if (key == "bound_tolerance") c.bound_tolerance = detail::to_double(full, value);
                else bad();
            } else if (section == "output") {
                if (key == "dir") c.out_dir = value;
                else bad();
            } else {
                throw ConfigError("unknown config section '" + section + "'");
            }
        }
    }
    return c;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    return load_config(in);
}

/// Canonical, ordered echo of every setting.
inline nlohmann::ordered_json config_echo(const RunConfig& c) {
    using nlohmann::ordered_json;
    auto opt = [](const std::optional<double>& x) { return x ? ordered_json(*x) : ordered_json(nullptr); };
    auto indexed = [](const std::map<std::size_t, std::string>& m) {
        ordered_json o = ordered_json::object();
        for (const auto& [k, v] : m) {
            o[std::to_string(k)] = v;
        }
        return o;
    };
    ordered_json j;
    j["catalog"] = c.catalog;
    j["timescale"] = {{"spec", c.timescale},
                      {"dense_threshold", c.dense_threshold},
                      {"switch_times", c.switch_times}};
    j["system"] = {{"dim", c.dim},
                   {"f", c.f},
                   {"f_component", indexed(c.f_component)},
                   {"u0", c.u0},
                   {"u0_component", indexed(c.u0_component)},
                   {"switch_map", c.switch_map},
                   {"switch_map_segment", indexed(c.switch_map_segment)},
                   {"rho", c.rho}};
    j["solver"] = {{"alpha_levels", c.alpha_levels}, {"mode", to_string(c.mode)}, {"horizon", c.horizon}};
    j["lyapunov"] = {{"V", c.V},       {"g", c.g},          {"psi", c.psi},
                     {"a", c.a},       {"b", c.b},          {"r0", opt(c.r0)},
                     {"lipschitz", opt(c.lipschitz)}};
    j["stability"] = {{"lambda", c.lambda},
                      {"A", c.A},
                      {"B", opt(c.B)},
                      {"T0", opt(c.T0)},
                      {"samples", c.samples},
                      {"seed", c.seed},
                      {"family", to_string(c.family)},
                      {"modes", detail::modes_string(c.modes)},
                      {"grid", c.comparison_grid},
                      {"monotonicity_samples", c.monotonicity_samples},
                      {"boundary_probes", c.boundary_probes},
                      {"bound_tolerance", c.bound_tolerance}};
    return j;
}

// ---------------------------------------------------------------------------
// Building systems

/// Parsed expressions plus the objects they drive.
struct BuiltRun {
    RunConfig config;
    TimeScale ts;
    AlphaGrid grid;
    std::shared_ptr<const TimeScale> ts_ref;
    HybridFuzzySystem system;
    LyapunovFn lyapunov;
    ClassKPair class_k;
    ScalarHybridSystem comparison;
    StabilityQuery query;
};

namespace detail {

inline dsl::ScalarExpr parse_slot(const std::string& slot, const std::string& src,
                                  const std::set<std::string>& vars) {
    try {
        return dsl::parse_scalar(src, vars);
    } catch (const dsl::ParseError& e) {
        throw ConfigError(slot + ": " + e.what());
    }
}

inline dsl::FuzzyExpr parse_fuzzy_slot(const std::string& slot, const std::string& src,
                                       const std::set<std::string>& scalar_vars,
                                       const std::set<std::string>& fuzzy_vars) {
    try {
        return dsl::parse_fuzzy(src, scalar_vars, fuzzy_vars);
    } catch (const dsl::ParseError& e) {
        throw ConfigError(slot + ": " + e.what());
    }
}

}  // namespace detail

inline BuiltRun build_run(const RunConfig& c) {
    if (c.dim < 1) {
        throw ConfigError("system.dim must be >= 1");
    }
    auto ts_ref = std::make_shared<const TimeScale>(parse_timescale(c.timescale, c.dense_threshold));
    const TimeScale& ts = *ts_ref;
    const AlphaGrid grid = [&] {
        try {
            return AlphaGrid::uniform(c.alpha_levels);
        } catch (const InvalidShape& e) {
            throw ConfigError(std::string("alpha_levels: ") + e.what());
        }
    }();
    if (!ts.contains(c.horizon)) {
        throw ConfigError("horizon " + std::to_string(c.horizon) + " is not a point of " + ts.describe());
    }

    // Per-component right-hand sides and initial condition.
    std::vector<dsl::FuzzyExpr> f_exprs;
    std::vector<FuzzyNumber> u0;
    for (std::size_t i = 0; i < c.dim; ++i) {
        const auto fi = c.f_component.count(i) ? c.f_component.at(i) : c.f;
        f_exprs.push_back(detail::parse_fuzzy_slot("system.f[" + std::to_string(i) + "]", fi,
                                                   {"t", "d"}, {"u", "lam"}));
        const auto ui = c.u0_component.count(i) ? c.u0_component.at(i) : c.u0;
        const auto e = detail::parse_fuzzy_slot("system.u0[" + std::to_string(i) + "]", ui, {}, {});
        dsl::FuzzyEnv env;
        env.grid = grid;
        try {
            u0.push_back(dsl::eval_fuzzy(e, env));
        } catch (const dsl::EvalError& err) {
            throw ConfigError("system.u0: " + std::string(err.what()));
        }
    }
    for (const auto& [i, _] : c.f_component) {
        if (i >= c.dim) throw ConfigError("system.f[" + std::to_string(i) + "] exceeds dim");
    }
    for (const auto& [i, _] : c.u0_component) {
        if (i >= c.dim) throw ConfigError("system.u0[" + std::to_string(i) + "] exceeds dim");
    }

    const auto sw_default =
        detail::parse_fuzzy_slot("system.switch_map", c.switch_map, {"t", "d", "k"}, {"u_k"});
    std::map<std::size_t, dsl::FuzzyExpr> sw_override;
    for (const auto& [k, src] : c.switch_map_segment) {
        sw_override.emplace(k, detail::parse_fuzzy_slot("system.switch_map[" + std::to_string(k) + "]",
                                                        src, {"t", "d", "k"}, {"u_k"}));
    }

    HybridRhs rhs = [ts_ref, f_exprs](double t, const FuzzyVector& u, const FuzzyVector& lam) {
        std::vector<FuzzyNumber> out;
        out.reserve(u.dim());
        dsl::FuzzyEnv env;
        env.scalar.ts = ts_ref.get();
        env.scalar.set("t", t).set("d", norm(u));
        env.grid = u.grid();
        for (std::size_t i = 0; i < u.dim(); ++i) {
            env.u = &u[i];
            env.lam = &lam[i];
            out.push_back(dsl::eval_fuzzy(f_exprs[i], env));
        }
        return FuzzyVector(std::move(out));
    };
    SwitchMap switch_map = [ts_ref, sw_default, sw_override](std::size_t k, double t_k,
                                                             const FuzzyVector& u_k) {
        const auto it = sw_override.find(k);
        const dsl::FuzzyExpr& e = it != sw_override.end() ? it->second : sw_default;
        dsl::FuzzyEnv env;
        env.scalar.ts = ts_ref.get();
        env.scalar.set("t", t_k).set("d", norm(u_k)).set("k", static_cast<double>(k));
        env.grid = u_k.grid();
        std::vector<FuzzyNumber> out;
        for (std::size_t i = 0; i < u_k.dim(); ++i) {
            env.u_k = &u_k[i];
            out.push_back(dsl::eval_fuzzy(e, env));
        }
        return FuzzyVector(std::move(out));
    };

    HybridFuzzySystem system(ts, c.switch_times, std::move(rhs), std::move(switch_map), c.rho,
                             FuzzyVector(std::move(u0)));

    const auto V = detail::parse_slot("lyapunov.V", c.V, {"t", "d"});
    const auto g = detail::parse_slot("lyapunov.g", c.g, {"t", "r", "v", "w", "w_k"});
    const auto psi = detail::parse_slot("lyapunov.psi", c.psi, {"x", "k"});
    const auto a = detail::parse_slot("lyapunov.a", c.a, {"x"});
    const auto b = detail::parse_slot("lyapunov.b", c.b, {"x"});

    LyapunovFn lyap{[ts_ref, V](double t, const FuzzyVector& u) {
                        dsl::ScalarEnv env;
                        env.ts = ts_ref.get();
                        env.set("t", t).set("d", norm(u));
                        return dsl::eval_scalar(V, env);
                    },
                    c.lipschitz};
    auto unary = [](dsl::ScalarExpr e) {
        return [e](double x) {
            dsl::ScalarEnv env;
            env.set("x", x);
            return dsl::eval_scalar(e, env);
        };
    };
    ClassKPair kpair{unary(a), unary(b)};

    ScalarRhs g_fn = [ts_ref, g](double t, double r, double v) {
        dsl::ScalarEnv env;
        env.ts = ts_ref.get();
        env.set("t", t).set("r", r).set("v", v).set("w", r).set("w_k", v);
        return dsl::eval_scalar(g, env);
    };
    SwitchPsi psi_fn = [psi](std::size_t k, double x) {
        dsl::ScalarEnv env;
        env.set("x", x).set("k", static_cast<double>(k));
        return dsl::eval_scalar(psi, env);
    };
    const double r0 = c.r0 ? *c.r0 : lyap(ts.front(), system.u0());
    ScalarHybridSystem comparison(ts, c.switch_times, std::move(g_fn), std::move(psi_fn), r0);

    StabilityQuery q;
    q.lambda = c.lambda;
    q.A = c.A;
    q.B = c.B;
    q.T0 = c.T0;
    q.rho = c.rho;
    q.sampling = {c.samples, c.seed, c.family, c.boundary_probes};
    q.modes = c.modes;
    q.comparison_grid = c.comparison_grid;
    q.monotonicity_samples = c.monotonicity_samples;

    return BuiltRun{c,
                    ts,
                    grid,
                    ts_ref,
                    std::move(system),
                    std::move(lyap),
                    std::move(kpair),
                    std::move(comparison),
                    q};
}

}  // namespace ftl::cli
