#pragma once

// Subcommands behind the ftl executable. Each returns the process exit code:
// 0 success, 1 solver failure or witnessed violation, 2 invalid input or
// failed hypotheses.

#include <spdlog/spdlog.h>

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ftl/cli/config.hpp"
#include "ftl/cli/io.hpp"
#include "ftl/comparison.hpp"
#include "ftl/dsl.hpp"
#include "ftl/hukuhara.hpp"
#include "ftl/hybrid.hpp"
#include "ftl/stability.hpp"

namespace ftl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;

namespace detail {

inline nlohmann::ordered_json meta_json(const std::string& command, const BuiltRun& run,
                                        const std::vector<std::string>& files) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["tool"] = "ftl";
    j["version"] = kToolVersion;
    j["command"] = command;
    j["timescale"] = run.ts.describe();
    j["points"] = run.ts.size();
    j["alpha_levels"] = run.grid.size();
    j["mode"] = to_string(run.config.mode);
    j["modes"] = modes_string(run.config.modes);
    j["seed"] = run.config.seed;
    j["files"] = files;
    j["columns"] = {{"trajectory.csv", kTrajectoryHeader},
                    {"comparison.csv", kComparisonHeader},
                    {"derivative.csv", kDerivativeHeader},
                    {"dini.csv", kDiniHeader}};
    j["config"] = config_echo(run.config);
    return j;
}

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    }
}

inline std::string path_in(const std::string& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

inline void write_meta(const std::string& dir, const std::string& command, const BuiltRun& run,
                       const std::vector<std::string>& files) {
    write_file(path_in(dir, "meta.json"), meta_json(command, run, files).dump(2) + "\n");
}

/// Runs body, mapping errors to exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const StepFailure& e) {
        err << "error: solver step failed at t = " << fmt(e.t()) << ": " << e.reason() << '\n';
        return kExitFailure;
    } catch (const SolverAbort& e) {
        err << "error: solver aborted at t = " << fmt(e.t()) << ": " << e.reason() << '\n';
        return kExitFailure;
    } catch (const BlowUp& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const dsl::EvalError& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
}

}  // namespace detail

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const BuiltRun run = build_run(cfg);
        spdlog::info("simulate: {} on {} up to t = {}, mode {}", cfg.catalog.empty() ? "custom" : cfg.catalog,
                     run.ts.describe(), cfg.horizon, to_string(cfg.mode));
        const HybridSolution sol = solve(run.system, cfg.mode, cfg.horizon);
        detail::ensure_dir(cfg.out_dir);
        std::ostringstream csv;
        write_trajectory_csv(csv, sol);
        write_file(detail::path_in(cfg.out_dir, "trajectory.csv"), csv.str());
        detail::write_meta(cfg.out_dir, "simulate", run, {"trajectory.csv"});
        const FuzzyVector& last = sol.trajectory.values().back();
        out << "simulated " << sol.trajectory.size() << " points; D(u(" << fmt(cfg.horizon)
            << "), 0) = " << fmt(norm(last)) << '\n';
        return kExitOk;
    });
}

inline int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const BuiltRun run = build_run(cfg);
        const HybridSolution sol = solve(run.system, cfg.mode, cfg.horizon);
        const ScalarTrajectory r = solve_comparison(run.comparison, cfg.horizon);
        const BoundReport rep =
            verify_comparison_bound(run.lyapunov, sol.trajectory, r, cfg.bound_tolerance);
        if (!rep.precondition_ok) {
            err << "error: hypothesis gate: V(t0, u0) = " << fmt(rep.v.front())
                << " exceeds r0 = " << fmt(rep.r.front()) << '\n';
            return kExitInvalid;
        }
        detail::ensure_dir(cfg.out_dir);
        std::ostringstream csv;
        write_comparison_csv(csv, comparison_rows(run.lyapunov, sol, r));
        write_file(detail::path_in(cfg.out_dir, "comparison.csv"), csv.str());
        detail::write_meta(cfg.out_dir, "compare", run, {"comparison.csv"});
        if (r.approximate) {
            spdlog::warn("comparison solution is approximate at right-dense points");
        }
        if (!rep.violations.empty()) {
            const auto& v = rep.violations.front();
            out << "bound violated at " << rep.violations.size() << " point(s); first t = "
                << fmt(v.t) << " (V = " << fmt(v.v) << ", r = " << fmt(v.r) << ")\n";
            return kExitFailure;
        }
        out << "V(t, u(t)) <= r(t) at all " << rep.times.size() << " points\n";
        return kExitOk;
    });
}

inline int cmd_stability(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const BuiltRun run = build_run(cfg);
        const Verdict v = check_practical_stability(run.system, run.comparison, run.lyapunov,
                                                    run.class_k, run.query, cfg.horizon);
        spdlog::info("stability: {} trajectories, {} solver failures, {} comparison runs",
                     v.trajectories, v.solver_failures, v.comparison_runs);
        detail::ensure_dir(cfg.out_dir);
        write_file(detail::path_in(cfg.out_dir, "verdict.json"), verdict_json(v).dump(2) + "\n");
        detail::write_meta(cfg.out_dir, "stability", run, {"verdict.json"});
        for (const auto& f : v.hypotheses.failures) {
            out << "hypothesis failed: " << f << '\n';
        }
        const std::pair<const char*, const PropertyResult*> props[] = {
            {"practical", &v.practical},
            {"quasi", &v.quasi},
            {"strong", &v.strong},
            {"asymptotic", &v.asymptotic}};
        for (const auto& [name, p] : props) {
            out << name << ": " << to_string(p->direct);
            if (p->witness) {
                out << " (t = " << fmt(p->witness->t) << ", D = " << fmt(p->witness->value)
                    << ", sample " << p->witness->sample << ", " << to_string(p->witness->mode)
                    << ")";
            }
            out << '\n';
        }
        for (const auto& s : v.inconsistencies) {
            out << "INCONSISTENCY: " << s << '\n';
        }
        return v.exit_code();
    });
}

inline int cmd_deriv(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const BuiltRun run = build_run(cfg);
        const HybridSolution sol = solve(run.system, cfg.mode, cfg.horizon);
        const auto& traj = sol.trajectory;
        std::vector<DerivativeRow> rows;
        std::size_t missing = 0;
        for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
            const double t = traj.time(i);
            DerivativeRow row{t, std::nullopt, dini_along_solution(run.lyapunov, traj, t),
                              run.lyapunov(t, traj[i])};
            const auto d = delta_h_derivative(traj, t);
            if (const auto* v = std::get_if<FuzzyVector>(&d)) {
                row.value = *v;
            } else {
                ++missing;
                spdlog::debug("no derivative at t = {}: {}", t, std::get<NotDifferentiable>(d).reason);
            }
            rows.push_back(std::move(row));
        }
        detail::ensure_dir(cfg.out_dir);
        std::ostringstream d_csv;
        write_derivative_csv(d_csv, rows);
        write_file(detail::path_in(cfg.out_dir, "derivative.csv"), d_csv.str());
        std::ostringstream v_csv;
        write_dini_csv(v_csv, rows);
        write_file(detail::path_in(cfg.out_dir, "dini.csv"), v_csv.str());
        detail::write_meta(cfg.out_dir, "deriv", run, {"derivative.csv", "dini.csv"});
        out << "derivative at " << rows.size() - missing << " of " << rows.size() << " points\n";
        return kExitOk;
    });
}

struct EvalRequest {
    std::string expr;
    std::optional<std::string> timescale;
    std::optional<double> t;
    std::map<std::string, double> scalars;
    std::map<std::string, std::string> fuzzy;  // u, u_k, lam bound to literals
    std::size_t alpha_levels = 11;
};

/// Accepts a bare generator name ("integer") as shorthand for a long scale.
inline TimeScale eval_timescale(const std::string& spec) {
    const std::string s = detail::trim(spec);
    if (s == "integer") {
        return TimeScale::integer(1001);
    }
    return parse_timescale(s);
}

inline int cmd_eval(const EvalRequest& req, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&]() -> int {
        std::optional<TimeScale> ts;
        if (req.timescale) {
            ts = eval_timescale(*req.timescale);
        }
        dsl::ScalarEnv senv;
        senv.ts = ts ? &*ts : nullptr;
        for (const auto& [k, v] : req.scalars) {
            senv.set(k, v);
        }
        if (req.t) {
            senv.set("t", *req.t);
        }

        std::optional<dsl::ParseError> scalar_error;
        try {
            const auto e = dsl::parse_scalar(req.expr);
            out << fmt(dsl::eval_scalar(e, senv)) << '\n';
            return kExitOk;
        } catch (const dsl::ParseError& pe) {
            scalar_error = pe;
        }

        std::optional<dsl::FuzzyExpr> fe;
        try {
            fe = dsl::parse_fuzzy(req.expr);
        } catch (const dsl::ParseError& pe) {
            // Report whichever reading got further into the source.
            const auto& best = pe.column() > scalar_error->column() ? pe : *scalar_error;
            err << "error: " << best.what() << '\n';
            return kExitInvalid;
        }
        const AlphaGrid grid = AlphaGrid::uniform(req.alpha_levels);
        std::map<std::string, FuzzyNumber> bound;
        for (const auto& [name, src] : req.fuzzy) {
            dsl::FuzzyEnv lit;
            lit.grid = grid;
            bound.emplace(name, dsl::eval_fuzzy(dsl::parse_fuzzy(src, {}, {}), lit));
        }
        dsl::FuzzyEnv env;
        env.scalar = senv;
        env.grid = grid;
        auto bind = [&](const char* name) -> const FuzzyNumber* {
            auto it = bound.find(name);
            return it == bound.end() ? nullptr : &it->second;
        };
        env.u = bind("u");
        env.u_k = bind("u_k");
        env.lam = bind("lam");
        const FuzzyNumber v = dsl::eval_fuzzy(*fe, env);
        out << "alpha,lower,upper\n";
        for (std::size_t a = 0; a < v.levels(); ++a) {
            out << fmt(grid[a]) << ',' << fmt(v.lower()[a]) << ',' << fmt(v.upper()[a]) << '\n';
        }
        return kExitOk;
    });
}

}  // namespace ftl::cli
