// ftl: simulate, compare, stability, deriv, eval.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ftl/cli/commands.hpp"
#include "ftl/cli/config.hpp"

namespace {

using namespace ftl;
using namespace ftl::cli;

void setup_logging() {
    auto logger = spdlog::stderr_color_st("ftl");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("FTL_LOG");
    const auto level = env ? spdlog::level::from_str(env) : spdlog::level::warn;
    // from_str maps unknown names to off; keep warnings in that case.
    spdlog::set_level(env && level == spdlog::level::off && std::string(env) != "off"
                          ? spdlog::level::warn
                          : level);
}

struct RunFlags {
    std::optional<std::string> config;
    std::optional<std::string> system;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> alpha_levels;
    std::optional<std::string> mode;
    std::optional<double> horizon;
    std::optional<std::string> u0;
    std::optional<std::string> modes;
    std::optional<std::size_t> samples;
    std::optional<double> lambda;
    std::optional<double> A;
    std::optional<double> r0;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
    app->add_option("--config", f.config, "INI config file");
    app->add_option("--system", f.system, "catalog system (switched, contraction, zero)");
    app->add_option("--out", f.out, "output directory");
    app->add_option("--seed", f.seed, "sampling seed");
    app->add_option("--alpha-levels", f.alpha_levels, "number of alpha levels");
    app->add_option("--mode", f.mode, "expansive|contractive");
    app->add_option("--horizon", f.horizon, "final time (a point of the time scale)");
    app->add_option("--u0", f.u0, "initial condition (fuzzy expression, every component)");
}

RunConfig resolve(const RunFlags& f) {
    RunConfig c;
    if (f.config) {
        c = load_config_file(*f.config);
        if (f.system && *f.system != c.catalog) {
            throw ConfigError("--system conflicts with the catalog entry in --config");
        }
    } else {
        c = catalog_config(f.system.value_or("switched"));
    }
    if (f.out) c.out_dir = *f.out;
    if (f.seed) c.seed = *f.seed;
    if (f.alpha_levels) c.alpha_levels = *f.alpha_levels;
    if (f.mode) c.mode = step_mode_from_string(*f.mode);
    if (f.horizon) c.horizon = *f.horizon;
    if (f.u0) {
        c.u0 = *f.u0;
        c.u0_component.clear();
    }
    if (f.modes) c.modes = ftl::cli::detail::to_modes(*f.modes);
    if (f.samples) c.samples = *f.samples;
    if (f.lambda) c.lambda = *f.lambda;
    if (f.A) c.A = *f.A;
    if (f.r0) c.r0 = *f.r0;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Hybrid fuzzy dynamic systems on time scales"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    RunFlags sim_f, cmp_f, stab_f, der_f;
    auto* sim = app.add_subcommand("simulate", "solve the hybrid fuzzy system; writes trajectory.csv");
    add_run_flags(sim, sim_f);

    auto* cmp = app.add_subcommand("compare", "fuzzy solution against the comparison system; writes comparison.csv");
    add_run_flags(cmp, cmp_f);
    cmp->add_option("--r0", cmp_f.r0, "comparison start (default V(t0, u0))");

    auto* stab = app.add_subcommand("stability", "practical-stability verdict; writes verdict.json");
    add_run_flags(stab, stab_f);
    stab->add_option("--modes", stab_f.modes, "expansive|contractive|both");
    stab->add_option("--samples", stab_f.samples, "Monte-Carlo initial conditions");
    stab->add_option("--lambda", stab_f.lambda, "initial radius lambda");
    stab->add_option("--A", stab_f.A, "bound A");

    auto* der = app.add_subcommand("deriv", "Delta_H derivative and Dini derivative along the solution");
    der->alias("dini");
    add_run_flags(der, der_f);

    EvalRequest ev;
    std::vector<std::string> vars;
    std::vector<std::string> fuzzy;
    auto* eval = app.add_subcommand("eval", "evaluate a scalar or fuzzy expression");
    eval->add_option("expr", ev.expr, "expression")->required();
    eval->add_option("--timescale", ev.timescale, "time scale for mu, sigma, eta");
    eval->add_option("--t", ev.t, "value of t");
    eval->add_option("--var", vars, "scalar binding name=value (repeatable)");
    eval->add_option("--fuzzy", fuzzy, "fuzzy binding u|u_k|lam=literal (repeatable)");
    eval->add_option("--alpha-levels", ev.alpha_levels, "number of alpha levels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }

    auto run = [](const RunFlags& f, auto cmd) {
        RunConfig c;
        try {
            c = resolve(f);
        } catch (const ftl::Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitInvalid;
        }
        return cmd(c, std::cout, std::cerr);
    };

    if (*sim) return run(sim_f, cmd_simulate);
    if (*cmp) return run(cmp_f, cmd_compare);
    if (*stab) return run(stab_f, cmd_stability);
    if (*der) return run(der_f, cmd_deriv);

    auto split = [](const std::string& s) -> std::optional<std::pair<std::string, std::string>> {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            return std::nullopt;
        }
        return std::pair{s.substr(0, eq), s.substr(eq + 1)};
    };
    for (const auto& v : vars) {
        const auto kv = split(v);
        if (!kv) {
            std::cerr << "error: --var expects name=value, got '" << v << "'\n";
            return kExitInvalid;
        }
        try {
            ev.scalars[kv->first] = ftl::cli::detail::to_double("--var " + kv->first, kv->second);
        } catch (const ftl::Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitInvalid;
        }
    }
    for (const auto& v : fuzzy) {
        const auto kv = split(v);
        if (!kv) {
            std::cerr << "error: --fuzzy expects name=literal, got '" << v << "'\n";
            return kExitInvalid;
        }
        ev.fuzzy[kv->first] = kv->second;
    }
    return cmd_eval(ev, std::cout, std::cerr);
}
