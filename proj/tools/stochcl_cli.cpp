#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stochcl/experiments.hpp"

using namespace stochcl;

namespace {

struct Common {
    std::string config_file, out;
    std::vector<std::string> sets;
    long long seed = -1, n_mc = -1;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config_file, "key = value config file");
    app->add_option("--out", c.out, "output directory for CSV, snapshots and summary");
    app->add_option("--set", c.sets, "override a config key, key=value (repeatable)");
    app->add_option("--seed", c.seed, "master seed");
    app->add_option("--n-mc", c.n_mc, "Monte Carlo paths");
}

void apply(const Common& c, Config& cfg) {
    for (const auto& s : c.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
        cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (c.seed >= 0) cfg.set("seed", std::to_string(c.seed));
    if (c.n_mc >= 0) cfg.set("n_mc", std::to_string(c.n_mc));
    if (!c.out.empty()) cfg.set("out", c.out);
}

int finish(const ResultRecord& r, const std::string& out) {
    std::cout << r.summary();
    r.write(out);
    if (!out.empty()) std::cout << "wrote " << out << "\n";
    return r.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic viscous conservation law toolkit"};
    app.require_subcommand(1);

    struct Diag {
        std::string kind;
        CLI::App* app;
        Common common;
    };
    std::vector<Diag> diags;
    diags.reserve(16);
    const std::vector<std::pair<std::string, std::string>> kinds = {
        {"solve", "moment curves and snapshots of the viscous solution"},
        {"tangent", "tangent-solver Malliavin derivative against finite differences"},
        {"weak-continuity", "weak time continuity statistic over r0"},
        {"entropy-check", "viscous entropy inequality residuals"},
        {"initial", "initial-condition statistic against the heat baseline"},
        {"kato", "Kato inequality for two coupled solutions"},
        {"contraction", "L1 contraction curve"},
        {"frac-bv", "fractional BV modulus bound"},
        {"doubling", "doubling-of-variables inequality"},
        {"convergence", "eps -> 0 Cauchy study"},
        {"convergence-exact", "linear-additive exact-limit study"},
        {"ito-check", "anticipating Ito formula residuals"},
        {"constants", "c_d by two quadratures"},
        {"young", "Young bounds on random draws"},
        {"picard", "Picard contraction history"},
        {"moments", "p-moment overlap across eps"},
    };
    for (const auto& [k, doc] : kinds) diags.push_back({k, app.add_subcommand(k, doc), {}});
    for (auto& d : diags) add_common(d.app, d.common);

    std::string entropy_key;
    long long trials = -1;
    for (auto& d : diags)
        if (d.kind == "entropy-check") {
            d.app->add_option("--entropy", entropy_key, "entropy key, e.g. s_delta:0.05, or random");
            d.app->add_option("--trials", trials, "number of (S, test, V) draws");
        }
    std::string ito_case;
    double ito_dt = -1.0;
    for (auto& d : diags)
        if (d.kind == "ito-check") {
            d.app->add_option("--case", ito_case, "case name or all");
            d.app->add_option("--dt", ito_dt, "time step on [0, 1]");
        }
    long long r_step = -1, k_node = -1;
    for (auto& d : diags)
        if (d.kind == "tangent") {
            d.app->add_option("--r", r_step, "differentiation step");
            d.app->add_option("--k", k_node, "noise node");
        }

    auto* run = app.add_subcommand("run", "run a registry experiment");
    std::string run_name;
    bool quick = false;
    Common run_common;
    run->add_option("name", run_name, "experiment name")->required();
    run->add_flag("--quick", quick, "reduced sample counts");
    add_common(run, run_common);

    auto* list = app.add_subcommand("list", "list registry experiments and config keys");
    bool list_keys = false;
    list->add_flag("--keys", list_keys, "also list config keys");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& e : list_experiments()) std::cout << e.name << "  " << e.summary << "\n";
            if (list_keys)
                for (const auto& s : config_schema())
                    std::cout << "  " << s.key << " = " << s.default_value << "  [" << s.unit << "] " << s.doc << "\n";
            return 0;
        }
        if (run->parsed()) {
            ExperimentConfig ec = ExperimentConfig::defaults(run_name, quick);
            if (!run_common.config_file.empty()) {
                // File values override registry defaults key by key.
                const Config f = Config::load(run_common.config_file);
                const Config base;
                for (const auto& [k, v] : f.values())
                    if (base.values().at(k) != v) ec.params.set(k, v);
            }
            apply(run_common, ec.params);
            return finish(run_experiment(ec), run_common.out);
        }
        for (auto& d : diags) {
            if (!d.app->parsed()) continue;
            Config cfg = d.common.config_file.empty() ? Config() : Config::load(d.common.config_file);
            if (d.kind == "entropy-check") {
                if (!entropy_key.empty()) cfg.set("entropy", entropy_key);
                if (trials >= 0) cfg.set("trials", std::to_string(trials));
            }
            if (d.kind == "ito-check") {
                if (!ito_case.empty()) cfg.set("ito_case", ito_case);
                if (ito_dt > 0) cfg.set("ito_steps", std::to_string(std::llround(1.0 / ito_dt)));
            }
            if (d.kind == "tangent") {
                if (r_step >= 0) cfg.set("r_step", std::to_string(r_step));
                if (k_node >= 0) cfg.set("k", std::to_string(k_node));
            }
            apply(d.common, cfg);
            return finish(run_diagnostic(d.kind, cfg), d.common.out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
