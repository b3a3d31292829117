// Command-line front end: solve | simulate | stress | check.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rexec/errors.hpp"
#include "rexec/experiments.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 1, kInvariant = 2, kRuntime = 3 };

struct Options {
    std::string config_path;
    std::string preset_name;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<int> steps;
    std::optional<unsigned> threads;
    int table = 1;
    std::string suite = "saddle";
};

rexec::ExperimentConfig load(const Options& o) {
    nlohmann::json j = nlohmann::json::object();
    if (!o.config_path.empty()) {
        std::ifstream f(o.config_path);
        if (!f) throw rexec::Error(rexec::ErrorKind::validation, "config: cannot open " + o.config_path);
        try {
            j = nlohmann::json::parse(f);
        } catch (const nlohmann::json::parse_error& e) {
            throw rexec::Error(rexec::ErrorKind::validation, std::string("config: ") + e.what());
        }
    }
    if (!o.preset_name.empty()) j["preset"] = o.preset_name;
    if (!j.contains("preset") && o.config_path.empty()) j["preset"] = "m1-benchmark";
    auto cfg = rexec::config_from_json(j);
    rexec::apply({o.seed, o.paths, o.steps, o.threads}, cfg);
    if (cfg.sim.n_steps < 2) throw rexec::Error(rexec::ErrorKind::validation, "steps: must be >= 2");
    if (cfg.sim.n_paths < 1) throw rexec::Error(rexec::ErrorKind::validation, "paths: must be >= 1");
    return cfg;
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--preset", o.preset_name, "Named parameter set (see --list-presets)");
    cmd->add_option("--out", o.out, "Output directory");
}

void add_sim(CLI::App* cmd, Options& o) {
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--paths", o.paths, "Number of Monte Carlo paths");
    cmd->add_option("--steps", o.steps, "Time steps per path");
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entropy-regularized robust optimal execution"};
    app.require_subcommand(1);
    Options o;
    bool list = false;
    app.add_flag("--list-presets", list, "Print preset names and exit");

    auto* solve = app.add_subcommand("solve", "Value-function curves and derived coefficients");
    add_common(solve, o);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo comparison of the configured strategies");
    add_common(simulate, o);
    add_sim(simulate, o);

    auto* stress = app.add_subcommand("stress", "All rows of a stress table");
    stress->add_option("--table", o.table, "1 (Model 1) or 2 (Model 2)")->check(CLI::IsMember({1, 2}));
    stress->add_option("--out", o.out, "Output directory");
    add_sim(stress, o);

    auto* check = app.add_subcommand("check", "Numerical invariant suites");
    check->add_option("--suite", o.suite, "saddle | identity | limits")
        ->check(CLI::IsMember({"saddle", "identity", "limits"}));
    check->add_option("--out", o.out, "Output directory");
    check->add_option("--seed", o.seed, "Random seed");

    app.require_subcommand(0, 1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kValidation;
    }
    if (list) {
        for (const auto& n : rexec::preset_names()) std::cout << n << "\n";
        return kOk;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return kValidation;
    }

    try {
        if (*solve) {
            const auto j = rexec::run_solve(load(o), o.out);
            std::cout << "provenance " << j["provenance"].get<std::string>() << ", wrote " << o.out << "\n";
        } else if (*simulate) {
            const auto s = rexec::run_simulate(load(o), o.out);
            for (const auto& [name, st] : s["strategies"].items()) {
                std::cout << name << ": mean v_total " << st["v_total"]["mean"].get<double>() << " +- "
                          << st["v_total"]["std_error"].get<double>() << "\n";
            }
        } else if (*stress) {
            const auto r = rexec::run_stress(o.table, {o.seed, o.paths, o.steps, o.threads}, o.out);
            for (const auto& row : r["scenarios"]) {
                std::cout << row["preset"].get<std::string>() << ": optimal - twap v_total "
                          << row["v_total"]["mean_diff"].get<double>() << " +- "
                          << row["v_total"]["pooled_se"].get<double>() << "\n";
            }
        } else if (*check) {
            const auto r = rexec::run_check(o.suite, o.out, o.seed);
            for (const auto& c : r.checks) {
                std::cout << (c.informational ? "INFO" : (c.passed ? "PASS" : "FAIL")) << " " << c.name << " "
                          << c.value << " (tol " << c.tolerance << ")\n";
            }
            return r.passed() ? kOk : kInvariant;
        }
    } catch (const rexec::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == rexec::ErrorKind::validation ? kValidation : kRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kOk;
}
