#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rexec/config_io.hpp"

namespace rexec {

/// Command-line values that take precedence over config fields.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<int> steps;
    std::optional<unsigned> threads;
};

void apply(const Overrides& o, ExperimentConfig& cfg);

/// curves.csv, coeffs.json and config.json in `out`. Returns the coeffs document.
nlohmann::json run_solve(const ExperimentConfig& cfg, const std::filesystem::path& out);

/// decomposition_<strategy>.csv, histograms.csv, summary.json and config.json
/// in `out`. Returns the summary document.
nlohmann::json run_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out);

/// Runs every row of stress table 1 or 2 in its own subdirectory and writes report.json.
nlohmann::json run_stress(int table, const Overrides& o, const std::filesystem::path& out);

struct CheckResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    bool informational = false;  ///< reported but never fails the suite
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;

    bool passed() const;
    nlohmann::json to_json() const;
};

/// Strong duality of both Hamiltonians over random contexts, plus the
/// structural facts the saddle rests on.
SuiteReport check_saddle(std::uint64_t seed = 7, int n_contexts = 100);

/// Definition versus price-free rewrite of the P&L on `n_paths` Model 1
/// benchmark paths, each refined from a T/4000 Brownian path to T/500.
SuiteReport check_identity(std::uint64_t seed = 11, int n_paths = 100);

/// Convergence of the optimal feedback to adapted TWAP under a huge terminal penalty.
SuiteReport check_limits();

/// Dispatches "saddle", "identity" or "limits" and writes <suite>.json when `out` is non-empty.
SuiteReport run_check(const std::string& suite, const std::filesystem::path& out, std::optional<std::uint64_t> seed = {});

}  // namespace rexec
