#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rexec/model_config.hpp"
#include "rexec/simulator.hpp"

namespace rexec {

inline constexpr int kSchemaVersion = 1;

/// Fully expanded description of one run.
struct ExperimentConfig {
    std::string preset;  ///< empty when built from scratch
    ModelSpec spec;
    SimConfig sim;
    std::vector<std::string> strategies{"optimal", "twap"};
    int solver_steps = 1000;
};

/// Schedules: a bare number, {"const": v} or {"linear": {"a": a, "b": b}} meaning a + b t.
nlohmann::json schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const nlohmann::json& j, const std::string& path);

/// Parses a config document. A "preset" key seeds every field from that
/// preset and the remaining keys override it. Unknown keys and invalid values
/// raise Error(validation) whose message starts with the offending field path.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Names in table order: m1-benchmark, m1-large-gammaM, m1-large-eta-small-delta,
/// m1-large-Rxx, then the m2 rows.
std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);
/// The four rows of stress table 1 (Model 1) or 2 (Model 2).
std::vector<std::string> table_presets(int table);

/// Strategy instance for a name in ExperimentConfig::strategies.
Strategy make_strategy(const std::string& name, const ExperimentConfig& cfg);

/// Numbers in CSV output: scientific notation, 17 significant digits.
std::string format_number(double x);

}  // namespace rexec
