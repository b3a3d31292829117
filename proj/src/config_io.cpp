#include "rexec/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "rexec/closed_form.hpp"
#include "rexec/errors.hpp"

namespace rexec {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::validation, path + ": " + what);
}

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    if (!j.is_object()) fail(path, "expected an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
        if (!ok.count(k)) fail(path.empty() ? k : path + "." + k, "unknown field");
    }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
}

void read_number(const json& obj, const std::string& path, const char* key, double& out) {
    if (obj.contains(key)) out = number(obj.at(key), join(path, key));
}

void read_schedule(const json& obj, const std::string& path, const char* key, Schedule& out) {
    if (obj.contains(key)) out = schedule_from_json(obj.at(key), join(path, key));
}

template <class T>
void read_count(const json& obj, const std::string& path, const char* key, T& out, T min_value) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
    if (v.is_number_unsigned()) {
        const auto u = v.get<std::uint64_t>();
        if (u < static_cast<std::uint64_t>(min_value)) fail(join(path, key), "must be >= " + std::to_string(min_value));
        out = static_cast<T>(u);
    } else {
        const auto s = v.get<std::int64_t>();
        if (s < static_cast<std::int64_t>(min_value)) fail(join(path, key), "must be >= " + std::to_string(min_value));
        out = static_cast<T>(s);
    }
}

void read_flag(const json& obj, const std::string& path, const char* key, bool& out) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_boolean()) fail(join(path, key), "expected true or false");
    out = obj.at(key).get<bool>();
}

// Field-level checks that the library would otherwise report without a path.
void check_fields(const ExperimentConfig& cfg) {
    const ModelParams& p = cfg.spec.params;
    if (!(p.eta > 0.0)) fail("params.eta", "must be > 0");
    if (!(p.beta > 0.0)) fail("params.beta", "must be > 0");
    if (!(p.horizon > 0.0)) fail("params.horizon", "must be > 0");
    if (!(std::abs(p.rho) <= 1.0)) fail("params.rho", "must lie in [-1, 1]");
    if (p.gamma < 0.0) fail("params.gamma", "must be >= 0");
    if (p.delta < 0.0) fail("params.delta", "must be >= 0");
    if (p.sigma_S < 0.0) fail("params.sigma_S", "must be >= 0");
    if (p.sigma_X < 0.0) fail("params.sigma_X", "must be >= 0");
    if (cfg.sim.n_steps < 2) fail("sim.n_steps", "must be >= 2");
    if (cfg.solver_steps < 10) fail("solver_steps", "must be >= 10");
    for (std::size_t i = 0; i < cfg.strategies.size(); ++i) {
        const auto& s = cfg.strategies[i];
        if (s != "optimal" && s != "twap" && s != "hold") {
            fail("strategies[" + std::to_string(i) + "]", "unknown strategy '" + s + "'");
        }
    }
    try {
        cfg.spec.validate();
    } catch (const Error& e) {
        fail("risk", e.what());
    }
}

ModelSpec common_spec(ModelKind kind, double gamma_M, double eta, double delta, double r_second) {
    ModelSpec spec;
    ModelParams& p = spec.params;
    p.gamma = 2.5e-7;
    p.gamma_M = gamma_M;
    p.eta = eta;
    p.delta = delta;
    p.beta = 1.0;
    p.sigma_S = 10.0;
    p.sigma_X = 1e5;
    p.rho = 0.3;
    p.horizon = 1.0;
    p.x0 = 1e6;
    p.s0 = 100.0;
    spec.prior = {Schedule(0.0), Schedule(1e-8)};
    if (kind == ModelKind::model1) {
        spec.risk = RiskSpecModel1{Schedule(r_second), Schedule(-5e-6), Schedule(9e-7)};
    } else {
        spec.risk = RiskSpecModel2{Schedule(r_second), Schedule(5e-6), Schedule(9e-7)};
    }
    return spec;
}

struct PresetRow {
    const char* name;
    ModelKind kind;
    double gamma_M, eta, delta, r_second;
    std::uint64_t seed;
};

// Table rows; the last column is R_xx (Model 1) or R_vv (Model 2).
constexpr PresetRow kPresets[] = {
    {"m1-benchmark", ModelKind::model1, 2.5e-6, 2.5e-6, 1.25e-4, -1e-6, 101},
    {"m1-large-gammaM", ModelKind::model1, 1e-5, 2.5e-6, 1.25e-4, -1e-6, 102},
    {"m1-large-eta-small-delta", ModelKind::model1, 2.5e-6, 1e-3, 2e-4, -1e-6, 103},
    {"m1-large-Rxx", ModelKind::model1, 2.5e-6, 2.5e-6, 1.25e-4, -1e-4, 104},
    {"m2-benchmark", ModelKind::model2, 2.5e-6, 2.5e-6, 1.25e-4, -1e-6, 201},
    {"m2-large-gammaM", ModelKind::model2, 1e-5, 2.5e-6, 1.25e-4, -1e-6, 202},
    {"m2-large-eta-small-delta", ModelKind::model2, 2.5e-6, 1e-3, 2e-4, -1e-6, 203},
    {"m2-large-Rvv", ModelKind::model2, 2.5e-6, 2.5e-6, 1.25e-4, -1e-4, 204},
};

}  // namespace

json schedule_to_json(const Schedule& s) {
    if (s.is_callable()) throw Error(ErrorKind::validation, "callable schedules cannot be serialized");
    if (s.is_linear() && s.slope() != 0.0) return {{"linear", {{"a", s.intercept()}, {"b", s.slope()}}}};
    return {{"const", s.intercept()}};
}

Schedule schedule_from_json(const json& j, const std::string& path) {
    if (j.is_number()) return Schedule(number(j, path));
    if (!j.is_object() || j.size() != 1) fail(path, "expected a number, {\"const\": v} or {\"linear\": {\"a\": a, \"b\": b}}");
    if (j.contains("const")) return Schedule(number(j.at("const"), path + ".const"));
    if (j.contains("linear")) {
        const json& l = j.at("linear");
        allow_keys(l, path + ".linear", {"a", "b"});
        if (!l.contains("a") || !l.contains("b")) fail(path + ".linear", "needs both a and b");
        return Schedule::linear(number(l.at("a"), path + ".linear.a"), number(l.at("b"), path + ".linear.b"));
    }
    fail(path, "expected \"const\" or \"linear\"");
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& r : kPresets) out.emplace_back(r.name);
    return out;
}

ExperimentConfig preset(const std::string& name) {
    for (const auto& r : kPresets) {
        if (name == r.name) {
            ExperimentConfig cfg;
            cfg.preset = name;
            cfg.spec = common_spec(r.kind, r.gamma_M, r.eta, r.delta, r.r_second);
            cfg.sim.seed = r.seed;
            return cfg;
        }
    }
    throw Error(ErrorKind::validation, "preset: unknown preset '" + name + "'");
}

std::vector<std::string> table_presets(int table) {
    if (table != 1 && table != 2) throw Error(ErrorKind::validation, "table: must be 1 or 2");
    const auto names = preset_names();
    return {names.begin() + 4 * (table - 1), names.begin() + 4 * table};
}

ExperimentConfig config_from_json(const json& j) {
    allow_keys(j, "", {"schema_version", "preset", "preset_origin", "model", "params", "prior", "risk", "sim", "strategies", "solver_steps"});
    if (j.contains("schema_version")) {
        const json& v = j.at("schema_version");
        if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
            fail("schema_version", "expected " + std::to_string(kSchemaVersion));
        }
    }
    ExperimentConfig cfg;
    if (j.contains("preset")) {
        if (!j.at("preset").is_string()) fail("preset", "expected a string");
        cfg = preset(j.at("preset").get<std::string>());
    }
    if (j.contains("preset_origin")) {
        if (!j.at("preset_origin").is_string()) fail("preset_origin", "expected a string");
        cfg.preset = j.at("preset_origin").get<std::string>();
    }
    if (j.contains("model")) {
        const json& m = j.at("model");
        if (!m.is_number_integer() || (m.get<int>() != 1 && m.get<int>() != 2)) fail("model", "must be 1 or 2");
        const auto kind = static_cast<ModelKind>(m.get<int>());
        if (kind != cfg.spec.kind()) {
            if (!j.contains("risk")) fail("risk", "required when the model differs from the preset");
            if (kind == ModelKind::model1) cfg.spec.risk = RiskSpecModel1{};
            else cfg.spec.risk = RiskSpecModel2{};
        }
    }
    if (j.contains("params")) {
        const json& p = j.at("params");
        allow_keys(p, "params", {"gamma", "gamma_M", "eta", "delta", "beta", "sigma_S", "sigma_X", "rho", "horizon", "x0", "s0"});
        ModelParams& mp = cfg.spec.params;
        read_number(p, "params", "gamma", mp.gamma);
        read_number(p, "params", "gamma_M", mp.gamma_M);
        read_number(p, "params", "eta", mp.eta);
        read_number(p, "params", "delta", mp.delta);
        read_number(p, "params", "beta", mp.beta);
        read_number(p, "params", "sigma_S", mp.sigma_S);
        read_number(p, "params", "sigma_X", mp.sigma_X);
        read_number(p, "params", "rho", mp.rho);
        read_number(p, "params", "horizon", mp.horizon);
        read_number(p, "params", "x0", mp.x0);
        read_number(p, "params", "s0", mp.s0);
    }
    if (j.contains("prior")) {
        const json& p = j.at("prior");
        allow_keys(p, "prior", {"mean", "precision"});
        read_schedule(p, "prior", "mean", cfg.spec.prior.mean);
        read_schedule(p, "prior", "precision", cfg.spec.prior.precision);
    }
    if (j.contains("risk")) {
        const json& r = j.at("risk");
        if (cfg.spec.kind() == ModelKind::model1) {
            allow_keys(r, "risk", {"r_xx", "r_xa", "r_aa"});
            auto risk = cfg.spec.risk1();
            read_schedule(r, "risk", "r_xx", risk.r_xx);
            read_schedule(r, "risk", "r_xa", risk.r_xa);
            read_schedule(r, "risk", "r_aa", risk.r_aa);
            cfg.spec.risk = risk;
        } else {
            allow_keys(r, "risk", {"r_vv", "r_va", "r_aa"});
            auto risk = cfg.spec.risk2();
            read_schedule(r, "risk", "r_vv", risk.r_vv);
            read_schedule(r, "risk", "r_va", risk.r_va);
            read_schedule(r, "risk", "r_aa", risk.r_aa);
            cfg.spec.risk = risk;
        }
    }
    if (j.contains("sim")) {
        const json& s = j.at("sim");
        allow_keys(s, "sim", {"n_paths", "n_steps", "seed", "antithetic", "sample_market_rate", "keep_paths", "threads"});
        read_count<std::size_t>(s, "sim", "n_paths", cfg.sim.n_paths, 1);
        read_count<int>(s, "sim", "n_steps", cfg.sim.n_steps, 2);
        read_count<std::uint64_t>(s, "sim", "seed", cfg.sim.seed, 0);
        read_flag(s, "sim", "antithetic", cfg.sim.antithetic);
        read_flag(s, "sim", "sample_market_rate", cfg.sim.sample_market_rate);
        read_count<std::size_t>(s, "sim", "keep_paths", cfg.sim.keep_paths, 0);
        read_count<unsigned>(s, "sim", "threads", cfg.sim.threads, 0);
    }
    if (j.contains("strategies")) {
        const json& s = j.at("strategies");
        if (!s.is_array() || s.empty()) fail("strategies", "expected a non-empty array of names");
        cfg.strategies.clear();
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!s[i].is_string()) fail("strategies[" + std::to_string(i) + "]", "expected a string");
            cfg.strategies.push_back(s[i].get<std::string>());
        }
    }
    read_count<int>(j, "", "solver_steps", cfg.solver_steps, 10);
    check_fields(cfg);
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    const ModelParams& p = cfg.spec.params;
    json j;
    j["schema_version"] = kSchemaVersion;
    if (!cfg.preset.empty()) j["preset_origin"] = cfg.preset;
    j["model"] = static_cast<int>(cfg.spec.kind());
    j["params"] = {{"gamma", p.gamma}, {"gamma_M", p.gamma_M}, {"eta", p.eta},     {"delta", p.delta},
                   {"beta", p.beta},   {"sigma_S", p.sigma_S}, {"sigma_X", p.sigma_X}, {"rho", p.rho},
                   {"horizon", p.horizon}, {"x0", p.x0},       {"s0", p.s0}};
    j["prior"] = {{"mean", schedule_to_json(cfg.spec.prior.mean)},
                  {"precision", schedule_to_json(cfg.spec.prior.precision)}};
    if (cfg.spec.kind() == ModelKind::model1) {
        const auto& r = cfg.spec.risk1();
        j["risk"] = {{"r_xx", schedule_to_json(r.r_xx)}, {"r_xa", schedule_to_json(r.r_xa)}, {"r_aa", schedule_to_json(r.r_aa)}};
    } else {
        const auto& r = cfg.spec.risk2();
        j["risk"] = {{"r_vv", schedule_to_json(r.r_vv)}, {"r_va", schedule_to_json(r.r_va)}, {"r_aa", schedule_to_json(r.r_aa)}};
    }
    j["sim"] = {{"n_paths", cfg.sim.n_paths},
                {"n_steps", cfg.sim.n_steps},
                {"seed", cfg.sim.seed},
                {"antithetic", cfg.sim.antithetic},
                {"sample_market_rate", cfg.sim.sample_market_rate},
                {"keep_paths", cfg.sim.keep_paths},
                {"threads", cfg.sim.threads}};
    j["strategies"] = cfg.strategies;
    j["solver_steps"] = cfg.solver_steps;
    return j;
}

Strategy make_strategy(const std::string& name, const ExperimentConfig& cfg) {
    if (name == "optimal") return Strategy::optimal(make_value_function(cfg.spec, {cfg.solver_steps, true}));
    if (name == "twap") return Strategy::adapted_twap();
    if (name == "hold") return Strategy::hold();
    throw Error(ErrorKind::validation, "strategies: unknown strategy '" + name + "'");
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

}  // namespace rexec
