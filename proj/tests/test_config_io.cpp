#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "oracle_values.hpp"
#include "rexec/errors.hpp"
#include "rexec/experiments.hpp"

using namespace rexec;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string error_of(const json& j) {
    try {
        config_from_json(j);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::validation);
        return e.what();
    }
    FAIL("config accepted: " << j.dump());
    return {};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("config_io") {

TEST_CASE("presets") {
    const auto names = preset_names();
    REQUIRE(names.size() == 8);
    CHECK(names.front() == "m1-benchmark");
    CHECK(table_presets(1).size() == 4);
    CHECK(table_presets(2).front() == "m2-benchmark");
    for (const auto& n : names) {
        const auto cfg = preset(n);
        CHECK(cfg.preset == n);
        CHECK_NOTHROW(cfg.spec.validate());
        CHECK(cfg.spec.kind() == (n[1] == '1' ? ModelKind::model1 : ModelKind::model2));
    }
    CHECK(preset("m1-benchmark").sim.seed != preset("m2-benchmark").sim.seed);
    CHECK_THROWS_AS(preset("nope"), Error);
    CHECK_THROWS_AS(table_presets(3), Error);
}

TEST_CASE("round trip") {
    for (const auto& n : preset_names()) {
        auto cfg = preset(n);
        cfg.spec.prior.precision = Schedule::linear(1e-8, 2e-9);
        cfg.sim.antithetic = true;
        cfg.strategies = {"optimal", "hold", "twap"};
        const json j = config_to_json(cfg);
        const auto back = config_from_json(j);
        CHECK(config_to_json(back) == j);
        CHECK(back.preset == n);
    }
}

TEST_CASE("schedules") {
    CHECK(schedule_from_json(2.5, "x")(0.7) == 2.5);
    CHECK(schedule_from_json(json{{"const", -1.0}}, "x")(0.1) == -1.0);
    const Schedule lin = schedule_from_json(json{{"linear", {{"a", 1.0}, {"b", 2.0}}}}, "x");
    CHECK(lin(0.25) == 1.5);
    CHECK(schedule_to_json(lin) == json{{"linear", {{"a", 1.0}, {"b", 2.0}}}});
    CHECK(schedule_to_json(Schedule(3.0)) == json{{"const", 3.0}});
    CHECK_THROWS_AS(schedule_from_json("abc", "x"), Error);
    CHECK_THROWS_AS(schedule_from_json(json{{"cubic", 1}}, "x"), Error);
}

TEST_CASE("overrides on top of a preset") {
    const auto cfg = config_from_json(json{{"preset", "m2-benchmark"}, {"params", {{"eta", 3e-6}}}, {"sim", {{"n_paths", 10}}}});
    CHECK(cfg.spec.kind() == ModelKind::model2);
    CHECK(cfg.spec.params.eta == 3e-6);
    CHECK(cfg.sim.n_paths == 10);
    CHECK(cfg.spec.params.gamma_M == preset("m2-benchmark").spec.params.gamma_M);

    const auto switched = config_from_json(json{{"preset", "m1-benchmark"}, {"model", 2},
                                                {"risk", {{"r_vv", 0.0}, {"r_va", 1e-6}, {"r_aa", 1e-7}}}});
    CHECK(switched.spec.kind() == ModelKind::model2);
    CHECK(switched.spec.risk2().r_va(0.0) == 1e-6);
}

TEST_CASE("validation messages name the field") {
    CHECK(error_of({{"preset", "m1-benchmark"}, {"params", {{"eta", -1.0}}}}).find("params.eta") != std::string::npos);
    CHECK(error_of({{"preset", "m1-benchmark"}, {"params", {{"etaa", 1.0}}}}).find("params.etaa") != std::string::npos);
    CHECK(error_of({{"bogus", 1}}).find("bogus") != std::string::npos);
    CHECK(error_of({{"preset", "m1-benchmark"}, {"sim", {{"n_paths", 0}}}}).find("sim.n_paths") != std::string::npos);
    CHECK(error_of({{"preset", "m1-benchmark"}, {"sim", {{"n_steps", 1.5}}}}).find("sim.n_steps") != std::string::npos);
    CHECK(error_of({{"preset", "m1-benchmark"}, {"strategies", {"optimal", "vwap"}}}).find("strategies[1]") !=
          std::string::npos);
    CHECK(error_of({{"preset", "m1-benchmark"}, {"model", 3}}).find("model") != std::string::npos);
    CHECK(error_of({{"preset", "m1-benchmark"}, {"model", 2}}).find("risk") != std::string::npos);
    CHECK(error_of({{"schema_version", 99}}).find("schema_version") != std::string::npos);
    CHECK(error_of({{"preset", "m2-benchmark"}, {"risk", {{"r_vv", 1e-3}}}}).find("eta_tilde") != std::string::npos);
    CHECK(error_of({{"preset", "m1-benchmark"}, {"prior", {{"precision", -1.0}}}}).find("precision") !=
          std::string::npos);
    CHECK(error_of({{"preset", 7}}).find("preset") != std::string::npos);
}

TEST_CASE("number formatting") {
    CHECK(format_number(1.0) == "1.0000000000000000e+00");
    CHECK(std::stod(format_number(0.1)) == 0.1);
    CHECK(std::stod(format_number(-7.3242019652167816e-06)) == -7.3242019652167816e-06);
}

TEST_CASE("solve writes curves and coefficients") {
    const fs::path out = tmp_dir("solve_m1");
    fs::remove_all(out);
    const json j = run_solve(preset("m1-benchmark"), out);
    CHECK(j["provenance"] == "closed_form");
    CHECK(rel_err(j["H2_0"].get<double>(), oracle::M1_H2_0) < 1e-12);
    CHECK(rel_err(j["x_star_ratio"].get<double>(), oracle::M1_X_RATIO_T) < 1e-10);
    CHECK(rel_err(j["coeffs"]["A1"].get<double>(), oracle::M1_A1) < 1e-12);
    CHECK(fs::exists(out / "curves.csv"));
    CHECK(fs::exists(out / "config.json"));
    CHECK(json::parse(slurp(out / "coeffs.json")) == j);
    const std::string csv = slurp(out / "curves.csv");
    CHECK(csv.rfind("t,H2,H1,H0,v_star_per_unit_x,x_star\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1002);

    auto solver = preset("m1-benchmark");
    solver.spec = with_risk1(solver.spec, 0.0, -solver.spec.params.gamma_M, 9e-7);
    const json k = run_solve(solver, tmp_dir("solve_m1_solver"));
    CHECK(k["provenance"] == "solver");
    CHECK(k["coeffs"]["A1_hat"].is_null());
}

TEST_CASE("simulate writes decompositions and a reproducible summary") {
    auto cfg = preset("m2-benchmark");
    cfg.sim.n_paths = 64;
    cfg.sim.n_steps = 100;
    const fs::path a = tmp_dir("sim_a");
    const fs::path b = tmp_dir("sim_b");
    fs::remove_all(a);
    fs::remove_all(b);
    const json s = run_simulate(cfg, a);
    for (const char* f : {"decomposition_optimal.csv", "decomposition_twap.csv", "histograms.csv", "summary.json"}) {
        CHECK(fs::exists(a / f));
    }
    CHECK(s["strategies"]["optimal"]["provenance"] == "closed_form");
    CHECK(s["deltas"]["optimal_minus_twap"]["v_total"]["pooled_se"].get<double>() > 0.0);
    // rerun from the written config reproduces every output byte for byte
    const auto again = config_from_json(json::parse(slurp(a / "config.json")));
    run_simulate(again, b);
    for (const char* f : {"decomposition_optimal.csv", "decomposition_twap.csv", "histograms.csv", "summary.json"}) {
        CHECK(slurp(a / f) == slurp(b / f));
    }
}

TEST_CASE("stress covers every row") {
    const fs::path out = tmp_dir("stress");
    fs::remove_all(out);
    const json r = run_stress(1, {std::uint64_t{5}, std::size_t{16}, 50, 2u}, out);
    REQUIRE(r["scenarios"].size() == 4);
    for (const auto& name : table_presets(1)) CHECK(fs::exists(out / name / "summary.json"));
    CHECK(fs::exists(out / "report.json"));
}

TEST_CASE("check suites") {
    const auto limits = check_limits();
    CHECK(limits.passed());
    const fs::path out = tmp_dir("checks");
    const auto report = run_check("limits", out);
    CHECK(fs::exists(out / "limits.json"));
    CHECK(report.to_json()["suite"] == "limits");
    CHECK_THROWS_AS(run_check("nope", out), Error);
}

}
