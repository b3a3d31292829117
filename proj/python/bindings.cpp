#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rexec/closed_form.hpp"
#include "rexec/entropy.hpp"
#include "rexec/errors.hpp"
#include "rexec/experiments.hpp"
#include "rexec/game_check.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

rexec::ExperimentConfig parse(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw rexec::Error(rexec::ErrorKind::validation, std::string("config: ") + e.what());
    }
    return rexec::config_from_json(j);
}

json stats_json(const rexec::Stats& s) {
    return {{"mean", s.mean}, {"variance", s.variance}, {"std_error", s.std_error}, {"q05", s.q05},
            {"q50", s.q50},   {"q95", s.q95}};
}

// In-memory simulation: per-path decompositions and summary statistics, no files.
std::string simulate(const std::string& config) {
    const auto cfg = parse(config);
    json out;
    py::gil_scoped_release release;
    for (const auto& name : cfg.strategies) {
        const auto e = rexec::simulate_paths(cfg.spec, cfg.sim, rexec::make_strategy(name, cfg));
        json s;
        s["v_pnl"] = e.column(&rexec::Decomposition::v_pnl);
        s["v_risk"] = e.column(&rexec::Decomposition::v_risk);
        s["v_entropy"] = e.column(&rexec::Decomposition::v_entropy);
        s["v_total"] = e.column(&rexec::Decomposition::v_total);
        std::vector<double> xt;
        for (const auto& p : e.paths) xt.push_back(p.x_T);
        s["x_T"] = xt;
        s["stats"] = {{"v_pnl", stats_json(e.v_pnl)},         {"v_risk", stats_json(e.v_risk)},
                      {"v_entropy", stats_json(e.v_entropy)}, {"v_total", stats_json(e.v_total)},
                      {"x_T", stats_json(e.x_T)}};
        s["increment_correlation"] = e.increment_correlation;
        out[name] = s;
    }
    return out.dump();
}

class PyValueFunction {
public:
    explicit PyValueFunction(const std::string& config, bool prefer_closed_form) {
        const auto cfg = parse(config);
        vf_ = rexec::make_value_function(cfg.spec, {cfg.solver_steps, prefer_closed_form});
    }

    double h2(double t) const { return vf_->h2(t); }
    double h1(double t) const { return vf_->h1(t); }
    double h0(double t) const { return vf_->h0(t); }
    double value(double t, double x) const { return vf_->value(t, x); }
    double optimal_rate(double t, double x) const { return vf_->optimal_rate(t, x); }
    double expected_trajectory(double t) const { return vf_->expected_trajectory(t); }
    std::pair<double, double> posterior(double t, double x) const {
        const auto p = vf_->posterior(t, x);
        return {p.mean, p.precision};
    }
    std::string provenance() const { return rexec::to_string(vf_->provenance()); }

private:
    std::shared_ptr<const rexec::ValueFunction> vf_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Entropy-regularized robust optimal execution (native core)";

    // released so the type outlives module teardown
    static py::handle error_type = py::exception<rexec::Error>(m, "Error", PyExc_ValueError).release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const rexec::Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
            exc.attr("kind") = std::string(rexec::to_string(e.kind()));
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    m.def("preset_names", &rexec::preset_names);
    m.def("preset", [](const std::string& name) { return rexec::config_to_json(rexec::preset(name)).dump(); });
    m.def("normalize_config", [](const std::string& config) { return rexec::config_to_json(parse(config)).dump(); });

    m.def("coefficients", [](const std::string& config, double t) {
        const auto cfg = parse(config);
        const auto& spec = cfg.spec;
        const auto prior = spec.prior.at(t);
        json j;
        if (spec.kind() == rexec::ModelKind::model1) {
            const auto c = rexec::derive_model1_coeffs(spec.params, prior, spec.risk1().at(t));
            j = {{"A1", c.a1}, {"B1", c.b1}, {"c", c.c}, {"g", c.g}};
            j["A1_hat"] = c.a1_hat ? json(*c.a1_hat) : json(nullptr);
            j["alpha1"] = c.alpha1 ? json(*c.alpha1) : json(nullptr);
        } else {
            const auto c = rexec::derive_model2_coeffs(spec.params, prior, spec.risk2().at(t));
            j = {{"A2", c.a2}, {"B2", c.b2}, {"eta_tilde", c.eta_tilde}, {"C", c.c_shift}, {"D", c.d_shift}, {"g", c.g}};
            j["A2_hat"] = c.a2_hat ? json(*c.a2_hat) : json(nullptr);
            j["alpha2"] = c.alpha2 ? json(*c.alpha2) : json(nullptr);
        }
        return j.dump();
    }, py::arg("config"), py::arg("t") = 0.0);

    py::class_<PyValueFunction>(m, "ValueFunction")
        .def(py::init<const std::string&, bool>(), py::arg("config"), py::arg("prefer_closed_form") = true)
        .def("h2", &PyValueFunction::h2)
        .def("h1", &PyValueFunction::h1)
        .def("h0", &PyValueFunction::h0)
        .def("value", &PyValueFunction::value)
        .def("optimal_rate", &PyValueFunction::optimal_rate)
        .def("expected_trajectory", &PyValueFunction::expected_trajectory)
        .def("posterior", &PyValueFunction::posterior, "(mean, precision) of the market-rate posterior")
        .def_property_readonly("provenance", &PyValueFunction::provenance);

    m.def("kl_gaussian", [](double m1, double p1, double m2, double p2) {
        return rexec::kl_gaussian({m1, p1}, {m2, p2});
    }, py::arg("mean_p"), py::arg("precision_p"), py::arg("mean_q"), py::arg("precision_q"));
    m.def("minimize_entropy", [](double c2, double c1, double prior_mean, double prior_precision, double beta) {
        const auto r = rexec::minimize_entropy_functional({c2, c1}, {prior_mean, prior_precision}, beta);
        return py::make_tuple(r.posterior.mean, r.posterior.precision, r.min_value);
    }, py::arg("c2"), py::arg("c1"), py::arg("prior_mean"), py::arg("prior_precision"), py::arg("beta"));

    m.def("simulate", &simulate);
    m.def("run_solve", [](const std::string& config, const std::string& out) {
        return rexec::run_solve(parse(config), out).dump();
    });
    m.def("run_simulate", [](const std::string& config, const std::string& out) {
        const auto cfg = parse(config);
        py::gil_scoped_release release;
        return rexec::run_simulate(cfg, out).dump();
    });
    m.def("run_stress", [](int table, const std::string& out, std::optional<std::uint64_t> seed,
                           std::optional<std::size_t> paths, std::optional<int> steps) {
        py::gil_scoped_release release;
        return rexec::run_stress(table, {seed, paths, steps, std::nullopt}, out).dump();
    }, py::arg("table"), py::arg("out"), py::arg("seed") = py::none(), py::arg("paths") = py::none(),
       py::arg("steps") = py::none());
    m.def("run_check", [](const std::string& suite, const std::string& out, std::optional<std::uint64_t> seed) {
        py::gil_scoped_release release;
        return rexec::run_check(suite, out, seed).to_json().dump();
    }, py::arg("suite"), py::arg("out") = "", py::arg("seed") = py::none());
}
