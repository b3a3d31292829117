#include <doctest.h>

#include <numeric>
#include <vector>

#include "helpers.hpp"
#include "oracle_values.hpp"
#include "rexec/errors.hpp"
#include "rexec/simulator.hpp"

using namespace rexec;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::validation;
}

ModelSpec quiet(ModelSpec spec) {
    spec.params.sigma_S = 0.0;
    spec.params.sigma_X = 0.0;
    return spec;
}

BrownianIncrements flat(int n, double T = 1.0) {
    BrownianIncrements b;
    b.dt = T / n;
    b.dwx.assign(n, 0.0);
    b.dws.assign(n, 0.0);
    return b;
}

double max_gap_to_trajectory(const ModelSpec& spec, int n) {
    const auto vf = make_value_function(spec);
    const auto path = simulate_path(spec, Strategy::optimal(vf), flat(n));
    double worst = 0.0;
    for (std::size_t k = 0; k < path.x.size(); ++k) {
        worst = std::max(worst, std::abs(path.x[k] - vf->expected_trajectory(path.t[k])));
    }
    return worst / spec.params.x0;
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("noise-free optimal path follows the expected trajectory") {
    for (const auto& spec : {quiet(bench1()), quiet(bench2())}) {
        const double e1 = max_gap_to_trajectory(spec, 1000);
        const double e2 = max_gap_to_trajectory(spec, 2000);
        CHECK(e1 < 5e-3);
        CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.1));
        const auto path = simulate_path(spec, Strategy::optimal(make_value_function(spec)), flat(1000));
        for (std::size_t k = 1; k < path.x.size(); ++k) CHECK(path.x[k] < path.x[k - 1]);
    }
}

TEST_CASE("noise-free TWAP ends flat") {
    const auto spec = quiet(bench1());
    const auto path = simulate_path(spec, Strategy::adapted_twap(), flat(500));
    CHECK(std::abs(path.x.back()) < 1e-6);
    for (std::size_t k = 0; k < path.v.size(); ++k) CHECK(path.v[k] == doctest::Approx(-spec.params.x0));
}

TEST_CASE("holding isolates the market drift") {
    const auto spec = quiet(bench1());
    const auto& p = spec.params;
    const auto path = simulate_path(spec, Strategy::hold(), flat(400));
    CHECK(path.x.back() == p.x0);
    for (double a : path.a_mean) CHECK(rel_err(a, oracle::M1_POST_MEAN_1E6) < 1e-12);
    const double drift = p.gamma_M * oracle::M1_POST_MEAN_1E6 * p.horizon;
    CHECK(rel_err(path.s.back() - p.s0, drift) < 1e-10);
    const double expected = p.x0 * drift - p.delta * p.x0 * p.x0;
    CHECK(rel_err(pnl_definition(path, p), expected) < 1e-10);
    CHECK(rel_err(path.decomposition.v_pnl, expected) < 1e-10);
}

TEST_CASE("holding nothing earns nothing") {
    auto spec = quiet(bench1());
    spec.params.x0 = 0.0;
    const auto path = simulate_path(spec, Strategy::hold(), flat(100));
    CHECK(pnl_definition(path, spec.params) == 0.0);
}

TEST_CASE("P&L rewrite is exact without impact while holding") {
    auto spec = bench1();
    spec.params.gamma = 0.0;
    spec.params.eta = 1e-12;
    spec.params.sigma_X = 0.0;
    const auto path = simulate_path(spec, Strategy::hold(), draw_increments(3, 0, 1000, 1.0, spec.params.rho));
    const double def = pnl_definition(path, spec.params);
    const double rew = pnl_transformed(path, spec.params, QuadraticVariation::realized);
    CHECK(std::abs(def - rew) <= 1e-9 * std::abs(def));
    // Here the rewrite is gamma_M sum X a dt + sigma_S sum X dW^S - delta X_T^2.
    double manual = 0.0;
    for (std::size_t k = 0; k < path.v.size(); ++k) {
        manual += spec.params.gamma_M * path.x[k] * path.a_drive[k] * (path.t[k + 1] - path.t[k])
                  + spec.params.sigma_S * path.x[k] * path.dws[k];
    }
    manual -= spec.params.delta * path.x.back() * path.x.back();
    CHECK(std::abs(manual - rew) <= 1e-9 * std::abs(def));
}

TEST_CASE("P&L rewrite on a trading path") {
    const auto spec = bench1();
    const auto vf = make_value_function(spec);
    const auto path = simulate_path(spec, Strategy::optimal(vf), draw_increments(9, 0, 2000, 1.0, spec.params.rho));
    const double def = pnl_definition(path, spec.params);
    CHECK(std::abs(def - path.decomposition.v_pnl) <= 1e-9 * std::abs(def));
    const double realized = pnl_transformed(path, spec.params, QuadraticVariation::realized);
    CHECK(std::abs(def - realized) <= 1e-2 * std::abs(def));
}

TEST_CASE("decomposition adds up") {
    const auto spec = bench2();
    const auto path = simulate_path(spec, Strategy::optimal(make_value_function(spec)),
                                    draw_increments(4, 0, 500, 1.0, spec.params.rho));
    const auto& d = path.decomposition;
    CHECK(d.v_total == d.v_pnl + d.v_risk + d.v_entropy);
    CHECK(d.v_entropy >= 0.0);
    const auto again = performance_decompose(path, spec);
    CHECK(again.v_total == d.v_total);
}

TEST_CASE("entropy term for a fixed posterior mean shift") {
    auto spec = with_risk1(quiet(bench1()), -1e-6, 0.0, 0.0);
    const auto path = simulate_path(spec, Strategy::hold(), flat(200));
    const auto& p = spec.params;
    const double s = 1e-8;
    const double shift = p.beta * p.gamma_M * p.x0 / s;
    CHECK(rel_err(path.decomposition.v_entropy, 0.5 * s * shift * shift / p.beta * p.horizon) < 1e-10);
    CHECK(rel_err(path.decomposition.v_risk, -0.5e-6 * p.x0 * p.x0 * p.horizon) < 1e-12);
}

TEST_CASE("model 2 holding risk") {
    const auto spec = quiet(bench2());
    const auto& p = spec.params;
    const auto path = simulate_path(spec, Strategy::hold(), flat(100));
    const double q = 1e-8 + p.beta * 9e-7;
    const double a = -p.beta * p.gamma_M * p.x0 / q;
    CHECK(rel_err(path.a_mean.front(), a) < 1e-12);
    CHECK(rel_err(path.decomposition.v_risk, 0.5 * 9e-7 * (a * a + 1.0 / q) * p.horizon) < 1e-10);
}

TEST_CASE("errors") {
    auto huge = quiet(bench1());
    huge.params.x0 = 1e308;
    CHECK(kind_of([&] { simulate_path(huge, Strategy::hold(), flat(10)); }) == ErrorKind::nonfinite_state);
    const auto spec = bench1();
    const auto other = Strategy::optimal(make_value_function(bench2()));
    CHECK(kind_of([&] { simulate_path(spec, other, flat(10)); }) == ErrorKind::config_mismatch);
    CHECK(kind_of([&] { simulate_path(spec, Strategy::hold(), flat(10, 2.0)); }) == ErrorKind::config_mismatch);
    CHECK(kind_of([] { Strategy::optimal(nullptr); }) == ErrorKind::config_mismatch);

    auto path = simulate_path(spec, Strategy::hold(), flat(10));
    path.dwx.clear();
    CHECK(kind_of([&] { pnl_transformed(path, spec.params); }) == ErrorKind::increments_missing);

    SimConfig cfg;
    cfg.n_paths = 0;
    CHECK(kind_of([&] { simulate_paths(spec, cfg, Strategy::hold()); }) == ErrorKind::config_mismatch);
}

TEST_CASE("increments") {
    SUBCASE("reproducible and correlated") {
        const auto a = draw_increments(42, 7, 100, 1.0, 0.3);
        const auto b = draw_increments(42, 7, 100, 1.0, 0.3);
        CHECK(a.dwx == b.dwx);
        CHECK(a.dws == b.dws);
        CHECK(draw_increments(42, 8, 100, 1.0, 0.3).dwx != a.dwx);
        CHECK(draw_increments(43, 7, 100, 1.0, 0.3).dwx != a.dwx);
    }
    SUBCASE("antithetic pairs") {
        const auto even = draw_increments(1, 4, 50, 1.0, 0.3, true);
        const auto odd = draw_increments(1, 5, 50, 1.0, 0.3, true);
        for (std::size_t k = 0; k < 50; ++k) {
            CHECK(odd.dwx[k] == -even.dwx[k]);
            CHECK(odd.dws[k] == -even.dws[k]);
        }
    }
    SUBCASE("coarsening sums blocks") {
        const auto fine = draw_increments(2, 0, 12, 1.0, -0.5);
        const auto coarse = fine.coarsen(4);
        CHECK(coarse.n_steps() == 3);
        CHECK(coarse.dt == doctest::Approx(1.0 / 3.0));
        CHECK(coarse.dwx[1] == doctest::Approx(fine.dwx[4] + fine.dwx[5] + fine.dwx[6] + fine.dwx[7]));
        CHECK(kind_of([&] { fine.coarsen(5); }) == ErrorKind::invalid_parameter);
    }
}

TEST_CASE("ensemble statistics") {
    const auto spec = bench1();
    SimConfig cfg;
    cfg.n_paths = 256;
    cfg.n_steps = 1000;
    cfg.seed = 99;
    cfg.keep_paths = 2;
    cfg.threads = 1;
    const auto strat = Strategy::optimal(make_value_function(spec));
    const auto one = simulate_paths(spec, cfg, strat);
    cfg.threads = 4;
    const auto four = simulate_paths(spec, cfg, strat);
    CHECK(one.v_total.mean == four.v_total.mean);
    CHECK(one.v_total.variance == four.v_total.variance);
    CHECK(one.increment_correlation == four.increment_correlation);
    CHECK(std::abs(one.increment_correlation - spec.params.rho) < 0.01);
    REQUIRE(one.stored.size() == 2);
    CHECK(one.stored[1].decomposition.v_total == one.paths[1].d.v_total);
    const auto single = simulate_path(spec, strat, draw_increments(99, 1, 1000, 1.0, spec.params.rho));
    CHECK(single.decomposition.v_total == one.paths[1].d.v_total);
}

TEST_CASE("summaries and histograms") {
    std::vector<double> xs(101);
    std::iota(xs.begin(), xs.end(), 0.0);
    const Stats st = summarize(xs);
    CHECK(st.mean == 50.0);
    CHECK(st.variance == doctest::Approx(858.5));
    CHECK(st.q05 == 5.0);
    CHECK(st.q50 == 50.0);
    CHECK(st.q95 == 95.0);
    CHECK(st.min == 0.0);
    CHECK(st.max == 100.0);
    CHECK(summarize(std::vector<double>{}).mean == 0.0);

    const std::vector<double> b{-10.0, 200.0};
    const Histogram h = pooled_histogram(xs, b, 21);
    CHECK(h.edges.size() == 22);
    CHECK(h.edges.front() == -10.0);
    CHECK(h.edges.back() == 200.0);
    CHECK(std::accumulate(h.counts_a.begin(), h.counts_a.end(), std::size_t{0}) == xs.size());
    CHECK(h.counts_b.front() == 1);
    CHECK(h.counts_b.back() == 1);
    const std::vector<double> same{3.0, 3.0};
    CHECK(pooled_histogram(same, same, 4).counts_a[2] == 2);
}

}
