#include <doctest.h>

#include <numbers>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "oracle_values.hpp"
#include "rexec/entropy.hpp"
#include "rexec/errors.hpp"

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

DiscretizedDensity grid_for(const GaussianDist& prior, const GaussianDist& post, std::size_t n = 20001) {
    const GaussianDist d[] = {prior, post};
    return make_grid(d, 12.0, n);
}

}  // namespace

TEST_SUITE("entropy") {

TEST_CASE("gaussian KL") {
    CHECK(kl_gaussian({0.0, 2.0}, {0.0, 1.0}) == doctest::Approx(oracle::KL_PREC2_VS_1).epsilon(1e-14));
    CHECK(kl_gaussian({1.5, 3.0}, {1.5, 3.0}) == 0.0);
    // Mean shift only: precision_q * d^2 / 2.
    CHECK(kl_gaussian({2.0, 1.0}, {0.0, 1.0}) == doctest::Approx(2.0));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 500; ++i) {
        const GaussianDist p{u(rng), std::exp(u(rng))};
        const GaussianDist q{u(rng), std::exp(u(rng))};
        CHECK(kl_gaussian(p, q) >= 0.0);
    }
}

TEST_CASE("minimizer of the entropic functional") {
    const GaussianDist prior{0.0, 1.0};
    const auto m = minimize_entropy_functional({1.0, -1.0}, prior, 1.0);
    CHECK(m.posterior.precision == doctest::Approx(2.0));
    CHECK(m.posterior.mean == doctest::Approx(0.5));
    // Minimum equals -(1/beta) ln E_prior[exp(-beta cost)] = ln(2)/2 - 1/4.
    CHECK(m.min_value == doctest::Approx(0.5 * std::log(2.0) - 0.25).epsilon(1e-14));

    SUBCASE("zero cost returns the prior") {
        const auto z = minimize_entropy_functional({0.0, 0.0}, {3.0, 7.0}, 2.0);
        CHECK(z.posterior.mean == 3.0);
        CHECK(z.posterior.precision == 7.0);
        CHECK(z.min_value == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("invalid inputs") {
        CHECK(kind_of([&] { minimize_entropy_functional({1.0, 0.0}, prior, 0.0); }) == ErrorKind::invalid_parameter);
        CHECK(kind_of([&] { minimize_entropy_functional({-2.0, 0.0}, prior, 1.0); }) ==
              ErrorKind::precision_violation);
    }
}

TEST_CASE("grid evaluation agrees with the closed-form minimum") {
    const GaussianDist prior{0.3, 2.0};
    const QuadraticCost cost{1.5, -0.7};
    const double beta = 0.8;
    const auto m = minimize_entropy_functional(cost, prior, beta);
    const auto grid = grid_for(prior, m.posterior);
    const double at_min = functional_value(discretize(m.posterior, grid), cost, prior, beta);
    CHECK(std::abs(at_min - m.min_value) < 1e-8);
    // The prior itself is a feasible point with value E_prior[cost].
    const double at_prior = functional_value(discretize(prior, grid), cost, prior, beta);
    const double expected = 0.5 * cost.c2 * (prior.variance() + prior.mean * prior.mean) + cost.c1 * prior.mean;
    CHECK(std::abs(at_prior - expected) < 1e-8);
    CHECK(at_prior > at_min);
}

TEST_CASE("gaussian perturbations never beat the minimizer") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const GaussianDist prior{u(rng), std::exp(u(rng))};
        const QuadraticCost cost{std::exp(u(rng)), u(rng)};
        const double beta = std::exp(u(rng));
        const auto m = minimize_entropy_functional(cost, prior, beta);
        const auto grid = grid_for(prior, m.posterior, 8001);
        const double best = functional_value(discretize(m.posterior, grid), cost, prior, beta);
        for (int j = 0; j < 10; ++j) {
            const GaussianDist trial{m.posterior.mean + 0.3 * u(rng) * m.posterior.stddev(),
                                     m.posterior.precision * std::exp(0.3 * u(rng))};
            CHECK(functional_value(discretize(trial, grid), cost, prior, beta) >= best - 1e-8);
        }
    }
}

TEST_CASE("the functional is convex along mixtures") {
    const GaussianDist prior{0.0, 1.0};
    const QuadraticCost cost{0.5, 0.2};
    const auto grid = grid_for(prior, GaussianDist{-1.0, 0.5});
    const auto p = discretize({1.0, 3.0}, grid);
    const auto q = discretize({-1.0, 0.5}, grid);
    const double fp = functional_value(p, cost, prior, 1.0);
    const double fq = functional_value(q, cost, prior, 1.0);
    for (double lam : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        DiscretizedDensity mix = p;
        for (std::size_t i = 0; i < mix.size(); ++i) mix.weights[i] = lam * p.weights[i] + (1 - lam) * q.weights[i];
        CHECK(functional_value(mix, cost, prior, 1.0) <= lam * fp + (1 - lam) * fq + 1e-12);
    }
}

TEST_CASE("too narrow a grid is rejected") {
    const GaussianDist prior{0.0, 1.0};
    const GaussianDist d[] = {prior};
    const auto narrow = make_grid(d, 4.0, 1001);
    CHECK(kind_of([&] { functional_value(discretize(prior, narrow), {1.0, 0.0}, prior, 1.0); }) ==
          ErrorKind::support_too_narrow);
}

TEST_CASE("grid construction") {
    const GaussianDist d[] = {{1.0, 1.0}, {5.0, 100.0}};
    const auto g = make_grid(d, 10.0, 101);
    CHECK(g.size() == 101);
    CHECK(g.lo == doctest::Approx(1.0 - 14.0));
    CHECK(g.hi() == doctest::Approx(1.0 + 14.0));
    CHECK(kind_of([] { make_grid({}, 10.0, 101); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("discretized moments") {
    const GaussianDist dist{-0.4, 0.25};
    const GaussianDist d[] = {dist};
    const auto p = discretize(dist, make_grid(d, 12.0, 4001));
    CHECK(p.mass() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(p.mean() - dist.mean) < 1e-10);
    CHECK(std::abs(p.variance() - dist.variance()) < 1e-8);
}

TEST_CASE("Gibbs oracle reproduces the gaussian posterior") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 10; ++k) {
        const GaussianDist prior{u(rng), std::exp(u(rng))};
        const QuadraticCost cost{std::exp(u(rng)), 2.0 * u(rng)};
        const double beta = std::exp(u(rng));
        const auto m = minimize_entropy_functional(cost, prior, beta);
        const auto grid = grid_for(prior, m.posterior);
        const auto pd = discretize(prior, grid);
        std::vector<double> integrand(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) integrand[i] = cost(grid.at(i));
        const auto gibbs = gibbs_posterior_oracle(pd, integrand, beta);
        CHECK(std::abs(gibbs.mean() - m.posterior.mean) < 1e-6);
        CHECK(std::abs(gibbs.variance() - m.posterior.variance()) < 1e-6);
        CHECK(total_variation(gibbs, discretize(m.posterior, grid)) < 1e-6);
    }
}

TEST_CASE("Gibbs oracle with a non-quadratic integrand") {
    const GaussianDist prior{0.0, 1.0};
    const GaussianDist d[] = {prior};
    const auto pd = discretize(prior, make_grid(d, 12.0, 8001));
    std::vector<double> integrand(pd.size());
    for (std::size_t i = 0; i < pd.size(); ++i) integrand[i] = pd.at(i) > 0.0 ? 0.0 : 50.0;
    const auto post = gibbs_posterior_oracle(pd, integrand, 1.0);
    // Almost all the mass moves to the half line; the mean approaches sqrt(2 / pi).
    CHECK(post.mean() == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-3));
}

TEST_CASE("Gibbs oracle errors") {
    const GaussianDist prior{0.0, 1.0};
    const GaussianDist d[] = {prior};
    auto pd = discretize(prior, make_grid(d, 10.0, 101));
    std::vector<double> short_integrand(10, 0.0);
    CHECK(kind_of([&] { gibbs_posterior_oracle(pd, short_integrand, 1.0); }) == ErrorKind::invalid_parameter);
    std::vector<double> integrand(pd.size(), 0.0);
    std::fill(pd.weights.begin(), pd.weights.end(), 0.0);
    CHECK(kind_of([&] { gibbs_posterior_oracle(pd, integrand, 1.0); }) == ErrorKind::degenerate_normalizer);
    CHECK(kind_of([&] { pd.normalize(); }) == ErrorKind::degenerate_normalizer);
}

TEST_CASE("total variation") {
    const GaussianDist d[] = {{0.0, 1.0}};
    const auto g = make_grid(d, 12.0, 4001);
    const auto p = discretize({0.0, 1.0}, g);
    CHECK(total_variation(p, p) == 0.0);
    const auto q = discretize({3.0, 1.0}, g);
    const double tv = total_variation(p, q);
    // 2 Phi(3 / 2) - 1 for unit gaussians three apart.
    CHECK(tv == doctest::Approx(std::erf(1.5 / std::sqrt(2.0))).epsilon(1e-6));
}

}
