#pragma once

#include <span>
#include <vector>

#include "rexec/model_config.hpp"

namespace rexec {

/// Cost (c2 / 2) a^2 + c1 a integrated against a distribution of a.
struct QuadraticCost {
    double c2 = 0.0;
    double c1 = 0.0;

    double operator()(double a) const { return 0.5 * c2 * a * a + c1 * a; }
};

/// Density sampled on a uniform grid: grid[i] = lo + i h, with h * sum(weights) == 1.
struct DiscretizedDensity {
    double lo = 0.0;
    double h = 1.0;
    std::vector<double> weights;

    std::size_t size() const noexcept { return weights.size(); }
    double at(std::size_t i) const noexcept { return lo + h * static_cast<double>(i); }
    double hi() const noexcept { return at(weights.empty() ? 0 : weights.size() - 1); }

    double mass() const;
    double mean() const;
    double variance() const;
    /// Rescales weights so that h * sum == 1. Throws DegenerateNormalizer on zero mass.
    void normalize();
};

/// KL(p || q) for univariate Gaussians. Always >= 0.
double kl_gaussian(const GaussianDist& p, const GaussianDist& q);

struct EntropyMinimum {
    GaussianDist posterior;
    double min_value = 0.0;
};

/// Closed-form minimizer and minimum of
///   F[pi] = E_pi[cost(a)] + (1/beta) KL(pi || prior).
/// The minimizer is Gaussian with precision s + beta c2 and mean
/// (s m - beta c1) / (s + beta c2).
EntropyMinimum minimize_entropy_functional(const QuadraticCost& cost, const GaussianDist& prior, double beta);

/// Uniform grid centered at the prior mean spanning +-half_width_sd of the
/// widest of the supplied Gaussians, wide enough to also contain every mean.
DiscretizedDensity make_grid(std::span<const GaussianDist> dists, double half_width_sd = 10.0,
                             std::size_t n_points = 20001);

/// Samples the density of `dist` on the grid of `like` and renormalizes.
DiscretizedDensity discretize(const GaussianDist& dist, const DiscretizedDensity& like);

/// Riemann sum of h * w_i [cost(a_i) + (1/beta) ln(w_i / prior(a_i))], with 0 ln 0 = 0.
/// Throws SupportTooNarrow when the grid does not cover 8 posterior standard
/// deviations around both the prior mean and the closed-form posterior mean.
double functional_value(const DiscretizedDensity& pi, const QuadraticCost& cost, const GaussianDist& prior,
                        double beta);

/// pi*(a_i) proportional to prior(a_i) exp(-beta integrand_i), normalized on the grid.
DiscretizedDensity gibbs_posterior_oracle(const DiscretizedDensity& prior, std::span<const double> integrand,
                                          double beta);

/// 0.5 * h * sum |p_i - q_i| on a shared grid.
double total_variation(const DiscretizedDensity& p, const DiscretizedDensity& q);

}  // namespace rexec
