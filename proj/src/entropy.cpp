#include "rexec/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rexec/errors.hpp"

namespace rexec {

double DiscretizedDensity::mass() const {
    double acc = 0.0;
    for (double w : weights) acc += w;
    return acc * h;
}

double DiscretizedDensity::mean() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * at(i);
    return acc * h / mass();
}

double DiscretizedDensity::variance() const {
    const double mu = mean();
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double d = at(i) - mu;
        acc += weights[i] * d * d;
    }
    return acc * h / mass();
}

void DiscretizedDensity::normalize() {
    const double m = mass();
    if (!(m > 0.0) || !std::isfinite(m)) throw Error(ErrorKind::degenerate_normalizer, "density has no mass");
    for (double& w : weights) w /= m;
}

double kl_gaussian(const GaussianDist& p, const GaussianDist& q) {
    validate(p);
    validate(q);
    const double ratio = q.precision / p.precision;
    const double d = p.mean - q.mean;
    // ratio - 1 - ln(ratio) >= 0, written so that p == q gives exactly 0
    return 0.5 * ((ratio - 1.0 - std::log(ratio)) + q.precision * d * d);
}

EntropyMinimum minimize_entropy_functional(const QuadraticCost& cost, const GaussianDist& prior, double beta) {
    validate(prior);
    if (!(beta > 0.0)) throw Error(ErrorKind::invalid_parameter, "beta must be > 0");
    const double s = prior.precision;
    const double m = prior.mean;
    const double q = s + beta * cost.c2;
    if (!(q > 0.0)) {
        std::ostringstream os;
        os << "s + beta c2 = " << q << " must be > 0";
        throw Error(ErrorKind::precision_violation, os.str());
    }
    const double num = s * m - beta * cost.c1;
    EntropyMinimum out;
    out.posterior = {num / q, q};
    out.min_value = std::log(q / s) / (2.0 * beta) + s * m * m / (2.0 * beta) - num * num / (2.0 * beta * q);
    return out;
}

DiscretizedDensity make_grid(std::span<const GaussianDist> dists, double half_width_sd, std::size_t n_points) {
    if (dists.empty() || n_points < 3) throw Error(ErrorKind::invalid_parameter, "grid needs a distribution and >= 3 points");
    const double center = dists.front().mean;
    double sd = 0.0;
    double lo = center;
    double hi = center;
    for (const auto& d : dists) {
        validate(d);
        sd = std::max(sd, d.stddev());
        lo = std::min(lo, d.mean);
        hi = std::max(hi, d.mean);
    }
    const double reach = std::max(center - lo, hi - center) + half_width_sd * sd;
    DiscretizedDensity out;
    out.lo = center - reach;
    out.h = 2.0 * reach / static_cast<double>(n_points - 1);
    out.weights.assign(n_points, 0.0);
    return out;
}

DiscretizedDensity discretize(const GaussianDist& dist, const DiscretizedDensity& like) {
    DiscretizedDensity out = like;
    for (std::size_t i = 0; i < out.size(); ++i) out.weights[i] = dist.pdf(out.at(i));
    out.normalize();
    return out;
}

double functional_value(const DiscretizedDensity& pi, const QuadraticCost& cost, const GaussianDist& prior,
                        double beta) {
    const GaussianDist post = minimize_entropy_functional(cost, prior, beta).posterior;
    const double reach = 8.0 * post.stddev();
    for (double mu : {prior.mean, post.mean}) {
        if (pi.lo > mu - reach || pi.hi() < mu + reach) {
            std::ostringstream os;
            os << "grid [" << pi.lo << ", " << pi.hi() << "] does not cover " << mu << " +- " << reach;
            throw Error(ErrorKind::support_too_narrow, os.str());
        }
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        const double w = pi.weights[i];
        if (w <= 0.0) continue;
        const double a = pi.at(i);
        acc += w * (cost(a) + (std::log(w) - prior.log_pdf(a)) / beta);
    }
    return acc * pi.h;
}

DiscretizedDensity gibbs_posterior_oracle(const DiscretizedDensity& prior, std::span<const double> integrand,
                                          double beta) {
    if (integrand.size() != prior.size()) throw Error(ErrorKind::invalid_parameter, "integrand size mismatch");
    DiscretizedDensity out = prior;
    std::vector<double> logw(prior.size(), -std::numeric_limits<double>::infinity());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < prior.size(); ++i) {
        if (!std::isfinite(integrand[i])) throw Error(ErrorKind::invalid_parameter, "integrand must be finite");
        if (prior.weights[i] > 0.0) {
            logw[i] = std::log(prior.weights[i]) - beta * integrand[i];
            top = std::max(top, logw[i]);
        }
    }
    if (!std::isfinite(top)) throw Error(ErrorKind::degenerate_normalizer, "all prior weights vanish");
    for (std::size_t i = 0; i < out.size(); ++i) out.weights[i] = std::exp(logw[i] - top);
    out.normalize();
    return out;
}

double total_variation(const DiscretizedDensity& p, const DiscretizedDensity& q) {
    if (p.size() != q.size()) throw Error(ErrorKind::invalid_parameter, "grids differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p.weights[i] - q.weights[i]);
    return 0.5 * acc * p.h;
}

}  // namespace rexec
