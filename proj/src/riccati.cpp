#include "rexec/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rexec/errors.hpp"

namespace rexec {

std::array<double, 3> coefficient_rhs(const ModelSpec& spec, double t, double h2, double h1) {
    const ModelParams& p = spec.params;
    const GaussianDist prior = spec.prior.at(t);
    const double s = prior.precision;
    const double m = prior.mean;
    const double noise = 0.5 * p.gamma * p.sigma_X * p.sigma_X + p.rho * p.sigma_S * p.sigma_X;

    if (spec.kind() == ModelKind::model1) {
        const Model1Coeffs c = derive_model1_coeffs(p, prior, spec.risk1().at(t));
        const double d2 = -(h2 * h2 / (2.0 * p.eta) + c.a1);
        const double d1 = -(h1 * h2 / (2.0 * p.eta) + c.b1);
        const double d0 = -(0.5 * p.sigma_X * p.sigma_X * h2 + h1 * h1 / (4.0 * p.eta) + noise
                            - std::log(c.c) / (2.0 * p.beta) - s * m * m * (c.c - 1.0) / (2.0 * p.beta));
        return {d2, d1, d0};
    }
    const Model2Coeffs c = derive_model2_coeffs(p, prior, spec.risk2().at(t));
    const double cc = s / (s + p.beta * spec.risk2().at(t).r_aa);
    const double k = h2 - c.c_shift;
    const double l = h1 - c.d_shift;
    const double d2 = -(k * k / (2.0 * c.eta_tilde) - c.a2);
    const double d1 = -(k * l / (2.0 * c.eta_tilde) + c.b2);
    // constant-in-x part of the effective HJ equation for Model 2
    const double d0 = -(0.5 * p.sigma_X * p.sigma_X * h2 + l * l / (4.0 * c.eta_tilde)
                        + s * m * m * (1.0 - cc) / (2.0 * p.beta) - std::log(cc) / (2.0 * p.beta) + noise);
    return {d2, d1, d0};
}

namespace {

constexpr double kStabilityLimit = 0.5;
constexpr long kMaxSubsteps = 10'000'000;

// |d(rhs)/dH2|, the local stiffness of the Riccati equation
double stiffness(const ModelSpec& spec, double t, double h2) {
    const ModelParams& p = spec.params;
    if (spec.kind() == ModelKind::model1) return std::abs(h2) / p.eta;
    const Model2Coeffs c = derive_model2_coeffs(p, spec.prior.at(t), spec.risk2().at(t));
    return std::abs(h2 - c.c_shift) / c.eta_tilde;
}

ValueCoefficients integrate(const ModelSpec& spec, int n_steps) {
    if (n_steps < 10) throw Error(ErrorKind::invalid_parameter, "n_steps must be >= 10");
    spec.validate(std::max(n_steps, 10));
    const double T = spec.params.horizon;
    const double dt = T / n_steps;
    const std::size_t n = static_cast<std::size_t>(n_steps) + 1;

    ValueCoefficients out;
    out.model = spec.kind();
    out.t.resize(n);
    out.h2.resize(n);
    out.h1.resize(n);
    out.h0.resize(n);
    out.dh2.resize(n);
    out.dh1.resize(n);
    out.dh0.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.t[i] = (i + 1 == n) ? T : dt * static_cast<double>(i);

    // y' = -rhs in reversed time
    auto f = [&](double t, const std::array<double, 3>& y) {
        const auto d = coefficient_rhs(spec, t, y[0], y[1]);
        return std::array<double, 3>{-d[0], -d[1], -d[2]};
    };
    auto axpy = [](const std::array<double, 3>& y, double a, const std::array<double, 3>& k) {
        return std::array<double, 3>{y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2]};
    };

    std::array<double, 3> y{-2.0 * spec.params.g(), 0.0, 0.0};
    std::size_t i = n - 1;
    auto store = [&](std::size_t idx, const std::array<double, 3>& state) {
        out.h2[idx] = state[0];
        out.h1[idx] = state[1];
        out.h0[idx] = state[2];
        const auto d = coefficient_rhs(spec, out.t[idx], state[0], state[1]);
        out.dh2[idx] = d[0];
        out.dh1[idx] = d[1];
        out.dh0[idx] = d[2];
    };
    store(i, y);
    auto rk4 = [&](double t, double h) {
        const auto k1 = f(t, y);
        const auto k2 = f(t - 0.5 * h, axpy(y, 0.5 * h, k1));
        const auto k3 = f(t - 0.5 * h, axpy(y, 0.5 * h, k2));
        const auto k4 = f(t - h, axpy(y, h, k3));
        for (int j = 0; j < 3; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    };
    auto blow_up = [&](double at) {
        std::ostringstream os;
        os << "|H2| exceeded " << kBlowUpThreshold << " at t = " << at;
        throw Error(ErrorKind::blow_up, os.str());
    };
    long substeps = 0;
    for (int step = 0; step < n_steps; ++step, --i) {
        const double t_next = out.t[i - 1];
        double t = out.t[i];
        // a grid step is split only when h |df/dH2| would exceed kStabilityLimit,
        // which happens for very large terminal penalties right before T
        while (t > t_next) {
            const double lip = stiffness(spec, t, y[0]);
            double h = t - t_next;
            if (h * lip > kStabilityLimit) h = std::max(kStabilityLimit / lip, 1e-15 * T);
            if (t - h < t_next) h = t - t_next;
            rk4(t, h);
            t = (t - h <= t_next) ? t_next : t - h;
            if (!std::isfinite(y[0]) || std::abs(y[0]) > kBlowUpThreshold || ++substeps > kMaxSubsteps) blow_up(t);
        }
        store(i - 1, y);
    }
    return out;
}

}  // namespace

ValueCoefficients solve_model1(const ModelSpec& spec, int n_steps) {
    if (spec.kind() != ModelKind::model1) throw Error(ErrorKind::config_mismatch, "expected a Model 1 spec");
    return integrate(spec, n_steps);
}

ValueCoefficients solve_model2(const ModelSpec& spec, int n_steps) {
    if (spec.kind() != ModelKind::model2) throw Error(ErrorKind::config_mismatch, "expected a Model 2 spec");
    return integrate(spec, n_steps);
}

ValueCoefficients solve_riccati(const ModelSpec& spec, int n_steps) { return integrate(spec, n_steps); }

std::array<double, 3> ValueCoefficients::interpolate(double time) const {
    if (t.size() < 2) throw Error(ErrorKind::invalid_parameter, "empty coefficient table");
    const double T = t.back();
    const double dt = T / static_cast<double>(n_steps());
    std::size_t k = static_cast<std::size_t>(std::clamp(std::floor(time / dt), 0.0, static_cast<double>(n_steps() - 1)));
    const double h = t[k + 1] - t[k];
    const double u = (time - t[k]) / h;
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double b00 = 2 * u3 - 3 * u2 + 1;
    const double b10 = u3 - 2 * u2 + u;
    const double b01 = -2 * u3 + 3 * u2;
    const double b11 = u3 - u2;
    auto hermite = [&](const std::vector<double>& y, const std::vector<double>& dy) {
        return b00 * y[k] + b10 * h * dy[k] + b01 * y[k + 1] + b11 * h * dy[k + 1];
    };
    // Where H2 changes by more than its own size across one interval the cubic
    // overshoots; 1/H2 is then close to affine in t, so interpolate that instead.
    auto steep = [&](std::size_t j) { return h * std::abs(dh2[j]) > std::abs(h2[j]); };
    if ((steep(k) || steep(k + 1)) && h2[k] * h2[k + 1] > 0.0) {
        const double r = (1.0 - u) / h2[k] + u / h2[k + 1];
        auto lin = [&](const std::vector<double>& y) { return (1.0 - u) * y[k] + u * y[k + 1]; };
        return {1.0 / r, lin(h1), lin(h0)};
    }
    return {hermite(h2, dh2), hermite(h1, dh1), hermite(h0, dh0)};
}

}  // namespace rexec
