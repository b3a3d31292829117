#include "rexec/closed_form.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rexec/errors.hpp"

namespace rexec {

const char* to_string(Provenance p) noexcept { return p == Provenance::closed_form ? "closed_form" : "solver"; }

double ValueFunction::checked(double t) const {
    const double T = horizon();
    const double slack = 1e-12 * T;
    if (!(t >= -slack && t <= T + slack)) {
        std::ostringstream os;
        os << "t = " << t << " outside [0, " << T << "]";
        throw Error(ErrorKind::out_of_horizon, os.str());
    }
    return std::min(std::max(t, 0.0), T);
}

double ValueFunction::value(double t, double x) const { return 0.5 * h2(t) * x * x + h1(t) * x + h0(t); }

ValueFunction::AffineRate ValueFunction::rate_coefficients(double t) const {
    t = checked(t);
    const ModelParams& p = spec().params;
    if (spec().kind() == ModelKind::model1) return {h2(t) / (2.0 * p.eta), h1(t) / (2.0 * p.eta)};
    const Model2Coeffs c = derive_model2_coeffs(p, spec().prior.at(t), spec().risk2().at(t));
    return {(h2(t) - c.c_shift) / (2.0 * c.eta_tilde), (h1(t) - c.d_shift) / (2.0 * c.eta_tilde)};
}

double ValueFunction::optimal_rate(double t, double x) const {
    const AffineRate r = rate_coefficients(t);
    return r.slope * x + r.intercept;
}

GaussianDist ValueFunction::posterior(double t, double x) const {
    return optimal_posterior(spec(), t, x, optimal_rate(t, x));
}

namespace {

double noise_constant(const ModelParams& p) {
    return 0.5 * p.gamma * p.sigma_X * p.sigma_X + p.rho * p.sigma_S * p.sigma_X;
}

void require_constant(const ModelSpec& spec) {
    if (!spec.is_constant()) throw Error(ErrorKind::invalid_parameter, "closed form requires constant coefficients");
}

// guard: the coth/sinh argument stays above alpha > 0 in the closed-form regime
double guarded(double theta) {
    if (!(theta > 1e-12)) throw Error(ErrorKind::invalid_parameter, "closed-form argument not positive");
    return theta;
}

// ln(sinh a / sinh b) for a >= b > 0 without overflow for large arguments
double log_sinh_ratio(double a, double b) {
    auto log_sinh = [](double x) { return x + std::log1p(-std::exp(-2.0 * x)) - std::numbers::ln2; };
    return log_sinh(a) - log_sinh(b);
}

}  // namespace

// ---------------------------------------------------------------- Model 1

Model1ClosedForm::Model1ClosedForm(ModelSpec spec) : ValueFunction(std::move(spec)) {
    require_constant(this->spec());
    this->spec().validate(1);
    if (this->spec().kind() != ModelKind::model1) throw Error(ErrorKind::config_mismatch, "expected Model 1");
    coeffs_ = derive_model1_coeffs(this->spec().params, this->spec().prior.at(0.0), this->spec().risk1().at(0.0));
    if (!coeffs_.closed_form()) {
        throw Error(ErrorKind::invalid_parameter, "Model 1 closed form needs A1 < 0 and g > eta A1_hat");
    }
}

double Model1ClosedForm::theta(double t) const {
    return guarded(*coeffs_.a1_hat * (horizon() - t) + *coeffs_.alpha1);
}

double Model1ClosedForm::h2(double t) const {
    t = checked(t);
    const double a = *coeffs_.a1_hat;
    return -2.0 * spec().params.eta * a / std::tanh(theta(t));
}

double Model1ClosedForm::h1(double t) const {
    t = checked(t);
    if (coeffs_.b1 == 0.0) return 0.0;
    const double a = *coeffs_.a1_hat;
    const double th = theta(t);
    return coeffs_.b1 / a * (1.0 / std::tanh(th) - std::cosh(*coeffs_.alpha1) / std::sinh(th));
}

double Model1ClosedForm::h0(double t) const {
    t = checked(t);
    const ModelParams& p = spec().params;
    const GaussianDist prior = spec().prior.at(0.0);
    const double s = prior.precision;
    const double m = prior.mean;
    const double c = coeffs_.c;
    const double constant = noise_constant(p) - std::log(c) / (2.0 * p.beta) - s * m * m * (c - 1.0) / (2.0 * p.beta);
    // int_t^T H2 du = -2 eta ln(sinh theta(t) / sinh alpha)
    const double h2_integral = -2.0 * p.eta * log_sinh_ratio(theta(t), *coeffs_.alpha1);
    double acc = constant * (horizon() - t) + 0.5 * p.sigma_X * p.sigma_X * h2_integral;
    if (coeffs_.b1 != 0.0) {
        acc += simpson([&](double u) { return h1(u) * h1(u) / (4.0 * p.eta); }, t, horizon(), 4000);
    }
    return acc;
}

double Model1ClosedForm::expected_trajectory(double t) const {
    t = checked(t);
    const double x0 = spec().params.x0;
    const double th0 = theta(0.0);
    const double tht = theta(t);
    double x = std::sinh(tht) / std::sinh(th0) * x0;
    if (coeffs_.b1 != 0.0) {
        const double eta = spec().params.eta;
        x += std::sinh(tht) * simpson([&](double u) { return h1(u) / (2.0 * eta * std::sinh(theta(u))); }, 0.0, t);
    }
    return x;
}

// ---------------------------------------------------------------- Model 2

Model2ClosedForm::Model2ClosedForm(ModelSpec spec) : ValueFunction(std::move(spec)) {
    require_constant(this->spec());
    this->spec().validate(1);
    if (this->spec().kind() != ModelKind::model2) throw Error(ErrorKind::config_mismatch, "expected Model 2");
    coeffs_ = derive_model2_coeffs(this->spec().params, this->spec().prior.at(0.0), this->spec().risk2().at(0.0));
    if (!coeffs_.closed_form()) {
        throw Error(ErrorKind::invalid_parameter, "Model 2 closed form needs A2 > 0 and 2g + C > 2 eta_tilde A2_hat");
    }
}

double Model2ClosedForm::theta(double t) const {
    return guarded(*coeffs_.a2_hat * (horizon() - t) + *coeffs_.alpha2);
}

double Model2ClosedForm::h2(double t) const {
    t = checked(t);
    return -2.0 * coeffs_.eta_tilde * *coeffs_.a2_hat / std::tanh(theta(t)) + coeffs_.c_shift;
}

double Model2ClosedForm::h1(double t) const {
    t = checked(t);
    const double a = *coeffs_.a2_hat;
    const double al = *coeffs_.alpha2;
    const double th = theta(t);
    const double b = coeffs_.b2;
    const double d = coeffs_.d_shift;
    if (b == 0.0 && d == 0.0) return 0.0;
    return -(d * a * std::sinh(al) + b * std::cosh(al)) / (a * std::sinh(th)) + b / a / std::tanh(th) + d;
}

double Model2ClosedForm::h0(double t) const {
    t = checked(t);
    const ModelParams& p = spec().params;
    const GaussianDist prior = spec().prior.at(0.0);
    const double s = prior.precision;
    const double m = prior.mean;
    const double c = s / (s + p.beta * spec().risk2().at(0.0).r_aa);
    const double constant = noise_constant(p) + s * m * m * (1.0 - c) / (2.0 * p.beta) - std::log(c) / (2.0 * p.beta);
    const double et = coeffs_.eta_tilde;
    const double d = coeffs_.d_shift;
    const double h2_integral =
        -2.0 * et * log_sinh_ratio(theta(t), *coeffs_.alpha2) + coeffs_.c_shift * (horizon() - t);
    double acc = constant * (horizon() - t) + 0.5 * p.sigma_X * p.sigma_X * h2_integral;
    if (coeffs_.b2 != 0.0 || d != 0.0) {
        acc += simpson([&](double u) { const double l = h1(u) - d; return l * l / (4.0 * et); }, t, horizon(), 4000);
    }
    return acc;
}

double Model2ClosedForm::expected_trajectory(double t) const {
    t = checked(t);
    const double x0 = spec().params.x0;
    const double tht = theta(t);
    double x = std::sinh(tht) / std::sinh(theta(0.0)) * x0;
    if (coeffs_.b2 != 0.0 || coeffs_.d_shift != 0.0) {
        const double et = coeffs_.eta_tilde;
        const double d = coeffs_.d_shift;
        x += std::sinh(tht) * simpson([&](double u) { return (h1(u) - d) / (2.0 * et * std::sinh(theta(u))); }, 0.0, t);
    }
    return x;
}

// ---------------------------------------------------------------- solver

SolverValueFunction::SolverValueFunction(ModelSpec spec, int n_steps)
    : ValueFunction(std::move(spec)), table_(solve_riccati(this->spec(), n_steps)) {
    // deterministic x' = v*(t, x) by RK4 on the solver grid, split where the
    // feedback slope makes a full step unstable
    const std::size_t n = table_.t.size();
    x_star_.resize(n);
    dx_star_.resize(n);
    double x = this->spec().params.x0;
    auto rk4 = [&](double t, double h) {
        const double k1 = optimal_rate(t, x);
        const double k2 = optimal_rate(t + 0.5 * h, x + 0.5 * h * k1);
        const double k3 = optimal_rate(t + 0.5 * h, x + 0.5 * h * k2);
        const double k4 = optimal_rate(t + h, x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    for (std::size_t i = 0; i < n; ++i) {
        x_star_[i] = x;
        dx_star_[i] = optimal_rate(table_.t[i], x);
        if (i + 1 == n) break;
        double t = table_.t[i];
        const double t_next = table_.t[i + 1];
        while (t < t_next) {
            double h = t_next - t;
            const double lip = std::abs(rate_coefficients(t).slope);
            if (h * lip > 0.5) h = std::max(0.5 / lip, 1e-15 * horizon());
            if (t + h > t_next) h = t_next - t;
            rk4(t, h);
            t = (t + h >= t_next) ? t_next : t + h;
        }
    }
}

double SolverValueFunction::h2(double t) const { return table_.interpolate(checked(t))[0]; }
double SolverValueFunction::h1(double t) const { return table_.interpolate(checked(t))[1]; }
double SolverValueFunction::h0(double t) const { return table_.interpolate(checked(t))[2]; }

double SolverValueFunction::expected_trajectory(double t) const {
    t = checked(t);
    const std::size_t steps = table_.n_steps();
    const double dt = horizon() / steps;
    const std::size_t k = std::min(static_cast<std::size_t>(std::floor(t / dt)), steps - 1);
    const double h = table_.t[k + 1] - table_.t[k];
    const double u = (t - table_.t[k]) / h;
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * x_star_[k] + (u3 - 2 * u2 + u) * h * dx_star_[k] + (-2 * u3 + 3 * u2) * x_star_[k + 1]
           + (u3 - u2) * h * dx_star_[k + 1];
}

// ---------------------------------------------------------------- factory

bool closed_form_available(const ModelSpec& spec) {
    if (!spec.is_constant()) return false;
    const GaussianDist prior = spec.prior.at(0.0);
    if (spec.kind() == ModelKind::model1) {
        return derive_model1_coeffs(spec.params, prior, spec.risk1().at(0.0)).closed_form();
    }
    return derive_model2_coeffs(spec.params, prior, spec.risk2().at(0.0)).closed_form();
}

std::shared_ptr<const ValueFunction> make_value_function(const ModelSpec& spec, const StrategyOptions& opts) {
    spec.validate();
    if (opts.prefer_closed_form && closed_form_available(spec)) {
        if (spec.kind() == ModelKind::model1) return std::make_shared<Model1ClosedForm>(spec);
        return std::make_shared<Model2ClosedForm>(spec);
    }
    return std::make_shared<SolverValueFunction>(spec, opts.solver_steps);
}

}  // namespace rexec
