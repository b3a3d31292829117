#include "rexec/model_config.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rexec/errors.hpp"

namespace rexec {

Schedule Schedule::linear(double a, double b) {
    Schedule s(a);
    s.kind_ = Kind::linear;
    s.b_ = b;
    return s;
}

Schedule Schedule::function(std::function<double(double)> f) {
    Schedule s(0.0);
    s.kind_ = Kind::callable;
    s.f_ = std::move(f);
    return s;
}

double Schedule::operator()(double t) const {
    switch (kind_) {
        case Kind::constant: return a_;
        case Kind::linear: return a_ + b_ * t;
        case Kind::callable: return f_(t);
    }
    return a_;
}

void ModelParams::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::invalid_parameter, msg); };
    for (double v : {gamma, gamma_M, eta, delta, beta, sigma_S, sigma_X, rho, horizon, x0, s0}) {
        if (!std::isfinite(v)) fail("parameters must be finite");
    }
    if (!(eta > 0.0)) fail("eta must be > 0");
    if (!(beta > 0.0)) fail("beta must be > 0");
    if (!(horizon > 0.0)) fail("horizon must be > 0");
    if (std::abs(rho) > 1.0) fail("|rho| must be <= 1");
    if (sigma_S < 0.0 || sigma_X < 0.0) fail("volatilities must be >= 0");
}

double GaussianDist::stddev() const { return 1.0 / std::sqrt(precision); }

double GaussianDist::log_pdf(double a) const {
    const double d = a - mean;
    return 0.5 * std::log(precision / (2.0 * std::numbers::pi)) - 0.5 * precision * d * d;
}

double GaussianDist::pdf(double a) const { return std::exp(log_pdf(a)); }

void validate(const GaussianDist& dist) {
    if (!std::isfinite(dist.mean)) throw Error(ErrorKind::precision_violation, "mean must be finite");
    if (!(dist.precision > 0.0)) {
        std::ostringstream os;
        os << "precision must be > 0, got " << dist.precision;
        throw Error(ErrorKind::precision_violation, os.str());
    }
    if (dist.precision > kMaxPrecision) {
        std::ostringstream os;
        os << "precision " << dist.precision << " exceeds " << kMaxPrecision;
        throw Error(ErrorKind::precision_violation, os.str());
    }
}

bool ModelSpec::is_constant() const noexcept {
    const bool risk_const = std::visit([](const auto& r) { return r.is_constant(); }, risk);
    return prior.is_constant() && risk_const;
}

void ModelSpec::validate(int n_samples) const {
    params.validate();
    const double T = params.horizon;
    for (int i = 0; i <= n_samples; ++i) {
        const double t = T * static_cast<double>(i) / n_samples;
        const GaussianDist p = prior.at(t);
        rexec::validate(p);
        if (kind() == ModelKind::model1) {
            (void)derive_model1_coeffs(params, p, risk1().at(t));
        } else {
            (void)derive_model2_coeffs(params, p, risk2().at(t));
        }
    }
}

std::optional<double> acoth(double y) {
    if (!(y > 1.0) || !std::isfinite(y)) return std::nullopt;
    return std::atanh(1.0 / y);
}

namespace {

double posterior_precision(const ModelParams& params, const GaussianDist& prior, double r_aa) {
    validate(prior);
    const double q = prior.precision + params.beta * r_aa;
    if (!(q > 0.0)) {
        std::ostringstream os;
        os << "s + beta R_aa = " << q << " must be > 0";
        throw Error(ErrorKind::precision_violation, os.str());
    }
    return q;
}

}  // namespace

Model1Coeffs derive_model1_coeffs(const ModelParams& params, const GaussianDist& prior,
                                  const RiskSpecModel1::Point& risk) {
    const double q = posterior_precision(params, prior, risk.r_aa);
    const double k = params.gamma_M + risk.r_xa;
    const double s = prior.precision;

    Model1Coeffs out;
    out.a1 = risk.r_xx - params.beta * k * k / q;
    out.b1 = k * s * prior.mean / q;
    out.c = s / q;
    out.g = params.g();
    if (out.a1 < 0.0) {
        out.a1_hat = std::sqrt(-out.a1 / (2.0 * params.eta));
        out.alpha1 = acoth(out.g / (params.eta * *out.a1_hat));
    }
    return out;
}

Model2Coeffs derive_model2_coeffs(const ModelParams& params, const GaussianDist& prior,
                                  const RiskSpecModel2::Point& risk) {
    const double q = posterior_precision(params, prior, risk.r_aa);
    const double s = prior.precision;
    const double beta = params.beta;

    Model2Coeffs out;
    out.a2 = beta * params.gamma_M * params.gamma_M / q;
    out.b2 = params.gamma_M * s * prior.mean / q;
    out.eta_tilde = params.eta - 0.5 * risk.r_vv + beta * risk.r_va * risk.r_va / (2.0 * q);
    if (!(out.eta_tilde > 0.0)) {
        std::ostringstream os;
        os << "eta_tilde = " << out.eta_tilde << " must be > 0";
        throw Error(ErrorKind::eta_tilde_violation, os.str());
    }
    out.c_shift = beta * params.gamma_M * risk.r_va / q;
    out.d_shift = -risk.r_va * s * prior.mean / q;
    out.g = params.g();
    if (out.a2 > 0.0) {
        out.a2_hat = std::sqrt(out.a2 / (2.0 * out.eta_tilde));
        out.alpha2 = acoth((2.0 * out.g + out.c_shift) / (2.0 * out.eta_tilde * *out.a2_hat));
    }
    return out;
}

GaussianDist optimal_posterior(const ModelSpec& spec, double t, double x, double v) {
    const ModelParams& p = spec.params;
    const GaussianDist prior = spec.prior.at(t);
    if (spec.kind() == ModelKind::model1) {
        const auto r = spec.risk1().at(t);
        const double q = posterior_precision(p, prior, r.r_aa);
        return {(-p.beta * (p.gamma_M + r.r_xa) * x + prior.precision * prior.mean) / q, q};
    }
    const auto r = spec.risk2().at(t);
    const double q = posterior_precision(p, prior, r.r_aa);
    return {(-p.beta * r.r_va * v - p.beta * p.gamma_M * x + prior.precision * prior.mean) / q, q};
}

}  // namespace rexec
