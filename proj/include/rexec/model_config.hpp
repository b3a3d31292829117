#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>

namespace rexec {

/// Time-dependent scalar coefficient on [0, T].
///
/// Constant and affine schedules keep their closed description so they can be
/// serialized back to configuration files; arbitrary callables are allowed for
/// programmatic use but cannot be written out.
class Schedule {
public:
    Schedule() : Schedule(0.0) {}
    Schedule(double value) : kind_(Kind::constant), a_(value) {}  // NOLINT: implicit by design of configs

    static Schedule constant(double value) { return Schedule(value); }
    static Schedule linear(double a, double b);
    static Schedule function(std::function<double(double)> f);

    double operator()(double t) const;

    bool is_constant() const noexcept { return kind_ == Kind::constant || (kind_ == Kind::linear && b_ == 0.0); }
    bool is_linear() const noexcept { return kind_ == Kind::linear; }
    bool is_callable() const noexcept { return kind_ == Kind::callable; }
    double intercept() const noexcept { return a_; }
    double slope() const noexcept { return kind_ == Kind::linear ? b_ : 0.0; }

private:
    enum class Kind { constant, linear, callable };
    Kind kind_;
    double a_ = 0.0;
    double b_ = 0.0;
    std::function<double(double)> f_;
};

/// Market and agent constants. Units are whatever the caller uses consistently
/// (shares, price units, 1/time).
struct ModelParams {
    double gamma = 0.0;    ///< agent permanent impact
    double gamma_M = 0.0;  ///< market permanent impact
    double eta = 0.0;      ///< temporary impact
    double delta = 0.0;    ///< terminal inventory penalty, g(x) = -delta x^2
    double beta = 1.0;     ///< entropy regularization weight
    double sigma_S = 0.0;  ///< price volatility
    double sigma_X = 0.0;  ///< inventory volatility
    double rho = 0.0;      ///< correlation of the two Brownian motions
    double horizon = 1.0;  ///< liquidation horizon T
    double x0 = 0.0;       ///< initial inventory
    double s0 = 0.0;       ///< initial price

    /// Throws Error(invalid_parameter) unless eta > 0, beta > 0, horizon > 0, |rho| <= 1.
    void validate() const;

    /// g = delta - gamma / 2; the terminal value is -g x^2.
    double g() const noexcept { return delta - 0.5 * gamma; }
};

/// Gaussian parameterized by mean and precision (reciprocal variance).
struct GaussianDist {
    double mean = 0.0;
    double precision = 1.0;

    double variance() const { return 1.0 / precision; }
    double stddev() const;
    double log_pdf(double a) const;
    double pdf(double a) const;
};

/// Largest accepted precision. Dirac priors only appear as limits.
inline constexpr double kMaxPrecision = 1e15;

void validate(const GaussianDist& dist);

struct PriorSchedule {
    Schedule mean{0.0};
    Schedule precision{1.0};

    GaussianDist at(double t) const { return {mean(t), precision(t)}; }
    bool is_constant() const noexcept { return mean.is_constant() && precision.is_constant(); }
};

/// Running risk quadratic in (x, a).
struct RiskSpecModel1 {
    Schedule r_xx{0.0};
    Schedule r_xa{0.0};
    Schedule r_aa{0.0};

    struct Point {
        double r_xx, r_xa, r_aa;
    };
    Point at(double t) const { return {r_xx(t), r_xa(t), r_aa(t)}; }
    bool is_constant() const noexcept { return r_xx.is_constant() && r_xa.is_constant() && r_aa.is_constant(); }
};

/// Running risk quadratic in (v, a).
struct RiskSpecModel2 {
    Schedule r_vv{0.0};
    Schedule r_va{0.0};
    Schedule r_aa{0.0};

    struct Point {
        double r_vv, r_va, r_aa;
    };
    Point at(double t) const { return {r_vv(t), r_va(t), r_aa(t)}; }
    bool is_constant() const noexcept { return r_vv.is_constant() && r_va.is_constant() && r_aa.is_constant(); }
};

using RiskSpec = std::variant<RiskSpecModel1, RiskSpecModel2>;

enum class ModelKind { model1 = 1, model2 = 2 };

/// Everything that defines one execution problem.
struct ModelSpec {
    ModelParams params;
    PriorSchedule prior;
    RiskSpec risk;

    ModelKind kind() const noexcept { return risk.index() == 0 ? ModelKind::model1 : ModelKind::model2; }
    const RiskSpecModel1& risk1() const { return std::get<RiskSpecModel1>(risk); }
    const RiskSpecModel2& risk2() const { return std::get<RiskSpecModel2>(risk); }
    bool is_constant() const noexcept;

    /// Checks params plus the standing assumptions on n_samples + 1 uniformly
    /// spaced times in [0, T]: s_t > 0, s_t + beta R_aa > 0 and, for Model 2,
    /// eta_tilde(t) > 0.
    void validate(int n_samples = 100) const;
};

struct Model1Coeffs {
    double a1 = 0.0;
    double b1 = 0.0;
    double c = 1.0;
    double g = 0.0;
    std::optional<double> a1_hat;  ///< sqrt(-A1 / 2 eta), only for A1 < 0
    std::optional<double> alpha1;  ///< acoth(g / (eta a1_hat)), only when the argument exceeds 1

    bool closed_form() const noexcept { return a1_hat.has_value() && alpha1.has_value(); }
};

struct Model2Coeffs {
    double a2 = 0.0;
    double b2 = 0.0;
    double eta_tilde = 0.0;
    double c_shift = 0.0;  ///< C = beta gamma_M R_va / (s + beta R_aa)
    double d_shift = 0.0;  ///< D = -R_va s m / (s + beta R_aa)
    double g = 0.0;
    std::optional<double> a2_hat;  ///< sqrt(A2 / 2 eta_tilde), only for A2 > 0
    std::optional<double> alpha2;  ///< acoth((2g + C) / (2 eta_tilde a2_hat))

    bool closed_form() const noexcept { return a2_hat.has_value() && alpha2.has_value(); }
};

/// acoth(y) = atanh(1/y); empty for y <= 1.
std::optional<double> acoth(double y);

Model1Coeffs derive_model1_coeffs(const ModelParams& params, const GaussianDist& prior,
                                  const RiskSpecModel1::Point& risk);
Model2Coeffs derive_model2_coeffs(const ModelParams& params, const GaussianDist& prior,
                                  const RiskSpecModel2::Point& risk);

/// Posterior of the market trading rate under the model's inner minimization.
/// Model 1 ignores v. The precision never depends on x or v.
GaussianDist optimal_posterior(const ModelSpec& spec, double t, double x, double v);

}  // namespace rexec
