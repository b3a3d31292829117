#pragma once

#include <memory>
#include <vector>

#include "rexec/model_config.hpp"
#include "rexec/riccati.hpp"

namespace rexec {

enum class Provenance { closed_form, solver };

const char* to_string(Provenance p) noexcept;

/// Quadratic value function V(t, x) = 1/2 H2 x^2 + H1 x + H0 and the feedback
/// strategy it induces. Closed-form and solver-backed implementations share
/// this interface so callers never branch on which regime applies.
class ValueFunction {
public:
    explicit ValueFunction(ModelSpec spec) : spec_(std::move(spec)) {}
    virtual ~ValueFunction() = default;

    const ModelSpec& spec() const noexcept { return spec_; }
    double horizon() const noexcept { return spec_.params.horizon; }

    virtual double h2(double t) const = 0;
    virtual double h1(double t) const = 0;
    virtual double h0(double t) const = 0;
    virtual Provenance provenance() const noexcept = 0;

    /// Expected optimal inventory when the noise is switched off.
    virtual double expected_trajectory(double t) const = 0;

    double value(double t, double x) const;

    /// Model 1: (H2 x + H1) / 2 eta.
    /// Model 2: ((H2 - C) x + H1 - D) / 2 eta_tilde.
    double optimal_rate(double t, double x) const;

    struct AffineRate {
        double slope = 0.0;
        double intercept = 0.0;
    };
    /// The optimal rate is affine in x: v* = slope x + intercept.
    AffineRate rate_coefficients(double t) const;

    /// Posterior of the market rate at the optimal rate for (t, x).
    GaussianDist posterior(double t, double x) const;

protected:
    /// Throws OutOfHorizon outside [0, T] (with a 1e-12 relative slack) and clamps.
    double checked(double t) const;

private:
    ModelSpec spec_;
};

/// Closed forms for constant coefficients with A1 < 0 and g > eta * A1_hat.
class Model1ClosedForm final : public ValueFunction {
public:
    explicit Model1ClosedForm(ModelSpec spec);

    const Model1Coeffs& coeffs() const noexcept { return coeffs_; }

    double h2(double t) const override;
    double h1(double t) const override;
    double h0(double t) const override;
    double expected_trajectory(double t) const override;
    Provenance provenance() const noexcept override { return Provenance::closed_form; }

private:
    double theta(double t) const;
    Model1Coeffs coeffs_;
};

/// Closed forms for constant coefficients with A2 > 0 and (2g + C) > 2 eta_tilde A2_hat.
class Model2ClosedForm final : public ValueFunction {
public:
    explicit Model2ClosedForm(ModelSpec spec);

    const Model2Coeffs& coeffs() const noexcept { return coeffs_; }

    double h2(double t) const override;
    double h1(double t) const override;
    double h0(double t) const override;
    double expected_trajectory(double t) const override;
    Provenance provenance() const noexcept override { return Provenance::closed_form; }

private:
    double theta(double t) const;
    Model2Coeffs coeffs_;
};

/// Value function backed by the RK4 coefficient table; off-grid times use
/// cubic Hermite interpolation with the ODE derivatives.
class SolverValueFunction final : public ValueFunction {
public:
    SolverValueFunction(ModelSpec spec, int n_steps);

    const ValueCoefficients& table() const noexcept { return table_; }

    double h2(double t) const override;
    double h1(double t) const override;
    double h0(double t) const override;
    double expected_trajectory(double t) const override;
    Provenance provenance() const noexcept override { return Provenance::solver; }

private:
    ValueCoefficients table_;
    std::vector<double> x_star_;
    std::vector<double> dx_star_;
};

struct StrategyOptions {
    int solver_steps = 1000;
    bool prefer_closed_form = true;
};

/// Closed form when the coefficients are constant and the closed-form regime
/// holds, the Riccati solver otherwise.
std::shared_ptr<const ValueFunction> make_value_function(const ModelSpec& spec, const StrategyOptions& opts = {});

/// True when make_value_function would pick the closed form.
bool closed_form_available(const ModelSpec& spec);

/// Composite Simpson rule on [a, b] with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels = 2000) {
    if (panels % 2) ++panels;
    if (a == b) return 0.0;
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) acc += f(a + h * i) * ((i % 2) ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace rexec
