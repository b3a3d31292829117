#pragma once

#include <array>
#include <vector>

#include "rexec/model_config.hpp"

namespace rexec {

/// Sampled coefficients of V(t, x) = 1/2 H2 x^2 + H1 x + H0 on a uniform grid,
/// together with their time derivatives from the ODE right-hand side.
struct ValueCoefficients {
    ModelKind model = ModelKind::model1;
    std::vector<double> t;
    std::vector<double> h2, h1, h0;
    std::vector<double> dh2, dh1, dh0;

    std::size_t n_steps() const noexcept { return t.empty() ? 0 : t.size() - 1; }

    /// Cubic Hermite interpolation using the stored derivatives.
    std::array<double, 3> interpolate(double time) const;
};

/// Time derivatives (dH2/dt, dH1/dt, dH0/dt) of the coefficient ODE system at (t, H).
std::array<double, 3> coefficient_rhs(const ModelSpec& spec, double t, double h2, double h1);

/// Classical RK4 backward from t = T (run forward in tau = T - t) with the
/// coefficient schedules evaluated at the stage times. Throws BlowUp when
/// |H2| exceeds 1e12 before reaching t = 0.
ValueCoefficients solve_model1(const ModelSpec& spec, int n_steps);
ValueCoefficients solve_model2(const ModelSpec& spec, int n_steps);
ValueCoefficients solve_riccati(const ModelSpec& spec, int n_steps);

inline constexpr double kBlowUpThreshold = 1e12;

}  // namespace rexec
