#pragma once

#include <optional>

#include "rexec/model_config.hpp"

namespace rexec {

/// Point at which the Hamiltonian is examined. `v_x` stands in for the
/// value gradient so the check does not depend on any solver output.
struct HamiltonianContext {
    ModelSpec spec;
    double t = 0.0;
    double x = 0.0;
    double v_x = 0.0;
};

/// Concavity coefficient of the Hamiltonian in v: eta (Model 1) or eta - R_vv / 2 (Model 2).
double eta_hat(const HamiltonianContext& ctx);

/// Model 1: -eta v^2 + v V_x + E_pi[(R_xa + gamma_M) x a + R_aa a^2 / 2] + KL(pi || prior) / beta.
/// Model 2: -eta_hat v^2 + v V_x + E_pi[R_va v a + gamma_M x a + R_aa a^2 / 2] + KL / beta.
/// Terms not involving v or pi are dropped.
double hamiltonian(const HamiltonianContext& ctx, double v, const GaussianDist& pi);

/// Search interval [center - half_width, center + half_width] sampled at `points`.
struct RangeSpec {
    double center = 0.0;
    double half_width = 1.0;
    int points = 201;
};

struct SaddleGrids {
    std::optional<RangeSpec> v;
    std::optional<RangeSpec> mean;
    std::optional<RangeSpec> log_precision;  ///< searched in ln(precision)
};

enum class SaddleStatus { ok, non_concave };

struct SaddleResult {
    SaddleStatus status = SaddleStatus::ok;
    double maxmin = 0.0;
    double minmax = 0.0;
    double gap = 0.0;
    double argmax_v = 0.0;      ///< outer maximizer of max_v min_pi
    GaussianDist argmin_pi;     ///< outer minimizer of min_pi max_v
    int widenings = 0;
};

/// max_v min_pi and min_pi max_v of the Hamiltonian. Inner steps are closed
/// form; outer steps are a grid search refined by golden section. A search
/// whose best grid point sits on the boundary is widened (doubling the half
/// width) up to five times before BoundaryHit. Returns status non_concave when
/// eta_hat <= 0, since the inner max over v is then unbounded.
SaddleResult saddle_check(const HamiltonianContext& ctx, const SaddleGrids& grids = {});

struct ReductionCheck {
    double direct = 0.0;          ///< closed-form inner minimum
    double completed_square = 0.0;
    double quadrature = 0.0;
    double discrepancy = 0.0;     ///< largest pairwise difference
};

/// Model 1 inner minimum over pi of offset + Hamiltonian(v, pi), evaluated
/// three ways: the expanded closed form in (A1, B1, c), the -(1/beta) log of
/// the Gaussian integral by completing the square, and log-sum-exp quadrature.
ReductionCheck inner_min_reduction_check(const HamiltonianContext& ctx, double v, double offset);

}  // namespace rexec
