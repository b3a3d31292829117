#include "rexec/game_check.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "rexec/entropy.hpp"
#include "rexec/errors.hpp"

namespace rexec {

namespace {

struct Terms {
    double quad_v;   // coefficient of -v^2
    double coupling; // R_va (a v coupling), 0 in Model 1
    double linear_a; // coefficient of a not involving v
    double r_aa;
};

Terms terms(const HamiltonianContext& ctx) {
    const ModelParams& p = ctx.spec.params;
    if (ctx.spec.kind() == ModelKind::model1) {
        const auto r = ctx.spec.risk1().at(ctx.t);
        return {p.eta, 0.0, (r.r_xa + p.gamma_M) * ctx.x, r.r_aa};
    }
    const auto r = ctx.spec.risk2().at(ctx.t);
    return {p.eta - 0.5 * r.r_vv, r.r_va, p.gamma_M * ctx.x, r.r_aa};
}

struct Optimum {
    double arg = 0.0;
    double value = 0.0;
};

// Minimizes f over the range: grid search, widening while the best point sits
// on the boundary, then golden section between the neighbours of the best point.
Optimum minimize_1d(const std::function<double(double)>& f, RangeSpec range, int& widenings) {
    if (range.points < 3) range.points = 3;
    if (!(range.half_width > 0.0)) range.half_width = 1.0;
    for (int attempt = 0;; ++attempt) {
        const double lo = range.center - range.half_width;
        const double h = 2.0 * range.half_width / (range.points - 1);
        int best = 0;
        double best_val = std::numeric_limits<double>::infinity();
        for (int i = 0; i < range.points; ++i) {
            const double val = f(lo + h * i);
            if (val < best_val) {
                best_val = val;
                best = i;
            }
        }
        if (best == 0 || best == range.points - 1) {
            if (attempt == 5) throw Error(ErrorKind::boundary_hit, "optimizer still on the search boundary after 5 doublings");
            range.half_width *= 2.0;
            ++widenings;
            continue;
        }
        double a = lo + h * (best - 1);
        double b = lo + h * (best + 1);
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = b - invphi * (b - a);
        double d = a + invphi * (b - a);
        double fc = f(c);
        double fd = f(d);
        for (int it = 0; it < 400; ++it) {
            const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
            if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * scale) break;
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - invphi * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + invphi * (b - a);
                fd = f(d);
            }
        }
        Optimum out{fc < fd ? c : d, std::min(fc, fd)};
        if (best_val < out.value) out = {lo + h * best, best_val};
        return out;
    }
}

}  // namespace

double eta_hat(const HamiltonianContext& ctx) { return terms(ctx).quad_v; }

double hamiltonian(const HamiltonianContext& ctx, double v, const GaussianDist& pi) {
    validate(pi);
    const Terms k = terms(ctx);
    const GaussianDist prior = ctx.spec.prior.at(ctx.t);
    const double second_moment = pi.mean * pi.mean + 1.0 / pi.precision;
    return -k.quad_v * v * v + v * ctx.v_x + (k.coupling * v + k.linear_a) * pi.mean + 0.5 * k.r_aa * second_moment
           + kl_gaussian(pi, prior) / ctx.spec.params.beta;
}

SaddleResult saddle_check(const HamiltonianContext& ctx, const SaddleGrids& grids) {
    SaddleResult out;
    const Terms k = terms(ctx);
    if (!(k.quad_v > 0.0)) {
        out.status = SaddleStatus::non_concave;
        return out;
    }
    ctx.spec.params.validate();
    const ModelParams& p = ctx.spec.params;
    const GaussianDist prior = ctx.spec.prior.at(ctx.t);
    validate(prior);

    auto inner_min = [&](double v) {
        return minimize_entropy_functional({k.r_aa, k.coupling * v + k.linear_a}, prior, p.beta).posterior;
    };
    auto inner_max = [&](double mean) { return (ctx.v_x + k.coupling * mean) / (2.0 * k.quad_v); };

    // default search ranges only need to bracket the optimizers loosely
    const double q = prior.precision + p.beta * k.r_aa;
    const double v_guess = (ctx.v_x + k.coupling * (prior.precision * prior.mean - p.beta * k.linear_a) / q)
                           / (2.0 * k.quad_v + p.beta * k.coupling * k.coupling / q);
    const double mean_guess = inner_min(v_guess).mean;
    const RangeSpec v_range = grids.v.value_or(RangeSpec{0.0, 2.0 * std::abs(v_guess) + 1.0});
    const RangeSpec mean_range =
        grids.mean.value_or(RangeSpec{prior.mean, 2.0 * std::abs(mean_guess - prior.mean) + 10.0 * prior.stddev()});
    const RangeSpec logp_range =
        grids.log_precision.value_or(RangeSpec{std::log(prior.precision), 2.0 * std::abs(std::log(q / prior.precision)) + 1.0});

    int widenings = 0;
    const Optimum outer_v = minimize_1d([&](double v) { return -hamiltonian(ctx, v, inner_min(v)); }, v_range, widenings);
    out.argmax_v = outer_v.arg;
    out.maxmin = -outer_v.value;

    // min over (mean, precision) of max over v; the objective separates into a
    // mean part and a precision part, so two coordinate sweeps reach the optimum
    auto psi = [&](double mean, double log_prec) {
        return hamiltonian(ctx, inner_max(mean), {mean, std::exp(log_prec)});
    };
    double mean = prior.mean;
    double log_prec = std::log(prior.precision);
    double best = 0.0;
    for (int sweep = 0; sweep < 2; ++sweep) {
        RangeSpec mr = mean_range;
        if (sweep) mr.center = mean;
        mean = minimize_1d([&](double m) { return psi(m, log_prec); }, mr, widenings).arg;
        RangeSpec pr = logp_range;
        if (sweep) pr.center = log_prec;
        const Optimum o = minimize_1d([&](double u) { return psi(mean, u); }, pr, widenings);
        log_prec = o.arg;
        best = o.value;
    }
    out.minmax = best;
    out.argmin_pi = {mean, std::exp(log_prec)};
    out.gap = std::abs(out.maxmin - out.minmax);
    out.widenings = widenings;
    return out;
}

ReductionCheck inner_min_reduction_check(const HamiltonianContext& ctx, double v, double offset) {
    if (ctx.spec.kind() != ModelKind::model1) throw Error(ErrorKind::config_mismatch, "reduction check is for Model 1");
    const ModelParams& p = ctx.spec.params;
    const GaussianDist prior = ctx.spec.prior.at(ctx.t);
    validate(prior);
    const auto r = ctx.spec.risk1().at(ctx.t);
    const double s = prior.precision;
    const double m = prior.mean;
    const double x = ctx.x;
    const double common = offset + v * ctx.v_x + 0.5 * p.gamma * p.sigma_X * p.sigma_X + p.rho * p.sigma_S * p.sigma_X
                          - p.eta * v * v;

    ReductionCheck out;
    const Model1Coeffs c = derive_model1_coeffs(p, prior, r);
    const double q = s + p.beta * r.r_aa;
    out.direct = common - std::log(c.c) / (2.0 * p.beta) + 0.5 * c.a1 * x * x + c.b1 * x
                 + s * m * m * r.r_aa / (2.0 * q);

    // -(1/beta) log of int prior(a) exp(-beta cost(a)) da, cost = c2 a^2 / 2 + c1 a
    const double c1 = (p.gamma_M + r.r_xa) * x;
    const double c2 = r.r_aa;
    const double shifted = s * m - p.beta * c1;
    const double log_integral = 0.5 * std::log(s / q) - 0.5 * s * m * m + shifted * shifted / (2.0 * q);
    const double risk_x = 0.5 * r.r_xx * x * x;
    out.completed_square = common + risk_x - log_integral / p.beta;

    const GaussianDist tilted{shifted / q, q};
    const GaussianDist dists[] = {prior, tilted};
    const DiscretizedDensity grid = make_grid(dists);
    std::vector<double> logs(grid.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = grid.at(i);
        logs[i] = prior.log_pdf(a) - p.beta * (0.5 * c2 * a * a + c1 * a);
        top = std::max(top, logs[i]);
    }
    double acc = 0.0;
    for (double l : logs) acc += std::exp(l - top);
    const double log_quad = top + std::log(acc * grid.h);
    out.quadrature = common + risk_x - log_quad / p.beta;

    out.discrepancy = std::max({std::abs(out.direct - out.completed_square), std::abs(out.direct - out.quadrature),
                                std::abs(out.completed_square - out.quadrature)});
    return out;
}

}  // namespace rexec
