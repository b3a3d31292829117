#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rexec/closed_form.hpp"
#include "rexec/model_config.hpp"

namespace rexec {

enum class StrategyKind { optimal, adapted_twap, hold };

/// Feedback trading rule v(t, x).
struct Strategy {
    StrategyKind kind = StrategyKind::adapted_twap;
    std::shared_ptr<const ValueFunction> value;  ///< set for StrategyKind::optimal

    static Strategy optimal(std::shared_ptr<const ValueFunction> vf);
    static Strategy adapted_twap() { return {StrategyKind::adapted_twap, nullptr}; }
    /// Zero trading rate; used to isolate the market drift.
    static Strategy hold() { return {StrategyKind::hold, nullptr}; }

    std::string name() const;
};

struct SimConfig {
    std::size_t n_paths = 4096;
    int n_steps = 1000;
    std::uint64_t seed = 0;
    bool antithetic = false;
    /// Drive dS with a draw from the posterior instead of its mean.
    bool sample_market_rate = false;
    /// Number of leading paths kept in full in SimEnsemble::stored.
    std::size_t keep_paths = 0;
    /// Worker threads; 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;

    void validate() const;
};

/// Brownian increments of one path on a uniform grid.
struct BrownianIncrements {
    double dt = 0.0;
    std::vector<double> dwx;
    std::vector<double> dws;

    std::size_t n_steps() const noexcept { return dwx.size(); }
    /// Sums consecutive blocks of `factor` increments (same Brownian path, coarser grid).
    BrownianIncrements coarsen(std::size_t factor) const;
};

/// Increments for path `path_index`, reproducible from (seed, path_index) alone.
/// dW^S = rho dW^X + sqrt(1 - rho^2) dW^perp. With `antithetic`, odd paths
/// reuse the draws of their even partner with the sign flipped.
BrownianIncrements draw_increments(std::uint64_t seed, std::size_t path_index, int n_steps, double horizon,
                                   double rho, bool antithetic = false);

struct Decomposition {
    double v_pnl = 0.0;
    double v_risk = 0.0;
    double v_entropy = 0.0;
    double v_total = 0.0;
};

/// One discretized trajectory. t, x, s have n_steps + 1 entries; the
/// per-interval quantities have n_steps.
struct SimPath {
    std::vector<double> t, x, s;
    std::vector<double> v;
    std::vector<double> a_mean;   ///< posterior mean of the market rate
    std::vector<double> a_drive;  ///< rate fed into dS (equals a_mean unless sampled)
    std::vector<double> dwx, dws;
    Decomposition decomposition;
};

/// Euler-Maruyama path driven by the given increments. `market_draws`, when
/// non-empty, holds one standard normal per step used to sample a ~ posterior.
SimPath simulate_path(const ModelSpec& spec, const Strategy& strategy, const BrownianIncrements& incr,
                      std::span<const double> market_draws = {});

/// X_T (S_T - S_0) + sum (S_0 - S~_k) dX_k + g(X_T), with S~ = S + eta v.
double pnl_definition(const SimPath& path, const ModelParams& params);

enum class QuadraticVariation {
    expected,  ///< (sigma^X)^2 T and rho sigma^S sigma^X T
    realized,  ///< sums of squared and cross increments along the stored path
};

/// Price-free rewrite of the P&L plus g(X_T), evaluated on the stored increments.
double pnl_transformed(const SimPath& path, const ModelParams& params,
                       QuadraticVariation qv = QuadraticVariation::expected);

/// V = V_PnL + V_risk + V_entropy with left-endpoint sums along the path.
Decomposition performance_decompose(const SimPath& path, const ModelSpec& spec);

struct Stats {
    double mean = 0.0;
    double variance = 0.0;
    double std_error = 0.0;
    double min = 0.0;
    double max = 0.0;
    double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
};

Stats summarize(std::span<const double> xs);

struct PathSummary {
    Decomposition d;
    double x_T = 0.0;
    double s_T = 0.0;
};

struct SimEnsemble {
    std::string strategy;
    ModelKind model = ModelKind::model1;
    SimConfig config;
    std::vector<PathSummary> paths;
    std::vector<SimPath> stored;
    Stats v_pnl, v_risk, v_entropy, v_total, x_T;
    /// Pooled sample correlation of (dW^X, dW^S) over all paths and steps.
    double increment_correlation = 0.0;

    std::vector<double> column(double Decomposition::*field) const;
};

SimEnsemble simulate_paths(const ModelSpec& spec, const SimConfig& config, const Strategy& strategy);

struct Histogram {
    std::vector<double> edges;  ///< bins + 1 edges
    std::vector<std::size_t> counts_a, counts_b;
};

/// Uniform bins spanning [min, max] of the pooled samples.
Histogram pooled_histogram(std::span<const double> a, std::span<const double> b, int bins = 60);

}  // namespace rexec
