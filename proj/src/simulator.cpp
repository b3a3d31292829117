#include "rexec/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "rexec/entropy.hpp"
#include "rexec/errors.hpp"

namespace rexec {

Strategy Strategy::optimal(std::shared_ptr<const ValueFunction> vf) {
    if (!vf) throw Error(ErrorKind::config_mismatch, "optimal strategy needs a value function");
    return {StrategyKind::optimal, std::move(vf)};
}

std::string Strategy::name() const {
    switch (kind) {
        case StrategyKind::optimal: return "optimal";
        case StrategyKind::adapted_twap: return "twap";
        case StrategyKind::hold: return "hold";
    }
    return "unknown";
}

void SimConfig::validate() const {
    if (n_paths < 1) throw Error(ErrorKind::config_mismatch, "n_paths must be >= 1");
    if (n_steps < 2) throw Error(ErrorKind::config_mismatch, "n_steps must be >= 2");
}

// ---------------------------------------------------------------- noise

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// substream key from (seed, stream index, purpose)
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
    return std::mt19937_64(splitmix64(splitmix64(seed ^ splitmix64(salt)) + index));
}

constexpr std::uint64_t kBrownianSalt = 1;
constexpr std::uint64_t kMarketSalt = 2;

}  // namespace

BrownianIncrements draw_increments(std::uint64_t seed, std::size_t path_index, int n_steps, double horizon,
                                   double rho, bool antithetic) {
    if (n_steps < 1) throw Error(ErrorKind::invalid_parameter, "n_steps must be >= 1");
    const std::size_t stream = antithetic ? path_index / 2 : path_index;
    const double sign = (antithetic && (path_index % 2)) ? -1.0 : 1.0;
    auto rng = substream(seed, stream, kBrownianSalt);
    std::normal_distribution<double> normal;

    BrownianIncrements out;
    out.dt = horizon / n_steps;
    out.dwx.resize(static_cast<std::size_t>(n_steps));
    out.dws.resize(static_cast<std::size_t>(n_steps));
    const double sq = std::sqrt(out.dt);
    const double perp = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    for (int k = 0; k < n_steps; ++k) {
        const double z1 = sign * normal(rng);
        const double z2 = sign * normal(rng);
        out.dwx[k] = sq * z1;
        out.dws[k] = sq * (rho * z1 + perp * z2);
    }
    return out;
}

BrownianIncrements BrownianIncrements::coarsen(std::size_t factor) const {
    if (factor == 0 || n_steps() % factor) throw Error(ErrorKind::invalid_parameter, "factor must divide n_steps");
    BrownianIncrements out;
    out.dt = dt * static_cast<double>(factor);
    const std::size_t n = n_steps() / factor;
    out.dwx.assign(n, 0.0);
    out.dws.assign(n, 0.0);
    for (std::size_t k = 0; k < n_steps(); ++k) {
        out.dwx[k / factor] += dwx[k];
        out.dws[k / factor] += dws[k];
    }
    return out;
}

// ---------------------------------------------------------------- per-step coefficients

namespace {

// Everything the path recursion needs at t_k that does not depend on the state.
struct StepTable {
    std::vector<double> t;
    std::vector<double> rate_slope, rate_intercept;
    // posterior mean w = w0 + wx x + wv v, precision q
    std::vector<double> w0, wx, wv, q;
};

StepTable build_table(const ModelSpec& spec, const Strategy& strategy, int n_steps) {
    const ModelParams& p = spec.params;
    const double T = p.horizon;
    const double dt = T / n_steps;
    StepTable tab;
    const std::size_t n = static_cast<std::size_t>(n_steps);
    tab.t.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) tab.t[k] = (k == n) ? T : dt * static_cast<double>(k);
    tab.rate_slope.assign(n, 0.0);
    tab.rate_intercept.assign(n, 0.0);
    tab.w0.resize(n);
    tab.wx.resize(n);
    tab.wv.resize(n);
    tab.q.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = tab.t[k];
        switch (strategy.kind) {
            case StrategyKind::optimal: {
                const auto r = strategy.value->rate_coefficients(t);
                tab.rate_slope[k] = r.slope;
                tab.rate_intercept[k] = r.intercept;
                break;
            }
            case StrategyKind::adapted_twap:
                // T - t_k >= dt on the grid; the last step liquidates the remainder
                tab.rate_slope[k] = -1.0 / (dt * static_cast<double>(n - k));
                break;
            case StrategyKind::hold: break;
        }
        const GaussianDist origin = optimal_posterior(spec, t, 0.0, 0.0);
        tab.q[k] = origin.precision;
        tab.w0[k] = origin.mean;
        tab.wx[k] = optimal_posterior(spec, t, 1.0, 0.0).mean - origin.mean;
        tab.wv[k] = optimal_posterior(spec, t, 0.0, 1.0).mean - origin.mean;
    }
    return tab;
}

void check_compatible(const ModelSpec& spec, const Strategy& strategy) {
    if (strategy.kind == StrategyKind::optimal) {
        if (!strategy.value) throw Error(ErrorKind::config_mismatch, "optimal strategy without value function");
        if (strategy.value->spec().kind() != spec.kind()) {
            throw Error(ErrorKind::config_mismatch, "strategy was built for a different model");
        }
        if (strategy.value->horizon() != spec.params.horizon) {
            throw Error(ErrorKind::config_mismatch, "strategy horizon differs from the simulation horizon");
        }
    }
}

void run_path(const ModelSpec& spec, const StepTable& tab, const BrownianIncrements& incr,
              std::span<const double> market_draws, SimPath& path, std::size_t path_index) {
    const ModelParams& p = spec.params;
    const std::size_t n = incr.n_steps();
    path.t = tab.t;
    path.x.resize(n + 1);
    path.s.resize(n + 1);
    path.v.resize(n);
    path.a_mean.resize(n);
    path.a_drive.resize(n);
    path.dwx = incr.dwx;
    path.dws = incr.dws;

    double x = p.x0;
    double s = p.s0;
    path.x[0] = x;
    path.s[0] = s;
    for (std::size_t k = 0; k < n; ++k) {
        const double dt = tab.t[k + 1] - tab.t[k];
        const double v = tab.rate_slope[k] * x + tab.rate_intercept[k];
        const double a = tab.w0[k] + tab.wx[k] * x + tab.wv[k] * v;
        const double drive = market_draws.empty() ? a : a + market_draws[k] / std::sqrt(tab.q[k]);
        const double dx = v * dt + p.sigma_X * incr.dwx[k];
        x += dx;
        s += p.gamma * dx + p.gamma_M * drive * dt + p.sigma_S * incr.dws[k];
        if (!std::isfinite(x) || !std::isfinite(s)) {
            std::ostringstream os;
            os << "path " << path_index << " step " << k << ": X = " << x << ", S = " << s;
            throw Error(ErrorKind::nonfinite_state, os.str());
        }
        path.v[k] = v;
        path.a_mean[k] = a;
        path.a_drive[k] = drive;
        path.x[k + 1] = x;
        path.s[k + 1] = s;
    }
    path.decomposition = performance_decompose(path, spec);
}

std::vector<double> draw_market_normals(std::uint64_t seed, std::size_t path_index, int n_steps) {
    auto rng = substream(seed, path_index, kMarketSalt);
    std::normal_distribution<double> normal;
    std::vector<double> out(static_cast<std::size_t>(n_steps));
    for (double& z : out) z = normal(rng);
    return out;
}

}  // namespace

SimPath simulate_path(const ModelSpec& spec, const Strategy& strategy, const BrownianIncrements& incr,
                      std::span<const double> market_draws) {
    spec.validate();
    check_compatible(spec, strategy);
    const int n_steps = static_cast<int>(incr.n_steps());
    if (n_steps < 1) throw Error(ErrorKind::config_mismatch, "no increments");
    if (std::abs(incr.dt * n_steps - spec.params.horizon) > 1e-9 * spec.params.horizon) {
        throw Error(ErrorKind::config_mismatch, "increments do not span the horizon");
    }
    if (!market_draws.empty() && market_draws.size() != incr.n_steps()) {
        throw Error(ErrorKind::config_mismatch, "market draws must have one entry per step");
    }
    const StepTable tab = build_table(spec, strategy, n_steps);
    SimPath path;
    run_path(spec, tab, incr, market_draws, path, 0);
    return path;
}

// ---------------------------------------------------------------- P&L

double pnl_definition(const SimPath& path, const ModelParams& p) {
    const std::size_t n = path.v.size();
    const double x_T = path.x[n];
    const double s0 = path.s[0];
    double trades = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double traded_price = path.s[k] + p.eta * path.v[k];
        trades += (s0 - traded_price) * (path.x[k + 1] - path.x[k]);
    }
    return x_T * (path.s[n] - s0) + trades - p.delta * x_T * x_T;
}

double pnl_transformed(const SimPath& path, const ModelParams& p, QuadraticVariation qv) {
    const std::size_t n = path.v.size();
    if (path.dwx.size() != n || path.dws.size() != n) {
        throw Error(ErrorKind::increments_missing, "path was stored without its Brownian increments");
    }
    const double x0 = path.x[0];
    const double x_T = path.x[n];
    const double T = path.t[n] - path.t[0];
    double market = 0.0, price_noise = 0.0, temp = 0.0, temp_noise = 0.0, qv_x = 0.0, qv_xs = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dt = path.t[k + 1] - path.t[k];
        market += path.x[k] * path.a_drive[k] * dt;
        price_noise += path.x[k] * path.dws[k];
        temp += path.v[k] * path.v[k] * dt;
        temp_noise += path.v[k] * path.dwx[k];
        qv_x += path.dwx[k] * path.dwx[k];
        qv_xs += path.dwx[k] * path.dws[k];
    }
    if (qv == QuadraticVariation::expected) {
        qv_x = T;
        qv_xs = p.rho * T;
    }
    return 0.5 * p.gamma * (x_T * x_T - x0 * x0) + p.gamma_M * market + p.sigma_S * price_noise
           + 0.5 * p.gamma * p.sigma_X * p.sigma_X * qv_x + p.sigma_S * p.sigma_X * qv_xs - p.eta * temp
           - p.eta * p.sigma_X * temp_noise - p.delta * x_T * x_T;
}

Decomposition performance_decompose(const SimPath& path, const ModelSpec& spec) {
    const ModelParams& p = spec.params;
    const std::size_t n = path.v.size();
    Decomposition d;

    const double x_T = path.x[n];
    double bought = 0.0;
    for (std::size_t k = 0; k < n; ++k) bought += (path.s[k] + p.eta * path.v[k]) * (path.x[k + 1] - path.x[k]);
    d.v_pnl = -p.delta * x_T * x_T + x_T * path.s[n] - path.x[0] * path.s[0] - bought;

    for (std::size_t k = 0; k < n; ++k) {
        const double t = path.t[k];
        const double dt = path.t[k + 1] - t;
        const GaussianDist prior = spec.prior.at(t);
        const double a = path.a_mean[k];
        double r_aa = 0.0;
        double cross = 0.0;
        if (spec.kind() == ModelKind::model1) {
            const auto r = spec.risk1().at(t);
            const double x = path.x[k];
            r_aa = r.r_aa;
            cross = 0.5 * r.r_xx * x * x + r.r_xa * x * a;
        } else {
            const auto r = spec.risk2().at(t);
            const double v = path.v[k];
            r_aa = r.r_aa;
            cross = 0.5 * r.r_vv * v * v + r.r_va * v * a;
        }
        const GaussianDist post{a, prior.precision + p.beta * r_aa};
        d.v_risk += (cross + 0.5 * r_aa * (a * a + 1.0 / post.precision)) * dt;
        d.v_entropy += kl_gaussian(post, prior) / p.beta * dt;
    }
    d.v_total = d.v_pnl + d.v_risk + d.v_entropy;
    return d;
}

// ---------------------------------------------------------------- ensemble

Stats summarize(std::span<const double> xs) {
    Stats st;
    const std::size_t n = xs.size();
    if (n == 0) return st;
    double sum = 0.0;
    for (double x : xs) sum += x;
    st.mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double x : xs) ss += (x - st.mean) * (x - st.mean);
    st.variance = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
    st.std_error = std::sqrt(st.variance / static_cast<double>(n));
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    st.min = sorted.front();
    st.max = sorted.back();
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(n - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, n - 1);
        const double w = pos - static_cast<double>(lo);
        return sorted[lo] * (1.0 - w) + sorted[hi] * w;
    };
    st.q05 = quantile(0.05);
    st.q25 = quantile(0.25);
    st.q50 = quantile(0.50);
    st.q75 = quantile(0.75);
    st.q95 = quantile(0.95);
    return st;
}

std::vector<double> SimEnsemble::column(double Decomposition::*field) const {
    std::vector<double> out;
    out.reserve(paths.size());
    for (const auto& ps : paths) out.push_back(ps.d.*field);
    return out;
}

SimEnsemble simulate_paths(const ModelSpec& spec, const SimConfig& config, const Strategy& strategy) {
    config.validate();
    spec.validate();
    check_compatible(spec, strategy);
    const StepTable tab = build_table(spec, strategy, config.n_steps);
    const ModelParams& p = spec.params;

    SimEnsemble ens;
    ens.strategy = strategy.name();
    ens.model = spec.kind();
    ens.config = config;
    ens.paths.resize(config.n_paths);
    ens.stored.resize(std::min(config.keep_paths, config.n_paths));
    struct CorrSums {
        double xy = 0.0, xx = 0.0, yy = 0.0;
    };
    std::vector<CorrSums> corr(config.n_paths);

    auto work = [&](std::size_t begin, std::size_t end) {
        SimPath buf;
        for (std::size_t i = begin; i < end; ++i) {
            const BrownianIncrements incr =
                draw_increments(config.seed, i, config.n_steps, p.horizon, p.rho, config.antithetic);
            std::vector<double> draws;
            if (config.sample_market_rate) draws = draw_market_normals(config.seed, i, config.n_steps);
            run_path(spec, tab, incr, draws, buf, i);
            const std::size_t n = buf.v.size();
            ens.paths[i] = {buf.decomposition, buf.x[n], buf.s[n]};
            CorrSums& c = corr[i];
            for (std::size_t k = 0; k < n; ++k) {
                c.xy += incr.dwx[k] * incr.dws[k];
                c.xx += incr.dwx[k] * incr.dwx[k];
                c.yy += incr.dws[k] * incr.dws[k];
            }
            if (i < ens.stored.size()) ens.stored[i] = buf;
        }
    };

    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.n_paths));
    if (threads <= 1) {
        work(0, config.n_paths);
    } else {
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        const std::size_t chunk = (config.n_paths + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(config.n_paths, begin + chunk);
            pool.emplace_back([&, w, begin, end] {
                try {
                    work(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    // sequential reduction in path order
    CorrSums total;
    for (const auto& c : corr) {
        total.xy += c.xy;
        total.xx += c.xx;
        total.yy += c.yy;
    }
    ens.increment_correlation = total.xy / std::sqrt(total.xx * total.yy);
    ens.v_pnl = summarize(ens.column(&Decomposition::v_pnl));
    ens.v_risk = summarize(ens.column(&Decomposition::v_risk));
    ens.v_entropy = summarize(ens.column(&Decomposition::v_entropy));
    ens.v_total = summarize(ens.column(&Decomposition::v_total));
    std::vector<double> xt;
    xt.reserve(ens.paths.size());
    for (const auto& ps : ens.paths) xt.push_back(ps.x_T);
    ens.x_T = summarize(xt);
    return ens;
}

Histogram pooled_histogram(std::span<const double> a, std::span<const double> b, int bins) {
    if (bins < 1) throw Error(ErrorKind::invalid_parameter, "bins must be >= 1");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (auto xs : {a, b}) {
        for (double x : xs) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    Histogram h;
    h.counts_a.assign(static_cast<std::size_t>(bins), 0);
    h.counts_b.assign(static_cast<std::size_t>(bins), 0);
    if (!std::isfinite(lo)) {
        h.edges.assign(static_cast<std::size_t>(bins) + 1, 0.0);
        return h;
    }
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / bins;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) h.edges[i] = lo + width * i;
    h.edges.back() = hi;
    auto bin_of = [&](double x) {
        const auto i = static_cast<long>(std::floor((x - lo) / width));
        return static_cast<std::size_t>(std::clamp<long>(i, 0, bins - 1));
    };
    for (double x : a) ++h.counts_a[bin_of(x)];
    for (double x : b) ++h.counts_b[bin_of(x)];
    return h;
}

}  // namespace rexec
