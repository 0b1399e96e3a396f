#include "jdpinn/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "jdpinn/error.hpp"
#include "jdpinn/kernels.hpp"
#include "jdpinn/rng.hpp"

namespace jdpinn {

namespace {

// Sub-seed labels; keeps the P and S draws of a path on disjoint streams.
constexpr std::uint64_t kSentimentStream = 0x5e47;
constexpr std::uint64_t kPriceStream = 0x9a1c;
constexpr std::uint64_t kJumpStream = 0x1b2d;

std::vector<double> sentiment_values(const SentimentEstimate& sp, double phi0, const PathConfig& cfg,
                                     std::uint64_t path_index) {
    PhiloxStream rng(derive_seed(cfg.seed, kSentimentStream), path_index);
    const double dt = cfg.horizon / cfg.n_steps;
    const double sq = std::sqrt(dt);
    std::vector<double> p(cfg.n_steps + 1);
    p[0] = phi0;
    if (cfg.scheme == Scheme::exact) {
        // Cumulative Brownian motion keeps the closed form exact at every node.
        double z = 0.0;
        for (int i = 1; i <= cfg.n_steps; ++i) {
            z += sq * rng.normal();
            const double t = i * dt;
            p[i] = phi0 * std::exp((sp.mu_p - 0.5 * sp.sigma_p * sp.sigma_p) * t + sp.sigma_p * z);
        }
    } else {
        for (int i = 1; i <= cfg.n_steps; ++i) {
            p[i] = p[i - 1] * (1.0 + sp.mu_p * dt + sp.sigma_p * sq * rng.normal());
            if (!(p[i] > 0.0))
                throw NumericalError("Euler sentiment path lost positivity at t=" + std::to_string(i * dt) +
                                     "; use the exact scheme or more steps");
        }
    }
    return p;
}

}  // namespace

Scheme parse_scheme(const std::string& text) {
    if (text == "euler") return Scheme::euler;
    if (text == "exact") return Scheme::exact;
    throw UsageError("unknown scheme '" + text + "' (expected euler or exact)");
}

SamplePath simulate_sentiment(const SentimentEstimate& sp, double phi0, const PathConfig& cfg,
                              std::uint64_t path_index) {
    if (cfg.n_steps < 1) throw UsageError("n_steps must be at least 1");
    if (!(phi0 > 0.0)) throw UsageError("phi0 must be positive");
    SamplePath path;
    path.p_values = sentiment_values(sp, phi0, cfg, path_index);
    path.times.resize(cfg.n_steps + 1);
    for (int i = 0; i <= cfg.n_steps; ++i) path.times[i] = cfg.horizon * i / cfg.n_steps;
    return path;
}

SamplePath simulate_jump_diffusion(const MarketModel& model, double s0, const PathConfig& cfg,
                                   std::uint64_t path_index) {
    if (cfg.n_steps < 1) throw UsageError("n_steps must be at least 1");
    if (!(s0 > 0.0)) throw UsageError("initial price must be positive");
    if (!(model.phi0 > 0.0)) throw DataError("phi0 must be positive");

    const double mu_j = model.jd.mu_j.value_or(0.0);
    const double delta_j = model.jd.delta_j.value_or(0.0);
    const double lambda = model.jd.lambda;
    const double sigma = model.jd.sigma_d;
    const double drift = model.jump_compensated_drift();
    const int n = cfg.n_steps;
    const double dt = cfg.horizon / n;
    const double sq = std::sqrt(dt);

    SamplePath path;
    path.p_values = sentiment_values(model.sp, model.phi0, cfg, path_index);
    path.times.resize(n + 1);
    for (int i = 0; i <= n; ++i) path.times[i] = cfg.horizon * i / n;

    auto delayed_level = [&](double t) {
        const double lag = t - model.tau;
        if (lag <= 0.0) return model.phi0;
        const auto idx = std::min<long>(n, static_cast<long>(std::floor(lag / dt + 1e-9)));
        return path.p_values[idx];
    };

    PhiloxStream diffusion(derive_seed(cfg.seed, kPriceStream), path_index);
    PhiloxStream jumps(derive_seed(cfg.seed, kJumpStream), path_index);

    auto apply_jump = [&](double& s, double t, double level) {
        const double y = std::exp(mu_j + delta_j * jumps.normal());
        const double mult = 1.0 + level * (y - 1.0);
        if (!(mult > 0.0))
            throw NumericalError("jump at t=" + std::to_string(t) + " would make the price non-positive");
        s *= mult;
        path.jump_times.push_back(t);
    };

    path.s_values.resize(n + 1);
    double s = s0;
    path.s_values[0] = s;

    double next_jump = lambda > 0.0 ? jumps.exponential(lambda) : INFINITY;
    for (int i = 0; i < n; ++i) {
        const double t0 = path.times[i];
        const double t1 = path.times[i + 1];
        const double level = delayed_level(t0);
        const double z = diffusion.normal();
        if (cfg.scheme == Scheme::exact) {
            s *= std::exp((drift - 0.5 * sigma * sigma) * level * dt + sigma * std::sqrt(level) * sq * z);
            while (next_jump <= t1) {
                apply_jump(s, next_jump, delayed_level(next_jump));
                next_jump += jumps.exponential(lambda);
            }
        } else {
            s *= 1.0 + drift * level * dt + sigma * std::sqrt(level) * sq * z;
            if (!(s > 0.0))
                throw NumericalError("Euler price path lost positivity at t=" + std::to_string(t1));
            if (lambda > 0.0 && jumps.uniform() < lambda * dt) apply_jump(s, t1, level);
        }
        path.s_values[i + 1] = s;
    }
    return path;
}

McEstimate feynman_kac_price(const PdeProblem& pde, double spot_normalized, double t_start,
                             const FeynmanKacConfig& cfg) {
    if (cfg.n_paths < 100) throw UsageError("insufficient paths: at least 100 required");
    const auto plan = kernels::make_fk_plan(pde, spot_normalized, t_start, cfg.n_steps);
    return kernels::mc_price_blocked(plan, cfg);
}

double closed_form_bs(double spot, double strike, double rate, double sigma, double tenor) {
    if (tenor <= 0.0) return std::max(spot - strike, 0.0);
    const double df = std::exp(-rate * tenor);
    const double vol = sigma * std::sqrt(tenor);
    if (vol <= 0.0) return std::max(spot - strike * df, 0.0);
    if (spot <= 0.0) return 0.0;
    const double d1 = (std::log(spot / strike) + rate * tenor) / vol + 0.5 * vol;
    const double d2 = d1 - vol;
    return spot * normal_cdf(d1) - strike * df * normal_cdf(d2);
}

double closed_form_unbounded(const PdeProblem& pde, double t_calendar, double s) {
    const double tenor = pde.maturity - t_calendar;
    const double level_int = pde.curve.integral(t_calendar, pde.maturity);
    const double excess = pde.drift_m * level_int;  // int (eta - r)
    const double variance = pde.sigma_sq * level_int;
    const double df = std::exp(-pde.rate * tenor);
    const double forward = s * std::exp(pde.rate * tenor + excess);
    const double k = pde.strike_ratio;
    double call;
    if (variance <= 0.0 || s <= 0.0) {
        call = df * std::max(forward - k, 0.0);
    } else {
        const double vol = std::sqrt(variance);
        const double d1 = std::log(forward / k) / vol + 0.5 * vol;
        call = df * (forward * normal_cdf(d1) - k * normal_cdf(d1 - vol));
    }
    return call + s * std::expm1(excess);
}

void write_path_csv(const SamplePath& path, const std::filesystem::path& out) {
    std::ofstream os(out);
    if (!os) throw DataError("cannot write '" + out.string() + "'");
    os << "t,s,p\n";
    char buf[96];
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        const double s = path.s_values.empty() ? NAN : path.s_values[i];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", path.times[i], s, path.p_values[i]);
        os << buf;
    }
}

}  // namespace jdpinn
