#include "jdpinn/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "jdpinn/error.hpp"
#include "jdpinn/rng.hpp"

namespace jdpinn::kernels {

namespace {

constexpr std::uint64_t kNormalStream = 0xfc01;
constexpr std::uint64_t kBridgeStreamA = 0xfc02;
constexpr std::uint64_t kBridgeStreamB = 0xfc03;

/// Running count / mean / sum of squared deviations (Welford, merged with Chan et al.).
struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        const double total = na + nb;
        mean += d * nb / total;
        m2 += o.m2 + d * d * na * nb / total;
        n += o.n;
    }
};

McEstimate finish(const Moments& m, const FkPlan& plan, const FeynmanKacConfig& cfg) {
    McEstimate est;
    est.value = m.mean;
    est.std_error = m.n > 1 ? std::sqrt(m.m2 / static_cast<double>(m.n - 1) / static_cast<double>(m.n)) : 0.0;
    est.n_paths = cfg.antithetic ? 2 * m.n : m.n;
    (void)plan;
    return est;
}

/// Closed-form answers that need no simulation; returns true when one applies.
bool trivial_case(const FkPlan& plan, const FeynmanKacConfig& cfg, McEstimate& out) {
    if (plan.spot >= 1.0) {
        out = {plan.rebate, 0.0, cfg.n_paths};
        return true;
    }
    if (plan.spot <= 0.0) {
        out = {0.0, 0.0, cfg.n_paths};
        return true;
    }
    if (plan.n_steps == 0) {
        out = {std::max(plan.spot - plan.strike_ratio, 0.0), 0.0, cfg.n_paths};
        return true;
    }
    return false;
}

double simulate_leg(const FkPlan& plan, PhiloxStream& normals, PhiloxStream& bridge, double sign) {
    double x = std::log(plan.spot);
    double s = plan.spot;
    double acc = 0.0;
    const double half_dt = 0.5 * plan.dt;
    for (int i = 0; i < plan.n_steps; ++i) {
        const double var = plan.variance[i];
        const double xn = x + plan.log_drift[i] + std::sqrt(var) * sign * normals.normal();
        double frac = -1.0;
        if (xn >= 0.0) {
            frac = x / (x - xn);  // log-linear crossing time within the step
        } else if (var > 0.0 && bridge.uniform() < std::exp(-2.0 * x * xn / var)) {
            frac = 0.5;  // crossed and came back between grid times
        }
        if (frac >= 0.0) {
            const double g_hit = plan.source[i] + frac * (plan.source[i + 1] - plan.source[i]);
            acc += frac * half_dt * (plan.source[i] * s + g_hit);
            return acc + plan.rebate * plan.discount[i] * std::exp(-plan.rate * frac * plan.dt);
        }
        const double sn = std::exp(xn);
        acc += half_dt * (plan.source[i] * s + plan.source[i + 1] * sn);
        x = xn;
        s = sn;
    }
    return acc + plan.discount[plan.n_steps] * std::max(s - plan.strike_ratio, 0.0);
}

}  // namespace

void set_threads(int n) {
#ifdef _OPENMP
    omp_set_num_threads(std::max(1, n));
#else
    (void)n;
#endif
}

bool openmp_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

FkPlan make_fk_plan(const PdeProblem& pde, double spot_normalized, double t_start, int n_steps) {
    if (n_steps < 1) throw UsageError("n_steps must be at least 1");
    if (!(t_start >= 0.0 && t_start <= pde.maturity))
        throw UsageError("start time must lie in [0, maturity]");
    if (!(spot_normalized >= 0.0)) throw UsageError("spot must be non-negative");

    FkPlan plan;
    plan.spot = spot_normalized;
    plan.t_start = t_start;
    plan.strike_ratio = pde.strike_ratio;
    plan.rebate = pde.upper_boundary();
    plan.rate = pde.rate;
    const double horizon = pde.maturity - t_start;
    if (horizon <= 0.0) {
        plan.n_steps = 0;
        plan.discount = {1.0};
        plan.source = {0.0};
        return plan;
    }
    plan.n_steps = n_steps;
    plan.dt = horizon / n_steps;
    plan.log_drift.resize(n_steps);
    plan.variance.resize(n_steps);
    plan.discount.resize(n_steps + 1);
    plan.source.resize(n_steps + 1);
    auto node = [&](int i) { return i == n_steps ? pde.maturity : t_start + i * plan.dt; };
    for (int i = 0; i <= n_steps; ++i) {
        const double t = node(i);
        plan.discount[i] = std::exp(-pde.rate * (t - t_start));
        // -beta(t, S) = m S P(t): per unit of S.
        plan.source[i] = plan.discount[i] * pde.drift_m * pde.curve.level(t);
        if (i < n_steps) {
            const double level_int = pde.curve.integral(t, node(i + 1));
            plan.variance[i] = pde.sigma_sq * level_int;
            plan.log_drift[i] = pde.rate * (node(i + 1) - t) + pde.drift_m * level_int - 0.5 * plan.variance[i];
        }
    }
    return plan;
}

double fk_sample(const FkPlan& plan, std::uint64_t seed, std::uint64_t index, bool antithetic) {
    const std::uint64_t normal_seed = derive_seed(seed, kNormalStream);
    PhiloxStream normals(normal_seed, index);
    PhiloxStream bridge_a(derive_seed(seed, kBridgeStreamA), index);
    const double a = simulate_leg(plan, normals, bridge_a, 1.0);
    if (!antithetic) return a;
    PhiloxStream normals_b(normal_seed, index);
    PhiloxStream bridge_b(derive_seed(seed, kBridgeStreamB), index);
    const double b = simulate_leg(plan, normals_b, bridge_b, -1.0);
    return 0.5 * (a + b);
}

std::size_t fk_sample_count(const FeynmanKacConfig& cfg) { return cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths; }

McEstimate mc_price_serial(const FkPlan& plan, const FeynmanKacConfig& cfg) {
    McEstimate est;
    if (trivial_case(plan, cfg, est)) return est;
    Moments m;
    const std::size_t n = fk_sample_count(cfg);
    for (std::size_t i = 0; i < n; ++i) m.add(fk_sample(plan, cfg.seed, i, cfg.antithetic));
    return finish(m, plan, cfg);
}

McEstimate mc_price_blocked(const FkPlan& plan, const FeynmanKacConfig& cfg) {
    McEstimate est;
    if (trivial_case(plan, cfg, est)) return est;
    const std::size_t n = fk_sample_count(cfg);
    const std::size_t n_blocks = (n + kMcBlock - 1) / kMcBlock;
    std::vector<Moments> blocks(n_blocks);
    const auto nb = static_cast<std::ptrdiff_t>(n_blocks);

#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, cfg.threads))
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kMcBlock;
        const std::size_t hi = std::min(n, lo + kMcBlock);
        Moments local;
        for (std::size_t i = lo; i < hi; ++i) local.add(fk_sample(plan, cfg.seed, i, cfg.antithetic));
        blocks[b] = local;
    }

    Moments total;
    for (const auto& b : blocks) total.merge(b);
    return finish(total, plan, cfg);
}

// ---------------------------------------------------------------------------

namespace {

inline double point_gradient(const ResidualContext& ctx, std::span<const double> params, const CollocationPoint& p,
                             Workspace& ws, std::span<double> grad) {
    const auto net = forward(*ctx.arch, params, p.t, p.s, ws);
    const auto terms = residual_terms(*ctx.pde, ctx.strike_ratio, ctx.scale, p.t, p.s, net);
    const double r = terms.r;
    const Upstream up{r * terms.d_network.n, r * terms.d_network.dn_dt, r * terms.d_network.dn_ds,
                      r * terms.d_network.d2n_ds2};
    backward(*ctx.arch, params, up, ws, grad);
    return r;
}

std::size_t loss_block_size(std::size_t n_points) {
    // At most 64 blocks keeps the per-block gradient buffers small on big grids;
    // the size depends only on the number of points, never on the thread count.
    constexpr std::size_t max_blocks = 64;
    return std::max(kLossBlock, (n_points + max_blocks - 1) / max_blocks);
}

}  // namespace

LossSums loss_sums(const ResidualContext& ctx, std::span<const double> params,
                   std::span<const CollocationPoint> points) {
    Workspace ws(*ctx.arch);
    LossSums sums;
    for (const auto& p : points) {
        const auto net = forward(*ctx.arch, params, p.t, p.s, ws);
        const double r = residual_terms(*ctx.pde, ctx.strike_ratio, ctx.scale, p.t, p.s, net).r;
        sums.sum_sq += r * r;
        sums.sum_abs += std::abs(r);
        ++sums.count;
    }
    return sums;
}

LossSums loss_gradient_serial(const ResidualContext& ctx, std::span<const double> params,
                              std::span<const CollocationPoint> points, std::span<double> grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
    Workspace ws(*ctx.arch);
    LossSums sums;
    for (const auto& p : points) {
        const double r = point_gradient(ctx, params, p, ws, grad);
        sums.sum_sq += r * r;
        sums.sum_abs += std::abs(r);
        ++sums.count;
    }
    return sums;
}

LossSums loss_gradient_blocked(const ResidualContext& ctx, std::span<const double> params,
                               std::span<const CollocationPoint> points, std::span<double> grad) {
    const std::size_t n = points.size();
    const std::size_t block = loss_block_size(n);
    const std::size_t n_blocks = (n + block - 1) / block;
    const std::size_t n_params = grad.size();
    std::vector<double> buffers(n_blocks * n_params, 0.0);
    std::vector<LossSums> sums(n_blocks);
    const auto nb = static_cast<std::ptrdiff_t>(n_blocks);

#pragma omp parallel
    {
        Workspace ws(*ctx.arch);
#pragma omp for schedule(static)
        for (std::ptrdiff_t b = 0; b < nb; ++b) {
            const std::size_t lo = static_cast<std::size_t>(b) * block;
            const std::size_t hi = std::min(n, lo + block);
            std::span<double> g(buffers.data() + static_cast<std::size_t>(b) * n_params, n_params);
            LossSums local;
            for (std::size_t i = lo; i < hi; ++i) {
                const double r = point_gradient(ctx, params, points[i], ws, g);
                local.sum_sq += r * r;
                local.sum_abs += std::abs(r);
                ++local.count;
            }
            sums[b] = local;
        }
    }

    std::fill(grad.begin(), grad.end(), 0.0);
    LossSums total;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const double* g = buffers.data() + b * n_params;
        for (std::size_t k = 0; k < n_params; ++k) grad[k] += g[k];
        total.sum_sq += sums[b].sum_sq;
        total.sum_abs += sums[b].sum_abs;
        total.count += sums[b].count;
    }
    return total;
}

}  // namespace jdpinn::kernels
