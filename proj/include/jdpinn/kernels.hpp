#pragma once

// Data-parallel hot loops. Each kernel has a plain serial reference version
// and an OpenMP version that splits the work into fixed-size blocks and
// combines the block results in index order, so the parallel result is the
// same for every thread count.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "jdpinn/model.hpp"
#include "jdpinn/neural.hpp"
#include "jdpinn/pinn.hpp"
#include "jdpinn/simulate.hpp"

namespace jdpinn::kernels {

/// Sets the OpenMP team size for subsequent parallel kernels (n < 1 means 1).
void set_threads(int n);
/// Whether the library was built with OpenMP.
bool openmp_enabled();

// ---------------------------------------------------------------------------
// Feynman-Kac Monte Carlo

/// Per-step coefficients of the pricing diffusion, precomputed once per run.
/// Step i covers calendar time [t_i, t_{i+1}].
struct FkPlan {
    double spot = 0.0;
    double t_start = 0.0;
    double dt = 0.0;
    int n_steps = 0;
    double strike_ratio = 0.0;
    double rebate = 0.0;  // boundary value paid on absorption at S = 1
    double rate = 0.0;
    std::vector<double> log_drift;  // int (eta - sigma*^2 / 2) over step i
    std::vector<double> variance;   // int sigma*^2 over step i
    std::vector<double> discount;   // exp(-r (t_i - t_start)), n_steps + 1 entries
    std::vector<double> source;     // discount_i * (-beta(t_i, S) / S), n_steps + 1 entries
};

FkPlan make_fk_plan(const PdeProblem& pde, double spot_normalized, double t_start, int n_steps);

/// Discounted payoff plus running source of one path (or the mean of an
/// antithetic pair when cfg.antithetic is set). `index` selects the RNG stream.
double fk_sample(const FkPlan& plan, std::uint64_t seed, std::uint64_t index, bool antithetic);

/// Number of independent samples a run uses: n_paths, or n_paths / 2 pairs.
std::size_t fk_sample_count(const FeynmanKacConfig& cfg);

/// Plain loop with a running mean/variance update.
McEstimate mc_price_serial(const FkPlan& plan, const FeynmanKacConfig& cfg);

/// OpenMP over blocks of kMcBlock samples; block statistics merged in order.
inline constexpr std::size_t kMcBlock = 1024;
McEstimate mc_price_blocked(const FkPlan& plan, const FeynmanKacConfig& cfg);

// ---------------------------------------------------------------------------
// PINN loss and gradient

struct LossSums {
    double sum_sq = 0.0;
    double sum_abs = 0.0;
    std::size_t count = 0;
};

struct ResidualContext {
    const NetworkArchitecture* arch = nullptr;
    const PdeProblem* pde = nullptr;
    double strike_ratio = 0.5;
    double scale = 1.0;  // factor in front of the time derivative
};

/// Residual sums only (no gradient).
LossSums loss_sums(const ResidualContext& ctx, std::span<const double> params,
                   std::span<const CollocationPoint> points);

/// Accumulates d(0.5 sum R^2)/d(theta) into grad (zeroed first), one point after another.
LossSums loss_gradient_serial(const ResidualContext& ctx, std::span<const double> params,
                              std::span<const CollocationPoint> points, std::span<double> grad);

/// Same quantity computed over contiguous blocks in parallel (at least
/// kLossBlock points each, at most 64 blocks), with per-block gradient
/// buffers added in block order. Thread count comes from set_threads().
inline constexpr std::size_t kLossBlock = 16;
LossSums loss_gradient_blocked(const ResidualContext& ctx, std::span<const double> params,
                               std::span<const CollocationPoint> points, std::span<double> grad);

}  // namespace jdpinn::kernels
