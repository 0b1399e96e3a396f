// Serial reference kernels against their blocked OpenMP counterparts.
// Run with --benchmark_filter=... and vary the thread argument to see scaling.

#include <benchmark/benchmark.h>

#include "jdpinn/kernels.hpp"
#include "jdpinn/model.hpp"

using namespace jdpinn;

namespace {

MarketModel reference_model() {
    MarketModel m;
    m.jd.mu_d = -0.00241;
    m.jd.sigma_d = 0.04132;
    m.jd.lambda = 31.8;
    m.jd.k = -0.002195;
    m.sp = {0.01033, 0.20934};
    m.phi0 = 0.01;
    m.rate = 0.04;
    m.strike = 30000.0;
    m.s_max = 63577.0;
    m.maturity = 5.0;
    return m;
}

const PdeProblem& pde() {
    static const PdeProblem p = build_pde(reference_model(), SentimentPathPolicy::mean_path);
    return p;
}

void BM_McSerial(benchmark::State& state) {
    const auto plan = kernels::make_fk_plan(pde(), 0.5, 0.0, 250);
    FeynmanKacConfig cfg;
    cfg.n_paths = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::mc_price_serial(plan, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_McBlocked(benchmark::State& state) {
    const auto plan = kernels::make_fk_plan(pde(), 0.5, 0.0, 250);
    FeynmanKacConfig cfg;
    cfg.n_paths = static_cast<std::size_t>(state.range(0));
    cfg.threads = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::mc_price_blocked(plan, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

struct LossSetup {
    NetworkArchitecture arch;
    NetworkParams params;
    std::vector<CollocationPoint> points;
    std::vector<double> grad;
    kernels::ResidualContext ctx;

    explicit LossSetup(int n) {
        params = init_params(arch, 42);
        points = select(make_grid(n, n), Split::full);
        grad.resize(arch.param_count());
        ctx = {&arch, &pde(), pde().strike_ratio, 1.0 / pde().maturity};
    }
};

void BM_LossGradientSerial(benchmark::State& state) {
    LossSetup s(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::loss_gradient_serial(s.ctx, s.params.values, s.points, s.grad));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.points.size()));
}

void BM_LossGradientBlocked(benchmark::State& state) {
    LossSetup s(static_cast<int>(state.range(0)));
    kernels::set_threads(static_cast<int>(state.range(1)));
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::loss_gradient_blocked(s.ctx, s.params.values, s.points, s.grad));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.points.size()));
    kernels::set_threads(1);
}

}  // namespace

BENCHMARK(BM_McSerial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McBlocked)->ArgsProduct({{20000}, {1, 2, 4, 8}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_LossGradientSerial)->Arg(10)->Arg(40)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LossGradientBlocked)
    ->ArgsProduct({{10, 40}, {1, 2, 4, 8}})
    ->Unit(benchmark::kMicrosecond)
    ->UseRealTime();

BENCHMARK_MAIN();
