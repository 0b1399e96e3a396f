#include <gtest/gtest.h>

#include <cmath>

#include "jdpinn/error.hpp"
#include "jdpinn/estimation.hpp"
#include "jdpinn/simulate.hpp"

using namespace jdpinn;

namespace {

ReturnSeries series(std::vector<double> r, double years = 1.0) { return {std::move(r), years}; }

}  // namespace

TEST(DetectJumps, NothingAboveThreshold) {
    const auto p = detect_jumps(series({0.01, -0.02}), {0.07});
    EXPECT_TRUE(p.jump_indices.empty());
    EXPECT_EQ(p.diffusion_indices.size(), 2u);
}

TEST(DetectJumps, AbsoluteValueComparedStrictly) {
    const auto p = detect_jumps(series({0.08, -0.09, 0.0, 0.07}), {0.07});
    EXPECT_EQ(p.jump_indices, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(p.diffusion_indices, (std::vector<std::size_t>{2, 3}));
}

TEST(DetectJumps, PartitionIsDisjointAndExhaustiveAndMonotoneInEpsilon) {
    std::vector<double> r;
    for (int i = 0; i < 200; ++i) r.push_back(0.15 * std::sin(0.37 * i) * std::cos(1.3 * i));
    const auto rs = series(r);
    std::size_t previous = r.size() + 1;
    for (double eps : {0.0, 0.01, 0.03, 0.05, 0.07, 0.1, 0.2}) {
        const auto p = detect_jumps(rs, {eps > 0 ? eps : 1e-12});
        EXPECT_EQ(p.jump_indices.size() + p.diffusion_indices.size(), r.size());
        std::vector<bool> seen(r.size(), false);
        for (auto i : p.jump_indices) seen[i] = true;
        for (auto i : p.diffusion_indices) {
            EXPECT_FALSE(seen[i]);
            seen[i] = true;
        }
        EXPECT_LE(p.jump_indices.size(), previous);
        previous = p.jump_indices.size();
    }
}

TEST(EstimateJumpDiffusion, JumpFreeLimit) {
    const auto e = estimate_jump_diffusion(series({0.01, -0.01, 0.02, 0.0}, 4.0 / 365.0), {0.07});
    EXPECT_EQ(e.lambda, 0.0);
    EXPECT_EQ(e.k, 0.0);
    EXPECT_EQ(e.jump_count, 0u);
    EXPECT_FALSE(e.mu_j.has_value());
    EXPECT_FALSE(e.delta_j.has_value());
}

TEST(EstimateJumpDiffusion, FullSampleMomentsAndJumpMoments) {
    const std::vector<double> r{0.01, -0.02, 0.10, 0.03, -0.12, 0.0};
    const auto e = estimate_jump_diffusion(series(r, 2.0), {0.07});
    const double mean = (0.01 - 0.02 + 0.10 + 0.03 - 0.12 + 0.0) / 6.0;
    double ss = 0;
    for (double x : r) ss += (x - mean) * (x - mean);
    EXPECT_NEAR(e.mu_d, mean, 1e-15);
    EXPECT_NEAR(e.sigma_d, std::sqrt(ss / 5.0), 1e-15);
    EXPECT_EQ(e.jump_count, 2u);
    EXPECT_DOUBLE_EQ(e.lambda, 1.0);
    ASSERT_TRUE(e.mu_j && e.delta_j);
    EXPECT_NEAR(*e.mu_j, -0.01, 1e-15);
    EXPECT_NEAR(*e.delta_j, std::sqrt(2 * 0.11 * 0.11), 1e-15);
    EXPECT_NEAR(e.k, std::exp(*e.mu_j + 0.5 * *e.delta_j * *e.delta_j) - 1.0, 1e-15);
}

TEST(EstimateJumpDiffusion, ExpectedRelativeJumpVanishesForDegenerateJumps) {
    EXPECT_EQ(expected_relative_jump(0.0, 0.0), 0.0);
}

TEST(EstimateJumpDiffusion, LambdaTimesYearsIsJumpCountExactly) {
    for (double years : {0.3, 1.0, 5.0, 4.999, 1.0 / 365.0 * 1825.0}) {
        std::vector<double> r;
        for (int i = 0; i < 1000; ++i) r.push_back((i % 7 == 0) ? 0.09 : 0.001 * (i % 5));
        const auto e = estimate_jump_diffusion(series(r, years), {0.07});
        EXPECT_EQ(e.lambda, static_cast<double>(e.jump_count) / years);
    }
}

TEST(EstimateJumpDiffusion, ThresholdTooSmallIsAnError) {
    try {
        estimate_jump_diffusion(series({0.1, -0.2, 0.3}), {0.01});
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("threshold too small"), std::string::npos);
    }
}

TEST(EstimateJumpDiffusion, ScaleInvariantThroughReturns) {
    // Multiplying prices by c leaves log-returns and hence every estimate unchanged.
    const std::vector<double> closes{100, 104, 95, 110, 111, 99};
    std::vector<double> a, b;
    for (std::size_t i = 1; i < closes.size(); ++i) {
        a.push_back(std::log(closes[i] / closes[i - 1]));
        b.push_back(std::log((7.5 * closes[i]) / (7.5 * closes[i - 1])));
    }
    const auto ea = estimate_jump_diffusion(series(a), {0.07});
    const auto eb = estimate_jump_diffusion(series(b), {0.07});
    EXPECT_NEAR(ea.mu_d, eb.mu_d, 1e-15);
    EXPECT_NEAR(ea.sigma_d, eb.sigma_d, 1e-15);
    EXPECT_EQ(ea.jump_count, eb.jump_count);
}

TEST(EstimateSentiment, ConstantTrendGivesZeros) {
    const auto s = estimate_sentiment(series({0.0, 0.0, 0.0}));
    EXPECT_EQ(s.mu_p, 0.0);
    EXPECT_EQ(s.sigma_p, 0.0);
}

TEST(EstimateSentiment, NeedsTwoReturns) { EXPECT_THROW(estimate_sentiment(series({0.1})), DataError); }

TEST(EstimateSentiment, RecoversSimulatedGbmWithinThreeStandardErrors) {
    // Exact lognormal path with 1e4 unit steps: log increments are
    // N(mu - sigma^2/2, sigma^2), so the sample mean estimates mu - sigma^2/2
    // with standard error sigma / sqrt(n) and the sample sd estimates sigma
    // with standard error ~ sigma / sqrt(2 n).
    const double mu = 0.002, sigma = 0.05;
    const int n = 10000;
    PathConfig cfg;
    cfg.n_steps = n;
    cfg.horizon = n;
    cfg.seed = 2024;
    const auto path = simulate_sentiment({mu, sigma}, 1.0, cfg);
    std::vector<double> r;
    for (int i = 1; i <= n; ++i) r.push_back(std::log(path.p_values[i] / path.p_values[i - 1]));
    const auto est = estimate_sentiment(series(r));
    EXPECT_NEAR(est.mu_p, mu - 0.5 * sigma * sigma, 3.0 * sigma / std::sqrt(n));
    EXPECT_NEAR(est.sigma_p, sigma, 3.0 * sigma / std::sqrt(2.0 * n));
}
