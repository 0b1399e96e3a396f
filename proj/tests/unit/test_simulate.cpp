#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "jdpinn/error.hpp"
#include "jdpinn/simulate.hpp"
#include "oracles.hpp"

using namespace jdpinn;
namespace fs = std::filesystem;

namespace {

MarketModel diffusion_only(double mu_d, double sigma_d) {
    MarketModel m;
    m.jd.mu_d = mu_d;
    m.jd.sigma_d = sigma_d;
    m.sp = {0.0, 0.0};
    m.phi0 = 1.0;
    m.rate = 0.0;
    m.strike = 1.0;
    m.s_max = 2.0;
    m.maturity = 1.0;
    return m;
}

}  // namespace

TEST(SimulateSentiment, StartsAtPhi0AndHasGridTimes) {
    PathConfig cfg;
    cfg.n_steps = 10;
    cfg.horizon = 2.0;
    const auto p = simulate_sentiment({0.1, 0.2}, 0.01, cfg);
    ASSERT_EQ(p.p_values.size(), 11u);
    EXPECT_EQ(p.p_values[0], 0.01);
    EXPECT_NEAR(p.times.back(), 2.0, 1e-15);
    EXPECT_TRUE(p.s_values.empty());
}

TEST(SimulateSentiment, ZeroVolatilityIsDeterministicExponential) {
    PathConfig cfg;
    cfg.n_steps = 50;
    cfg.horizon = 3.0;
    const auto p = simulate_sentiment({0.2, 0.0}, 0.5, cfg);
    for (std::size_t i = 0; i < p.times.size(); ++i)
        EXPECT_NEAR(p.p_values[i], 0.5 * std::exp(0.2 * p.times[i]), 1e-14);
}

TEST(SimulateSentiment, TerminalMeanMatchesLognormalMean) {
    // E[P_T] = phi0 exp(mu_p T); the standard error comes from the lognormal variance.
    const double mu = 0.1, sigma = 0.3, horizon = 1.0, phi0 = 1.0;
    PathConfig cfg;
    cfg.n_steps = 4;
    cfg.horizon = horizon;
    const int n = 20000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += simulate_sentiment({mu, sigma}, phi0, cfg, i).p_values.back();
    const double mean = std::exp(mu * horizon);
    const double sd = mean * std::sqrt(std::exp(sigma * sigma * horizon) - 1.0);
    EXPECT_NEAR(sum / n, mean, 4.0 * sd / std::sqrt(n));
}

TEST(SimulateSentiment, SamePathIndexReproduces) {
    PathConfig cfg;
    const auto a = simulate_sentiment({0.1, 0.3}, 1.0, cfg, 5);
    const auto b = simulate_sentiment({0.1, 0.3}, 1.0, cfg, 5);
    EXPECT_EQ(a.p_values, b.p_values);
}

TEST(SimulateJumpDiffusion, NoJumpsWhenLambdaIsZero) {
    PathConfig cfg;
    cfg.n_steps = 100;
    for (auto scheme : {Scheme::euler, Scheme::exact}) {
        cfg.scheme = scheme;
        const auto p = simulate_jump_diffusion(diffusion_only(0.0, 0.2), 1.0, cfg);
        EXPECT_TRUE(p.jump_times.empty());
        EXPECT_EQ(p.s_values.size(), 101u);
        EXPECT_EQ(p.s_values[0], 1.0);
    }
}

TEST(SimulateJumpDiffusion, JumpCountIsPoisson) {
    auto m = diffusion_only(0.0, 0.01);
    m.jd.lambda = 5.0;
    m.jd.mu_j = 0.0;
    m.jd.delta_j = 0.01;
    PathConfig cfg;
    cfg.n_steps = 20;
    cfg.horizon = 2.0;
    const int n = 4000;
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += simulate_jump_diffusion(m, 1.0, cfg, i).jump_times.size();
    // Mean lambda T = 10 with variance 10.
    EXPECT_NEAR(total / n, 10.0, 4.0 * std::sqrt(10.0 / n));
}

TEST(SimulateJumpDiffusion, TerminalMeanOfGbm) {
    const auto m = diffusion_only(0.05, 0.2);
    PathConfig cfg;
    cfg.n_steps = 10;
    const int n = 20000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += simulate_jump_diffusion(m, 1.0, cfg, i).s_values.back();
    const double mean = std::exp(0.05);
    const double sd = mean * std::sqrt(std::exp(0.04) - 1.0);
    EXPECT_NEAR(sum / n, mean, 4.0 * sd / std::sqrt(n));
}

TEST(SimulateJumpDiffusion, NonPositiveJumpMultiplierIsReported) {
    // With P = 2 and y close to zero, 1 + P (y - 1) < 0 on the first jump.
    auto m = diffusion_only(0.0, 0.01);
    m.phi0 = 2.0;
    m.jd.lambda = 50.0;
    m.jd.mu_j = -8.0;
    m.jd.delta_j = 0.0;
    PathConfig cfg;
    try {
        simulate_jump_diffusion(m, 1.0, cfg);
        FAIL();
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("jump at t="), std::string::npos);
    }
}

TEST(SimulateJumpDiffusion, RejectsBadInputs) {
    PathConfig cfg;
    EXPECT_THROW(simulate_jump_diffusion(diffusion_only(0, 0.2), 0.0, cfg), UsageError);
    cfg.n_steps = 0;
    EXPECT_THROW(simulate_jump_diffusion(diffusion_only(0, 0.2), 1.0, cfg), UsageError);
}

TEST(WritePathCsv, WritesHeaderAndRows) {
    PathConfig cfg;
    cfg.n_steps = 3;
    const auto p = simulate_jump_diffusion(diffusion_only(0.0, 0.2), 1.0, cfg);
    const fs::path out = fs::path(JDPINN_TEST_TMP) / "simulate" / "path.csv";
    fs::create_directories(out.parent_path());
    write_path_csv(p, out);
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,s,p");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 4);
}

TEST(ClosedFormBs, MatchesIndependentOracleAndParity) {
    for (double s : {0.5, 1.0, 1.7})
        for (double tenor : {0.1, 1.0, 3.0}) {
            const double c = closed_form_bs(s, 1.0, 0.03, 0.25, tenor);
            EXPECT_NEAR(c, oracle::bs_call(s, 1.0, 0.03, 0.25, tenor), 1e-14);
            // Put-call parity with the put from the symmetric formula.
            const double v = 0.25 * std::sqrt(tenor);
            const double d1 = (std::log(s) + (0.03 + 0.5 * 0.0625) * tenor) / v;
            const double put = std::exp(-0.03 * tenor) * oracle::phi(-(d1 - v)) - s * oracle::phi(-d1);
            EXPECT_NEAR(c - put, s - std::exp(-0.03 * tenor), 1e-13);
        }
    EXPECT_EQ(closed_form_bs(1.5, 1.0, 0.03, 0.25, 0.0), 0.5);
}

TEST(ClosedFormUnbounded, ReducesToBlackScholesWithoutDrift) {
    const auto pde = make_constant_pde(0.3, 0.04, 0.5, 2.0);
    for (double s : {0.2, 0.5, 0.8})
        for (double tc : {0.0, 1.0, 1.9})
            EXPECT_NEAR(closed_form_unbounded(pde, tc, s), oracle::bs_call(s, 0.5, 0.04, 0.3, 2.0 - tc), 1e-13);
}

TEST(ClosedFormUnbounded, SatisfiesThePdeByFiniteDifferences) {
    // Constant coefficients: V_t' + 0.5 sig^2 s^2 V_ss + eta s V_s - r V = beta.
    const double m = 0.05;
    const auto pde = make_constant_pde(0.3, 0.04, 0.5, 2.0, m);
    const double tc = 0.7, s = 0.6, h = 1e-4;
    const auto v = [&](double tt, double ss) { return closed_form_unbounded(pde, tt, ss); };
    const double vt = (v(tc + h, s) - v(tc - h, s)) / (2 * h);
    const double vs = (v(tc, s + h) - v(tc, s - h)) / (2 * h);
    const double vss = (v(tc, s + h) - 2 * v(tc, s) + v(tc, s - h)) / (h * h);
    const double lhs = vt + 0.5 * 0.09 * s * s * vss + (0.04 + m) * s * vs - 0.04 * v(tc, s);
    EXPECT_NEAR(lhs, pde.beta(tc, s), 1e-6);
}

TEST(FeynmanKac, TrivialCases) {
    const auto pde = make_constant_pde(0.3, 0.04, 0.5, 1.0);
    FeynmanKacConfig cfg;
    cfg.n_paths = 100;
    EXPECT_EQ(feynman_kac_price(pde, 1.0, 0.0, cfg).value, 0.5);
    EXPECT_EQ(feynman_kac_price(pde, 0.0, 0.0, cfg).value, 0.0);
    EXPECT_NEAR(feynman_kac_price(pde, 0.7, 1.0, cfg).value, 0.2, 1e-15);
}

TEST(FeynmanKac, RequiresAtLeast100Paths) {
    const auto pde = make_constant_pde(0.3, 0.04, 0.5, 1.0);
    FeynmanKacConfig cfg;
    cfg.n_paths = 99;
    EXPECT_THROW(feynman_kac_price(pde, 0.5, 0.0, cfg), UsageError);
}

TEST(FeynmanKac, MatchesUpAndOutCallWithRebate) {
    const double sigma = 0.3, r = 0.04, kappa = 0.5, T = 1.0;
    const auto pde = make_constant_pde(sigma, r, kappa, T);
    FeynmanKacConfig cfg;
    cfg.n_paths = 40000;
    cfg.n_steps = 200;
    cfg.seed = 9;
    for (double s : {0.4, 0.6, 0.8}) {
        const auto mc = feynman_kac_price(pde, s, 0.0, cfg);
        const double exact = oracle::up_and_out_call(s, kappa, r, sigma, T, 1.0 - kappa);
        EXPECT_LE(std::abs(mc.value - exact), 3.0 * mc.std_error + 1e-3) << "s=" << s;
    }
}

TEST(FeynmanKac, LowVolatilityMatchesUnboundedCall) {
    // Far from the barrier the absorbing boundary is irrelevant.
    const auto pde = make_constant_pde(0.1, 0.04, 0.3, 1.0);
    FeynmanKacConfig cfg;
    cfg.n_paths = 20000;
    cfg.n_steps = 100;
    const auto mc = feynman_kac_price(pde, 0.35, 0.0, cfg);
    const double exact = oracle::bs_call(0.35, 0.3, 0.04, 0.1, 1.0);
    EXPECT_LE(std::abs(mc.value - exact), 3.0 * mc.std_error);
}

TEST(FeynmanKac, AntitheticReducesStandardError) {
    const auto pde = make_constant_pde(0.1, 0.04, 0.3, 1.0);
    FeynmanKacConfig cfg;
    cfg.n_paths = 20000;
    cfg.n_steps = 50;
    const auto plain = feynman_kac_price(pde, 0.35, 0.0, cfg);
    cfg.antithetic = true;
    const auto anti = feynman_kac_price(pde, 0.35, 0.0, cfg);
    EXPECT_LT(anti.std_error, plain.std_error);
    EXPECT_LE(std::abs(anti.value - plain.value), 3.0 * plain.std_error);
}

TEST(FeynmanKac, ThreadCountDoesNotChangeTheEstimate) {
    const auto pde = build_pde(oracle::reference_btc_model(), SentimentPathPolicy::mean_path);
    FeynmanKacConfig cfg;
    cfg.n_paths = 5000;
    cfg.n_steps = 50;
    cfg.threads = 1;
    const auto a = feynman_kac_price(pde, 0.5, 1.0, cfg);
    cfg.threads = 4;
    const auto b = feynman_kac_price(pde, 0.5, 1.0, cfg);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.std_error, b.std_error);
}
