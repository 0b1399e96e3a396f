#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "jdpinn/model.hpp"

namespace jdpinn {

enum class Scheme { euler, exact };

Scheme parse_scheme(const std::string& text);

struct PathConfig {
    int n_steps = 252;
    double horizon = 1.0;  // in the time unit of the model rates
    std::uint64_t seed = 42;
    Scheme scheme = Scheme::exact;
};

struct SamplePath {
    std::vector<double> times;
    std::vector<double> s_values;  // empty for a sentiment-only path
    std::vector<double> p_values;
    std::vector<double> jump_times;
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
};

struct FeynmanKacConfig {
    std::size_t n_paths = 100000;
    int n_steps = 250;
    std::uint64_t seed = 42;
    bool antithetic = false;
    int threads = 1;
};

/// Sentiment path P on [0, horizon]. The exact scheme uses the lognormal
/// closed form phi0 exp((mu_p - sigma_p^2/2) t + sigma_p Z_t); Euler applies
/// dP = mu_p P dt + sigma_p P dZ.
SamplePath simulate_sentiment(const SentimentEstimate& sp, double phi0, const PathConfig& cfg,
                              std::uint64_t path_index = 0);

/// Joint (S, P) path. The delayed level P_{t - tau} is phi0 for t <= tau and
/// otherwise the simulated P at the last grid time not after t - tau.
/// Euler: Bernoulli(lambda dt) jumps; exact: exponential inter-arrival times
/// and lognormal diffusion increments. A jump multiplies S by 1 + P (y - 1)
/// with ln y ~ N(mu_j, delta_j^2); a non-positive multiplier throws
/// NumericalError naming the jump time.
SamplePath simulate_jump_diffusion(const MarketModel& model, double s0, const PathConfig& cfg,
                                   std::uint64_t path_index = 0);

/// Monte Carlo estimate of V(t_start, spot) for the truncated-domain problem:
/// dS = eta S du + sigma* S dW from spot at calendar time t_start, discounted
/// payoff at maturity, running source -beta, and absorption at S = 1 (checked
/// on the grid and by the Brownian-bridge crossing probability) paying the
/// boundary value 1 - E/S_max. Values are in S_max units.
McEstimate feynman_kac_price(const PdeProblem& pde, double spot_normalized, double t_start,
                             const FeynmanKacConfig& cfg);

/// Textbook Black-Scholes call.
double closed_form_bs(double spot, double strike, double rate, double sigma, double tenor);

/// Solution of the rewritten equation on the unbounded domain (no S = 1
/// boundary). V + S solves the homogeneous equation with drift eta, so
///   V = C_eta + S (exp(int (eta - r)) - 1)
/// with C_eta the lognormal call under drift eta and total variance int sigma*^2.
double closed_form_unbounded(const PdeProblem& pde, double t_calendar, double s);

/// Writes `t,s,p` rows.
void write_path_csv(const SamplePath& path, const std::filesystem::path& out);

}  // namespace jdpinn
