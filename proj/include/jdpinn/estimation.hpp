#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "jdpinn/market_data.hpp"

namespace jdpinn {

struct JumpThresholdConfig {
    double epsilon = 0.07;  // log-return units
};

struct JumpPartition {
    std::vector<std::size_t> jump_indices;
    std::vector<std::size_t> diffusion_indices;
};

struct JumpDiffusionEstimate {
    double mu_d = 0.0;     // per sampling period
    double sigma_d = 0.0;  // per sqrt(sampling period)
    double lambda = 0.0;   // jumps per year
    double k = 0.0;        // expected relative jump size exp(mu_j + delta_j^2/2) - 1
    std::optional<double> mu_j;     // absent when no jump was detected
    std::optional<double> delta_j;  // absent when no jump was detected
    std::size_t jump_count = 0;
    double period_years = 0.0;
};

struct SentimentEstimate {
    double mu_p = 0.0;
    double sigma_p = 0.0;
};

/// |r_i| > epsilon puts index i in the jump set; everything else is diffusion.
JumpPartition detect_jumps(const ReturnSeries& returns, const JumpThresholdConfig& cfg);

/// Threshold estimator. mu_d and sigma_d are the mean and sample standard
/// deviation of the full return series; jump-set returns are taken directly as
/// ln(y) observations for mu_j and delta_j (delta_j = 0 for a single jump).
/// lambda = jump_count / period_years.
JumpDiffusionEstimate estimate_jump_diffusion(const ReturnSeries& returns, const JumpThresholdConfig& cfg);

SentimentEstimate estimate_sentiment(const ReturnSeries& returns);

inline double expected_relative_jump(double mu_j, double delta_j) {
    return std::exp(mu_j + 0.5 * delta_j * delta_j) - 1.0;
}

}  // namespace jdpinn
