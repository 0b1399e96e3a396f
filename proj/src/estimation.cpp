#include "jdpinn/estimation.hpp"

#include <cmath>

#include "jdpinn/error.hpp"

namespace jdpinn {

JumpPartition detect_jumps(const ReturnSeries& returns, const JumpThresholdConfig& cfg) {
    if (!(cfg.epsilon > 0.0)) throw UsageError("jump threshold must be positive");
    JumpPartition part;
    for (std::size_t i = 0; i < returns.returns.size(); ++i) {
        if (std::abs(returns.returns[i]) > cfg.epsilon)
            part.jump_indices.push_back(i);
        else
            part.diffusion_indices.push_back(i);
    }
    return part;
}

JumpDiffusionEstimate estimate_jump_diffusion(const ReturnSeries& returns, const JumpThresholdConfig& cfg) {
    if (returns.returns.empty()) throw DataError("no returns to estimate from");
    if (!(returns.period_years > 0.0)) throw DataError("return series spans no time");

    const auto part = detect_jumps(returns, cfg);
    if (part.diffusion_indices.empty()) throw DataError("threshold too small: every return classified as a jump");

    JumpDiffusionEstimate est;
    est.mu_d = sample_mean(returns.returns);
    est.sigma_d = sample_std_dev(returns.returns);
    est.jump_count = part.jump_indices.size();
    est.period_years = returns.period_years;
    est.lambda = static_cast<double>(est.jump_count) / returns.period_years;

    if (est.jump_count == 0) {
        est.k = 0.0;
        return est;
    }

    std::vector<double> jumps;
    jumps.reserve(est.jump_count);
    for (auto i : part.jump_indices) jumps.push_back(returns.returns[i]);
    est.mu_j = sample_mean(jumps);
    est.delta_j = sample_std_dev(jumps);
    est.k = expected_relative_jump(*est.mu_j, *est.delta_j);
    return est;
}

SentimentEstimate estimate_sentiment(const ReturnSeries& returns) {
    if (returns.returns.size() < 2) throw DataError("sentiment estimate needs at least two returns");
    return {sample_mean(returns.returns), sample_std_dev(returns.returns)};
}

}  // namespace jdpinn
