#pragma once

#include <string>
#include <utility>

#include "jdpinn/estimation.hpp"

namespace jdpinn {

// How the sentiment factor P_{t-tau} is replaced by a deterministic level
// when building PDE coefficients.
enum class SentimentPathPolicy {
    frozen,     // P = phi(0) everywhere
    mean_path,  // P(t) = phi(0) exp(mu_p max(t - tau, 0)), constant initial function
};

SentimentPathPolicy parse_policy(const std::string& text);
std::string to_string(SentimentPathPolicy p);

// Which equation the coefficients describe.
enum class PdeModelKind {
    jump_diffusion,  // full coefficients
    black_scholes,   // beta = 0, eta = r
};

PdeModelKind parse_model_kind(const std::string& text);
std::string to_string(PdeModelKind k);

// How a delay tau enters a re-solve.
enum class DelayMode {
    sentiment_shift,     // tau shifts the sentiment argument only
    effective_maturity,  // maturity becomes T - tau
};

DelayMode parse_delay_mode(const std::string& text);
std::string to_string(DelayMode m);

struct MarketModel {
    JumpDiffusionEstimate jd;
    SentimentEstimate sp;
    double phi0 = 0.01;     // initial sentiment level phi(0)
    double tau = 0.0;       // delay, years
    double rate = 0.04;     // risk-free rate, per year
    double strike = 0.0;    // currency
    double s_max = 0.0;     // upper price bound of the truncated domain, currency
    double maturity = 0.0;  // years

    /// Throws DataError when an invariant fails (strike < s_max, maturity > 0, phi0 > 0, ...).
    void validate() const;

    double strike_ratio() const { return strike / s_max; }
    double jump_compensated_drift() const { return jd.mu_d - jd.lambda * jd.k; }
};

/// Deterministic sentiment level as a function of calendar time since the pricing date.
struct SentimentCurve {
    SentimentPathPolicy policy = SentimentPathPolicy::frozen;
    double phi0 = 1.0;
    double mu_p = 0.0;
    double tau = 0.0;

    double level(double t_calendar) const;
    /// Exact integral of level() over [a, b].
    double integral(double a, double b) const;
};

double sentiment_level(const MarketModel& model, SentimentPathPolicy policy, double t_calendar);

/// Coefficients of the rewritten pricing equation
///   V_t' + 0.5 sigma*^2 S^2 V_SS + eta S V_S - r V = beta
/// with S normalised by S_max and V in S_max units. Time arguments are calendar
/// years since the pricing date, t' in [0, maturity].
struct PdeProblem {
    double sigma_sq = 0.0;  // sigma_d^2; sigma*^2(t) = sigma_sq * P(t)
    double drift_m = 0.0;   // mu_d - lambda k (0 for the Black-Scholes reduction)
    double rate = 0.0;
    double maturity = 1.0;
    double strike_ratio = 0.5;
    SentimentCurve curve;

    double sigma_star_sq(double t) const { return sigma_sq * curve.level(t); }
    double eta(double t) const { return rate + drift_m * curve.level(t); }
    double beta(double t, double s) const { return -drift_m * s * curve.level(t); }
    /// Value of the upper Dirichlet boundary, 1 - E/S_max.
    double upper_boundary() const { return 1.0 - strike_ratio; }
    double payoff(double s) const { return s > strike_ratio ? s - strike_ratio : 0.0; }
};

/// Throws NumericalError("degenerate diffusion") for sigma_d = 0.
PdeProblem build_pde(const MarketModel& model, SentimentPathPolicy policy,
                     PdeModelKind kind = PdeModelKind::jump_diffusion);

/// Constant-coefficient problem (P = 1): sigma*^2 = sigma^2, eta = r + drift_m.
PdeProblem make_constant_pde(double sigma, double rate, double strike_ratio, double maturity, double drift_m = 0.0);

/// (t', S') -> (t, s) = ((T - t') / T, S' / S_max).
std::pair<double, double> transform(double t_calendar, double s_dollars, const MarketModel& model);
std::pair<double, double> inverse_transform(double t, double s, const MarketModel& model);

/// Applies a delay tau under the given mode.
MarketModel with_delay(const MarketModel& model, double tau, DelayMode mode);

}  // namespace jdpinn
