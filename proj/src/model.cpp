#include "jdpinn/model.hpp"

#include <algorithm>
#include <cmath>

#include "jdpinn/error.hpp"

namespace jdpinn {

SentimentPathPolicy parse_policy(const std::string& text) {
    if (text == "frozen") return SentimentPathPolicy::frozen;
    if (text == "mean-path" || text == "mean_path") return SentimentPathPolicy::mean_path;
    throw UsageError("unknown sentiment policy '" + text + "' (expected frozen or mean-path)");
}

std::string to_string(SentimentPathPolicy p) { return p == SentimentPathPolicy::frozen ? "frozen" : "mean-path"; }

PdeModelKind parse_model_kind(const std::string& text) {
    if (text == "jmd" || text == "jump") return PdeModelKind::jump_diffusion;
    if (text == "bs") return PdeModelKind::black_scholes;
    throw UsageError("unknown model '" + text + "' (expected bs or jmd)");
}

std::string to_string(PdeModelKind k) { return k == PdeModelKind::black_scholes ? "bs" : "jmd"; }

DelayMode parse_delay_mode(const std::string& text) {
    if (text == "sentiment-shift" || text == "sentiment_shift") return DelayMode::sentiment_shift;
    if (text == "effective-maturity" || text == "effective_maturity") return DelayMode::effective_maturity;
    throw UsageError("unknown delay mode '" + text + "' (expected sentiment-shift or effective-maturity)");
}

std::string to_string(DelayMode m) {
    return m == DelayMode::sentiment_shift ? "sentiment-shift" : "effective-maturity";
}

void MarketModel::validate() const {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw DataError(msg);
    };
    require(std::isfinite(jd.mu_d) && std::isfinite(jd.sigma_d) && std::isfinite(jd.lambda) && std::isfinite(jd.k),
            "jump-diffusion parameters must be finite");
    require(jd.sigma_d >= 0.0, "sigma_d must be nonnegative");
    require(jd.lambda >= 0.0, "lambda must be nonnegative");
    require(sp.sigma_p >= 0.0, "sigma_p must be nonnegative");
    require(phi0 > 0.0, "phi0 must be positive");
    require(tau >= 0.0, "tau must be nonnegative");
    require(std::isfinite(rate), "rate must be finite");
    require(strike > 0.0, "strike must be positive");
    require(s_max > strike, "s_max must exceed the strike");
    require(maturity > 0.0, "maturity must be positive");
}

double SentimentCurve::level(double t_calendar) const {
    if (policy == SentimentPathPolicy::frozen) return phi0;
    return phi0 * std::exp(mu_p * std::max(t_calendar - tau, 0.0));
}

double SentimentCurve::integral(double a, double b) const {
    if (b <= a) return 0.0;
    if (policy == SentimentPathPolicy::frozen || mu_p == 0.0) return phi0 * (b - a);
    double total = 0.0;
    if (a < tau) total += phi0 * (std::min(b, tau) - a);
    const double lo = std::max(a, tau);
    if (b > lo) total += phi0 * std::exp(mu_p * (lo - tau)) * std::expm1(mu_p * (b - lo)) / mu_p;
    return total;
}

double sentiment_level(const MarketModel& model, SentimentPathPolicy policy, double t_calendar) {
    return SentimentCurve{policy, model.phi0, model.sp.mu_p, model.tau}.level(t_calendar);
}

PdeProblem build_pde(const MarketModel& model, SentimentPathPolicy policy, PdeModelKind kind) {
    model.validate();
    if (model.jd.sigma_d == 0.0) throw NumericalError("degenerate diffusion: sigma_d = 0");
    PdeProblem p;
    p.sigma_sq = model.jd.sigma_d * model.jd.sigma_d;
    p.drift_m = kind == PdeModelKind::black_scholes ? 0.0 : model.jump_compensated_drift();
    p.rate = model.rate;
    p.maturity = model.maturity;
    p.strike_ratio = model.strike_ratio();
    p.curve = SentimentCurve{policy, model.phi0, model.sp.mu_p, model.tau};
    return p;
}

PdeProblem make_constant_pde(double sigma, double rate, double strike_ratio, double maturity, double drift_m) {
    PdeProblem p;
    p.sigma_sq = sigma * sigma;
    p.drift_m = drift_m;
    p.rate = rate;
    p.maturity = maturity;
    p.strike_ratio = strike_ratio;
    p.curve = SentimentCurve{SentimentPathPolicy::frozen, 1.0, 0.0, 0.0};
    return p;
}

std::pair<double, double> transform(double t_calendar, double s_dollars, const MarketModel& model) {
    if (!(t_calendar >= 0.0 && t_calendar <= model.maturity))
        throw UsageError("calendar time outside [0, maturity]");
    if (!(s_dollars >= 0.0 && s_dollars <= model.s_max)) throw UsageError("price outside [0, s_max]");
    return {(model.maturity - t_calendar) / model.maturity, s_dollars / model.s_max};
}

std::pair<double, double> inverse_transform(double t, double s, const MarketModel& model) {
    if (!(t >= 0.0 && t <= 1.0) || !(s >= 0.0 && s <= 1.0)) throw UsageError("normalized point outside [0,1]^2");
    return {model.maturity * (1.0 - t), s * model.s_max};
}

MarketModel with_delay(const MarketModel& model, double tau, DelayMode mode) {
    if (!(tau >= 0.0)) throw UsageError("delay must be nonnegative");
    if (tau >= model.maturity) throw UsageError("delay must be shorter than the maturity");
    MarketModel out = model;
    if (mode == DelayMode::sentiment_shift)
        out.tau = tau;
    else
        out.maturity = model.maturity - tau;
    return out;
}

}  // namespace jdpinn
