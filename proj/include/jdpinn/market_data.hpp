#pragma once

#include <chrono>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace jdpinn {

using Date = std::chrono::year_month_day;

enum class DayCount {
    calendar365,  // calendar span in days / 365
    trading252,   // number of observation intervals / 252
};

DayCount parse_day_count(const std::string& text);
std::string to_string(DayCount dc);

struct PriceObservation {
    Date date;
    double close;
};

// Daily closing prices. Dates strictly increasing, closes > 0, at least two rows.
class PriceSeries {
public:
    explicit PriceSeries(std::vector<PriceObservation> obs);

    const std::vector<PriceObservation>& observations() const { return obs_; }
    std::size_t size() const { return obs_.size(); }
    double max_close() const;

private:
    std::vector<PriceObservation> obs_;
};

struct TrendObservation {
    Date date;
    double value;
};

// Search-interest index, scaled to [0, 100].
class TrendSeries {
public:
    explicit TrendSeries(std::vector<TrendObservation> obs);

    const std::vector<TrendObservation>& observations() const { return obs_; }
    std::size_t size() const { return obs_.size(); }

private:
    std::vector<TrendObservation> obs_;
};

struct ReturnSeries {
    std::vector<double> returns;
    double period_years = 0.0;
};

struct DescriptiveStats {
    std::size_t count = 0;
    double mean = 0.0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double std_dev = 0.0;
    double skewness = 0.0;  // NaN when the sample has zero variance
    double kurtosis = 0.0;  // raw (normal = 3); NaN when the sample has zero variance
};

/// Parses a `date,close` CSV. A first line whose second field is not numeric is
/// treated as a header. Rows are sorted by date before validation.
PriceSeries load_price_csv(const std::filesystem::path& path);

/// Parses a `date,value` CSV with the same header rule as load_price_csv.
TrendSeries load_trend_csv(const std::filesystem::path& path);

ReturnSeries log_returns(const PriceSeries& series, DayCount dc = DayCount::calendar365);

/// Trend values must be strictly positive for log-returns to exist.
ReturnSeries log_returns(const TrendSeries& series, DayCount dc = DayCount::calendar365);

/// Sample statistics. Quartiles use linear interpolation between closest ranks:
/// for sorted x[0..n-1], Q(p) = x[h0] + (h - h0) (x[h0+1] - x[h0]) with h = p (n - 1).
DescriptiveStats describe(std::span<const double> sample);
inline DescriptiveStats describe(const ReturnSeries& r) { return describe(r.returns); }

double sample_mean(std::span<const double> x);
/// n - 1 denominator; 0 for a single observation.
double sample_std_dev(std::span<const double> x);
double quantile_linear(std::span<const double> sorted, double p);

std::string format_date(const Date& d);
Date parse_date(const std::string& text);

}  // namespace jdpinn
