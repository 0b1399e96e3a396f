#include "jdpinn/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "jdpinn/error.hpp"

namespace jdpinn {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\"");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\"");
    return std::string(s.substr(first, last - first + 1));
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

struct RawRow {
    Date date;
    double value;
    std::size_t line;
};

// Reads two-column rows; an optional header is recognised on the first
// non-empty line by a non-numeric second field.
std::vector<RawRow> read_two_column_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");

    std::vector<RawRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
            line.erase(0, 3);
        if (trim(line).empty()) continue;

        const auto comma = line.find(',');
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (comma == std::string::npos) {
            if (first_content) {
                first_content = false;
                continue;
            }
            throw DataError(where + ": malformed row (expected two comma-separated fields)");
        }
        const std::string date_field = trim(std::string_view(line).substr(0, comma));
        std::string value_field = trim(std::string_view(line).substr(comma + 1));
        if (value_field.find(',') != std::string::npos)
            throw DataError(where + ": malformed row (too many fields)");

        double value = 0.0;
        const bool numeric = parse_double(value_field, value);
        if (first_content) {
            first_content = false;
            if (!numeric) continue;  // header
        }
        if (!numeric) throw DataError(where + ": malformed row (value '" + value_field + "' is not a number)");

        Date date;
        try {
            date = parse_date(date_field);
        } catch (const DataError& e) {
            throw DataError(where + ": malformed row (" + e.what() + ")");
        }
        rows.push_back({date, value, line_no});
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const RawRow& a, const RawRow& b) { return std::chrono::sys_days(a.date) < std::chrono::sys_days(b.date); });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date)
            throw DataError(path.string() + ":" + std::to_string(rows[i].line) + ": duplicate date " +
                            format_date(rows[i].date));
    }
    return rows;
}

template <class Obs>
void check_increasing(const std::vector<Obs>& obs) {
    for (std::size_t i = 1; i < obs.size(); ++i) {
        if (std::chrono::sys_days(obs[i].date) <= std::chrono::sys_days(obs[i - 1].date))
            throw DataError("dates must be strictly increasing (at " + format_date(obs[i].date) + ")");
    }
}

double years_between(const Date& a, const Date& b, DayCount dc, std::size_t intervals) {
    switch (dc) {
    case DayCount::calendar365: {
        const auto days = (std::chrono::sys_days(b) - std::chrono::sys_days(a)).count();
        return static_cast<double>(days) / 365.0;
    }
    case DayCount::trading252:
        return static_cast<double>(intervals) / 252.0;
    }
    return 0.0;
}

}  // namespace

DayCount parse_day_count(const std::string& text) {
    if (text == "365" || text == "calendar365") return DayCount::calendar365;
    if (text == "252" || text == "trading252") return DayCount::trading252;
    throw UsageError("unknown day count '" + text + "' (expected 365 or 252)");
}

std::string to_string(DayCount dc) { return dc == DayCount::calendar365 ? "365" : "252"; }

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                  static_cast<unsigned>(d.day()));
    return buf;
}

Date parse_date(const std::string& text) {
    int y = 0;
    unsigned m = 0, d = 0;
    char dash1 = 0, dash2 = 0;
    std::istringstream is(text);
    is >> y >> dash1 >> m >> dash2 >> d;
    if (!is || dash1 != '-' || dash2 != '-' || is.peek() != std::char_traits<char>::eof())
        throw DataError("invalid ISO-8601 date '" + text + "'");
    const Date date{std::chrono::year(y), std::chrono::month(m), std::chrono::day(d)};
    if (!date.ok()) throw DataError("invalid calendar date '" + text + "'");
    return date;
}

PriceSeries::PriceSeries(std::vector<PriceObservation> obs) : obs_(std::move(obs)) {
    if (obs_.size() < 2) throw DataError("price series needs at least two observations");
    check_increasing(obs_);
    for (const auto& o : obs_) {
        if (!(o.close > 0.0) || !std::isfinite(o.close))
            throw DataError("non-positive price on " + format_date(o.date));
    }
}

double PriceSeries::max_close() const {
    return std::max_element(obs_.begin(), obs_.end(),
                            [](const auto& a, const auto& b) { return a.close < b.close; })
        ->close;
}

TrendSeries::TrendSeries(std::vector<TrendObservation> obs) : obs_(std::move(obs)) {
    if (obs_.size() < 2) throw DataError("trend series needs at least two observations");
    check_increasing(obs_);
    for (const auto& o : obs_) {
        if (!(o.value >= 0.0 && o.value <= 100.0))
            throw DataError("trend value outside [0,100] on " + format_date(o.date));
    }
}

PriceSeries load_price_csv(const std::filesystem::path& path) {
    const auto rows = read_two_column_csv(path);
    std::vector<PriceObservation> obs;
    obs.reserve(rows.size());
    for (const auto& r : rows) {
        if (!(r.value > 0.0))
            throw DataError(path.string() + ":" + std::to_string(r.line) + ": non-positive price");
        obs.push_back({r.date, r.value});
    }
    return PriceSeries(std::move(obs));
}

TrendSeries load_trend_csv(const std::filesystem::path& path) {
    const auto rows = read_two_column_csv(path);
    std::vector<TrendObservation> obs;
    obs.reserve(rows.size());
    for (const auto& r : rows) {
        if (!(r.value >= 0.0 && r.value <= 100.0))
            throw DataError(path.string() + ":" + std::to_string(r.line) + ": trend value outside [0,100]");
        obs.push_back({r.date, r.value});
    }
    return TrendSeries(std::move(obs));
}

ReturnSeries log_returns(const PriceSeries& series, DayCount dc) {
    const auto& obs = series.observations();
    ReturnSeries out;
    out.returns.reserve(obs.size() - 1);
    for (std::size_t i = 1; i < obs.size(); ++i) out.returns.push_back(std::log(obs[i].close / obs[i - 1].close));
    out.period_years = years_between(obs.front().date, obs.back().date, dc, obs.size() - 1);
    return out;
}

ReturnSeries log_returns(const TrendSeries& series, DayCount dc) {
    const auto& obs = series.observations();
    ReturnSeries out;
    out.returns.reserve(obs.size() - 1);
    for (std::size_t i = 1; i < obs.size(); ++i) {
        if (!(obs[i].value > 0.0) || !(obs[i - 1].value > 0.0))
            throw DataError("zero trend value on " + format_date(obs[i].value > 0.0 ? obs[i - 1].date : obs[i].date) +
                            " has no log-return");
        out.returns.push_back(std::log(obs[i].value / obs[i - 1].value));
    }
    out.period_years = years_between(obs.front().date, obs.back().date, dc, obs.size() - 1);
    return out;
}

double sample_mean(std::span<const double> x) {
    if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_std_dev(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double mean = sample_mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double quantile_linear(std::span<const double> sorted, double p) {
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

DescriptiveStats describe(std::span<const double> sample) {
    if (sample.size() < 4) throw DataError("insufficient data: describe needs at least 4 returns");

    DescriptiveStats st;
    st.count = sample.size();
    st.mean = sample_mean(sample);
    st.std_dev = sample_std_dev(sample);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : sample) {
        const double d = v - st.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const double n = static_cast<double>(sample.size());
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 > 0.0) {
        st.skewness = m3 / std::pow(m2, 1.5);
        st.kurtosis = m4 / (m2 * m2);
    } else {
        st.skewness = std::numeric_limits<double>::quiet_NaN();
        st.kurtosis = std::numeric_limits<double>::quiet_NaN();
    }

    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    st.min = sorted.front();
    st.max = sorted.back();
    st.q1 = quantile_linear(sorted, 0.25);
    st.median = quantile_linear(sorted, 0.5);
    st.q3 = quantile_linear(sorted, 0.75);
    return st;
}

}  // namespace jdpinn
