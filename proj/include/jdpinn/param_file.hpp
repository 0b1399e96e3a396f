#pragma once

#include <filesystem>
#include <set>
#include <string>

#include "jdpinn/market_data.hpp"
#include "jdpinn/model.hpp"

namespace jdpinn {

/// Line-oriented `key = value` parameter file. `#` starts a comment; blank
/// lines are ignored; `na` marks a value that is not available. Keys:
///   mu_d sigma_d lambda k mu_j delta_j mu_p sigma_p phi0 tau
///   rate strike s_max maturity day_count policy
/// mu_j and delta_j may be `na` (no jumps detected); day_count defaults to
/// 365 and policy to mean-path; every other key is required.
struct ParamFile {
    MarketModel model;
    DayCount day_count = DayCount::calendar365;
    SentimentPathPolicy policy = SentimentPathPolicy::mean_path;
};

/// Parses and validates; errors name `origin` and the line.
ParamFile parse_param_text(const std::string& text, const std::string& origin = "<params>");
ParamFile load_param_file(const std::filesystem::path& path);

/// Canonical text with every key in a fixed order. Keys in `omit` are left
/// out; keys in `unavailable` are written as `na`.
std::string format_param_file(const ParamFile& pf, const std::set<std::string>& omit = {},
                              const std::set<std::string>& unavailable = {});
void save_param_file(const std::filesystem::path& path, const ParamFile& pf, const std::set<std::string>& omit = {},
                     const std::set<std::string>& unavailable = {});

}  // namespace jdpinn
