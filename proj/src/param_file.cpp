#include "jdpinn/param_file.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "jdpinn/error.hpp"
#include "jdpinn/neural.hpp"

namespace jdpinn {

namespace {

constexpr std::array<const char*, 16> kKeys = {"mu_d",  "sigma_d", "lambda", "k",      "mu_j",   "delta_j",
                                               "mu_p",  "sigma_p", "phi0",   "tau",    "rate",   "strike",
                                               "s_max", "maturity", "day_count", "policy"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool is_key(const std::string& k) {
    for (const char* known : kKeys)
        if (k == known) return true;
    return false;
}

}  // namespace

ParamFile parse_param_text(const std::string& text, const std::string& origin) {
    struct Entry {
        std::string value;
        int line;
    };
    std::map<std::string, Entry> entries;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(line_no);
        if (eq == std::string::npos) throw DataError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!is_key(key)) throw DataError(where + ": unknown key '" + key + "'");
        if (entries.count(key)) throw DataError(where + ": duplicate key '" + key + "'");
        if (value.empty()) throw DataError(where + ": empty value for '" + key + "'");
        entries[key] = {value, line_no};
    }

    auto number = [&](const char* key, bool optional) -> std::optional<double> {
        auto it = entries.find(key);
        if (it == entries.end()) {
            if (optional) return std::nullopt;
            throw DataError(origin + ": missing required key '" + key + "'");
        }
        const std::string where = origin + ":" + std::to_string(it->second.line);
        const std::string& v = it->second.value;
        if (v == "na") {
            if (optional) return std::nullopt;
            throw DataError(where + ": '" + key + "' is not available (na) but is required");
        }
        double out = 0.0;
        auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || end != v.data() + v.size() || !std::isfinite(out))
            throw DataError(where + ": '" + key + "' is not a number: " + v);
        return out;
    };

    ParamFile pf;
    auto& m = pf.model;
    m.jd.mu_d = *number("mu_d", false);
    m.jd.sigma_d = *number("sigma_d", false);
    m.jd.lambda = *number("lambda", false);
    m.jd.k = *number("k", false);
    m.jd.mu_j = number("mu_j", true);
    m.jd.delta_j = number("delta_j", true);
    m.sp.mu_p = *number("mu_p", false);
    m.sp.sigma_p = *number("sigma_p", false);
    m.phi0 = *number("phi0", false);
    m.tau = *number("tau", false);
    m.rate = *number("rate", false);
    m.strike = *number("strike", false);
    m.s_max = *number("s_max", false);
    m.maturity = *number("maturity", false);
    try {
        if (auto it = entries.find("day_count"); it != entries.end()) pf.day_count = parse_day_count(it->second.value);
        if (auto it = entries.find("policy"); it != entries.end()) pf.policy = parse_policy(it->second.value);
    } catch (const UsageError& e) {
        throw DataError(origin + ": " + e.what());
    }
    try {
        m.validate();
    } catch (const DataError& e) {
        throw DataError(origin + ": " + e.what());
    }
    return pf;
}

ParamFile load_param_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open parameter file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_param_text(buf.str(), path.string());
}

std::string format_param_file(const ParamFile& pf, const std::set<std::string>& omit,
                              const std::set<std::string>& unavailable) {
    const auto& m = pf.model;
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("na"); };
    const std::map<std::string, std::string> values = {
        {"mu_d", format_double(m.jd.mu_d)},
        {"sigma_d", format_double(m.jd.sigma_d)},
        {"lambda", format_double(m.jd.lambda)},
        {"k", format_double(m.jd.k)},
        {"mu_j", opt(m.jd.mu_j)},
        {"delta_j", opt(m.jd.delta_j)},
        {"mu_p", format_double(m.sp.mu_p)},
        {"sigma_p", format_double(m.sp.sigma_p)},
        {"phi0", format_double(m.phi0)},
        {"tau", format_double(m.tau)},
        {"rate", format_double(m.rate)},
        {"strike", format_double(m.strike)},
        {"s_max", format_double(m.s_max)},
        {"maturity", format_double(m.maturity)},
        {"day_count", to_string(pf.day_count)},
        {"policy", to_string(pf.policy)},
    };
    std::ostringstream os;
    for (const char* key : kKeys) {
        if (omit.count(key)) continue;
        os << key << " = " << (unavailable.count(key) ? std::string("na") : values.at(key)) << '\n';
    }
    return os.str();
}

void save_param_file(const std::filesystem::path& path, const ParamFile& pf, const std::set<std::string>& omit,
                     const std::set<std::string>& unavailable) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write '" + path.string() + "'");
    os << format_param_file(pf, omit, unavailable);
}

}  // namespace jdpinn
