#include <gtest/gtest.h>

#include <filesystem>

#include "jdpinn/error.hpp"
#include "jdpinn/param_file.hpp"
#include "oracles.hpp"

using namespace jdpinn;

namespace {

const char* kValid = R"(# reference bitcoin setup
mu_d = -0.00241
sigma_d = 0.04132
lambda = 31.8
k = -0.002195
mu_j = na
delta_j = na
mu_p = 0.01033
sigma_p = 0.20934
phi0 = 0.01
tau = 0
rate = 0.04
strike = 30000
s_max = 63577
maturity = 5
)";

std::string replace_line(std::string text, const std::string& key, const std::string& line) {
    const auto pos = text.find("\n" + key + " =");
    const auto end = text.find('\n', pos + 1);
    return text.substr(0, pos + 1) + line + text.substr(end);
}

}  // namespace

TEST(ParamFile, ParsesValidFileWithDefaults) {
    const auto pf = parse_param_text(kValid);
    EXPECT_EQ(pf.model.jd.lambda, 31.8);
    EXPECT_EQ(pf.model.s_max, 63577.0);
    EXPECT_FALSE(pf.model.jd.mu_j.has_value());
    EXPECT_EQ(pf.day_count, DayCount::calendar365);
    EXPECT_EQ(pf.policy, SentimentPathPolicy::mean_path);
}

TEST(ParamFile, FormatParseRoundTripIsExact) {
    ParamFile pf;
    pf.model = oracle::reference_btc_model();
    pf.model.jd.mu_j = -0.0123456789012345;
    pf.model.jd.delta_j = 0.1;
    pf.day_count = DayCount::trading252;
    pf.policy = SentimentPathPolicy::frozen;
    const auto text = format_param_file(pf);
    const auto back = parse_param_text(text);
    EXPECT_EQ(format_param_file(back), text);
    EXPECT_EQ(*back.model.jd.mu_j, *pf.model.jd.mu_j);
    EXPECT_EQ(back.day_count, DayCount::trading252);
    EXPECT_EQ(back.policy, SentimentPathPolicy::frozen);
}

TEST(ParamFile, OmitAndUnavailable) {
    ParamFile pf;
    pf.model = oracle::reference_btc_model();
    const auto text = format_param_file(pf, {"mu_p", "sigma_p"}, {"strike"});
    EXPECT_EQ(text.find("mu_p"), std::string::npos);
    EXPECT_NE(text.find("strike = na"), std::string::npos);
    EXPECT_THROW(parse_param_text(text), DataError);
}

TEST(ParamFile, ErrorsNameTheLine) {
    try {
        parse_param_text(replace_line(kValid, "rate", "rate = abc"), "x.params");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("x.params:12"), std::string::npos) << e.what();
    }
}

TEST(ParamFile, RejectsUnknownDuplicateAndMissingKeys) {
    EXPECT_THROW(parse_param_text(std::string(kValid) + "colour = blue\n"), DataError);
    EXPECT_THROW(parse_param_text(std::string(kValid) + "rate = 0.05\n"), DataError);
    EXPECT_THROW(parse_param_text(replace_line(kValid, "maturity", "# no maturity")), DataError);
    EXPECT_THROW(parse_param_text(replace_line(kValid, "rate", "rate = na")), DataError);
}

TEST(ParamFile, RunsModelValidation) {
    EXPECT_THROW(parse_param_text(replace_line(kValid, "strike", "strike = 70000")), DataError);
    EXPECT_THROW(parse_param_text(replace_line(kValid, "phi0", "phi0 = 0")), DataError);
}

TEST(ParamFile, SaveAndLoad) {
    ParamFile pf;
    pf.model = oracle::reference_btc_model();
    const auto path = std::filesystem::path(JDPINN_TEST_TMP) / "model.params";
    save_param_file(path, pf);
    EXPECT_EQ(format_param_file(load_param_file(path)), format_param_file(pf));
    EXPECT_THROW(load_param_file(path.string() + ".missing"), DataError);
}

TEST(ParamFile, ShippedDataFilesLoad) {
    for (const char* name : {"btc_reference.params", "tsla_c245.params", "tsla_c250.params", "nvda_c435.params",
                             "nflx_c370.params"}) {
        EXPECT_NO_THROW(load_param_file(std::filesystem::path(JDPINN_DATA_DIR) / name)) << name;
    }
}
