#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "jdpinn/rng.hpp"

using namespace jdpinn;

// Known-answer vectors published with the Random123 reference implementation
// for Philox4x32 with 10 rounds.
TEST(Philox, KnownAnswerZero) {
    const auto out = PhiloxStream::block({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
    const auto out = PhiloxStream::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                         {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
    const auto out =
        PhiloxStream::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(PhiloxStream, SameSeedAndStreamReproduce) {
    PhiloxStream a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(PhiloxStream, DifferentStreamsDiffer) {
    PhiloxStream a(42, 0), b(42, 1), c(43, 0);
    const auto x = a.next_u64();
    EXPECT_NE(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
}

TEST(PhiloxStream, UniformIsInOpenUnitIntervalWithRightMoments) {
    PhiloxStream g(1, 0);
    const int n = 200000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = g.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double mean = sum / n;
    EXPECT_NEAR(mean, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
    EXPECT_NEAR(sum2 / n - mean * mean, 1.0 / 12.0, 2e-3);
}

TEST(PhiloxStream, NormalMoments) {
    PhiloxStream g(2, 0);
    const int n = 200000;
    double s1 = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = g.normal();
        s1 += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    EXPECT_NEAR(s1 / n, 0.0, 4.0 / std::sqrt(n));
    EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
    EXPECT_NEAR(s4 / n, 3.0, 0.1);
}

TEST(PhiloxStream, ExponentialMean) {
    PhiloxStream g(3, 0);
    const int n = 100000;
    double s = 0;
    for (int i = 0; i < n; ++i) s += g.exponential(4.0);
    EXPECT_NEAR(s / n, 0.25, 4.0 * 0.25 / std::sqrt(n));
}

TEST(DeriveSeed, DistinctLabelsGiveDistinctSeeds) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t label = 0; label < 1000; ++label) seen.insert(derive_seed(42, label));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_EQ(derive_seed(42, 5), derive_seed(42, 5));
    EXPECT_NE(derive_seed(42, 5), derive_seed(43, 5));
}

TEST(InverseNormalCdf, RoundTripsThroughCdf) {
    for (double p : {1e-12, 1e-6, 0.001, 0.025, 0.3, 0.5, 0.7, 0.975, 0.999, 1 - 1e-9}) {
        const double x = inverse_normal_cdf(p);
        EXPECT_NEAR(normal_cdf(x), p, 1e-14 + 1e-12 * p) << p;
    }
}

TEST(InverseNormalCdf, KnownQuantiles) {
    EXPECT_NEAR(inverse_normal_cdf(0.5), 0.0, 1e-15);
    EXPECT_NEAR(inverse_normal_cdf(0.975), 1.959963984540054, 1e-13);
    EXPECT_NEAR(inverse_normal_cdf(0.025), -1.959963984540054, 1e-13);
    EXPECT_NEAR(inverse_normal_cdf(0.8413447460685429), 1.0, 1e-12);
}
