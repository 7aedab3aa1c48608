#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "hdamp/harnack.hpp"
#include "hdamp/random.hpp"

using namespace hdamp;

namespace {

BoundContext unit_context() {
    BoundContext ctx;
    ctx.N = 2.0;
    ctx.T0 = 1.0;
    return ctx;
}

PartialWaveSet gray_disk(double s, int D) {
    const unsigned cutoff = truncation_order(s, 2.0, 1.0).cutoff;
    return build_model(GrayDisk{cutoff}, s, DimensionSpec(D));
}

}  // namespace

TEST(HarnackCheck, GrayDiskStaysInsideInterval) {
    const BoundContext ctx = unit_context();
    for (const int D : {4, 5, 6}) {
        for (const double ls : {4.0, 7.0, 10.0}) {
            const PartialWaveSet pw = gray_disk(std::exp(ls), D);
            for (const double r : {0.1, 0.3, 0.5}) {
                SeededRng rng(derive_seed(17, static_cast<std::uint64_t>(D * 100 + ls * 10 + r * 10)));
                const HarnackCheck c = harnack_check(pw, 0.5, r, ctx, 200, rng);
                EXPECT_EQ(c.violations, 0u) << "D=" << D << " ln s=" << ls << " r=" << r;
                EXPECT_GT(c.center_value, 0.0);
                EXPECT_GE(c.min_ratio, (1.0 - r) / (1.0 + r));
                EXPECT_LE(c.max_ratio, (1.0 + r) / (1.0 - r));
            }
        }
    }
}

TEST(HarnackCheck, ExponentialTailStaysInsideInterval) {
    const BoundContext ctx = unit_context();
    const double s = std::exp(6.0);
    const PartialWaveSet pw = build_model(ExponentialTail{0.9, std::sqrt(s) / 2.0, std::nullopt}, s, DimensionSpec(5));
    SeededRng rng(3);
    const HarnackCheck c = harnack_check(pw, 0.5, 0.5, ctx, 500, rng);
    EXPECT_EQ(c.violations, 0u);
    EXPECT_EQ(c.samples, 500u);
}

TEST(HarnackCheck, DiskRadiusMatchesDomainWidth) {
    const BoundContext ctx = unit_context();
    const double s = std::exp(5.0);
    const PartialWaveSet pw = gray_disk(s, 5);
    SeededRng rng(1);
    const HarnackCheck c = harnack_check(pw, 0.36, 0.5, ctx, 1, rng);
    EXPECT_NEAR(c.disk_radius, 0.5 * std::numbers::pi * 0.6 / (2.0 * 5.0), 1e-15);
    EXPECT_NEAR(c.interval.lo, c.center_value / 3.0, 1e-12 * c.center_value);
}

TEST(HarnackCheck, SameSeedSameResult) {
    const BoundContext ctx = unit_context();
    const PartialWaveSet pw = gray_disk(std::exp(6.0), 6);
    SeededRng a(55), b(55);
    const HarnackCheck x = harnack_check(pw, 0.5, 0.3, ctx, 100, a);
    const HarnackCheck y = harnack_check(pw, 0.5, 0.3, ctx, 100, b);
    EXPECT_EQ(x.min_ratio, y.min_ratio);
    EXPECT_EQ(x.max_ratio, y.max_ratio);
}

TEST(HarnackCheck, Preconditions) {
    const BoundContext ctx = unit_context();
    const PartialWaveSet pw = gray_disk(std::exp(4.0), 5);
    SeededRng rng(1);
    EXPECT_THROW(harnack_check(pw, 0.0, 0.5, ctx, 10, rng), hdamp::domain_error);
    EXPECT_THROW(harnack_check(pw, 0.9995, 0.5, ctx, 10, rng), hdamp::domain_error);
    EXPECT_THROW(harnack_check(pw, 0.5, 1.0, ctx, 10, rng), hdamp::domain_error);
    // Center value not positive: purely real waves have zero absorptive part.
    const PartialWaveSet real_waves(DimensionSpec(5), 100.0, {complex(0.5)});
    EXPECT_THROW(harnack_check(real_waves, 0.5, 0.5, ctx, 10, rng), hdamp::domain_error);
}

TEST(DomainPositivity, PositiveForGenerousConstant) {
    BoundContext ctx = unit_context();
    ctx.C4 = 1.0;
    const PartialWaveSet pw = gray_disk(std::exp(6.0), 5);
    const PositivityScan scan = domain_positivity(pw, ctx, 8, 8);
    EXPECT_TRUE(scan.positive);
    EXPECT_GT(scan.min_ratio, 0.0);
    EXPECT_LE(scan.min_ratio, 1.0);
}

TEST(DomainPositivity, FailsWhenDomainIsTooWide) {
    BoundContext ctx = unit_context();
    ctx.C4 = 0.05;
    const PartialWaveSet pw = gray_disk(std::exp(6.0), 5);
    const PositivityScan scan = domain_positivity(pw, ctx, 8, 8);
    EXPECT_FALSE(scan.positive);
    EXPECT_GT(scan.worst_v, 0.0);
}

TEST(DomainPositivity, CalibrationIsSmallestPassingRung) {
    const BoundContext ctx = unit_context();
    const PartialWaveSet pw = gray_disk(std::exp(5.0), 5);
    const auto ladder = default_C4_ladder();
    const auto c4 = calibrate_C4(pw, ctx, ladder);
    ASSERT_TRUE(c4.has_value());
    BoundContext at = ctx;
    at.C4 = *c4;
    EXPECT_TRUE(domain_positivity(pw, at, 8, 8).positive);
    if (*c4 > ladder.front()) {
        at.C4 = *c4 - 0.05;
        EXPECT_FALSE(domain_positivity(pw, at, 8, 8).positive);
    }
}

TEST(SignChange, LocatesZeroOfRealPart) {
    const PartialWaveSet pw = gray_disk(std::exp(6.0), 5);
    const auto v = first_sign_change_v(pw, 0.5, 5.0);
    ASSERT_TRUE(v.has_value());
    EXPECT_NEAR(absorptive_eval(pw, complex(0.5, *v)).real() / absorptive_eval(pw, 0.5).real(), 0.0, 1e-10);
    for (double w = 0.0; w < *v * 0.999; w += *v / 50.0) {
        EXPECT_GT(absorptive_eval(pw, complex(0.5, w)).real(), 0.0);
    }
}

TEST(SignChange, NoneForConstantAmplitude) {
    const PartialWaveSet pw(DimensionSpec(5), 100.0, {complex(0.0, 1.0)});
    EXPECT_FALSE(first_sign_change_v(pw, 0.5, 5.0).has_value());
}
