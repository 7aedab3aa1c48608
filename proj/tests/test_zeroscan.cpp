#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "hdamp/amplitude.hpp"
#include "hdamp/bounds.hpp"
#include "hdamp/io.hpp"
#include "hdamp/random.hpp"
#include "hdamp/zeroscan.hpp"

using namespace hdamp;

namespace {

constexpr complex I(0.0, 1.0);

Contour circle(complex center, double radius, unsigned samples = 256) { return Contour{Circle{center, radius}, samples}; }

complex product(const std::vector<complex>& roots, complex t) {
    complex p = 1.0;
    for (const complex& r : roots) {
        p *= t - r;
    }
    return p;
}

// Roots in |t| < 1.3 kept at least 1e-3 away from the unit circle; some repeated.
std::vector<complex> random_roots(SeededRng& rng) {
    const unsigned degree = static_cast<unsigned>(rng.uniform_int(1, 8));
    std::vector<complex> roots;
    while (roots.size() < degree) {
        const complex z = std::polar(1.3 * std::sqrt(rng.uniform()), 2.0 * std::numbers::pi * rng.uniform());
        if (std::abs(std::abs(z) - 1.0) < 1e-3) {
            continue;
        }
        roots.push_back(z);
        if (roots.size() < degree && rng.uniform() < 0.15) {
            roots.push_back(z);
        }
    }
    return roots;
}

BoundContext wide_context(double T0) {
    BoundContext ctx;
    ctx.N = 2.0;
    ctx.T0 = T0;
    return ctx;
}

}  // namespace

TEST(Winding, Examples) {
    EXPECT_EQ(winding_number([](complex t) { return t - 0.5; }, circle(0.0, 1.0)), 1);
    EXPECT_EQ(winding_number([](complex) { return complex(3.0, 4.0); }, circle(0.3, 2.0)), 0);
    EXPECT_EQ(winding_number([](complex t) { return (t - 0.2) * (t - 0.3) * (t - 0.3); }, circle(0.0, 0.5)), 3);
}

TEST(Winding, ExcludedRootsAndPoles) {
    EXPECT_EQ(winding_number([](complex t) { return t - 2.0; }, circle(0.0, 1.0)), 0);
    EXPECT_EQ(winding_number([](complex t) { return 1.0 / (t - 0.5); }, circle(0.0, 1.0)), -1);
    EXPECT_EQ(winding_number([](complex t) { return std::pow(t, 12); }, circle(0.0, 1.0)), 12);
}

TEST(Winding, RectangleContour) {
    const Contour box{Rectangle{complex(-1.0, -1.0), complex(1.0, 2.0)}, 128};
    EXPECT_EQ(winding_number([](complex t) { return (t - complex(0.5, 1.5)) * (t + 3.0); }, box), 1);
    EXPECT_EQ(box.point(0.0), complex(-1.0, -1.0));
    EXPECT_EQ(box.point(0.2), complex(1.0, -1.0));
}

TEST(Winding, AdaptiveDoublingResolvesFastPhase) {
    // 40 turns around a 64-point contour needs several doublings.
    const WindingResult r = winding_scan([](complex t) { return std::pow(t, 40); }, circle(0.0, 1.0, 64));
    EXPECT_EQ(r.count, 40);
    EXPECT_GT(r.samples_used, 64u);
}

TEST(Winding, ZeroOnContourIsReported) {
    EXPECT_THROW(winding_number([](complex t) { return t - 1.0; }, circle(0.0, 1.0)), zero_on_contour_error);
}

TEST(Winding, NonConvergenceIsReported) {
    WindingOptions options;
    options.max_samples = 128;
    EXPECT_THROW(winding_number([](complex t) { return std::pow(t, 200); }, circle(0.0, 1.0, 64), options),
                 convergence_error);
}

TEST(Winding, InvalidContour) {
    EXPECT_THROW(winding_number([](complex t) { return t; }, circle(0.0, 1.0, 100)), hdamp::domain_error);
    EXPECT_THROW(winding_number([](complex t) { return t; }, circle(0.0, 1.0, 32)), hdamp::domain_error);
    EXPECT_THROW(winding_number([](complex t) { return t - 5.0; }, circle(0.0, -1.0)), hdamp::domain_error);
    const Contour flat{Rectangle{complex(0.0, 0.0), complex(1.0, 0.0)}, 64};
    EXPECT_THROW(winding_number([](complex t) { return t - 5.0; }, flat), hdamp::domain_error);
}

TEST(Winding, RandomPolynomialsCountWithMultiplicity) {
    SeededRng rng(424242);
    for (int trial = 0; trial < 200; ++trial) {
        const std::vector<complex> roots = random_roots(rng);
        int inside = 0;
        for (const complex& r : roots) {
            inside += std::abs(r) < 1.0 ? 1 : 0;
        }
        EXPECT_EQ(winding_number([&](complex t) { return product(roots, t); }, circle(0.0, 1.0)), inside)
            << "trial " << trial;
    }
}

TEST(Census, RefinesDistinctRoots) {
    const std::vector<complex> roots{complex(0.3, 0.2), complex(-0.5, 0.0), complex(0.1, -0.7)};
    CensusOptions options;
    options.compute_jensen = false;
    const ZeroCensus c = zero_census_of([&](complex t) { return product(roots, t); }, 1.0, options);
    EXPECT_EQ(c.winding_count, 3);
    ASSERT_TRUE(c.complete());
    for (const complex& r : roots) {
        bool found = false;
        for (const LocatedZero& z : c.zeros) {
            found = found || std::abs(z.location - r) < 1e-8;
            EXPECT_LE(z.residual, 1e-8);
        }
        EXPECT_TRUE(found) << r;
    }
}

TEST(Census, RandomPolynomialsAreFullyRefined) {
    SeededRng rng(99);
    CensusOptions options;
    options.compute_jensen = false;
    for (int trial = 0; trial < 300; ++trial) {
        const std::vector<complex> roots = random_roots(rng);
        const ZeroCensus c = zero_census_of([&](complex t) { return product(roots, t); }, 1.0, options);
        EXPECT_TRUE(c.complete()) << "trial " << trial << ": " << to_json(c).dump();
        for (const LocatedZero& z : c.zeros) {
            EXPECT_LE(z.residual, 1e-8);
            EXPECT_LT(std::abs(z.location), 1.0);
        }
    }
}

TEST(Census, DoubleRootCountedTwice) {
    CensusOptions options;
    options.compute_jensen = false;
    const ZeroCensus c =
        zero_census_of([](complex t) { return (t - 0.25) * (t - 0.25) * (t + 2.0); }, 0.5, options);
    EXPECT_EQ(c.winding_count, 2);
    ASSERT_EQ(c.zeros.size(), 2u);
    EXPECT_LT(std::abs(c.zeros[0].location - 0.25), 1e-6);
    EXPECT_LT(std::abs(c.zeros[1].location - 0.25), 1e-6);
}

TEST(Census, JensenRightHandSideForPolynomial) {
    // f = t - 0.1 at radius 0.2: rhs = ln(max_{|t| = 0.2 e^2} |f| / 0.1) / 2.
    const ZeroCensus c = zero_census_of([](complex t) { return t - 0.1; }, 0.2);
    const double expected = std::log((0.2 * std::exp(2.0) + 0.1) / 0.1) / 2.0;
    EXPECT_NEAR(c.jensen_rhs, expected, 1e-6);
    EXPECT_LE(c.winding_count, c.jensen_rhs);
}

TEST(Census, RequiresPositiveRadius) {
    EXPECT_THROW(zero_census_of([](complex t) { return t; }, 0.0), hdamp::domain_error);
}

TEST(AmplitudeCensus, ConstantAmplitudeHasNoZeros) {
    const PartialWaveSet pw(DimensionSpec(5), 100.0, {0.7 * I});
    const ZeroCensus c = zero_census(pw, 0.5, wide_context(1.0));
    EXPECT_EQ(c.winding_count, 0);
    EXPECT_TRUE(c.zeros.empty());
    const JensenCheck j = check_jensen(pw, 0.5, wide_context(1.0));
    EXPECT_TRUE(j.holds);
    EXPECT_EQ(j.count, 0);
    EXPECT_NEAR(j.rhs_numeric, 0.0, 1e-12);
}

TEST(AmplitudeCensus, LinearAmplitudeZero) {
    // f_0 = f_1 = i in D = 5: one zero at t = -5 s / 8.
    const double s = 100.0;
    const PartialWaveSet pw(DimensionSpec(5), s, {I, I});
    const BoundContext ctx = wide_context(1000.0);
    const ZeroCensus c = zero_census(pw, 70.0, ctx);
    EXPECT_EQ(c.winding_count, 1);
    ASSERT_EQ(c.zeros.size(), 1u);
    EXPECT_LT(std::abs(c.zeros[0].location - complex(-5.0 * s / 8.0)), 1e-8);

    const JensenCheck enclosing = check_jensen(pw, 70.0, ctx);
    EXPECT_EQ(enclosing.count, 1);
    EXPECT_TRUE(enclosing.holds);
    EXPECT_GE(enclosing.rhs_numeric, 1.0);

    const JensenCheck excluding = check_jensen(pw, 50.0, ctx);
    EXPECT_EQ(excluding.count, 0);
    EXPECT_TRUE(excluding.holds);
}

TEST(AmplitudeCensus, GrayDiskZeroFreeDisk) {
    const BoundContext ctx = wide_context(1.0);
    const double s = std::exp(6.0);
    const PartialWaveSet pw = build_model(GrayDisk{20}, s, DimensionSpec(5));
    const double radius = zero_free_radius(s, ctx).r0_max;
    const ZeroCensus c = zero_census(pw, radius, ctx);
    EXPECT_EQ(c.winding_count, 0);
    EXPECT_LE(c.winding_count, c.jensen_rhs);
}

TEST(AmplitudeCensus, Preconditions) {
    const PartialWaveSet pw(DimensionSpec(5), 100.0, {I, I});
    EXPECT_THROW(zero_census(pw, 1.0, wide_context(1.0)), hdamp::domain_error);
    const PartialWaveSet silent(DimensionSpec(5), 100.0, {complex(0.0), complex(0.0)});
    EXPECT_THROW(zero_census(silent, 0.5, wide_context(1.0)), hdamp::domain_error);
}

TEST(AmplitudeCensus, ClosedFormCountReported) {
    const BoundContext ctx = wide_context(1.0);
    const double s = std::exp(4.0);
    const PartialWaveSet pw = build_model(GrayDisk{10}, s, DimensionSpec(5));
    const JensenCheck j = check_jensen(pw, 0.2, ctx);
    EXPECT_NEAR(j.rhs_closed_form, jensen_count_bound(0.2, s, ctx, true), 1e-15);
    EXPECT_TRUE(j.holds);
}

TEST(AmplitudeCensus, SerializesToJson) {
    const PartialWaveSet pw(DimensionSpec(5), 100.0, {I, I});
    const json j = to_json(zero_census(pw, 70.0, wide_context(1000.0)));
    EXPECT_EQ(j.at("winding_count").get<int>(), 1);
    ASSERT_EQ(j.at("zeros").size(), 1u);
    EXPECT_NEAR(j.at("zeros")[0][0].get<double>(), -62.5, 1e-8);
    EXPECT_TRUE(j.at("unresolved").empty());
}
