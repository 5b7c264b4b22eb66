#include <gtest/gtest.h>

#include <random>

#include "gazeflow/core.hpp"
#include "oracles.hpp"

using namespace gazeflow;

TEST(VisualAngle, ZeroAngleIsZeroPixels) {
    EXPECT_EQ(visual_angle_to_px(0.0, ScreenGeometry{}), 0.0);
    EXPECT_EQ(visual_angle_to_px(0.0, ScreenGeometry{300, 10, 100, 100}), 0.0);
}

TEST(VisualAngle, MatchesTrigOracleAtDefaultGeometry) {
    const ScreenGeometry g{600.0, 3.7795, 1280, 1024};
    EXPECT_NEAR(visual_angle_to_px(5.0, g), oracle::kFiveDegPx, 1e-9);
    EXPECT_NEAR(visual_angle_to_px(0.5, g), oracle::kHalfDegPx, 1e-9);
    EXPECT_NEAR(visual_angle_to_px(1.0, g), oracle::kOneDegPx, 1e-9);
    EXPECT_NEAR(visual_angle_to_px(5.0, g), 198.0, 0.05);
    EXPECT_NEAR(visual_angle_to_px(0.5, g), 19.8, 0.05);
}

TEST(VisualAngle, NegativeAngleRejected) {
    EXPECT_THROW(visual_angle_to_px(-0.1, ScreenGeometry{}), InvalidArgument);
}

TEST(VisualAngle, InverseRoundTrips) {
    const ScreenGeometry g{};
    for (double deg : {0.0, 0.5, 1.0, 5.0, 20.0, 45.0})
        EXPECT_NEAR(px_to_visual_angle(visual_angle_to_px(deg, g), g), deg, 1e-12);
}

TEST(VisualAngle, StrictlyIncreasingInAngleAndDistance) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> angle(0.0, 80.0), dist(100.0, 3000.0), ppm(1.0, 10.0);
    for (int i = 0; i < 2000; ++i) {
        const ScreenGeometry g{dist(rng), ppm(rng), 100, 100};
        const double a = angle(rng), b = a + 1e-3 + angle(rng) / 10.0;
        EXPECT_LT(visual_angle_to_px(a, g), visual_angle_to_px(b, g));
        const ScreenGeometry farther{g.viewing_distance_mm * 1.01, g.px_per_mm, 100, 100};
        if (a > 0) {
            EXPECT_LT(visual_angle_to_px(a, g), visual_angle_to_px(a, farther));
        }
    }
}

TEST(SamplesToMs, ThresholdCountsAtSixtyHz) {
    EXPECT_NEAR(samples_to_ms(10, 60), 166.67, 0.01);
    EXPECT_EQ(samples_to_ms(12, 60), 200.0);
    EXPECT_NEAR(samples_to_ms(4, 60), 66.67, 0.01);
    EXPECT_NEAR(samples_to_ms(22, 60), 366.67, 0.01);
    EXPECT_NEAR(samples_to_ms(4, 240), 16.67, 0.01);
}

TEST(SamplesToMs, AdditiveInCount) {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> n(0, 100000);
    std::uniform_real_distribution<double> rate(1.0, 2000.0);
    for (int i = 0; i < 5000; ++i) {
        const auto a = n(rng), b = n(rng);
        const double r = rate(rng);
        EXPECT_NEAR(samples_to_ms(a + b, r), samples_to_ms(a, r) + samples_to_ms(b, r), 1e-9 * (1 + samples_to_ms(a + b, r)));
    }
}

TEST(SamplesToMs, RejectsBadInput) {
    EXPECT_THROW(samples_to_ms(-1, 60), InvalidArgument);
    EXPECT_THROW(samples_to_ms(1, 0), InvalidArgument);
}

TEST(RescaleCount, SixtyToTwoForty) {
    EXPECT_EQ(rescale_count(10, 240), 40);
    EXPECT_EQ(rescale_count(12, 240), 48);
    EXPECT_EQ(rescale_count(22, 240), 88);
    EXPECT_EQ(rescale_count(10, 60), 10);
    EXPECT_EQ(rescale_count(1, 10), 1);
}

TEST(Geometry, ValidateRejectsNonPositive) {
    EXPECT_THROW((ScreenGeometry{0, 1, 1, 1}.validate()), InvalidArgument);
    EXPECT_THROW((StreamConfig{0.0, {}}.validate()), InvalidArgument);
    EXPECT_NO_THROW(ScreenGeometry{}.validate());
}

TEST(Rect, HalfOpenAndClosedContainment) {
    const Rect r{0, 0, 10, 10};
    EXPECT_TRUE(r.contains({0, 0}));
    EXPECT_FALSE(r.contains({10, 5}));
    EXPECT_TRUE(r.contains_closed({10, 5}));
    EXPECT_FALSE(r.overlaps(Rect{10, 0, 5, 5}));
    EXPECT_TRUE(r.overlaps(Rect{9, 9, 5, 5}));
}
