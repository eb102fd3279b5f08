#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "arcfbp/weighting.hpp"

using namespace arcfbp;

namespace {

ScanArc arc_deg(double end_deg, double step_deg = 1.0) {
    return {0.0, deg2rad(step_deg), static_cast<int>(std::lround(end_deg / step_deg))};
}

}  // namespace

TEST(ArcWeights, CellSharesAtChordEnds) {
    EXPECT_DOUBLE_EQ(arc_weight_first(0, 10.25), 1.0);
    EXPECT_DOUBLE_EQ(arc_weight_first(9, 10.25), 1.0);
    EXPECT_DOUBLE_EQ(arc_weight_first(10, 10.25), 0.25);
    EXPECT_DOUBLE_EQ(arc_weight_first(11, 10.25), 0.0);
    EXPECT_DOUBLE_EQ(arc_weight_second(10, 10.25), 0.0);
    EXPECT_DOUBLE_EQ(arc_weight_second(11, 10.25), 0.75);
    EXPECT_DOUBLE_EQ(arc_weight_second(12, 10.25), 1.0);
    // An integer chord end sits on a sample boundary.
    EXPECT_DOUBLE_EQ(arc_weight_first(10, 10.0), 0.0);
    EXPECT_DOUBLE_EQ(arc_weight_second(10, 10.0), 0.0);
}

TEST(ArcWeights, SumsEqualArcLengths) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-250.0, 250.0);
    const ScanArc arc = arc_deg(252.0);
    int tested = 0;
    while (tested < 200) {
        const Vec2 x{u(rng), u(rng)};
        if (norm(x) >= 256.0) continue;
        ++tested;
        const ChordSamples cs = chord_samples(x, arc, 500.0);
        double s1 = 0.0, s2 = 0.0;
        for (int s = 0; s <= arc.last; ++s) {
            s1 += arc_weight_first(s, cs.from_start);
            s2 += arc_weight_second(s, cs.from_end);
        }
        EXPECT_NEAR(s1, cs.from_start, 1e-9);
        EXPECT_NEAR(s2, arc.last - cs.from_end, 1e-9);
    }
}

TEST(ArcWeights, CentrePixelPartition) {
    const ScanArc arc = arc_deg(252.0);
    const ChordSamples cs = chord_samples({0.0, 0.0}, arc, 500.0);
    EXPECT_NEAR(cs.from_start, 180.0, 1e-9);
    EXPECT_NEAR(cs.from_end, 72.0, 1e-9);
    for (int s = 0; s <= arc.last; ++s) {
        if (s == 72 || s == 180) continue;  // interpolation cells
        const double expect = s < 72 ? 0.5 : (s < 180 ? 1.0 : 0.5);
        EXPECT_EQ(arc_weight({0.0, 0.0}, s, arc, 500.0, 256.0), expect) << s;
    }
}

TEST(ArcWeights, ConjugateViewsShareWeightOne) {
    // For the centre pixel the conjugate of view s is view s + 180.
    const ScanArc arc = arc_deg(252.0);
    for (int s = 0; s + 180 <= arc.last; ++s) {
        const double sum = arc_weight({0.0, 0.0}, s, arc, 500.0, 256.0) + arc_weight({0.0, 0.0}, s + 180, arc, 500.0, 256.0);
        EXPECT_NEAR(sum, 1.0, 1e-12) << s;
    }
}

TEST(ArcWeights, SuperShortScanSaturates) {
    // A 180 degree scan: pixels off the diameter x.e0(0) = 0 have chord ends outside.
    const ScanArc arc = arc_deg(180.0);
    const Vec2 x{0.0, -150.0};
    const ChordSamples cs = chord_samples(x, arc, 500.0);
    EXPECT_EQ(cs.from_start, 180.0);
    EXPECT_EQ(cs.from_end, 0.0);
    for (int s = 1; s < arc.last; ++s) EXPECT_EQ(arc_weight(x, s, arc, 500.0, 256.0), 1.0);
    EXPECT_EQ(arc_weight(x, 0, arc, 500.0, 256.0), 0.5);
    EXPECT_EQ(arc_weight(x, arc.last, arc, 500.0, 256.0), 0.5);
}

TEST(ArcWeights, ConeWeightUsesPlaneProjection) {
    const ScanArc arc = arc_deg(220.0);
    const Vec3 x{30.0, -40.0, 25.0};
    for (int s : {0, 50, 150, 220})
        EXPECT_EQ(arc_weight_3d(x, s, arc, 1000.0, 256.0), arc_weight({30.0, -40.0}, s, arc, 1000.0, 256.0));
}

TEST(ArcWeights, RejectsPointsOutsideObject) {
    const ScanArc arc = arc_deg(252.0);
    EXPECT_THROW(arc_weight({300.0, 0.0}, 3, arc, 500.0, 256.0), Error);
    EXPECT_THROW(arc_weight({0.0, 0.0}, 300, arc, 500.0, 256.0), Error);
}

TEST(NooWeight, SmoothViewWeightShape) {
    const double d = deg2rad(6.0), a = 0.0, b = deg2rad(252.0);
    EXPECT_EQ(noo_c(a, a, b, d), 0.0);
    EXPECT_EQ(noo_c(b, a, b, d), 0.0);
    EXPECT_EQ(noo_c(deg2rad(100.0), a, b, d), 1.0);
    EXPECT_NEAR(noo_c(a + d / 2, a, b, d), 0.5, 1e-12);
    EXPECT_NEAR(noo_c(b - d / 2, a, b, d), 0.5, 1e-12);
    EXPECT_EQ(noo_c(-0.1, a, b, d), 0.0);
    EXPECT_NEAR(noo_c_periodic(kTwoPi + deg2rad(100.0), a, b, d), 1.0, 1e-12);
}

TEST(NooWeight, ConjugatePairsSumToOne) {
    const double a = 0.0, b = deg2rad(252.0), d = deg2rad(6.0), gm = std::asin(256.0 / 500.0);
    int checked = 0;
    for (int i = 0; i < 360; ++i)
        for (int j = 0; j <= 180; ++j) {
            const double l = a + (i + 0.5) * (b - a) / 360.0;
            const double phi = -gm + j * 2.0 * gm / 180.0;
            WeightDiagnostics diag;
            const double w = noo_weight(l, phi, a, b, d, &diag);
            const double wc = noo_weight(l + kPi - 2.0 * phi, -phi, a, b, d, &diag);
            ASSERT_EQ(diag.degenerate, 0u);
            EXPECT_NEAR(w + wc, 1.0, 1e-12);
            ++checked;
        }
    EXPECT_EQ(checked, 360 * 181);
}

TEST(NooWeight, DegenerateRaysAreCounted) {
    const double a = 0.0, b = kPi, d = deg2rad(6.0);
    WeightDiagnostics diag;
    // At lambda = 0 with phi = 0 the conjugate is lambda = pi: both c vanish.
    EXPECT_EQ(noo_weight(0.0, 0.0, a, b, d, &diag), 0.0);
    EXPECT_EQ(diag.degenerate, 1u);
}

TEST(ParkerWeight, ConjugatePairsSumToOne) {
    const double gm = std::asin(256.0 / 500.0);
    for (double range_deg : {180.0 + 2.0 * rad2deg(gm) + 1e-6, 252.0, 300.0}) {
        const ParkerWeight w(0.0, deg2rad(range_deg), gm);
        EXPECT_FALSE(w.clamped());
        for (int i = 0; i <= 400; ++i)
            for (int j = -29; j <= 29; ++j) {
                const double l = i * deg2rad(range_deg) / 400.0;
                const double g = j * gm / 30.0;
                const double lc = l + kPi - 2.0 * g;
                if (lc > deg2rad(range_deg)) {
                    // Conjugate not measured: the ray must carry full weight.
                    const double lc2 = l - kPi - 2.0 * g;
                    if (lc2 < 0.0) {
                        EXPECT_NEAR(w(l, g), 1.0, 1e-12) << range_deg << " " << i << " " << j;
                    }
                    continue;
                }
                EXPECT_NEAR(w(l, g) + w(lc, -g), 1.0, 1e-12) << range_deg << " " << i << " " << j;
            }
    }
}

TEST(ParkerWeight, FullAndSuperShortScans) {
    const double gm = std::asin(256.0 / 500.0);
    const ParkerWeight full(0.0, kTwoPi, gm);
    EXPECT_TRUE(full.full_scan());
    EXPECT_EQ(full(1.0, 0.2), 0.5);
    const ParkerWeight ss(0.0, kPi, gm);
    EXPECT_TRUE(ss.clamped());
    for (int i = 0; i <= 100; ++i) {
        const double v = ss(i * kPi / 100.0, 0.1);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    EXPECT_EQ(ss(-0.1, 0.0), 0.0);
}
