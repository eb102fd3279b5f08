#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "arcfbp/geometry.hpp"

using namespace arcfbp;

namespace {

// Independent line/circle intersection: a0 + t (x - a0) with |.| = R, t != 0.
Vec2 chord_end_by_quadratic(Vec2 x, double lambda0, double r) {
    const Vec2 a0 = source_position(lambda0, r);
    const Vec2 d = x - a0;
    const double t = -2.0 * dot(a0, d) / dot(d, d);
    return a0 + t * d;
}

ScanGeometry fan_curved() {
    ScanGeometry g;
    g.kind = DetectorKind::FanCurved;
    g.lambda_end = deg2rad(252.0);
    return g;
}

}  // namespace

TEST(SampleAxis, CoordinatesAreSymmetric) {
    const SampleAxis a{360, 0.1};
    EXPECT_EQ(a.count(), 721);
    EXPECT_DOUBLE_EQ(a.at(360), 0.0);
    EXPECT_DOUBLE_EQ(a.at(0), -36.0);
    EXPECT_DOUBLE_EQ(a.at(720), 36.0);
    EXPECT_NEAR(a.index_of(a.at(123)), 123.0, 1e-12);
    EXPECT_DOUBLE_EQ(a.extent(), 36.0);
}

TEST(ScanGeometry, DefaultFanSetupValidates) {
    ScanGeometry g = fan_curved();
    EXPECT_NO_THROW(g.validate());
    EXPECT_EQ(g.view_count(), 253);
    EXPECT_EQ(g.last_view(), 252);
    EXPECT_NEAR(g.lambda_at(252), deg2rad(252.0), 1e-12);
}

TEST(ScanGeometry, FanAngleRules) {
    ScanGeometry g = fan_curved();
    g.object_radius = std::sqrt(2.0) * 256.0;
    g.fan_angle_rule = FanAngleRule::Arctan;
    // Published value for R_m = sqrt(2) * 256, R_o = 500, printed to two decimals.
    EXPECT_NEAR(rad2deg(g.gamma_max()), 35.90, 0.01);
    g.fan_angle_rule = FanAngleRule::Arcsin;
    EXPECT_NEAR(g.gamma_max(), std::asin(g.object_radius / 500.0), 1e-15);
    g.gamma_max_override = 0.5;
    EXPECT_DOUBLE_EQ(g.gamma_max(), 0.5);
}

TEST(ScanGeometry, RejectsInvalidSetups) {
    {
        ScanGeometry g = fan_curved();
        g.object_radius = 600.0;
        EXPECT_THROW(g.validate(), Error);
    }
    {
        ScanGeometry g = fan_curved();
        g.columns = {100, deg2rad(0.1)};  // +-10 deg does not cover the object
        EXPECT_THROW(g.validate(), Error);
    }
    {
        ScanGeometry g = fan_curved();
        g.lambda_end = g.lambda_start + 10.5 * g.lambda_step;
        EXPECT_THROW(g.validate(), Error);
    }
    {
        ScanGeometry g = fan_curved();
        g.rows = {2, 1.0};
        EXPECT_THROW(g.validate(), Error);
    }
    {
        ScanGeometry g = fan_curved();
        g.kind = DetectorKind::ConeFlat;
        g.columns = {400, 2.0};
        g.rows = {0, 1.0};
        EXPECT_THROW(g.validate(), Error);
    }
}

TEST(DetectorKind, StringRoundTrip) {
    for (auto k : {DetectorKind::FanCurved, DetectorKind::FanStraight, DetectorKind::ConeFlat, DetectorKind::ConeCurved})
        EXPECT_EQ(detector_kind_from_string(to_string(k)), k);
    try {
        detector_kind_from_string("helical");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("fan-curved"), std::string::npos);
    }
}

TEST(Frame, OrthonormalAndInward) {
    for (double l : {0.0, 0.3, 2.0, 5.5}) {
        const Vec2 e0 = tangent_dir(l), e1 = inward_dir(l);
        EXPECT_NEAR(dot(e0, e1), 0.0, 1e-15);
        EXPECT_NEAR(norm(e0), 1.0, 1e-15);
        const Vec2 a = source_position(l, 500.0);
        // e1 points from the source to the origin.
        EXPECT_NEAR(norm(a + 500.0 * e1), 0.0, 1e-12);
        // e0 is the derivative direction of a(lambda).
        const Vec2 da = source_position(l + 1e-6, 500.0) - source_position(l - 1e-6, 500.0);
        EXPECT_NEAR(dot((1.0 / norm(da)) * da, e0), 1.0, 1e-9);
    }
}

TEST(ChordEndpoint, MatchesQuadraticOracle) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi), rad(0.0, 1.0);
    const double r = 500.0;
    for (int n = 0; n < 1000; ++n) {
        const double rho = 256.0 * std::sqrt(rad(rng));
        const double phi = ang(rng);
        const Vec2 x{rho * std::cos(phi), rho * std::sin(phi)};
        const double l0 = ang(rng);
        const double l1 = chord_far_endpoint(x, l0, r);
        EXPECT_GE(l1, 0.0);
        EXPECT_LT(l1, kTwoPi);
        const Vec2 oracle = chord_end_by_quadratic(x, l0, r);
        const Vec2 got = source_position(l1, r);
        EXPECT_NEAR(got.x, oracle.x, 1e-9 * r);
        EXPECT_NEAR(got.y, oracle.y, 1e-9 * r);
    }
}

TEST(ChordEndpoint, StableNearDiameters) {
    // Points on the diameter through a(lambda0) end exactly opposite.
    const double r = 500.0;
    for (double l0 : {0.0, kPi / 2, kPi, 1.0}) {
        const Vec2 x = 0.3 * source_position(l0, r);
        EXPECT_NEAR(std::remainder(chord_far_endpoint(x, l0, r) - (l0 + kPi), kTwoPi), 0.0, 1e-12);
        const Vec2 origin{0.0, 0.0};
        EXPECT_NEAR(std::remainder(chord_far_endpoint(origin, l0, r) - (l0 + kPi), kTwoPi), 0.0, 1e-12);
    }
    EXPECT_THROW(chord_far_endpoint({600.0, 0.0}, 0.0, r), Error);
}

TEST(FanAngle, RayThroughPointHitsDetectorAtAngle) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-180.0, 180.0), ang(0.0, kTwoPi);
    ScanGeometry g = fan_curved();
    for (int n = 0; n < 200; ++n) {
        const Vec2 x{u(rng), u(rng)};
        const double l = ang(rng);
        const double gamma = fan_angle_of(x, l, g.trajectory_radius);
        const Vec2 a = source_position(l, g.trajectory_radius);
        const Vec2 dir = std::cos(gamma) * inward_dir(l) + std::sin(gamma) * tangent_dir(l);
        EXPECT_NEAR(cross(dir, x - a), 0.0, 1e-9);
        EXPECT_GT(dot(dir, x - a), 0.0);
        EXPECT_NEAR(detector_u_of(x, l, g.trajectory_radius, 1000.0), 1000.0 * std::tan(gamma), 1e-9);
    }
}

TEST(ConeCoords, VoxelLiesOnDetectorRay) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-150.0, 150.0), z(-30.0, 30.0), ang(0.0, kTwoPi);
    const double ro = 1000.0, d = 1363.0;
    for (int n = 0; n < 200; ++n) {
        const Vec3 x{u(rng), u(rng), z(rng)};
        const double l = ang(rng);
        const Vec3 a = source_position_3d(l, ro);
        const Vec3 e0{tangent_dir(l).x, tangent_dir(l).y, 0.0};
        const Vec3 e1{inward_dir(l).x, inward_dir(l).y, 0.0};
        const Vec3 ez{0.0, 0.0, 1.0};
        const ConeCoords f = cone_flat_coords(x, l, ro, d);
        const Vec3 pf = a + f.transverse * e0 + d * e1 + f.w * ez;
        const Vec3 rel = x - a, dirf = pf - a;
        const double tf = dot(rel, dirf) / dot(dirf, dirf);
        EXPECT_NEAR(norm(rel - tf * dirf), 0.0, 1e-9);
        EXPECT_NEAR(f.depth, dot(rel, e1), 1e-9);

        const ConeCoords c = cone_curved_coords(x, l, ro, d);
        const Vec3 pc = a + d * std::sin(c.transverse) * e0 + d * std::cos(c.transverse) * e1 + c.w * ez;
        const Vec3 dirc = pc - a;
        const double tc = dot(rel, dirc) / dot(dirc, dirc);
        EXPECT_NEAR(norm(rel - tc * dirc), 0.0, 1e-9);
    }
}

TEST(DetectorRay, UnitDirectionsForAllKinds) {
    for (auto k : {DetectorKind::FanCurved, DetectorKind::FanStraight, DetectorKind::ConeFlat, DetectorKind::ConeCurved}) {
        ScanGeometry g = fan_curved();
        g.kind = k;
        if (k == DetectorKind::FanStraight) g.columns = {400, 2.0};
        if (is_cone(k)) {
            g.columns = k == DetectorKind::ConeFlat ? SampleAxis{400, 2.0} : SampleAxis{200, 0.003};
            g.rows = {10, 2.0};
        }
        ASSERT_NO_THROW(g.validate());
        for (int s : {0, 17, 100})
            for (int row = 0; row < g.rows.count(); row += 5)
                for (int col = 0; col < g.columns.count(); col += 37) {
                    const Ray r = detector_ray(g, s, row, col);
                    EXPECT_NEAR(norm(r.direction), 1.0, 1e-12);
                }
        // The centre column is the central ray through the rotation axis.
        const Ray c = detector_ray(g, 5, g.rows.half, g.columns.half);
        const Vec3 rel = Vec3{0, 0, 0} - c.origin;
        EXPECT_NEAR(dot(c.direction, rel), norm(rel), 1e-9);
    }
}
