#include <gtest/gtest.h>

#include <cmath>

#include "arcfbp/projector.hpp"

using namespace arcfbp;

namespace {

ScanGeometry fan(DetectorKind kind = DetectorKind::FanCurved) {
    ScanGeometry g;
    g.kind = kind;
    g.lambda_end = deg2rad(40.0);
    g.lambda_step = deg2rad(2.0);
    if (kind == DetectorKind::FanStraight) g.columns = {200, 4.0};
    return g;
}

double disk_projection(double radius, double density, double distance) {
    return distance < radius ? 2.0 * density * std::sqrt(radius * radius - distance * distance) : 0.0;
}

}  // namespace

TEST(Simulate, CentredDiskMatchesClosedForm) {
    const ScanGeometry g = fan();
    const Projections p = simulate(uniform_disk(2, 200.0, 1.0, 256.0), g, 2);
    ASSERT_EQ(p.views(), 21);
    ASSERT_EQ(p.rows(), 1);
    ASSERT_EQ(p.cols(), 721);
    for (int s = 0; s < p.views(); ++s)
        for (int j = 0; j < p.cols(); ++j) {
            const double dist = g.trajectory_radius * std::abs(std::sin(g.columns.at(j)));
            EXPECT_NEAR(p.at(s, 0, j), disk_projection(200.0, 1.0, dist), 1e-10);
        }
}

TEST(Simulate, OffCentreDiskUsesRayDistance) {
    const ScanGeometry g = fan();
    Ellipsoid e;
    e.center = {60.0, -40.0, 0.0};
    e.semi_axes = {90.0, 90.0, 1.0};
    e.density = 0.7;
    const Projections p = simulate(Phantom(2, {e}, 256.0), g);
    for (int s = 0; s < p.views(); s += 5)
        for (int j = 0; j < p.cols(); j += 11) {
            const Ray r = detector_ray(g, s, 0, j);
            const Vec2 rel = Vec2{60.0, -40.0} - xy(r.origin);
            const double dist = std::abs(cross({r.direction.x, r.direction.y}, rel));
            EXPECT_NEAR(p.at(s, 0, j), disk_projection(90.0, 0.7, dist), 1e-10);
        }
}

TEST(Simulate, StraightDetectorResamplesCurvedOne) {
    const ScanGeometry gs = fan(DetectorKind::FanStraight);
    ScanGeometry gc = fan();
    const Phantom sl = shepp_logan(2, 256.0);
    const Projections ps = simulate(sl, gs);
    for (int j : {13, 200, 333}) {
        // Column u of the straight detector sees fan angle atan(u / D).
        gc.columns = {1, std::atan(gs.columns.at(j) / gs.source_detector_distance)};
        gc.gamma_max_override = 0.0;
        const Ray r = detector_ray(gc, 7, 0, 2);
        EXPECT_NEAR(ps.at(7, 0, j), sl.line_integral(r), 1e-10);
    }
}

TEST(Simulate, ConeMidRowMatchesFan) {
    ScanGeometry gc = fan(DetectorKind::ConeFlat);
    gc.columns = {200, 4.0};
    gc.rows = {3, 5.0};
    const ScanGeometry gf = fan(DetectorKind::FanStraight);
    const Phantom flat = shepp_logan(2, 256.0);
    const Projections pc = simulate(extrude(flat, 150.0), gc);
    const Projections pf = simulate(flat, gf);
    for (int s = 0; s < pc.views(); s += 4)
        for (int j = 0; j < pc.cols(); ++j) EXPECT_NEAR(pc.at(s, 3, j), pf.at(s, 0, j), 1e-9);
}

TEST(Simulate, RejectsMismatchedPhantoms) {
    ScanGeometry cone = fan(DetectorKind::ConeFlat);
    cone.columns = {200, 4.0};
    cone.rows = {3, 5.0};
    EXPECT_THROW(simulate(shepp_logan(2, 256.0), cone), Error);
    EXPECT_THROW(simulate(shepp_logan(3, 256.0), fan()), Error);
    EXPECT_THROW(simulate(uniform_disk(2, 10.0, 1.0, 300.0), fan()), Error);
}

TEST(Simulate, WorkerCountDoesNotChangeResult) {
    const ScanGeometry g = fan();
    const Phantom sl = shepp_logan(2, 256.0);
    EXPECT_EQ(simulate(sl, g, 1).values(), simulate(sl, g, 5).values());
}

TEST(Noise, InactiveModelIsIdentity) {
    const Projections p = simulate(shepp_logan(2, 256.0), fan());
    NoiseParams params;
    params.poisson = false;
    NoiseReport rep;
    const Projections q = add_noise(p, params, &rep);
    EXPECT_EQ(q.values(), p.values());
    EXPECT_GT(rep.max_value, 0.0);
    EXPECT_EQ(rep.clamped, 0u);
}

TEST(Noise, DeterministicAcrossWorkersAndSeeds) {
    const Projections p = simulate(shepp_logan(2, 256.0), fan());
    NoiseParams params;
    params.variance = 10.0;
    params.seed = 42;
    const Projections a = add_noise(p, params, nullptr, 1);
    const Projections b = add_noise(p, params, nullptr, 7);
    EXPECT_EQ(a.values(), b.values());
    params.seed = 43;
    EXPECT_NE(add_noise(p, params).values(), a.values());
}

TEST(Noise, PhotonCountIsUnbiasedAtHighDose) {
    const Projections p = simulate(uniform_disk(2, 200.0, 1.0, 256.0), fan());
    NoiseParams params;
    params.i0 = 1e8;
    const Projections q = add_noise(p, params);
    double max_dev = 0.0, mean_dev = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = q.values()[i] - p.values()[i];
        max_dev = std::max(max_dev, std::abs(d));
        mean_dev += d;
    }
    mean_dev /= static_cast<double>(p.size());
    // Relative std of counts is at most sqrt(e / I0); M = 400.
    EXPECT_LT(max_dev, 400.0 * 6.0 * std::sqrt(std::exp(1.0) / 1e8));
    EXPECT_LT(std::abs(mean_dev), 0.05);
}

TEST(Noise, SpreadGrowsWithVariance) {
    const Projections p = simulate(uniform_disk(2, 200.0, 1.0, 256.0), fan());
    double prev = 0.0;
    for (double var : {1.0, 10.0, 100.0, 200.0}) {
        NoiseParams params;
        params.variance = var;
        params.seed = 3;
        const Projections q = add_noise(p, params);
        double ss = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) ss += std::pow(q.values()[i] - p.values()[i], 2);
        const double rms = std::sqrt(ss / static_cast<double>(p.size()));
        EXPECT_GT(rms, prev) << var;
        prev = rms;
    }
}

TEST(Noise, NonPositiveCountsAreClampedAndReported) {
    const Projections p = simulate(uniform_disk(2, 200.0, 1.0, 256.0), fan());
    NoiseParams params;
    params.i0 = 10.0;
    params.mean = -5.0;
    params.poisson = false;
    NoiseReport rep;
    const Projections q = add_noise(p, params, &rep);
    EXPECT_EQ(rep.clamped, p.size());
    for (double v : q.values()) EXPECT_NEAR(v, rep.max_value * std::log(1.0 / params.min_transmission), 1e-9);
}

TEST(Noise, ModeNamesRoundTrip) {
    for (auto m : {NoiseMode::PhotonCount, NoiseMode::PaperLiteral}) EXPECT_EQ(noise_mode_from_string(to_string(m)), m);
    EXPECT_THROW(noise_mode_from_string("gamma"), Error);
    NoiseParams bad;
    bad.i0 = 0.0;
    EXPECT_THROW(add_noise(Projections(fan()), bad), Error);
}
