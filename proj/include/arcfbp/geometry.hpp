#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "arcfbp/core.hpp"

namespace arcfbp {

enum class DetectorKind { FanCurved, FanStraight, ConeFlat, ConeCurved };

/// How the half fan-angle needed to cover the object is derived from R_m/R_o.
/// Arcsin is the exact tangent-ray angle; Arctan reproduces the looser value
/// used by the reference experiments (35.90 deg for R_m = sqrt(2)*256, R_o = 500).
enum class FanAngleRule { Arcsin, Arctan };

inline std::string_view to_string(DetectorKind k) {
    switch (k) {
        case DetectorKind::FanCurved: return "fan-curved";
        case DetectorKind::FanStraight: return "fan-straight";
        case DetectorKind::ConeFlat: return "cone-flat";
        case DetectorKind::ConeCurved: return "cone-curved";
    }
    return "?";
}

inline DetectorKind detector_kind_from_string(std::string_view s) {
    if (s == "fan-curved") return DetectorKind::FanCurved;
    if (s == "fan-straight") return DetectorKind::FanStraight;
    if (s == "cone-flat") return DetectorKind::ConeFlat;
    if (s == "cone-curved") return DetectorKind::ConeCurved;
    throw Error("unknown geometry '" + std::string(s) +
                "' (valid: fan-curved, fan-straight, cone-flat, cone-curved)");
}

inline std::string_view to_string(FanAngleRule r) { return r == FanAngleRule::Arcsin ? "arcsin" : "arctan"; }

inline FanAngleRule fan_angle_rule_from_string(std::string_view s) {
    if (s == "arcsin") return FanAngleRule::Arcsin;
    if (s == "arctan") return FanAngleRule::Arctan;
    throw Error("unknown fan-angle rule '" + std::string(s) + "' (valid: arcsin, arctan)");
}

/// Uniform grid symmetric about zero: coordinate(i) = (i - half) * step, i in [0, 2*half].
struct SampleAxis {
    int half = 0;
    double step = 1.0;

    [[nodiscard]] int count() const { return 2 * half + 1; }
    [[nodiscard]] double at(int index) const { return (index - half) * step; }
    [[nodiscard]] double extent() const { return half * step; }
    /// Continuous index of a coordinate (may fall outside [0, count-1]).
    [[nodiscard]] double index_of(double coord) const { return coord / step + half; }
};

inline constexpr bool is_cone(DetectorKind k) { return k == DetectorKind::ConeFlat || k == DetectorKind::ConeCurved; }
inline constexpr bool is_curved(DetectorKind k) { return k == DetectorKind::FanCurved || k == DetectorKind::ConeCurved; }

/// Circular source trajectory plus detector sampling.
///
/// The columns axis holds gamma (fan-curved, radians), u (fan-straight and
/// cone-flat, length) or alpha (cone-curved, radians). The rows axis holds w
/// for cone geometries and must have half = 0 for fan geometries.
/// Views are lambda_s = lambda_start + s * lambda_step for s = 0..P.
struct ScanGeometry {
    DetectorKind kind = DetectorKind::FanCurved;
    double trajectory_radius = 500.0;
    double object_radius = 256.0;
    double source_detector_distance = 1000.0;
    double lambda_start = 0.0;
    double lambda_end = kPi;
    double lambda_step = deg2rad(1.0);
    SampleAxis columns{360, deg2rad(0.1)};
    SampleAxis rows{0, 1.0};
    FanAngleRule fan_angle_rule = FanAngleRule::Arcsin;
    std::optional<double> gamma_max_override;

    /// P, the index of the last view.
    [[nodiscard]] int last_view() const {
        return static_cast<int>(std::lround((lambda_end - lambda_start) / lambda_step));
    }
    [[nodiscard]] int view_count() const { return last_view() + 1; }
    [[nodiscard]] double lambda_at(int s) const { return lambda_start + s * lambda_step; }

    /// Half fan-angle gamma_m needed to cover the object disk.
    [[nodiscard]] double gamma_max() const {
        if (gamma_max_override) return *gamma_max_override;
        const double ratio = object_radius / trajectory_radius;
        return fan_angle_rule == FanAngleRule::Arcsin ? std::asin(ratio) : std::atan(ratio);
    }

    /// Largest in-plane fan angle the detector records.
    [[nodiscard]] double detector_half_angle() const {
        if (is_curved(kind)) return columns.extent();
        return std::atan(columns.extent() / source_detector_distance);
    }

    /// Throws Error when an invariant does not hold.
    void validate() const {
        require(trajectory_radius > 0.0, "trajectory radius must be positive");
        require(object_radius > 0.0 && object_radius < trajectory_radius,
                "object radius must satisfy 0 < R_m < R_o");
        require(lambda_step > 0.0, "lambda step must be positive");
        require(lambda_start < lambda_end, "lambda start must be below lambda end");
        const int p = last_view();
        require(p >= 1, "scan must contain at least two views");
        require(std::abs(lambda_start + p * lambda_step - lambda_end) <= 1e-9,
                "lambda end must equal lambda start + P * lambda step");
        require(columns.half >= 1 && columns.step > 0.0, "detector columns must be a symmetric grid with positive step");
        if (kind != DetectorKind::FanCurved)
            require(source_detector_distance > 0.0, "source-detector distance must be positive");
        if (is_cone(kind)) {
            require(rows.half >= 1 && rows.step > 0.0, "cone detector rows must be a symmetric grid with positive step");
        } else {
            require(rows.half == 0, "fan geometries have a single detector row");
        }
        if (is_curved(kind)) require(columns.extent() < kPi / 2.0, "curved detector must stay within +-90 degrees");
        require(detector_half_angle() >= gamma_max() - 1e-12,
                "detector does not cover the object: half fan-angle " + std::to_string(rad2deg(detector_half_angle())) +
                    " deg < gamma_m " + std::to_string(rad2deg(gamma_max())) + " deg");
    }
};

// Trajectory frame: e0 is tangential (direction of increasing lambda), e1
// points from the source toward the rotation axis.
inline Vec2 tangent_dir(double lambda) { return {-std::sin(lambda), std::cos(lambda)}; }
inline Vec2 inward_dir(double lambda) { return {-std::cos(lambda), -std::sin(lambda)}; }

inline Vec2 source_position(double lambda, double radius) {
    return {radius * std::cos(lambda), radius * std::sin(lambda)};
}

inline Vec3 source_position_3d(double lambda, double radius) {
    return {radius * std::cos(lambda), radius * std::sin(lambda), 0.0};
}

/// Second trajectory point on the line through a(lambda0) and x, in [0, 2*pi).
///
/// Closed form for cos/sin of the far endpoint; atan2 resolves the quadrant
/// (equivalent to arccos with the sin < 0 reflection, but stable near 0 and pi).
inline double chord_far_endpoint(Vec2 x, double lambda0, double radius) {
    const double r2 = radius * radius;
    const double x2 = dot(x, x);
    require(x2 < r2, "chord endpoint requires a point strictly inside the trajectory circle");
    const double c0 = std::cos(lambda0);
    const double s0 = std::sin(lambda0);
    const double proj = x.x * radius * c0 + x.y * radius * s0;
    const double denom = radius * (r2 + x2 - 2.0 * proj);
    require(denom > 0.0, "chord endpoint undefined when x coincides with the source");
    const double num_c = radius * (x2 - r2) * c0 - 2.0 * x.x * (proj - r2);
    const double num_s = radius * (x2 - r2) * s0 - 2.0 * x.y * (proj - r2);
    return wrap_two_pi(std::atan2(num_s / denom, num_c / denom));
}

/// Fan angle of the ray from a(lambda) through x; the ray direction is
/// cos(g) * e1 + sin(g) * e0.
inline double fan_angle_of(Vec2 x, double lambda, double trajectory_radius) {
    return std::atan(dot(x, tangent_dir(lambda)) / (trajectory_radius + dot(x, inward_dir(lambda))));
}

/// Straight-detector coordinate of the ray from a(lambda) through x.
inline double detector_u_of(Vec2 x, double lambda, double trajectory_radius, double sdd) {
    return sdd * dot(x, tangent_dir(lambda)) / (trajectory_radius + dot(x, inward_dir(lambda)));
}

/// Detector position of the ray through a voxel. `transverse` is u (flat) or
/// alpha (curved); `depth` is v*, the distance along e_v from the source.
struct ConeCoords {
    double transverse = 0.0;
    double w = 0.0;
    double depth = 0.0;
};

inline ConeCoords cone_flat_coords(Vec3 x, double lambda, double trajectory_radius, double sdd) {
    const Vec2 p = xy(x);
    const double v = trajectory_radius + dot(p, inward_dir(lambda));
    return {sdd / v * dot(p, tangent_dir(lambda)), sdd / v * x.z, v};
}

inline ConeCoords cone_curved_coords(Vec3 x, double lambda, double trajectory_radius, double sdd) {
    const Vec2 p = xy(x);
    const double v = trajectory_radius + dot(p, inward_dir(lambda));
    const double alpha = std::atan(dot(p, tangent_dir(lambda)) / v);
    return {alpha, sdd * std::cos(alpha) / v * x.z, v};
}

/// A measured line: source angle, origin a(lambda) and unit direction.
struct Ray {
    double source_lambda = 0.0;
    Vec3 origin;
    Vec3 direction;
};

/// Ray recorded by detector sample (row, col) of view s.
inline Ray detector_ray(const ScanGeometry& g, int s, int row, int col) {
    const double lambda = g.lambda_at(s);
    const Vec2 t = tangent_dir(lambda);
    const Vec2 n = inward_dir(lambda);
    const double c = g.columns.at(col);
    const double d = g.source_detector_distance;
    Ray ray{lambda, source_position_3d(lambda, g.trajectory_radius), {}};
    switch (g.kind) {
        case DetectorKind::FanCurved: {
            ray.direction = {std::cos(c) * n.x + std::sin(c) * t.x, std::cos(c) * n.y + std::sin(c) * t.y, 0.0};
            break;
        }
        case DetectorKind::FanStraight: {
            const double len = std::hypot(c, d);
            ray.direction = {(c * t.x + d * n.x) / len, (c * t.y + d * n.y) / len, 0.0};
            break;
        }
        case DetectorKind::ConeFlat: {
            const double w = g.rows.at(row);
            const double len = std::sqrt(c * c + d * d + w * w);
            ray.direction = {(c * t.x + d * n.x) / len, (c * t.y + d * n.y) / len, w / len};
            break;
        }
        case DetectorKind::ConeCurved: {
            const double w = g.rows.at(row);
            const double len = std::hypot(d, w);
            const double a = d * std::sin(c);
            const double b = d * std::cos(c);
            ray.direction = {(a * t.x + b * n.x) / len, (a * t.y + b * n.y) / len, w / len};
            break;
        }
    }
    return ray;
}

}  // namespace arcfbp
