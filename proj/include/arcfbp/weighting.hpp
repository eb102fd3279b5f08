#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "arcfbp/core.hpp"
#include "arcfbp/geometry.hpp"

namespace arcfbp {

/// Sampled source arc lambda_s = start + s * step, s = 0..last.
struct ScanArc {
    double start = 0.0;
    double step = deg2rad(1.0);
    int last = 180;

    [[nodiscard]] double end() const { return start + last * step; }
    [[nodiscard]] double range() const { return last * step; }

    static ScanArc of(const ScanGeometry& g) { return {g.lambda_start, g.lambda_step, g.last_view()}; }
};

// ---------------------------------------------------------------------------
// Chord-arc weights
//
// For a point x, the chord through a(lambda_0) and x ends at lambda(x, lambda_0);
// the first weight selects the source arc [lambda_0, lambda(x, lambda_0)]. The
// second selects [lambda(x, lambda_P), lambda_P]. Each arc alone reconstructs
// x; averaging them handles redundancy without any continuity requirement on
// the weight.
// ---------------------------------------------------------------------------

/// Fractional view indices s(x, lambda_0) and s(x, lambda_P), clamped into [0, P].
/// Clamping saturates a weight at 1 over the whole scan when the chord end
/// falls outside the measured arc (super-short scans).
struct ChordSamples {
    double from_start = 0.0;
    double from_end = 0.0;
};

inline ChordSamples chord_samples(Vec2 x, const ScanArc& arc, double trajectory_radius) {
    const double p = static_cast<double>(arc.last);
    const double far_start = chord_far_endpoint(x, arc.start, trajectory_radius);
    const double far_end = chord_far_endpoint(x, arc.end(), trajectory_radius);
    // Walk forward from lambda_0 and backward from lambda_P along the scan.
    const double lam1 = arc.start + wrap_two_pi(far_start - arc.start);
    const double lam2 = arc.end() - wrap_two_pi(arc.end() - far_end);
    return {std::clamp((lam1 - arc.start) / arc.step, 0.0, p), std::clamp((lam2 - arc.start) / arc.step, 0.0, p)};
}

/// varpi_1 at integer view s: the share of the cell [s, s+1] inside [0, s1],
/// so the weights sum to s1 (the arc length in samples).
inline double arc_weight_first(int s, double s1) { return std::clamp(s1 - s, 0.0, 1.0); }

/// varpi_2 at integer view s: the share of the cell [s-1, s] inside [s2, P].
inline double arc_weight_second(int s, double s2) { return std::clamp(s - s2, 0.0, 1.0); }

struct ArcWeights {
    double first = 0.0;
    double second = 0.0;
    [[nodiscard]] double combined() const { return 0.5 * (first + second); }
};

inline ArcWeights arc_weights_at(int s, const ChordSamples& cs) {
    return {arc_weight_first(s, cs.from_start), arc_weight_second(s, cs.from_end)};
}

inline ArcWeights arc_weight_components(Vec2 x, int s, const ScanArc& arc, double trajectory_radius,
                                        double object_radius) {
    require(norm(x) < object_radius, "arc weight requires |x| < R_m");
    require(s >= 0 && s <= arc.last, "view index outside the scan");
    return arc_weights_at(s, chord_samples(x, arc, trajectory_radius));
}

inline double arc_weight(Vec2 x, int s, const ScanArc& arc, double trajectory_radius, double object_radius) {
    return arc_weight_components(x, s, arc, trajectory_radius, object_radius).combined();
}

/// Cone-beam weight: the fan weight of x projected onto the trajectory plane.
inline double arc_weight_3d(Vec3 x, int s, const ScanArc& arc, double trajectory_radius, double object_radius) {
    return arc_weight(xy(x), s, arc, trajectory_radius, object_radius);
}

// ---------------------------------------------------------------------------
// Smooth view weight c(lambda) and the fan weight w = c / (c + c_conjugate)
// ---------------------------------------------------------------------------

/// cos^2 ramps of width d at both ends of [start, end], 1 in between, 0 outside.
inline double noo_c(double lambda, double start, double end, double d) {
    if (lambda <= start || lambda >= end) return 0.0;
    if (lambda < start + d) {
        const double c = std::cos(kPi * (lambda - start - d) / (2.0 * d));
        return c * c;
    }
    if (lambda > end - d) {
        const double c = std::cos(kPi * (lambda - end + d) / (2.0 * d));
        return c * c;
    }
    return 1.0;
}

/// noo_c evaluated 2*pi-periodically (the scan must not exceed one turn).
inline double noo_c_periodic(double lambda, double start, double end, double d) {
    return noo_c(start + wrap_two_pi(lambda - start), start, end, d);
}

struct WeightDiagnostics {
    std::size_t degenerate = 0;
};

/// w(lambda, phi) for a ray at in-plane fan angle phi. Its conjugate is measured
/// at lambda + pi - 2 phi. Returns 0 and counts the ray when neither
/// measurement carries weight.
inline double noo_weight(double lambda, double phi, double start, double end, double d,
                         WeightDiagnostics* diag = nullptr) {
    const double here = noo_c_periodic(lambda, start, end, d);
    const double there = noo_c_periodic(lambda + kPi - 2.0 * phi, start, end, d);
    const double denom = here + there;
    if (denom <= 0.0) {
        if (diag) ++diag->degenerate;
        return 0.0;
    }
    return here / denom;
}

// ---------------------------------------------------------------------------
// Parker short-scan weight with overscan generalization
// ---------------------------------------------------------------------------

/// Redundancy weight for ramp-filter baselines.
///
/// With scan range L = pi + 2*delta and beta = lambda - lambda_0, the weight
/// for fan angle gamma (conjugate ray at beta + pi - 2*gamma, -gamma) is
///
///   sin^2(pi/4 * beta / (delta + gamma))                  beta < 2(delta + gamma)
///   sin^2(pi/4 * (pi + 2 delta - beta) / (delta - gamma)) beta > pi + 2 gamma
///   1                                                     otherwise
///
/// For delta = gamma_m this is Parker's weight; larger delta spreads the
/// transitions over the extra data (the overscan extension). A full turn uses
/// the uniform weight 1/2. When delta < gamma_m the scan is incomplete and the
/// regions that would need negative widths are dropped, so the weight only
/// clamps; `clamped` reports this.
class ParkerWeight {
public:
    ParkerWeight(double lambda_start, double range, double gamma_max)
        : start_(lambda_start), range_(range), delta_(0.5 * (range - kPi)) {
        require(range > 0.0, "scan range must be positive");
        full_ = range >= kTwoPi - 1e-9;
        clamped_ = !full_ && delta_ < gamma_max;
    }

    static ParkerWeight of(const ScanGeometry& g) {
        return ParkerWeight(g.lambda_start, g.lambda_end - g.lambda_start, g.gamma_max());
    }

    [[nodiscard]] bool clamped() const { return clamped_; }
    [[nodiscard]] bool full_scan() const { return full_; }
    [[nodiscard]] double delta() const { return delta_; }

    [[nodiscard]] double operator()(double lambda, double gamma) const {
        const double beta = lambda - start_;
        if (beta < -1e-12 || beta > range_ + 1e-12) return 0.0;
        if (full_) return 0.5;
        const double lead = delta_ + gamma;
        const double trail = delta_ - gamma;
        if (lead > 0.0 && beta < 2.0 * lead) {
            const double s = std::sin(0.25 * kPi * std::max(beta, 0.0) / lead);
            return s * s;
        }
        if (trail > 0.0 && beta > kPi + 2.0 * gamma) {
            const double s = std::sin(0.25 * kPi * std::max(kPi + 2.0 * delta_ - beta, 0.0) / trail);
            return s * s;
        }
        return 1.0;
    }

private:
    double start_;
    double range_;
    double delta_;
    bool full_ = false;
    bool clamped_ = false;
};

}  // namespace arcfbp
