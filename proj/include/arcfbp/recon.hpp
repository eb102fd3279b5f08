#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arcfbp/core.hpp"
#include "arcfbp/filtering.hpp"
#include "arcfbp/geometry.hpp"
#include "arcfbp/image.hpp"
#include "arcfbp/parallel.hpp"
#include "arcfbp/projector.hpp"
#include "arcfbp/weighting.hpp"

namespace arcfbp {

enum class Algorithm {
    Arc,  ///< derivative + Hilbert filtering, chord-arc weights
    Ace,  ///< derivative + Hilbert filtering, smooth c(lambda) weights
    Cfa,  ///< equi-angular / flat ramp-filter fan FBP with Parker weights
    Fdk,  ///< Feldkamp cone-beam FBP with Parker weights
};

inline std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Arc: return "arc";
        case Algorithm::Ace: return "ace";
        case Algorithm::Cfa: return "cfa";
        case Algorithm::Fdk: return "fdk";
    }
    return "?";
}

inline Algorithm algorithm_from_string(std::string_view s) {
    if (s == "arc") return Algorithm::Arc;
    if (s == "ace") return Algorithm::Ace;
    if (s == "cfa") return Algorithm::Cfa;
    if (s == "fdk") return Algorithm::Fdk;
    throw Error("unknown algorithm '" + std::string(s) + "' (valid: arc, ace, cfa, fdk)");
}

inline double default_ramp_width(DetectorKind k) { return is_cone(k) ? deg2rad(10.0) : deg2rad(6.0); }

struct ReconConfig {
    Algorithm algorithm = Algorithm::Arc;
    Grid grid;
    /// Transition width d of the smooth view weight (ACE); geometry default when unset.
    std::optional<double> ramp_width;
    /// Pixels at or beyond this radius (and beyond R_m) are left at 0.
    std::optional<double> roi_radius;
    ConvolutionMethod convolution = ConvolutionMethod::Direct;
    /// Ramp apodization for the cfa and fdk baselines.
    RampWindow ramp_window = RampWindow::SheppLogan;
    int workers = 1;
};

struct ReconReport {
    std::size_t truncated = 0;   ///< weighted samples whose ray missed the detector
    std::size_t degenerate = 0;  ///< ACE rays with c + c_conjugate = 0
    bool parker_clamped = false; ///< scan shorter than pi + 2 gamma_m under a Parker weight
};

struct Reconstruction {
    Image image;
    ReconReport report;
};

/// Where the ray from a(lambda) through x meets the detector, with the
/// distances the backprojection weights need.
struct PointProjection {
    double column = 0.0;     ///< gamma, u or alpha
    double row = 0.0;        ///< w (0 for fan geometries)
    double depth = 0.0;      ///< R_o + x . e1, distance along the central ray
    double distance = 0.0;   ///< in-plane |x - a(lambda)|
    double fan_angle = 0.0;  ///< in-plane angle of the ray from the central ray
};

inline PointProjection project_point(const ScanGeometry& g, Vec3 x, double lambda) {
    const Vec2 p = xy(x);
    const double t = dot(p, tangent_dir(lambda));
    const double v = g.trajectory_radius + dot(p, inward_dir(lambda));
    const double dist = std::hypot(t, v);
    const double d = g.source_detector_distance;
    PointProjection out;
    out.depth = v;
    out.distance = dist;
    out.fan_angle = std::atan2(t, v);
    out.column = is_curved(g.kind) ? out.fan_angle : d * t / v;
    if (g.kind == DetectorKind::ConeFlat) out.row = d * x.z / v;
    if (g.kind == DetectorKind::ConeCurved) out.row = d * x.z / dist;
    return out;
}

/// Linear (fan) or bilinear (cone) detector interpolation; nullopt off the detector.
inline std::optional<double> sample_detector(const Projections& p, int s, double column, double row) {
    const ScanGeometry& g = p.geometry();
    const double ci = g.columns.index_of(column);
    const int cols = p.cols();
    if (!(ci >= 0.0 && ci <= cols - 1)) return std::nullopt;
    int c0 = static_cast<int>(std::floor(ci));
    if (c0 == cols - 1) c0 = cols - 2;
    const double fc = ci - c0;
    if (p.rows() == 1) {
        const double* r = p.row(s, 0);
        return (1.0 - fc) * r[c0] + fc * r[c0 + 1];
    }
    const double ri = g.rows.index_of(row);
    const int rows = p.rows();
    if (!(ri >= 0.0 && ri <= rows - 1)) return std::nullopt;
    int r0 = static_cast<int>(std::floor(ri));
    if (r0 == rows - 1) r0 = rows - 2;
    const double fr = ri - r0;
    const double* a = p.row(s, r0);
    const double* b = p.row(s, r0 + 1);
    return (1.0 - fr) * ((1.0 - fc) * a[c0] + fc * a[c0 + 1]) + fr * ((1.0 - fc) * b[c0] + fc * b[c0 + 1]);
}

namespace detail {

inline double effective_roi(const ScanGeometry& g, const ReconConfig& cfg) {
    double r = g.object_radius;
    if (cfg.roi_radius) r = std::min(r, *cfg.roi_radius);
    return r;
}

inline void check_grid(const ScanGeometry& g, const Grid& grid) {
    grid.validate();
    require(grid.half_extent() <= g.object_radius * (1.0 + 1e-12),
            "reconstruction grid extends beyond the object radius " + std::to_string(g.object_radius));
    require(is_cone(g.kind) || !grid.is_volume(), "fan geometries reconstruct 2D images (nz = 1)");
}

struct RowCounters {
    std::size_t truncated = 0;
    std::size_t degenerate = 0;
};

/// Shared backprojection loop. `pixel_weights(x)` returns a callable
/// (s, PointProjection, RowCounters&) -> weight giving the full per-view factor
/// (redundancy weight times distance weight); the sum over views in ascending
/// order is scaled by `prefactor`. Only pixels with |x_xy| < roi are visited.
template <class PixelWeights>
Image backproject(const Projections& data, const Grid& grid, double roi, double prefactor, int workers,
                  ReconReport& report, PixelWeights&& pixel_weights) {
    const ScanGeometry& g = data.geometry();
    Image img(grid);
    const int lines = grid.ny * grid.nz;
    std::vector<RowCounters> counters(static_cast<std::size_t>(lines));
    parallel_for(static_cast<std::size_t>(lines), workers, [&](std::size_t line) {
        const int j = static_cast<int>(line) % grid.ny;
        const int k = static_cast<int>(line) / grid.ny;
        RowCounters& rc = counters[line];
        for (int i = 0; i < grid.nx; ++i) {
            const Vec3 x = grid.center(i, j, k);
            if (x.x * x.x + x.y * x.y >= roi * roi) continue;
            auto weight = pixel_weights(x);
            double acc = 0.0;
            for (int s = 0; s < data.views(); ++s) {
                const PointProjection pp = project_point(g, x, g.lambda_at(s));
                const double w = weight(s, pp, rc);
                if (w == 0.0) continue;
                const auto v = sample_detector(data, s, pp.column, pp.row);
                if (!v) {
                    ++rc.truncated;
                    continue;
                }
                acc += w * *v;
            }
            img.at(i, j, k) = prefactor * acc;
        }
    });
    for (const auto& rc : counters) {
        report.truncated += rc.truncated;
        report.degenerate += rc.degenerate;
    }
    return img;
}

/// 1/|x - a| for curved detectors, 1/(R_o + x . e1) for flat ones.
inline double hilbert_distance_factor(const ScanGeometry& g, const PointProjection& pp) {
    return is_curved(g.kind) ? 1.0 / pp.distance : 1.0 / pp.depth;
}

/// 1/L^2 for curved detectors, R_o D / (R_o + x . e1)^2 for flat ones.
inline double ramp_distance_factor(const ScanGeometry& g, const PointProjection& pp) {
    if (is_curved(g.kind)) return 1.0 / (pp.distance * pp.distance);
    return g.trajectory_radius * g.source_detector_distance / (pp.depth * pp.depth);
}

/// -dlambda/(2 pi) for fan data, +dlambda/(2 pi) for cone data; the cone
/// Hilbert step already carries the opposite sign.
inline double hilbert_prefactor(const ScanGeometry& g) {
    return (is_cone(g.kind) ? 1.0 : -1.0) * g.lambda_step / kTwoPi;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Chord-arc (proposed) backprojection
// ---------------------------------------------------------------------------

/// Weighted backprojection of Hilbert-filtered data with the chord-arc weight.
/// Works for all four geometries; cone data use the weight of the voxel's
/// projection onto the trajectory plane.
inline Reconstruction backproject_arc(const FilteredViews& g2, const ReconConfig& cfg) {
    require(g2.stage == FilterStage::Hilbert, "backprojection expects Hilbert-filtered data");
    const ScanGeometry& g = g2.data.geometry();
    detail::check_grid(g, cfg.grid);
    const ScanArc arc = ScanArc::of(g);
    Reconstruction out;
    out.image = detail::backproject(
        g2.data, cfg.grid, detail::effective_roi(g, cfg), detail::hilbert_prefactor(g), cfg.workers, out.report,
        [&](Vec3 x) {
            const ChordSamples cs = chord_samples(xy(x), arc, g.trajectory_radius);
            return [&g, cs](int s, const PointProjection& pp, detail::RowCounters&) {
                const double w = arc_weights_at(s, cs).combined();
                return w == 0.0 ? 0.0 : w * detail::hilbert_distance_factor(g, pp);
            };
        });
    return out;
}

inline Reconstruction reconstruct_arc(const Projections& proj, const ReconConfig& cfg) {
    proj.geometry().validate();
    return backproject_arc(filter_projections(proj, cfg.convolution, cfg.workers), cfg);
}

// ---------------------------------------------------------------------------
// ACE: same filtering, smooth view weight w(lambda, phi*)
// ---------------------------------------------------------------------------

inline Reconstruction backproject_ace(const FilteredViews& g2, const ReconConfig& cfg) {
    require(g2.stage == FilterStage::Hilbert, "backprojection expects Hilbert-filtered data");
    const ScanGeometry& g = g2.data.geometry();
    detail::check_grid(g, cfg.grid);
    const double d = cfg.ramp_width.value_or(default_ramp_width(g.kind));
    const double start = g.lambda_start;
    const double end = g.lambda_at(g.last_view());
    require(d > 0.0 && d < 0.5 * (end - start), "ACE ramp width d must satisfy 0 < d < (lambda_P - lambda_0)/2");
    require(end - start <= kTwoPi + 1e-9, "ACE weights need a scan of at most one turn");
    Reconstruction out;
    out.image = detail::backproject(
        g2.data, cfg.grid, detail::effective_roi(g, cfg), detail::hilbert_prefactor(g), cfg.workers, out.report,
        [&](Vec3) {
            return [&g, start, end, d](int s, const PointProjection& pp, detail::RowCounters& rc) {
                WeightDiagnostics diag;
                const double w = noo_weight(g.lambda_at(s), pp.fan_angle, start, end, d, &diag);
                rc.degenerate += diag.degenerate;
                return w == 0.0 ? 0.0 : w * detail::hilbert_distance_factor(g, pp);
            };
        });
    return out;
}

inline Reconstruction reconstruct_ace(const Projections& proj, const ReconConfig& cfg) {
    proj.geometry().validate();
    return backproject_ace(filter_projections(proj, cfg.convolution, cfg.workers), cfg);
}

// ---------------------------------------------------------------------------
// Ramp-filter baselines
//
// Prefilter q = Parker(lambda, phi) * c(column, row) * g, then a row-wise ramp
// convolution with quadrature step, then backprojection with step dlambda:
//   curved detectors: c = R_o cos(gamma) (times D / sqrt(D^2 + w^2) for cone),
//                     kernel h(n tau) (n tau / sin(n tau))^2, factor 1 / L^2
//   flat detectors:   c = D / sqrt(D^2 + u^2 + w^2), kernel h(n tau),
//                     factor R_o D / (R_o + x . e1)^2
// where h is the Ram-Lak or Shepp-Logan ramp (see ramp_kernel_table).
// ---------------------------------------------------------------------------

/// Parker-weighted, ramp-filtered projections Q.
inline Projections ramp_filter(const Projections& proj, const ParkerWeight& parker, RampWindow window,
                               ConvolutionMethod method, int workers) {
    const ScanGeometry& g = proj.geometry();
    const int rows = proj.rows();
    const int cols = proj.cols();
    const double d = g.source_detector_distance;
    const bool curved = is_curved(g.kind);
    std::vector<double> kernel = ramp_kernel_table(cols, g.columns.step, curved, window);
    for (double& k : kernel) k *= g.columns.step;
    const RowConvolver conv(std::move(kernel), cols, method);

    std::vector<double> prewt(static_cast<std::size_t>(rows) * cols);
    std::vector<double> angle(static_cast<std::size_t>(cols));
    for (int j = 0; j < cols; ++j) {
        const double c = g.columns.at(j);
        angle[j] = curved ? c : std::atan(c / d);
    }
    for (int k = 0; k < rows; ++k) {
        const double w = g.rows.at(k);
        for (int j = 0; j < cols; ++j) {
            const double c = g.columns.at(j);
            double f = 0.0;
            if (curved)
                f = g.trajectory_radius * std::cos(c) * (is_cone(g.kind) ? d / std::hypot(d, w) : 1.0);
            else
                f = d / std::sqrt(d * d + c * c + w * w);
            prewt[static_cast<std::size_t>(k) * cols + j] = f;
        }
    }

    Projections out(g);
    parallel_for(static_cast<std::size_t>(proj.views()), workers, [&](std::size_t sv) {
        const int s = static_cast<int>(sv);
        const double lambda = g.lambda_at(s);
        std::vector<double> pw(static_cast<std::size_t>(cols));
        for (int j = 0; j < cols; ++j) pw[j] = parker(lambda, angle[j]);
        auto ws = conv.workspace();
        std::vector<double> buf(static_cast<std::size_t>(cols));
        for (int k = 0; k < rows; ++k) {
            const double* src = proj.row(s, k);
            const double* f = prewt.data() + static_cast<std::size_t>(k) * cols;
            for (int j = 0; j < cols; ++j) buf[j] = src[j] * f[j] * pw[j];
            conv.apply(buf.data(), out.row(s, k), ws);
        }
    });
    return out;
}

inline Reconstruction backproject_ramp(const Projections& q, const ReconConfig& cfg) {
    const ScanGeometry& g = q.geometry();
    detail::check_grid(g, cfg.grid);
    Reconstruction out;
    out.image = detail::backproject(q, cfg.grid, detail::effective_roi(g, cfg), g.lambda_step, cfg.workers,
                                    out.report, [&](Vec3) {
                                        return [&g](int, const PointProjection& pp, detail::RowCounters&) {
                                            return detail::ramp_distance_factor(g, pp);
                                        };
                                    });
    return out;
}

/// Conventional fan-beam FBP (curved or straight detector).
inline Reconstruction reconstruct_cfa(const Projections& proj, const ReconConfig& cfg) {
    const ScanGeometry& g = proj.geometry();
    g.validate();
    require(!is_cone(g.kind), "cfa reconstructs fan-beam data; use fdk for cone-beam data");
    const ParkerWeight parker = ParkerWeight::of(g);
    Reconstruction out = backproject_ramp(ramp_filter(proj, parker, cfg.ramp_window, cfg.convolution, cfg.workers), cfg);
    out.report.parker_clamped = parker.clamped();
    return out;
}

/// Feldkamp-Davis-Kress cone-beam FBP (flat or curved detector).
inline Reconstruction reconstruct_fdk(const Projections& proj, const ReconConfig& cfg) {
    const ScanGeometry& g = proj.geometry();
    g.validate();
    require(is_cone(g.kind), "fdk reconstructs cone-beam data; use cfa for fan-beam data");
    const ParkerWeight parker = ParkerWeight::of(g);
    Reconstruction out = backproject_ramp(ramp_filter(proj, parker, cfg.ramp_window, cfg.convolution, cfg.workers), cfg);
    out.report.parker_clamped = parker.clamped();
    return out;
}

inline Reconstruction reconstruct(const Projections& proj, const ReconConfig& cfg) {
    switch (cfg.algorithm) {
        case Algorithm::Arc: return reconstruct_arc(proj, cfg);
        case Algorithm::Ace: return reconstruct_ace(proj, cfg);
        case Algorithm::Cfa: return reconstruct_cfa(proj, cfg);
        case Algorithm::Fdk: return reconstruct_fdk(proj, cfg);
    }
    throw Error("unknown algorithm");
}

}  // namespace arcfbp
