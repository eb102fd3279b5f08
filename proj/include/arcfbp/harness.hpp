#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "arcfbp/core.hpp"
#include "arcfbp/geometry.hpp"
#include "arcfbp/image.hpp"
#include "arcfbp/io.hpp"
#include "arcfbp/metrics.hpp"
#include "arcfbp/phantom.hpp"
#include "arcfbp/projector.hpp"
#include "arcfbp/recon.hpp"

namespace arcfbp::harness {

// ---------------------------------------------------------------------------
// Desk-scale defaults
// ---------------------------------------------------------------------------

/// Geometry with the default sampling for a detector kind: fan data on a
/// 500 mm trajectory with a +-36 deg detector over [0, 252] deg, cone data on a
/// 1000 mm trajectory (D = 1363 mm) over [0, 220] deg.
inline ScanGeometry default_geometry(DetectorKind kind) {
    ScanGeometry g;
    g.kind = kind;
    g.object_radius = 256.0;
    g.lambda_start = 0.0;
    g.lambda_step = deg2rad(1.0);
    if (!is_cone(kind)) {
        g.trajectory_radius = 500.0;
        g.source_detector_distance = 1000.0;
        g.lambda_end = deg2rad(252.0);
        g.columns = kind == DetectorKind::FanCurved ? SampleAxis{360, deg2rad(0.1)} : SampleAxis{416, 1.75};
        g.rows = {0, 1.0};
    } else {
        g.trajectory_radius = 1000.0;
        g.source_detector_distance = 1363.0;
        g.lambda_end = deg2rad(220.0);
        g.columns = kind == DetectorKind::ConeFlat ? SampleAxis{190, 2.0} : SampleAxis{190, 2.0 / 1363.0};
        g.rows = {30, 2.0};
    }
    return g;
}

inline Grid default_grid(DetectorKind kind) { return is_cone(kind) ? Grid{128, 128, 16, 4.0, 4.0} : Grid{}; }

// ---------------------------------------------------------------------------
// Option groups
// ---------------------------------------------------------------------------

struct GeometryOptions {
    std::string kind = "fan-curved";
    std::optional<double> trajectory_radius, object_radius, sdd;
    std::optional<double> lambda_start, lambda_end, lambda_step;
    std::optional<double> detector_step, row_step, gamma_max;
    std::optional<int> detector_half, row_half;
    std::string fan_angle_rule = "arcsin";

    void add_to(CLI::App* app) {
        app->add_option("--geometry", kind, "fan-curved | fan-straight | cone-flat | cone-curved")
            ->capture_default_str();
        app->add_option("--trajectory-radius", trajectory_radius, "source trajectory radius R_o (mm)");
        app->add_option("--object-radius", object_radius, "object radius R_m (mm)");
        app->add_option("--sdd", sdd, "source-detector distance D (mm)");
        app->add_option("--lambda-start", lambda_start, "first source angle (deg)");
        app->add_option("--lambda-end", lambda_end, "last source angle (deg)");
        app->add_option("--lambda-step", lambda_step, "source angle step (deg)");
        app->add_option("--detector-step", detector_step, "column step (deg for curved, mm for flat detectors)");
        app->add_option("--detector-half", detector_half, "columns on each side of the centre column");
        app->add_option("--row-step", row_step, "cone detector row step (mm)");
        app->add_option("--row-half", row_half, "cone detector rows on each side of the centre row");
        app->add_option("--fan-angle-rule", fan_angle_rule, "arcsin | arctan")->capture_default_str();
        app->add_option("--gamma-max", gamma_max, "explicit half fan-angle (deg)");
    }

    [[nodiscard]] ScanGeometry build() const {
        const DetectorKind k = detector_kind_from_string(kind);
        ScanGeometry g = default_geometry(k);
        if (trajectory_radius) g.trajectory_radius = *trajectory_radius;
        if (object_radius) g.object_radius = *object_radius;
        if (sdd) g.source_detector_distance = *sdd;
        if (lambda_start) g.lambda_start = deg2rad(*lambda_start);
        if (lambda_end) g.lambda_end = deg2rad(*lambda_end);
        if (lambda_step) g.lambda_step = deg2rad(*lambda_step);
        if (detector_step) g.columns.step = is_curved(k) ? deg2rad(*detector_step) : *detector_step;
        if (detector_half) g.columns.half = *detector_half;
        if (row_step) g.rows.step = *row_step;
        if (row_half) g.rows.half = *row_half;
        g.fan_angle_rule = fan_angle_rule_from_string(fan_angle_rule);
        if (gamma_max) g.gamma_max_override = deg2rad(*gamma_max);
        // Snap the end angle onto the sampling grid when it was given in degrees.
        const double p = std::round((g.lambda_end - g.lambda_start) / g.lambda_step);
        if (std::abs(g.lambda_start + p * g.lambda_step - g.lambda_end) <= 1e-9 * std::max(1.0, std::abs(g.lambda_end)))
            g.lambda_end = g.lambda_start + p * g.lambda_step;
        g.validate();
        return g;
    }
};

struct GridOptions {
    std::optional<int> nx, ny, nz;
    std::optional<double> spacing, spacing_z;

    void add_to(CLI::App* app) {
        app->add_option("--nx", nx, "grid columns");
        app->add_option("--ny", ny, "grid rows");
        app->add_option("--nz", nz, "grid slices");
        app->add_option("--spacing", spacing, "in-plane pixel spacing (mm)");
        app->add_option("--spacing-z", spacing_z, "slice spacing (mm)");
    }

    [[nodiscard]] Grid build(Grid g) const {
        if (nx) g.nx = *nx;
        if (ny) g.ny = *ny;
        if (nz) g.nz = *nz;
        if (spacing) g.spacing = *spacing;
        if (spacing_z) g.spacing_z = *spacing_z;
        g.validate();
        return g;
    }
};

struct NoiseOptions {
    std::string mode = "photon-count";
    double i0 = 1e6;
    double mean = 0.0;
    double variance = 0.0;
    std::uint64_t seed = 0;
    bool no_poisson = false;

    void add_to(CLI::App* app, bool with_variance = true) {
        app->add_option("--noise-mode", mode, "photon-count | paper-literal")->capture_default_str();
        app->add_option("--i0", i0, "incident photon count I0")->capture_default_str();
        app->add_option("--mean", mean, "Gaussian noise mean m")->capture_default_str();
        if (with_variance) app->add_option("--var", variance, "Gaussian noise variance")->capture_default_str();
        app->add_option("--seed", seed, "random seed")->capture_default_str();
        app->add_flag("--no-poisson", no_poisson, "disable the Poisson term");
    }

    [[nodiscard]] NoiseParams build(double var) const {
        NoiseParams p;
        p.mode = noise_mode_from_string(mode);
        p.i0 = i0;
        p.mean = mean;
        p.variance = var;
        p.poisson = !no_poisson;
        p.seed = seed;
        return p;
    }

    void describe(Metadata& m, const NoiseParams& p, const NoiseReport& r) const {
        m.set("noise_mode", to_string(p.mode));
        m.set("noise_i0", p.i0);
        m.set("noise_mean", p.mean);
        m.set("noise_variance", p.variance);
        m.set("noise_poisson", p.poisson ? "true" : "false");
        m.set("noise_seed", std::to_string(p.seed));
        m.set("noise_max_value", r.max_value);
        m.set("noise_clamped", r.clamped);
    }
};

struct ReconOptions {
    std::string algorithm = "arc";
    std::optional<double> d_ramp;
    std::optional<double> roi;
    std::string convolution = "direct";
    std::string ramp_window = "shepp-logan";

    void add_to(CLI::App* app) {
        app->add_option("--d-ramp", d_ramp, "ACE view-weight transition width d (deg)");
        app->add_option("--roi", roi, "reconstruction ROI radius (mm)");
        app->add_option("--convolution", convolution, "direct | fft")->capture_default_str();
        app->add_option("--ramp-window", ramp_window, "cfa/fdk ramp window: ram-lak | shepp-logan")
            ->capture_default_str();
    }

    [[nodiscard]] ReconConfig build(Algorithm alg, const Grid& grid, int workers) const {
        ReconConfig c;
        c.algorithm = alg;
        c.grid = grid;
        if (d_ramp) c.ramp_width = deg2rad(*d_ramp);
        c.roi_radius = roi;
        c.convolution = convolution_method_from_string(convolution);
        c.ramp_window = ramp_window_from_string(ramp_window);
        c.workers = workers;
        return c;
    }
};

inline void describe_recon(Metadata& m, const ReconConfig& c, const ScanGeometry& g, const ReconReport& r) {
    m.set("algorithm", to_string(c.algorithm));
    if (c.algorithm == Algorithm::Ace) m.set("d_ramp", c.ramp_width.value_or(default_ramp_width(g.kind)));
    if (c.algorithm == Algorithm::Cfa || c.algorithm == Algorithm::Fdk) m.set("ramp_window", to_string(c.ramp_window));
    m.set("convolution", to_string(c.convolution));
    m.set("roi_radius", c.roi_radius ? std::min(*c.roi_radius, g.object_radius) : g.object_radius);
    m.set("interpolation", "linear");
    m.set("truncated", r.truncated);
    m.set("degenerate_weights", r.degenerate);
    m.set("parker_clamped", r.parker_clamped ? "true" : "false");
}

/// Parses "x,y" into a point.
inline Vec2 parse_point(const std::string& s) {
    const auto comma = s.find(',');
    require(comma != std::string::npos, "expected a point 'x,y', got '" + s + "'");
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    require(end == s.c_str() + comma, "bad x coordinate in '" + s + "'");
    const char* ys = s.c_str() + comma + 1;
    const double y = std::strtod(ys, &end);
    require(end != ys && *end == '\0', "bad y coordinate in '" + s + "'");
    return {x, y};
}

inline Phantom default_phantom(const ScanGeometry& g) {
    return is_cone(g.kind) ? extrude(shepp_logan(2, g.object_radius), 0.8 * g.object_radius)
                           : shepp_logan(2, g.object_radius);
}

/// Default evaluation disk: the support of the default phantom.
inline double default_eval_radius(double object_radius) { return 0.9 * object_radius; }

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct Cli {
    CLI::App app{"Chord-arc weighted FBP reconstruction for fan-beam and circle cone-beam CT", "arcfbp"};
    std::ostream& out;
    int workers = 1;

    // phantom
    std::string ph_type = "shepp-logan", ph_in, ph_out, ph_truth;
    int ph_dim = 2, ph_supersample = 4;
    double ph_object_radius = 256.0, ph_radius = 0.0, ph_density = 1.0, ph_half_height = 0.0;
    GridOptions ph_grid;

    // project
    std::string pr_phantom, pr_out;
    GeometryOptions pr_geom;

    // noise
    std::string no_in, no_out;
    NoiseOptions no_opts;

    // recon
    std::string re_in, re_out, re_pgm, re_algorithm = "arc";
    std::optional<double> re_pgm_min, re_pgm_max;
    int re_pgm_slice = -1;
    GridOptions re_grid;
    ReconOptions re_opts;

    // eval
    std::string ev_recon, ev_truth, ev_out, ev_csv;
    std::optional<double> ev_roi;

    // profile
    std::string pf_image, pf_from, pf_to, pf_out;
    int pf_samples = 256, pf_slice = -1;

    // sweep
    std::string sw_phantom, sw_out;
    std::vector<double> sw_lambda_ends, sw_vars;
    std::vector<std::string> sw_algorithms{"arc", "ace"};
    std::optional<double> sw_eval_roi;
    GeometryOptions sw_geom;
    GridOptions sw_grid;
    ReconOptions sw_opts;
    NoiseOptions sw_noise;

    explicit Cli(std::ostream& o) : out(o) {
        app.require_subcommand(1);
        app.fallthrough();
        app.set_version_flag("--version", kVersion);
        app.add_option("--workers", workers, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);

        auto* ph = app.add_subcommand("phantom", "write a phantom definition file and optionally its rasterisation");
        ph->add_option("--type", ph_type, "shepp-logan | disk")->capture_default_str();
        ph->add_option("--in", ph_in, "existing phantom file to rasterise instead of generating one");
        ph->add_option("--dim", ph_dim, "2 or 3")->capture_default_str();
        ph->add_option("--object-radius", ph_object_radius, "object radius R_m (mm)")->capture_default_str();
        ph->add_option("--radius", ph_radius, "disk radius (mm, default 0.8 R_m)");
        ph->add_option("--density", ph_density, "disk density")->capture_default_str();
        ph->add_option("--half-height", ph_half_height,
                       "3D: extrude the 2D phantom to this z half-height instead of the ellipsoid head");
        ph->add_option("--out", ph_out, "phantom definition file to write");
        ph->add_option("--truth", ph_truth, "dataset base name for the rasterised phantom");
        ph->add_option("--supersample", ph_supersample, "samples per pixel axis")->capture_default_str();
        ph_grid.add_to(ph);
        ph->callback([this] { run_phantom(); });

        auto* pr = app.add_subcommand("project", "simulate projections of a phantom file");
        pr->add_option("--phantom", pr_phantom, "phantom definition file")->required();
        pr->add_option("--out", pr_out, "output dataset base name")->required();
        pr_geom.add_to(pr);
        pr->callback([this] { run_project(); });

        auto* no = app.add_subcommand("noise", "add Poisson and Gaussian noise to projections");
        no->add_option("--in", no_in, "input projection dataset")->required();
        no->add_option("--out", no_out, "output dataset base name")->required();
        no_opts.add_to(no);
        no->callback([this] { run_noise(); });

        auto* re = app.add_subcommand("recon", "reconstruct an image or volume from projections");
        re->add_option("--in", re_in, "input projection dataset")->required();
        re->add_option("--out", re_out, "output dataset base name")->required();
        re->add_option("--algorithm", re_algorithm, "arc | ace | cfa | fdk")->capture_default_str();
        re->add_option("--pgm", re_pgm, "also write an 8-bit PGM preview of one slice");
        re->add_option("--pgm-slice", re_pgm_slice, "preview slice (default: middle)");
        re->add_option("--pgm-min", re_pgm_min, "preview window minimum (default: image minimum)");
        re->add_option("--pgm-max", re_pgm_max, "preview window maximum (default: image maximum)");
        re_grid.add_to(re);
        re_opts.add_to(re);
        re->callback([this] { run_recon(); });

        auto* ev = app.add_subcommand("eval", "PSNR and SSIM of a reconstruction against the truth");
        ev->add_option("--recon", ev_recon, "reconstructed image dataset")->required();
        ev->add_option("--truth", ev_truth, "ground-truth image dataset")->required();
        ev->add_option("--roi", ev_roi, "evaluation disk radius (mm, default 0.9 R_m)");
        ev->add_option("--out", ev_out, "key=value report file");
        ev->add_option("--csv", ev_csv, "CSV report file");
        ev->callback([this] { run_eval(); });

        auto* pf = app.add_subcommand("profile", "sample an image along a line segment");
        pf->add_option("--image", pf_image, "image dataset")->required();
        pf->add_option("--from", pf_from, "start point x,y (mm)")->required();
        pf->add_option("--to", pf_to, "end point x,y (mm)")->required();
        pf->add_option("--samples", pf_samples, "number of samples")->capture_default_str();
        pf->add_option("--slice", pf_slice, "slice index (default: middle)");
        pf->add_option("--out", pf_out, "CSV output (default: stdout)");
        pf->callback([this] { run_profile(); });

        auto* sw = app.add_subcommand("sweep", "simulate, reconstruct and evaluate over scan ranges or noise levels");
        sw->add_option("--phantom", sw_phantom, "phantom definition file (default: Shepp-Logan)");
        sw->add_option("--lambda-ends", sw_lambda_ends, "scan end angles (deg)")->delimiter(',');
        sw->add_option("--vars", sw_vars, "Gaussian noise variances; omit for noiseless data")->delimiter(',');
        sw->add_option("--algorithms", sw_algorithms, "algorithms to compare")->delimiter(',')->capture_default_str();
        sw->add_option("--eval-roi", sw_eval_roi, "evaluation disk radius (mm, default 0.9 R_m)");
        sw->add_option("--out", sw_out, "CSV output (default: stdout)");
        sw_geom.add_to(sw);
        sw_grid.add_to(sw);
        sw_opts.add_to(sw);
        sw_noise.add_to(sw, false);
        sw->callback([this] { run_sweep(); });
    }

    // -- phantom ------------------------------------------------------------
    void run_phantom() {
        require(!ph_out.empty() || !ph_truth.empty(), "phantom: give --out and/or --truth");
        std::optional<Phantom> p;
        if (!ph_in.empty()) {
            p = parse_phantom(read_text_file(ph_in), ph_object_radius, ph_in);
        } else {
            require(ph_dim == 2 || ph_dim == 3, "phantom: --dim must be 2 or 3");
            if (ph_type == "shepp-logan") {
                if (ph_dim == 3 && ph_half_height > 0.0)
                    p = extrude(shepp_logan(2, ph_object_radius), ph_half_height);
                else
                    p = shepp_logan(ph_dim, ph_object_radius);
            } else if (ph_type == "disk") {
                const double r = ph_radius > 0.0 ? ph_radius : 0.8 * ph_object_radius;
                p = uniform_disk(2, r, ph_density, ph_object_radius);
                if (ph_dim == 3) p = ph_half_height > 0.0 ? extrude(*p, ph_half_height) : uniform_disk(3, r, ph_density, ph_object_radius);
            } else {
                throw Error("unknown phantom type '" + ph_type + "' (valid: shepp-logan, disk)");
            }
        }
        AtomicWriter w;
        if (!ph_out.empty()) w.add(ph_out, serialize_phantom(*p));
        if (!ph_truth.empty()) {
            Grid base = p->dim() == 3 ? default_grid(DetectorKind::ConeFlat) : default_grid(DetectorKind::FanCurved);
            const Grid grid = ph_grid.build(base);
            require(p->dim() == 3 || !grid.is_volume(), "phantom: a 2D phantom rasterises to nz = 1");
            const Image img = rasterize(*p, grid, ph_supersample);
            Metadata m;
            m.set("object_radius", p->object_radius());
            m.set("supersample", ph_supersample);
            m.set("phantom_dim", p->dim());
            m.set("content", "image");
            m.set("format", "f32le");
            m.set("layout", "z,y,x");
            m.set("version", kVersion);
            put_grid(m, grid);
            const auto paths = DatasetPaths::of(ph_truth);
            w.add(paths.raw, encode_f32le(img.data));
            w.add(paths.meta, m.serialize());
        }
        w.commit();
    }

    // -- project ------------------------------------------------------------
    void run_project() {
        const ScanGeometry g = pr_geom.build();
        const Phantom p = parse_phantom(read_text_file(pr_phantom), g.object_radius, pr_phantom);
        const Projections proj = simulate(p, g, workers);
        Metadata m;
        m.set("noise", "none");
        write_projections(pr_out, proj, m);
    }

    // -- noise --------------------------------------------------------------
    void run_noise() {
        auto in = read_projections(no_in);
        const NoiseParams params = no_opts.build(no_opts.variance);
        NoiseReport rep;
        const Projections noisy = add_noise(in.data, params, &rep, workers);
        Metadata m = in.meta;
        m.set("noise", "applied");
        no_opts.describe(m, params, rep);
        write_projections(no_out, noisy, m);
    }

    // -- recon --------------------------------------------------------------
    void run_recon() {
        auto in = read_projections(re_in);
        const ScanGeometry& g = in.data.geometry();
        const ReconConfig cfg = re_opts.build(algorithm_from_string(re_algorithm), re_grid.build(default_grid(g.kind)), workers);
        const Reconstruction r = reconstruct(in.data, cfg);
        Metadata m;
        for (const auto& [k, v] : in.meta.entries())
            if (k.rfind("noise", 0) == 0) m.set(k, v);
        put_geometry(m, g);
        m.set("object_radius", g.object_radius);
        describe_recon(m, cfg, g, r.report);
        m.set("content", "image");
        m.set("format", "f32le");
        m.set("layout", "z,y,x");
        m.set("version", kVersion);
        put_grid(m, r.image.grid);
        const auto paths = DatasetPaths::of(re_out);
        AtomicWriter w;
        w.add(paths.raw, encode_f32le(r.image.data));
        if (!re_pgm.empty()) {
            const int k = re_pgm_slice >= 0 ? re_pgm_slice : r.image.grid.nz / 2;
            require(k < r.image.grid.nz, "recon: --pgm-slice out of range");
            const Image s = r.image.slice(k);
            const auto [mn, mx] = std::minmax_element(s.data.begin(), s.data.end());
            const double lo = re_pgm_min.value_or(*mn);
            double hi = re_pgm_max.value_or(*mx);
            if (!(hi > lo)) hi = lo + 1.0;
            m.set("preview", re_pgm);
            m.set("preview_slice", k);
            m.set("preview_min", lo);
            m.set("preview_max", hi);
            w.add(re_pgm, encode_pgm(s, 0, lo, hi));
        }
        w.add(paths.meta, m.serialize());
        w.commit();
    }

    // -- eval ---------------------------------------------------------------
    void run_eval() {
        const auto rec = read_image(ev_recon);
        const auto truth = read_image(ev_truth);
        require(rec.image.grid == truth.image.grid,
                "eval: grid " + std::to_string(rec.image.grid.nx) + "x" + std::to_string(rec.image.grid.ny) + "x" +
                    std::to_string(rec.image.grid.nz) + " of the reconstruction does not match grid " +
                    std::to_string(truth.image.grid.nx) + "x" + std::to_string(truth.image.grid.ny) + "x" +
                    std::to_string(truth.image.grid.nz) + " of the truth");
        double rm = 256.0;
        if (truth.meta.has("object_radius")) rm = truth.meta.get_double("object_radius");
        else if (rec.meta.has("object_radius")) rm = rec.meta.get_double("object_radius");
        const EvalReport rep = evaluate(rec.image, truth.image, ev_roi.value_or(default_eval_radius(rm)), {}, workers);
        std::string kv = rep.to_key_value();
        if (rec.meta.has("algorithm")) kv = "algorithm=" + rec.meta.get("algorithm") + "\n" + kv;
        AtomicWriter w;
        if (!ev_out.empty()) w.add(ev_out, kv);
        if (!ev_csv.empty()) w.add(ev_csv, EvalReport::csv_header() + "\n" + rep.csv_row() + "\n");
        w.commit();
        out << kv;
    }

    // -- profile ------------------------------------------------------------
    void run_profile() {
        const auto img = read_image(pf_image);
        const int k = pf_slice >= 0 ? pf_slice : img.image.grid.nz / 2;
        const auto prof = line_profile(img.image, parse_point(pf_from), parse_point(pf_to), pf_samples, k);
        const std::string csv = profile_csv(prof);
        if (pf_out.empty())
            out << csv;
        else
            write_text_file(pf_out, csv);
    }

    // -- sweep --------------------------------------------------------------
    void run_sweep() {
        const ScanGeometry base = sw_geom.build();
        const Phantom p = sw_phantom.empty() ? default_phantom(base)
                                             : parse_phantom(read_text_file(sw_phantom), base.object_radius, sw_phantom);
        const Grid grid = sw_grid.build(default_grid(base.kind));
        const Image truth = rasterize(p, grid, 4);
        const double eval_roi = sw_eval_roi.value_or(default_eval_radius(base.object_radius));
        std::vector<double> ends = sw_lambda_ends;
        if (ends.empty()) ends.push_back(rad2deg(base.lambda_end));
        std::vector<Algorithm> algs;
        for (const auto& a : sw_algorithms) algs.push_back(algorithm_from_string(a));
        const bool noisy = !sw_vars.empty();
        const std::vector<double> vars = noisy ? sw_vars : std::vector<double>{0.0};

        std::string csv = "lambda_end_deg,variance,algorithm," + EvalReport::csv_header() + "\n";
        for (double end : ends) {
            GeometryOptions go = sw_geom;
            go.lambda_end = end;
            const ScanGeometry g = go.build();
            const Projections clean = simulate(p, g, workers);
            for (double var : vars) {
                const Projections data = noisy ? add_noise(clean, sw_noise.build(var), nullptr, workers) : clean;
                for (Algorithm a : algs) {
                    const Reconstruction r = reconstruct(data, sw_opts.build(a, grid, workers));
                    const EvalReport rep = evaluate(r.image, truth, eval_roi, {}, workers);
                    csv += Metadata::format_double(end) + "," + (noisy ? Metadata::format_double(var) : "none") + "," +
                           std::string(to_string(a)) + "," + rep.csv_row() + "\n";
                }
            }
        }
        if (sw_out.empty())
            out << csv;
        else
            write_text_file(sw_out, csv);
    }
};

/// Runs the command line `args` (without the program name). Returns the
/// process exit status; diagnostics go to `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    Cli cli(out);
    std::vector<const char*> argv{"arcfbp"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        cli.app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return cli.app.exit(e, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, out, err);
}

}  // namespace arcfbp::harness
