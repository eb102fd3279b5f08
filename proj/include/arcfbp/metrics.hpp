#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "arcfbp/core.hpp"
#include "arcfbp/image.hpp"
#include "arcfbp/parallel.hpp"

namespace arcfbp {

/// Pixel selection for metrics; an empty mask selects every pixel.
using RoiMask = std::vector<bool>;

namespace detail {

inline void check_same_shape(const Image& a, const Image& b) {
    require(a.grid.nx == b.grid.nx && a.grid.ny == b.grid.ny && a.grid.nz == b.grid.nz,
            "image shapes differ: " + std::to_string(a.grid.nx) + "x" + std::to_string(a.grid.ny) + "x" +
                std::to_string(a.grid.nz) + " vs " + std::to_string(b.grid.nx) + "x" + std::to_string(b.grid.ny) +
                "x" + std::to_string(b.grid.nz));
}

inline bool selected(const RoiMask& m, std::size_t i) { return m.empty() || m[i]; }

}  // namespace detail

/// max - min of the image over the ROI.
inline double data_range(const Image& truth, const RoiMask& roi = {}) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < truth.data.size(); ++i)
        if (detail::selected(roi, i)) {
            lo = std::min(lo, truth.data[i]);
            hi = std::max(hi, truth.data[i]);
        }
    return hi > lo ? hi - lo : 0.0;
}

inline double mse(const Image& a, const Image& b, const RoiMask& roi = {}) {
    detail::check_same_shape(a, b);
    require(roi.empty() || roi.size() == a.data.size(), "ROI mask size does not match the image");
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        if (detail::selected(roi, i)) {
            const double d = a.data[i] - b.data[i];
            acc += d * d;
            ++n;
        }
    require(n > 0, "ROI selects no pixels");
    return acc / static_cast<double>(n);
}

/// 10 log10(range^2 / MSE) in dB; +infinity when the images agree exactly.
inline double psnr(const Image& recon, const Image& truth, double range, const RoiMask& roi = {}) {
    require(range > 0.0, "PSNR data range must be positive");
    const double e = mse(recon, truth, roi);
    if (e == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(range * range / e);
}

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
};

/// Mean local SSIM over the ROI with a Gaussian window, evaluated slice by
/// slice. Windows are truncated at the image border and renormalised.
inline double ssim(const Image& recon, const Image& truth, double range, const RoiMask& roi = {},
                   const SsimParams& p = {}, int workers = 1) {
    detail::check_same_shape(recon, truth);
    require(range > 0.0, "SSIM data range must be positive");
    require(p.window >= 1 && p.window % 2 == 1, "SSIM window must be an odd size");
    require(roi.empty() || roi.size() == recon.data.size(), "ROI mask size does not match the image");
    const Grid& g = truth.grid;
    const int r = p.window / 2;
    std::vector<double> kern(static_cast<std::size_t>(p.window));
    for (int t = -r; t <= r; ++t) kern[t + r] = std::exp(-0.5 * t * t / (p.sigma * p.sigma));
    const double c1 = (p.k1 * range) * (p.k1 * range);
    const double c2 = (p.k2 * range) * (p.k2 * range);

    const int lines = g.ny * g.nz;
    std::vector<double> sums(static_cast<std::size_t>(lines), 0.0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(lines), 0);
    parallel_for(static_cast<std::size_t>(lines), workers, [&](std::size_t line) {
        const int j = static_cast<int>(line) % g.ny;
        const int k = static_cast<int>(line) / g.ny;
        for (int i = 0; i < g.nx; ++i) {
            if (!detail::selected(roi, g.index(i, j, k))) continue;
            double sw = 0, mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
            for (int dy = -r; dy <= r; ++dy) {
                const int jj = j + dy;
                if (jj < 0 || jj >= g.ny) continue;
                for (int dx = -r; dx <= r; ++dx) {
                    const int ii = i + dx;
                    if (ii < 0 || ii >= g.nx) continue;
                    const double w = kern[dx + r] * kern[dy + r];
                    const double a = recon.at(ii, jj, k);
                    const double b = truth.at(ii, jj, k);
                    sw += w;
                    mx += w * a;
                    my += w * b;
                    sxx += w * a * a;
                    syy += w * b * b;
                    sxy += w * a * b;
                }
            }
            mx /= sw;
            my /= sw;
            const double vx = std::max(sxx / sw - mx * mx, 0.0);
            const double vy = std::max(syy / sw - my * my, 0.0);
            const double cxy = sxy / sw - mx * my;
            sums[line] += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++counts[line];
        }
    });
    double total = 0.0;
    std::size_t n = 0;
    for (std::size_t l = 0; l < sums.size(); ++l) {
        total += sums[l];
        n += counts[l];
    }
    require(n > 0, "ROI selects no pixels");
    return total / static_cast<double>(n);
}

struct EvalReport {
    double psnr = 0.0;
    double ssim = 0.0;
    double rmse = 0.0;
    double data_range = 0.0;
    double roi_radius = 0.0;
    std::size_t roi_pixels = 0;
    SsimParams ssim_params;

    [[nodiscard]] std::string to_key_value() const {
        std::ostringstream os;
        os.precision(17);
        os << "psnr_db=" << psnr << "\nssim=" << ssim << "\nrmse=" << rmse << "\ndata_range=" << data_range
           << "\nroi_radius=" << roi_radius << "\nroi_pixels=" << roi_pixels << "\nssim_window=" << ssim_params.window
           << "\nssim_sigma=" << ssim_params.sigma << "\nssim_k1=" << ssim_params.k1 << "\nssim_k2=" << ssim_params.k2
           << "\n";
        return os.str();
    }

    static std::string csv_header() { return "psnr_db,ssim,rmse,data_range,roi_radius,roi_pixels"; }

    [[nodiscard]] std::string csv_row() const {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g,%zu", psnr, ssim, rmse, data_range, roi_radius,
                      roi_pixels);
        return buf;
    }
};

/// PSNR, SSIM and RMSE of `recon` against `truth` inside the disk of radius
/// `roi_radius`, with the data range taken from the truth over that disk.
inline EvalReport evaluate(const Image& recon, const Image& truth, double roi_radius, const SsimParams& p = {},
                           int workers = 1) {
    detail::check_same_shape(recon, truth);
    const RoiMask roi = disk_mask(truth.grid, roi_radius);
    EvalReport rep;
    rep.roi_radius = roi_radius;
    rep.ssim_params = p;
    for (bool b : roi) rep.roi_pixels += b ? 1 : 0;
    rep.data_range = data_range(truth, roi);
    rep.rmse = std::sqrt(mse(recon, truth, roi));
    rep.psnr = psnr(recon, truth, rep.data_range, roi);
    rep.ssim = ssim(recon, truth, rep.data_range, roi, p, workers);
    return rep;
}

struct Summary {
    double mean = 0.0;
    double stddev = 0.0;
};

/// Mean and sample standard deviation (0 for fewer than two values).
inline Summary summarize(const std::vector<double>& v) {
    Summary s;
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    if (v.size() < 2) return s;
    double acc = 0.0;
    for (double x : v) acc += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(acc / static_cast<double>(v.size() - 1));
    return s;
}

struct ProfileSample {
    double distance = 0.0;
    double value = 0.0;
};

/// Bilinear image value at physical (x, y) on slice k; the point must lie
/// within the hull of pixel centres.
inline double sample_image(const Image& img, double x, double y, int k = 0) {
    const Grid& g = img.grid;
    const double fi = x / g.spacing + 0.5 * (g.nx - 1);
    const double fj = y / g.spacing + 0.5 * (g.ny - 1);
    const double eps = 1e-9;
    require(fi >= -eps && fi <= g.nx - 1 + eps && fj >= -eps && fj <= g.ny - 1 + eps,
            "profile point lies outside the image grid");
    const double ci = std::clamp(fi, 0.0, static_cast<double>(g.nx - 1));
    const double cj = std::clamp(fj, 0.0, static_cast<double>(g.ny - 1));
    const int i0 = std::min(static_cast<int>(ci), std::max(g.nx - 2, 0));
    const int j0 = std::min(static_cast<int>(cj), std::max(g.ny - 2, 0));
    const int i1 = std::min(i0 + 1, g.nx - 1);
    const int j1 = std::min(j0 + 1, g.ny - 1);
    const double ti = ci - i0;
    const double tj = cj - j0;
    return (1 - tj) * ((1 - ti) * img.at(i0, j0, k) + ti * img.at(i1, j0, k)) +
           tj * ((1 - ti) * img.at(i0, j1, k) + ti * img.at(i1, j1, k));
}

/// n samples from p0 to p1 (physical coordinates, inclusive), linearly interpolated.
inline std::vector<ProfileSample> line_profile(const Image& img, Vec2 p0, Vec2 p1, int n, int slice = 0) {
    require(n >= 2, "line profile needs at least 2 samples");
    require(slice >= 0 && slice < img.grid.nz, "profile slice out of range");
    const double len = norm(p1 - p0);
    std::vector<ProfileSample> out(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        const double f = static_cast<double>(t) / (n - 1);
        const Vec2 p = p0 + f * (p1 - p0);
        out[t] = {f * len, sample_image(img, p.x, p.y, slice)};
    }
    return out;
}

inline std::string profile_csv(const std::vector<ProfileSample>& prof) {
    std::string s = "distance,value\n";
    char buf[64];
    for (const auto& p : prof) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", p.distance, p.value);
        s += buf;
    }
    return s;
}

}  // namespace arcfbp
