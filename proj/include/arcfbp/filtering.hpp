#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "arcfbp/core.hpp"
#include "arcfbp/geometry.hpp"
#include "arcfbp/parallel.hpp"
#include "arcfbp/projector.hpp"

namespace arcfbp {

enum class FilterStage { Derivative, Hilbert };

/// Projections after one of the two filtering steps. Backprojection accepts
/// only the Hilbert stage.
struct FilteredViews {
    FilterStage stage = FilterStage::Derivative;
    Projections data;
};

enum class ConvolutionMethod { Direct, Fft };

inline std::string_view to_string(ConvolutionMethod m) { return m == ConvolutionMethod::Direct ? "direct" : "fft"; }

inline ConvolutionMethod convolution_method_from_string(std::string_view s) {
    if (s == "direct") return ConvolutionMethod::Direct;
    if (s == "fft") return ConvolutionMethod::Fft;
    throw Error("unknown convolution method '" + std::string(s) + "' (valid: direct, fft)");
}

// ---------------------------------------------------------------------------
// Derivative at constant ray direction
// ---------------------------------------------------------------------------

namespace detail {

/// Centred difference; second-order one-sided differences at the two ends
/// of the axis.
inline double axis_difference(const double* v, int i, int n, std::ptrdiff_t stride, double step) {
    if (i == 0) return (-3.0 * v[0] + 4.0 * v[stride] - v[2 * stride]) / (2.0 * step);
    if (i == n - 1) return (3.0 * v[0] - 4.0 * v[-stride] + v[-2 * stride]) / (2.0 * step);
    return (v[stride] - v[-stride]) / (2.0 * step);
}

}  // namespace detail

/// g1 = d/dlambda of the projections with the ray direction held fixed,
/// expressed through partial derivatives in the detector coordinates:
///   fan-curved, cone-curved: dg/dlambda + dg/dgamma
///   fan-straight:            dg/dlambda + (u^2 + D^2)/D dg/du
///   cone-flat:               dg/dlambda + (u^2 + D^2)/D dg/du + u w / D dg/dw
inline FilteredViews derivative(const Projections& proj, int workers = 1) {
    const ScanGeometry& g = proj.geometry();
    require(proj.views() >= 3, "derivative needs at least 3 views");
    require(proj.cols() >= 3, "derivative needs at least 3 detector columns");
    require(g.kind != DetectorKind::ConeFlat || proj.rows() >= 3, "cone-flat derivative needs at least 3 detector rows");
    FilteredViews out{FilterStage::Derivative, Projections(g)};
    const int views = proj.views();
    const int rows = proj.rows();
    const int cols = proj.cols();
    const std::ptrdiff_t view_stride = static_cast<std::ptrdiff_t>(rows) * cols;
    const double d = g.source_detector_distance;
    parallel_for(static_cast<std::size_t>(views), workers, [&](std::size_t sv) {
        const int s = static_cast<int>(sv);
        for (int k = 0; k < rows; ++k) {
            const double w = g.rows.at(k);
            for (int j = 0; j < cols; ++j) {
                const double* p = &proj.values()[proj.index(s, k, j)];
                const double dl = detail::axis_difference(p, s, views, view_stride, g.lambda_step);
                const double dc = detail::axis_difference(p, j, cols, 1, g.columns.step);
                double value = 0.0;
                switch (g.kind) {
                    case DetectorKind::FanCurved:
                    case DetectorKind::ConeCurved: value = dl + dc; break;
                    case DetectorKind::FanStraight: {
                        const double u = g.columns.at(j);
                        value = dl + (u * u + d * d) / d * dc;
                        break;
                    }
                    case DetectorKind::ConeFlat: {
                        const double u = g.columns.at(j);
                        const double dw = detail::axis_difference(p, k, rows, cols, g.rows.step);
                        value = dl + (u * u + d * d) / d * dc + u * w / d * dw;
                        break;
                    }
                }
                out.data.at(s, k, j) = value;
            }
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Band-limited Hilbert kernels, cut-off b = 1 / (2 * step)
// ---------------------------------------------------------------------------

/// (1 - cos(2 pi b t)) / (pi t) at an arbitrary position t; 0 at t = 0.
inline double hilbert_kernel_linear(double t, double step) {
    if (t == 0.0) return 0.0;
    return (1.0 - std::cos(kPi * t / step)) / (kPi * t);
}

/// (1 - cos(2 pi b t)) / (pi sin t) for angular detectors; 0 at t = 0.
inline double hilbert_kernel_sine(double t, double step) {
    if (t == 0.0) return 0.0;
    return (1.0 - std::cos(kPi * t / step)) / (kPi * std::sin(t));
}

/// Kernel value at integer lag `index` (sample difference) for the geometry's
/// column axis. On the grid 1 - cos(pi j) is exactly 0 or 2, so even lags
/// vanish and odd lags give 2 / (pi u_j) or 2 / (pi sin(gamma_j)).
inline double hilbert_kernel(const ScanGeometry& g, int index) {
    if (index % 2 == 0) return 0.0;
    const double t = index * g.columns.step;
    return is_curved(g.kind) ? 2.0 / (kPi * std::sin(t)) : 2.0 / (kPi * t);
}

/// Kernel over lags -(n-1)..(n-1), stored at offset n-1.
inline std::vector<double> hilbert_kernel_table(const ScanGeometry& g) {
    const int n = g.columns.count();
    std::vector<double> k(static_cast<std::size_t>(2 * n - 1));
    for (int lag = -(n - 1); lag <= n - 1; ++lag) k[static_cast<std::size_t>(lag + n - 1)] = hilbert_kernel(g, lag);
    return k;
}

enum class RampWindow {
    RamLak,      ///< unwindowed band-limited ramp
    SheppLogan,  ///< ramp times sinc, the discrete kernel -2 / (pi^2 tau^2 (4 n^2 - 1))
};

inline std::string_view to_string(RampWindow w) { return w == RampWindow::RamLak ? "ram-lak" : "shepp-logan"; }

inline RampWindow ramp_window_from_string(std::string_view s) {
    if (s == "ram-lak") return RampWindow::RamLak;
    if (s == "shepp-logan") return RampWindow::SheppLogan;
    throw Error("unknown ramp window '" + std::string(s) + "' (valid: ram-lak, shepp-logan)");
}

/// Ramp kernel taps for sample step tau over lags -(n-1)..(n-1), offset n-1.
/// Ram-Lak: 1/(4 tau^2) at 0, -1/(pi n tau)^2 at odd n, 0 at even n.
/// With `angular` set each tap is scaled by (t / sin t)^2, the equi-angular
/// fan-beam form.
inline std::vector<double> ramp_kernel_table(int n, double tau, bool angular, RampWindow window = RampWindow::RamLak) {
    std::vector<double> k(static_cast<std::size_t>(2 * n - 1), 0.0);
    for (int lag = -(n - 1); lag <= n - 1; ++lag) {
        double v = 0.0;
        if (window == RampWindow::SheppLogan) {
            v = -2.0 / (kPi * kPi * tau * tau * (4.0 * lag * lag - 1.0));
        } else if (lag == 0) {
            v = 1.0 / (4.0 * tau * tau);
        } else if (lag % 2 != 0) {
            v = -1.0 / (kPi * kPi * lag * lag * tau * tau);
        }
        if (angular && lag != 0) {
            const double t = lag * tau;
            v *= (t / std::sin(t)) * (t / std::sin(t));
        }
        k[static_cast<std::size_t>(lag + n - 1)] = v;
    }
    return k;
}

// ---------------------------------------------------------------------------
// Row convolution out[j] = sum_j' kernel[j - j' + n - 1] * in[j']
// ---------------------------------------------------------------------------

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
    return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

}  // namespace detail

/// Convolves rows of length n with a fixed kernel of length 2n-1, either
/// directly or through zero-padded FFTs. Planning is serialised; execution is
/// safe from several threads, each with its own Workspace.
class RowConvolver {
public:
    RowConvolver(std::vector<double> kernel, int n, ConvolutionMethod method)
        : kernel_(std::move(kernel)), n_(n), method_(method) {
        require(static_cast<int>(kernel_.size()) == 2 * n - 1, "kernel length must be 2n-1");
        if (method_ != ConvolutionMethod::Fft) return;
        fft_len_ = 1;
        while (fft_len_ < 3 * n_ - 2) fft_len_ *= 2;
        const std::size_t bins = static_cast<std::size_t>(fft_len_ / 2 + 1);
        auto real = detail::fftw_buffer<double>(static_cast<std::size_t>(fft_len_));
        spectrum_ = detail::fftw_buffer<fftw_complex>(bins);
        auto tmp = detail::fftw_buffer<fftw_complex>(bins);
        {
            std::lock_guard lock(detail::fftw_planner_mutex());
            forward_ = fftw_plan_dft_r2c_1d(fft_len_, real.get(), tmp.get(), FFTW_ESTIMATE);
            backward_ = fftw_plan_dft_c2r_1d(fft_len_, tmp.get(), real.get(), FFTW_ESTIMATE);
        }
        std::fill(real.get(), real.get() + fft_len_, 0.0);
        std::copy(kernel_.begin(), kernel_.end(), real.get());
        fftw_execute_dft_r2c(forward_, real.get(), spectrum_.get());
    }

    RowConvolver(const RowConvolver&) = delete;
    RowConvolver& operator=(const RowConvolver&) = delete;

    ~RowConvolver() {
        if (method_ != ConvolutionMethod::Fft) return;
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    struct Workspace {
        detail::FftwBuffer<double> real;
        detail::FftwBuffer<fftw_complex> freq;
    };

    [[nodiscard]] Workspace workspace() const {
        if (method_ != ConvolutionMethod::Fft) return {};
        return {detail::fftw_buffer<double>(static_cast<std::size_t>(fft_len_)),
                detail::fftw_buffer<fftw_complex>(static_cast<std::size_t>(fft_len_ / 2 + 1))};
    }

    void apply(const double* in, double* out, Workspace& ws) const {
        if (method_ == ConvolutionMethod::Direct) {
            const double* k = kernel_.data() + (n_ - 1);
            for (int j = 0; j < n_; ++j) {
                double acc = 0.0;
                for (int jp = 0; jp < n_; ++jp) acc += k[j - jp] * in[jp];
                out[j] = acc;
            }
            return;
        }
        double* real = ws.real.get();
        std::fill(real, real + fft_len_, 0.0);
        std::copy(in, in + n_, real);
        fftw_execute_dft_r2c(forward_, real, ws.freq.get());
        const int bins = fft_len_ / 2 + 1;
        for (int b = 0; b < bins; ++b) {
            const double ar = ws.freq[b][0], ai = ws.freq[b][1];
            const double br = spectrum_[b][0], bi = spectrum_[b][1];
            ws.freq[b][0] = ar * br - ai * bi;
            ws.freq[b][1] = ar * bi + ai * br;
        }
        fftw_execute_dft_c2r(backward_, ws.freq.get(), real);
        const double scale = 1.0 / fft_len_;
        for (int j = 0; j < n_; ++j) out[j] = real[j + n_ - 1] * scale;
    }

private:
    std::vector<double> kernel_;
    int n_;
    ConvolutionMethod method_;
    int fft_len_ = 0;
    detail::FftwBuffer<fftw_complex> spectrum_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

/// g2: Hilbert filtering of g1 along detector rows with rectangle-rule
/// quadrature. Rows are zero outside the detector.
///   fan-curved:   g2 = -sum h(sin(gamma - gamma')) g1(gamma') dgamma
///   fan-straight: g2 = -sum k(u - u') D / sqrt(u'^2 + D^2) g1(u') du
///   cone-flat:    g2 = +sum k(u - u') D / sqrt(u'^2 + D^2 + w^2) g1(u', w) du
///   cone-curved:  g2 = +sum h(sin(alpha - alpha')) D / sqrt(D^2 + w^2) g1(alpha', w) dalpha
inline FilteredViews hilbert_convolve(const FilteredViews& g1, ConvolutionMethod method = ConvolutionMethod::Direct,
                                      int workers = 1) {
    require(g1.stage == FilterStage::Derivative, "Hilbert filtering expects derivative-stage data");
    const Projections& in = g1.data;
    const ScanGeometry& g = in.geometry();
    const int rows = in.rows();
    const int cols = in.cols();
    const double d = g.source_detector_distance;
    const double sign = is_cone(g.kind) ? 1.0 : -1.0;
    const double scale = sign * g.columns.step;

    // Input weights per (row, column).
    std::vector<double> weight(static_cast<std::size_t>(rows) * cols, 1.0);
    for (int k = 0; k < rows; ++k) {
        const double w = g.rows.at(k);
        for (int j = 0; j < cols; ++j) {
            const double u = g.columns.at(j);
            double q = 1.0;
            switch (g.kind) {
                case DetectorKind::FanCurved: q = 1.0; break;
                case DetectorKind::FanStraight: q = d / std::sqrt(u * u + d * d); break;
                case DetectorKind::ConeFlat: q = d / std::sqrt(u * u + d * d + w * w); break;
                case DetectorKind::ConeCurved: q = d / std::sqrt(d * d + w * w); break;
            }
            weight[static_cast<std::size_t>(k) * cols + j] = q;
        }
    }

    const RowConvolver conv(hilbert_kernel_table(g), cols, method);
    FilteredViews out{FilterStage::Hilbert, Projections(g)};
    parallel_for(static_cast<std::size_t>(in.views()), workers, [&](std::size_t sv) {
        const int s = static_cast<int>(sv);
        auto ws = conv.workspace();
        std::vector<double> buf(static_cast<std::size_t>(cols));
        for (int k = 0; k < rows; ++k) {
            const double* src = in.row(s, k);
            const double* q = weight.data() + static_cast<std::size_t>(k) * cols;
            for (int j = 0; j < cols; ++j) buf[j] = src[j] * q[j];
            double* dst = out.data.row(s, k);
            conv.apply(buf.data(), dst, ws);
            for (int j = 0; j < cols; ++j) dst[j] *= scale;
        }
    });
    return out;
}

/// derivative followed by hilbert_convolve.
inline FilteredViews filter_projections(const Projections& proj, ConvolutionMethod method = ConvolutionMethod::Direct,
                                        int workers = 1) {
    return hilbert_convolve(derivative(proj, workers), method, workers);
}

}  // namespace arcfbp
