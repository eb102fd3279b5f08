#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "arcfbp/core.hpp"
#include "arcfbp/geometry.hpp"
#include "arcfbp/parallel.hpp"
#include "arcfbp/phantom.hpp"

namespace arcfbp {

/// Projection values g[view][row][col] on the sampling grids of a geometry.
/// Fan sinograms have a single row.
class Projections {
public:
    Projections() = default;
    explicit Projections(const ScanGeometry& geometry)
        : geometry_(geometry),
          views_(geometry.view_count()),
          rows_(geometry.rows.count()),
          cols_(geometry.columns.count()),
          data_(static_cast<std::size_t>(views_) * rows_ * cols_, 0.0) {}

    [[nodiscard]] const ScanGeometry& geometry() const { return geometry_; }
    [[nodiscard]] int views() const { return views_; }
    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int cols() const { return cols_; }
    [[nodiscard]] std::size_t size() const { return data_.size(); }

    [[nodiscard]] std::size_t index(int s, int k, int j) const {
        return (static_cast<std::size_t>(s) * rows_ + k) * cols_ + j;
    }
    [[nodiscard]] double& at(int s, int k, int j) { return data_[index(s, k, j)]; }
    [[nodiscard]] double at(int s, int k, int j) const { return data_[index(s, k, j)]; }
    [[nodiscard]] double* row(int s, int k) { return data_.data() + index(s, k, 0); }
    [[nodiscard]] const double* row(int s, int k) const { return data_.data() + index(s, k, 0); }

    [[nodiscard]] std::vector<double>& values() { return data_; }
    [[nodiscard]] const std::vector<double>& values() const { return data_; }

private:
    ScanGeometry geometry_;
    int views_ = 0;
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// Analytic projections of a phantom along every detector ray.
inline Projections simulate(const Phantom& phantom, const ScanGeometry& geometry, int workers = 1) {
    geometry.validate();
    require(phantom.object_radius() <= geometry.object_radius * (1.0 + 1e-12),
            "phantom object radius exceeds the geometry's object radius");
    require(phantom.dim() == 3 || !is_cone(geometry.kind), "cone-beam simulation needs a 3D phantom");
    require(phantom.dim() == 2 || is_cone(geometry.kind), "fan-beam simulation needs a 2D phantom");
    Projections out(geometry);
    parallel_for(static_cast<std::size_t>(out.views()), workers, [&](std::size_t sv) {
        const int s = static_cast<int>(sv);
        for (int k = 0; k < out.rows(); ++k)
            for (int j = 0; j < out.cols(); ++j) out.at(s, k, j) = phantom.line_integral(detector_ray(geometry, s, k, j));
    });
    return out;
}

// ---------------------------------------------------------------------------
// Noise
// ---------------------------------------------------------------------------

enum class NoiseMode {
    /// Counts N = Poisson(I0 exp(-g/M)) + Normal(I0 m, I0 var); g' = M log(I0 / N).
    PhotonCount,
    /// t = exp(-g/M); t += I0 Poisson(t) + I0 Normal(m, var/I0); g' = M log(I0 / t).
    PaperLiteral,
};

inline std::string_view to_string(NoiseMode m) { return m == NoiseMode::PhotonCount ? "photon-count" : "paper-literal"; }

inline NoiseMode noise_mode_from_string(std::string_view s) {
    if (s == "photon-count") return NoiseMode::PhotonCount;
    if (s == "paper-literal") return NoiseMode::PaperLiteral;
    throw Error("unknown noise mode '" + std::string(s) + "' (valid: photon-count, paper-literal)");
}

struct NoiseParams {
    NoiseMode mode = NoiseMode::PhotonCount;
    double i0 = 1e6;
    double mean = 0.0;
    double variance = 0.0;
    bool poisson = true;
    std::uint64_t seed = 0;
    double min_transmission = 1e-6;  ///< floor for counts / I0 before the log
};

struct NoiseReport {
    double max_value = 0.0;       ///< M, the noiseless maximum used for normalisation
    std::size_t clamped = 0;      ///< samples whose pre-log value was not positive
};

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Counter-based bit generator: the stream for one detector sample depends
/// only on (seed, view, row, col), never on evaluation order.
class SampleRng {
public:
    using result_type = std::uint64_t;

    SampleRng(std::uint64_t seed, std::uint64_t view, std::uint64_t detector) {
        std::uint64_t s = seed;
        state_ = splitmix64(s);
        state_ ^= 0xD1B54A32D192ED03ull * (view + 1);
        state_ = splitmix64(state_);
        state_ ^= 0x8CB92BA72F3D8DD7ull * (detector + 1);
        state_ = splitmix64(state_);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return splitmix64(state_); }

private:
    std::uint64_t state_ = 0;
};

}  // namespace detail

/// Perturbs projections with Poisson and Gaussian noise. Deterministic for a
/// fixed seed regardless of the worker count. With no active noise source
/// (Poisson off, mean 0, variance 0) the input is returned unchanged.
inline Projections add_noise(const Projections& input, const NoiseParams& params, NoiseReport* report = nullptr,
                             int workers = 1) {
    require(params.i0 > 0.0, "I0 must be positive");
    require(params.variance >= 0.0, "noise variance must be non-negative");
    require(params.min_transmission > 0.0 && params.min_transmission < 1.0, "minimum transmission must lie in (0, 1)");
    double m = 0.0;
    for (double v : input.values()) m = std::max(m, v);
    if (report) *report = NoiseReport{m, 0};
    if (!params.poisson && params.variance == 0.0 && params.mean == 0.0) return input;
    require(m > 0.0, "noise model needs a positive projection maximum");

    Projections out = input;
    const int rows = input.rows();
    const int cols = input.cols();
    std::vector<std::size_t> clamped(static_cast<std::size_t>(input.views()), 0);
    parallel_for(static_cast<std::size_t>(input.views()), workers, [&](std::size_t sv) {
        const int s = static_cast<int>(sv);
        for (int k = 0; k < rows; ++k)
            for (int j = 0; j < cols; ++j) {
                detail::SampleRng rng(params.seed, sv, static_cast<std::uint64_t>(k) * cols + j);
                const double t = std::exp(-input.at(s, k, j) / m);
                double counts = 0.0;
                if (params.mode == NoiseMode::PhotonCount) {
                    const double expected = params.i0 * t;
                    counts = expected;
                    if (params.poisson) counts = static_cast<double>(std::poisson_distribution<long long>(expected)(rng));
                    if (params.variance > 0.0)
                        counts += std::normal_distribution<double>(params.i0 * params.mean,
                                                                   std::sqrt(params.i0 * params.variance))(rng);
                    else
                        counts += params.i0 * params.mean;
                } else {
                    counts = t;
                    if (params.poisson)
                        counts += params.i0 * static_cast<double>(std::poisson_distribution<long long>(t)(rng));
                    if (params.variance > 0.0)
                        counts += params.i0 * std::normal_distribution<double>(
                                                   params.mean, std::sqrt(params.variance / params.i0))(rng);
                    else
                        counts += params.i0 * params.mean;
                }
                if (!(counts > 0.0)) {
                    counts = params.i0 * params.min_transmission;
                    ++clamped[sv];
                }
                out.at(s, k, j) = std::log(params.i0 / counts) * m;
            }
    });
    if (report)
        for (auto c : clamped) report->clamped += c;
    return out;
}

}  // namespace arcfbp
