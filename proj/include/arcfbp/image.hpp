#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "arcfbp/core.hpp"

namespace arcfbp {

/// Reconstruction grid centred on the rotation axis. Images use nz = 1.
/// Sample (i, j, k) sits at ((i - (nx-1)/2) * spacing, (j - (ny-1)/2) * spacing,
/// (k - (nz-1)/2) * spacing_z).
struct Grid {
    int nx = 256;
    int ny = 256;
    int nz = 1;
    double spacing = 2.0;
    double spacing_z = 2.0;

    [[nodiscard]] std::size_t size() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
    }
    [[nodiscard]] bool is_volume() const { return nz > 1; }
    [[nodiscard]] double x_at(int i) const { return (i - 0.5 * (nx - 1)) * spacing; }
    [[nodiscard]] double y_at(int j) const { return (j - 0.5 * (ny - 1)) * spacing; }
    [[nodiscard]] double z_at(int k) const { return nz == 1 ? 0.0 : (k - 0.5 * (nz - 1)) * spacing_z; }
    [[nodiscard]] Vec3 center(int i, int j, int k) const { return {x_at(i), y_at(j), z_at(k)}; }
    [[nodiscard]] std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * ny + j) * nx + i;
    }
    /// Largest |x| of the in-plane extent (half side length).
    [[nodiscard]] double half_extent() const { return 0.5 * (nx > ny ? nx : ny) * spacing; }

    void validate() const {
        require(nx > 0 && ny > 0 && nz > 0, "grid dimensions must be positive");
        require(spacing > 0.0 && spacing_z > 0.0, "grid spacing must be positive");
    }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Values on a Grid, x fastest then y then z.
struct Image {
    Grid grid;
    std::vector<double> data;

    Image() = default;
    explicit Image(const Grid& g) : grid(g), data(g.size(), 0.0) {}

    [[nodiscard]] double& at(int i, int j, int k = 0) { return data[grid.index(i, j, k)]; }
    [[nodiscard]] double at(int i, int j, int k = 0) const { return data[grid.index(i, j, k)]; }

    /// Copy of slice k as a 2D image.
    [[nodiscard]] Image slice(int k) const {
        require(k >= 0 && k < grid.nz, "slice index out of range");
        Grid g = grid;
        g.nz = 1;
        Image out(g);
        const std::size_t n = static_cast<std::size_t>(grid.nx) * grid.ny;
        std::copy(data.begin() + static_cast<std::ptrdiff_t>(k * n), data.begin() + static_cast<std::ptrdiff_t>((k + 1) * n),
                  out.data.begin());
        return out;
    }
};

/// Pixels whose centre lies strictly inside the disk of radius `radius` about
/// the rotation axis (evaluated per slice in the x-y plane).
inline std::vector<bool> disk_mask(const Grid& g, double radius) {
    std::vector<bool> mask(g.size());
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double x = g.x_at(i);
                const double y = g.y_at(j);
                mask[g.index(i, j, k)] = x * x + y * y < radius * radius;
            }
    return mask;
}

}  // namespace arcfbp
