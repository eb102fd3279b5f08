#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "arcfbp/core.hpp"
#include "arcfbp/geometry.hpp"
#include "arcfbp/image.hpp"

namespace arcfbp {

/// One ellipse (2D) or ellipsoid (3D) with additive density. Angles are
/// radians: phi about z, then theta about y, then psi about x (R = Rz Ry Rx).
/// 2D components use only x/y of centre and semi-axes and phi.
struct Ellipsoid {
    Vec3 center;
    Vec3 semi_axes{1.0, 1.0, 1.0};
    Vec3 angles;
    double density = 1.0;
};

namespace detail {

using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 rotation(Vec3 angles) {
    const double cf = std::cos(angles.x), sf = std::sin(angles.x);
    const double ct = std::cos(angles.y), st = std::sin(angles.y);
    const double cp = std::cos(angles.z), sp = std::sin(angles.z);
    // Rz(phi) * Ry(theta) * Rx(psi)
    return {{{cf * ct, cf * st * sp - sf * cp, cf * st * cp + sf * sp},
             {sf * ct, sf * st * sp + cf * cp, sf * st * cp - cf * sp},
             {-st, ct * sp, ct * cp}}};
}

/// Maps world vectors into the unit-sphere frame of a component: diag(1/a) * R^T.
struct BodyFrame {
    Mat3 m{};

    BodyFrame(const Ellipsoid& e, int dim) {
        const Mat3 r = rotation(dim == 2 ? Vec3{e.angles.x, 0.0, 0.0} : e.angles);
        const double inv[3] = {1.0 / e.semi_axes.x, 1.0 / e.semi_axes.y, dim == 2 ? 0.0 : 1.0 / e.semi_axes.z};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) m[a][b] = inv[a] * r[b][a];
    }

    [[nodiscard]] Vec3 apply(Vec3 v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z, m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }
};

/// Largest distance from the z axis reached by the component's footprint in
/// the x-y plane.
inline double planar_reach(const Ellipsoid& e, int dim) {
    const Mat3 r = rotation(dim == 2 ? Vec3{e.angles.x, 0.0, 0.0} : e.angles);
    const double a2[3] = {e.semi_axes.x * e.semi_axes.x, e.semi_axes.y * e.semi_axes.y,
                          dim == 2 ? 0.0 : e.semi_axes.z * e.semi_axes.z};
    // Footprint shape matrix: top-left 2x2 block of R diag(a^2) R^T.
    double s[2][2] = {{0, 0}, {0, 0}};
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
            for (int k = 0; k < 3; ++k) s[p][q] += r[p][k] * a2[k] * r[q][k];
    // Boundary c + L (cos t, sin t) with L the Cholesky factor of s.
    const double l00 = std::sqrt(s[0][0]);
    const double l10 = s[1][0] / l00;
    const double l11 = std::sqrt(std::max(s[1][1] - l10 * l10, 0.0));
    const auto dist2 = [&](double t) {
        const double x = e.center.x + l00 * std::cos(t);
        const double y = e.center.y + l10 * std::cos(t) + l11 * std::sin(t);
        return x * x + y * y;
    };
    constexpr int n = 720;
    const double h = 2.0 * kPi / n;
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (dist2(i * h) > dist2(best * h)) best = i;
    double lo = (best - 1) * h, hi = (best + 1) * h;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
        const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
        if (dist2(m1) < dist2(m2)) lo = m1;
        else hi = m2;
    }
    return std::sqrt(std::max(dist2(0.5 * (lo + hi)), dist2(best * h)));
}

}  // namespace detail

/// Analytic phantom: a sum of constant-density ellipses or ellipsoids that
/// must lie inside the object cylinder |(x, y)| <= R_m.
class Phantom {
public:
    Phantom(int dim, std::vector<Ellipsoid> components, double object_radius)
        : dim_(dim), object_radius_(object_radius), components_(std::move(components)) {
        require(dim == 2 || dim == 3, "phantom dimension must be 2 or 3");
        require(object_radius > 0.0, "object radius must be positive");
        frames_.reserve(components_.size());
        for (const auto& e : components_) {
            require(e.semi_axes.x > 0.0 && e.semi_axes.y > 0.0 && (dim == 2 || e.semi_axes.z > 0.0),
                    "phantom semi-axes must be positive");
            const double reach = detail::planar_reach(e, dim);
            require(reach <= object_radius * (1.0 + 1e-12),
                    "phantom component extends beyond the object radius " + std::to_string(object_radius));
            frames_.emplace_back(e, dim);
        }
    }

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] double object_radius() const { return object_radius_; }
    [[nodiscard]] const std::vector<Ellipsoid>& components() const { return components_; }

    /// Sum of density times chord length of the (unit-direction) ray through
    /// each component. 2D phantoms read only the in-plane part of the ray.
    [[nodiscard]] double line_integral(const Ray& ray) const {
        double total = 0.0;
        for (std::size_t n = 0; n < components_.size(); ++n) {
            const auto& e = components_[n];
            Vec3 rel = ray.origin - e.center;
            Vec3 dir = ray.direction;
            if (dim_ == 2) {
                rel.z = 0.0;
                dir.z = 0.0;
            }
            const Vec3 p = frames_[n].apply(rel);
            const Vec3 d = frames_[n].apply(dir);
            const double a = dot(d, d);
            const double b = dot(p, d);
            const double c = dot(p, p) - 1.0;
            const double disc = b * b - a * c;
            if (disc <= 0.0 || a <= 0.0) continue;
            total += e.density * 2.0 * std::sqrt(disc) / a;
        }
        return total;
    }

    /// Density at a point (sum over components containing it).
    [[nodiscard]] double value_at(Vec3 point) const {
        double total = 0.0;
        for (std::size_t n = 0; n < components_.size(); ++n) {
            Vec3 rel = point - components_[n].center;
            if (dim_ == 2) rel.z = 0.0;
            const Vec3 q = frames_[n].apply(rel);
            if (dot(q, q) <= 1.0) total += components_[n].density;
        }
        return total;
    }

    /// Closed-form integral of the density (area in 2D, volume in 3D).
    [[nodiscard]] double mass() const {
        double total = 0.0;
        for (const auto& e : components_) {
            const double a = e.semi_axes.x * e.semi_axes.y;
            total += e.density * (dim_ == 2 ? kPi * a : 4.0 / 3.0 * kPi * a * e.semi_axes.z);
        }
        return total;
    }

    /// Same components with rotation `angle` about the z axis.
    [[nodiscard]] Phantom rotated(double angle) const {
        std::vector<Ellipsoid> out = components_;
        const double c = std::cos(angle), s = std::sin(angle);
        for (auto& e : out) {
            e.center = {c * e.center.x - s * e.center.y, s * e.center.x + c * e.center.y, e.center.z};
            e.angles.x += angle;
        }
        return Phantom(dim_, std::move(out), object_radius_);
    }

private:
    int dim_;
    double object_radius_;
    std::vector<Ellipsoid> components_;
    std::vector<detail::BodyFrame> frames_;
};

/// Pixel values by point sampling. `supersample` points per axis are averaged
/// inside each pixel (1 = pixel centre only).
inline Image rasterize(const Phantom& phantom, const Grid& grid, int supersample = 1) {
    grid.validate();
    require(supersample >= 1, "supersampling factor must be >= 1");
    Image img(grid);
    const int nsz = grid.is_volume() ? supersample : 1;
    const double norm_count = 1.0 / (supersample * supersample * nsz);
    for (int k = 0; k < grid.nz; ++k)
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const Vec3 c = grid.center(i, j, k);
                double acc = 0.0;
                for (int qz = 0; qz < nsz; ++qz)
                    for (int qy = 0; qy < supersample; ++qy)
                        for (int qx = 0; qx < supersample; ++qx) {
                            const Vec3 p{c.x + ((qx + 0.5) / supersample - 0.5) * grid.spacing,
                                         c.y + ((qy + 0.5) / supersample - 0.5) * grid.spacing,
                                         c.z + (nsz == 1 ? 0.0 : ((qz + 0.5) / nsz - 0.5) * grid.spacing_z)};
                            acc += phantom.value_at(p);
                        }
                img.at(i, j, k) = acc * norm_count;
            }
    return img;
}

/// Modified (high-contrast) Shepp-Logan head, unit layout scaled so the outer
/// ellipse fits a disk of radius 0.9 * R_m. The 3D variant keeps rotations
/// about z only.
inline Phantom shepp_logan(int dim, double object_radius) {
    struct Row {
        double density, a, b, c, x, y, z, phi_deg;
    };
    static constexpr Row rows[] = {
        {1.0, 0.69, 0.92, 0.81, 0.0, 0.0, 0.0, 0.0},
        {-0.8, 0.6624, 0.874, 0.78, 0.0, -0.0184, 0.0, 0.0},
        {-0.2, 0.11, 0.31, 0.22, 0.22, 0.0, 0.0, -18.0},
        {-0.2, 0.16, 0.41, 0.28, -0.22, 0.0, 0.0, 18.0},
        {0.1, 0.21, 0.25, 0.41, 0.0, 0.35, -0.15, 0.0},
        {0.1, 0.046, 0.046, 0.05, 0.0, 0.1, 0.25, 0.0},
        {0.1, 0.046, 0.046, 0.05, 0.0, -0.1, 0.25, 0.0},
        {0.1, 0.046, 0.023, 0.05, -0.08, -0.605, 0.0, 0.0},
        {0.1, 0.023, 0.023, 0.02, 0.0, -0.606, 0.0, 0.0},
        {0.1, 0.023, 0.046, 0.02, 0.06, -0.605, 0.0, 0.0},
    };
    const double s = 0.9 * object_radius;
    std::vector<Ellipsoid> comps;
    for (const auto& r : rows) {
        Ellipsoid e;
        e.density = r.density;
        e.center = {s * r.x, s * r.y, dim == 3 ? s * r.z : 0.0};
        e.semi_axes = {s * r.a, s * r.b, dim == 3 ? s * r.c : 1.0};
        e.angles = {deg2rad(r.phi_deg), 0.0, 0.0};
        comps.push_back(e);
    }
    return Phantom(dim, std::move(comps), object_radius);
}

/// Single centred disk (2D) or sphere (3D).
inline Phantom uniform_disk(int dim, double radius, double density, double object_radius) {
    Ellipsoid e;
    e.semi_axes = {radius, radius, radius};
    e.density = density;
    return Phantom(dim, {e}, object_radius);
}

/// 3D phantom whose cross-sections near z = 0 match a 2D phantom: every
/// ellipse becomes an ellipsoid with z semi-axis `half_height`.
inline Phantom extrude(const Phantom& flat, double half_height) {
    require(flat.dim() == 2, "extrude expects a 2D phantom");
    std::vector<Ellipsoid> comps = flat.components();
    for (auto& e : comps) {
        e.center.z = 0.0;
        e.semi_axes.z = half_height;
        e.angles.y = 0.0;
        e.angles.z = 0.0;
    }
    return Phantom(3, std::move(comps), flat.object_radius());
}

}  // namespace arcfbp
