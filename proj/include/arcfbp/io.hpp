#pragma once

#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "arcfbp/core.hpp"
#include "arcfbp/geometry.hpp"
#include "arcfbp/image.hpp"
#include "arcfbp/phantom.hpp"
#include "arcfbp/projector.hpp"

namespace arcfbp {

inline constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// key=value sidecars
// ---------------------------------------------------------------------------

/// Ordered key=value metadata. Keys are written sorted, so equal content gives
/// byte-identical files.
class Metadata {
public:
    void set(const std::string& key, const std::string& value) {
        require(!key.empty() && key.find_first_of("=\n#") == std::string::npos, "invalid metadata key '" + key + "'");
        require(value.find('\n') == std::string::npos, "metadata value for '" + key + "' contains a newline");
        values_[key] = value;
    }
    void set(const std::string& key, double value) { set(key, format_double(value)); }
    void set(const std::string& key, int value) { set(key, std::to_string(value)); }
    void set(const std::string& key, std::size_t value) { set(key, std::to_string(value)); }
    void set(const std::string& key, std::string_view value) { set(key, std::string(value)); }
    void set(const std::string& key, const char* value) { set(key, std::string(value)); }

    [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }

    [[nodiscard]] const std::string& get(const std::string& key) const {
        auto it = values_.find(key);
        require(it != values_.end(), "metadata is missing key '" + key + "'");
        return it->second;
    }

    [[nodiscard]] double get_double(const std::string& key) const {
        const std::string& v = get(key);
        char* end = nullptr;
        errno = 0;
        const double d = std::strtod(v.c_str(), &end);
        require(errno == 0 && end != v.c_str() && *end == '\0', "metadata key '" + key + "' is not a number: " + v);
        return d;
    }

    [[nodiscard]] int get_int(const std::string& key) const {
        const std::string& v = get(key);
        char* end = nullptr;
        errno = 0;
        const long n = std::strtol(v.c_str(), &end, 10);
        require(errno == 0 && end != v.c_str() && *end == '\0', "metadata key '" + key + "' is not an integer: " + v);
        return static_cast<int>(n);
    }

    [[nodiscard]] const std::map<std::string, std::string>& entries() const { return values_; }

    void merge(const Metadata& other, const std::string& prefix = "") {
        for (const auto& [k, v] : other.values_) set(prefix + k, v);
    }

    [[nodiscard]] std::string serialize() const {
        std::string out;
        for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
        return out;
    }

    static Metadata parse(const std::string& text, const std::string& origin = "metadata") {
        Metadata m;
        std::istringstream in(text);
        std::string line;
        int number = 0;
        while (std::getline(in, line)) {
            ++number;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#') continue;
            const auto eq = line.find('=');
            require(eq != std::string::npos, origin + ":" + std::to_string(number) + ": expected key=value");
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t");
                const auto b = s.find_last_not_of(" \t");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            const std::string key = trim(line.substr(0, eq));
            require(!key.empty(), origin + ":" + std::to_string(number) + ": empty key");
            m.set(key, trim(line.substr(eq + 1)));
        }
        return m;
    }

    static std::string format_double(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

private:
    std::map<std::string, std::string> values_;
};

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes a group of files so that either all of them appear or none: each is
/// written to a temporary sibling and renamed once every write succeeded.
class AtomicWriter {
public:
    AtomicWriter() = default;
    AtomicWriter(const AtomicWriter&) = delete;
    AtomicWriter& operator=(const AtomicWriter&) = delete;
    ~AtomicWriter() {
        for (const auto& p : pending_) std::remove(p.second.c_str());
    }

    void add(const std::string& path, const std::string& bytes) {
        const std::string tmp = path + ".tmp" + std::to_string(::getpid());
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), "cannot write '" + path + "'");
        pending_.emplace_back(path, tmp);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        require(static_cast<bool>(out), "failed writing '" + path + "'");
    }

    void commit() {
        for (const auto& [path, tmp] : pending_) {
            std::error_code ec;
            std::filesystem::rename(tmp, path, ec);
            require(!ec, "cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
        }
        pending_.clear();
    }

private:
    std::vector<std::pair<std::string, std::string>> pending_;
};

inline void write_text_file(const std::string& path, const std::string& text) {
    AtomicWriter w;
    w.add(path, text);
    w.commit();
}

/// Paths of a dataset: accepts "name", "name.raw" or "name.meta".
struct DatasetPaths {
    std::string raw;
    std::string meta;

    static DatasetPaths of(std::string base) {
        for (const char* ext : {".raw", ".meta"}) {
            const std::string e(ext);
            if (base.size() > e.size() && base.compare(base.size() - e.size(), e.size(), e) == 0) {
                base.resize(base.size() - e.size());
                break;
            }
        }
        return {base + ".raw", base + ".meta"};
    }
};

inline std::string encode_f32le(const std::vector<double>& values) {
    std::string bytes(values.size() * 4, '\0');
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(values[i]));
        for (int b = 0; b < 4; ++b) bytes[4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
    }
    return bytes;
}

inline std::vector<double> decode_f32le(const std::string& bytes) {
    require(bytes.size() % 4 == 0, "raw data size is not a multiple of 4 bytes");
    std::vector<double> out(bytes.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * i + b])) << (8 * b);
        out[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Geometry and grid metadata
// ---------------------------------------------------------------------------

inline void put_geometry(Metadata& m, const ScanGeometry& g) {
    m.set("geometry", to_string(g.kind));
    m.set("trajectory_radius", g.trajectory_radius);
    m.set("object_radius", g.object_radius);
    m.set("source_detector_distance", g.source_detector_distance);
    m.set("lambda_start", g.lambda_start);
    m.set("lambda_end", g.lambda_end);
    m.set("lambda_step", g.lambda_step);
    m.set("columns_half", g.columns.half);
    m.set("columns_step", g.columns.step);
    m.set("rows_half", g.rows.half);
    m.set("rows_step", g.rows.step);
    m.set("fan_angle_rule", to_string(g.fan_angle_rule));
    if (g.gamma_max_override) m.set("gamma_max", *g.gamma_max_override);
    m.set("angle_unit", "radian");
}

inline ScanGeometry get_geometry(const Metadata& m) {
    ScanGeometry g;
    g.kind = detector_kind_from_string(m.get("geometry"));
    g.trajectory_radius = m.get_double("trajectory_radius");
    g.object_radius = m.get_double("object_radius");
    g.source_detector_distance = m.get_double("source_detector_distance");
    g.lambda_start = m.get_double("lambda_start");
    g.lambda_end = m.get_double("lambda_end");
    g.lambda_step = m.get_double("lambda_step");
    g.columns = {m.get_int("columns_half"), m.get_double("columns_step")};
    g.rows = {m.get_int("rows_half"), m.get_double("rows_step")};
    g.fan_angle_rule = fan_angle_rule_from_string(m.get("fan_angle_rule"));
    if (m.has("gamma_max")) g.gamma_max_override = m.get_double("gamma_max");
    g.validate();
    return g;
}

inline void put_grid(Metadata& m, const Grid& g) {
    m.set("nx", g.nx);
    m.set("ny", g.ny);
    m.set("nz", g.nz);
    m.set("spacing", g.spacing);
    m.set("spacing_z", g.spacing_z);
}

inline Grid get_grid(const Metadata& m) {
    Grid g{m.get_int("nx"), m.get_int("ny"), m.get_int("nz"), m.get_double("spacing"), m.get_double("spacing_z")};
    g.validate();
    return g;
}

// ---------------------------------------------------------------------------
// Projections and images
// ---------------------------------------------------------------------------

inline Metadata projection_metadata(const Projections& p, const Metadata& extra = {}) {
    Metadata m = extra;
    m.set("content", "projections");
    m.set("format", "f32le");
    m.set("layout", "view,row,column");
    m.set("views", p.views());
    m.set("rows", p.rows());
    m.set("columns", p.cols());
    m.set("version", kVersion);
    put_geometry(m, p.geometry());
    return m;
}

inline void write_projections(const std::string& base, const Projections& p, const Metadata& extra = {}) {
    const auto paths = DatasetPaths::of(base);
    AtomicWriter w;
    w.add(paths.raw, encode_f32le(p.values()));
    w.add(paths.meta, projection_metadata(p, extra).serialize());
    w.commit();
}

struct LoadedProjections {
    Projections data;
    Metadata meta;
};

inline LoadedProjections read_projections(const std::string& base) {
    const auto paths = DatasetPaths::of(base);
    Metadata m = Metadata::parse(read_text_file(paths.meta), paths.meta);
    require(m.get("content") == "projections", paths.meta + ": not a projection dataset");
    require(m.get("format") == "f32le", paths.meta + ": unsupported format '" + m.get("format") + "'");
    const ScanGeometry g = get_geometry(m);
    Projections p(g);
    const int views = m.get_int("views"), rows = m.get_int("rows"), cols = m.get_int("columns");
    require(views == p.views() && rows == p.rows() && cols == p.cols(),
            "projection shape " + std::to_string(views) + "x" + std::to_string(rows) + "x" + std::to_string(cols) +
                " does not match geometry shape " + std::to_string(p.views()) + "x" + std::to_string(p.rows()) + "x" +
                std::to_string(p.cols()));
    std::vector<double> v = decode_f32le(read_text_file(paths.raw));
    require(v.size() == p.size(), "raw data holds " + std::to_string(v.size()) + " values but shape " +
                                      std::to_string(views) + "x" + std::to_string(rows) + "x" +
                                      std::to_string(cols) + " needs " + std::to_string(p.size()));
    p.values() = std::move(v);
    return {std::move(p), std::move(m)};
}

inline void write_image(const std::string& base, const Image& img, const Metadata& extra = {}) {
    const auto paths = DatasetPaths::of(base);
    Metadata m = extra;
    m.set("content", "image");
    m.set("format", "f32le");
    m.set("layout", "z,y,x");
    m.set("version", kVersion);
    put_grid(m, img.grid);
    AtomicWriter w;
    w.add(paths.raw, encode_f32le(img.data));
    w.add(paths.meta, m.serialize());
    w.commit();
}

struct LoadedImage {
    Image image;
    Metadata meta;
};

inline LoadedImage read_image(const std::string& base) {
    const auto paths = DatasetPaths::of(base);
    Metadata m = Metadata::parse(read_text_file(paths.meta), paths.meta);
    require(m.get("content") == "image", paths.meta + ": not an image dataset");
    require(m.get("format") == "f32le", paths.meta + ": unsupported format '" + m.get("format") + "'");
    Image img(get_grid(m));
    std::vector<double> v = decode_f32le(read_text_file(paths.raw));
    require(v.size() == img.data.size(), "raw data holds " + std::to_string(v.size()) + " values but grid " +
                                             std::to_string(img.grid.nx) + "x" + std::to_string(img.grid.ny) + "x" +
                                             std::to_string(img.grid.nz) + " needs " +
                                             std::to_string(img.data.size()));
    img.data = std::move(v);
    return {std::move(img), std::move(m)};
}

/// 8-bit binary PGM of slice k, mapping [lo, hi] to [0, 255].
inline std::string encode_pgm(const Image& img, int k, double lo, double hi) {
    require(hi > lo, "PGM window must satisfy lo < hi");
    const Grid& g = img.grid;
    std::string out = "P5\n" + std::to_string(g.nx) + " " + std::to_string(g.ny) + "\n255\n";
    // Row 0 of the file is the top of the image (largest y).
    for (int j = g.ny - 1; j >= 0; --j)
        for (int i = 0; i < g.nx; ++i) {
            const double t = std::clamp((img.at(i, j, k) - lo) / (hi - lo), 0.0, 1.0);
            out += static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t)));
        }
    return out;
}

// ---------------------------------------------------------------------------
// Phantom definition files
//
//   2D: x y a b angle_deg density
//   3D: x y z a b c phi_deg theta_deg psi_deg density
// ---------------------------------------------------------------------------

inline std::string serialize_phantom(const Phantom& p) {
    std::string out = p.dim() == 2 ? "# x y a b angle_deg density\n"
                                   : "# x y z a b c phi_deg theta_deg psi_deg density\n";
    auto f = [](double v) { return Metadata::format_double(v); };
    for (const auto& e : p.components()) {
        if (p.dim() == 2)
            out += f(e.center.x) + " " + f(e.center.y) + " " + f(e.semi_axes.x) + " " + f(e.semi_axes.y) + " " +
                   f(rad2deg(e.angles.x)) + " " + f(e.density) + "\n";
        else
            out += f(e.center.x) + " " + f(e.center.y) + " " + f(e.center.z) + " " + f(e.semi_axes.x) + " " +
                   f(e.semi_axes.y) + " " + f(e.semi_axes.z) + " " + f(rad2deg(e.angles.x)) + " " +
                   f(rad2deg(e.angles.y)) + " " + f(rad2deg(e.angles.z)) + " " + f(e.density) + "\n";
    }
    return out;
}

inline Phantom parse_phantom(const std::string& text, double object_radius, const std::string& origin = "phantom") {
    std::istringstream in(text);
    std::string line;
    int number = 0;
    int dim = 0;
    std::vector<Ellipsoid> comps;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<double> v;
        std::string tok;
        while (ls >> tok) {
            char* end = nullptr;
            const double d = std::strtod(tok.c_str(), &end);
            require(end != tok.c_str() && *end == '\0', origin + ":" + std::to_string(number) + ": '" + tok +
                                                            "' is not a number");
            v.push_back(d);
        }
        if (v.empty()) continue;
        require(v.size() == 6 || v.size() == 10, origin + ":" + std::to_string(number) + ": expected 6 (2D) or 10 (3D) fields, got " +
                                                     std::to_string(v.size()));
        const int d = v.size() == 6 ? 2 : 3;
        require(dim == 0 || dim == d, origin + ":" + std::to_string(number) + ": mixes 2D and 3D components");
        dim = d;
        Ellipsoid e;
        if (d == 2) {
            e.center = {v[0], v[1], 0.0};
            e.semi_axes = {v[2], v[3], 1.0};
            e.angles = {deg2rad(v[4]), 0.0, 0.0};
            e.density = v[5];
        } else {
            e.center = {v[0], v[1], v[2]};
            e.semi_axes = {v[3], v[4], v[5]};
            e.angles = {deg2rad(v[6]), deg2rad(v[7]), deg2rad(v[8])};
            e.density = v[9];
        }
        comps.push_back(e);
    }
    require(dim != 0, origin + ": no phantom components");
    return Phantom(dim, std::move(comps), object_radius);
}

}  // namespace arcfbp
