#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coral/geometry.hpp"
#include "coral/world.hpp"

namespace coral {

// Cell classes in upgrade-priority order: a cell only ever moves to a higher
// class, which is what makes the map a persistent memory.
enum class CellClass : uint8_t { unknown = 0, free_space = 1, obstacle = 2, target = 3 };

inline const char* cell_class_name(CellClass c) {
    switch (c) {
        case CellClass::unknown: return "unknown";
        case CellClass::free_space: return "free";
        case CellClass::obstacle: return "obstacle";
        case CellClass::target: return "target";
    }
    return "?";
}

struct PixelCoord {
    int x = 0;
    int y = 0;
    bool operator==(const PixelCoord& o) const { return x == o.x && y == o.y; }
};

struct OccupancyGrid {
    double resolution = 10.0;  // cells per meter
    Vec2 origin;               // world point at the grid center
    int width = 0, height = 0;
    std::vector<CellClass> cells;
    std::vector<uint8_t> explored;

    // Revision counters let consumers cache derived products (component
    // labeling, distance fields) between frames.
    uint64_t target_revision = 0;
    uint64_t obstacle_revision = 0;
    size_t explored_cells = 0;

    // Bounding box of target cells, for cheap component labeling.
    int tgt_min_x = 0, tgt_min_y = 0, tgt_max_x = -1, tgt_max_y = -1;

    static OccupancyGrid covering(const Rect& bounds, double resolution) {
        OccupancyGrid g;
        g.resolution = resolution;
        g.origin = bounds.center();
        g.width = static_cast<int>(std::ceil(bounds.width() * resolution));
        g.height = static_cast<int>(std::ceil(bounds.height() * resolution));
        g.cells.assign(static_cast<size_t>(g.width) * g.height, CellClass::unknown);
        g.explored.assign(static_cast<size_t>(g.width) * g.height, 0);
        return g;
    }

    bool in_grid(PixelCoord p) const {
        return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height;
    }
    size_t index(PixelCoord p) const { return static_cast<size_t>(p.y) * width + p.x; }

    // Unchecked fast paths.
    PixelCoord pixel_of(const Vec2& p) const {
        return {static_cast<int>(std::floor((p.x - origin.x) * resolution + width * 0.5)),
                static_cast<int>(std::floor((p.y - origin.y) * resolution + height * 0.5))};
    }
    Vec2 pixel_center(PixelCoord p) const {
        return {origin.x + (p.x + 0.5 - width * 0.5) / resolution,
                origin.y + (p.y + 0.5 - height * 0.5) / resolution};
    }

    // Checked conversions; out-of-grid coordinates are a boundary error.
    std::optional<PixelCoord> world_to_pixel(const Vec2& p) const {
        PixelCoord c = pixel_of(p);
        if (!in_grid(c)) return std::nullopt;
        return c;
    }
    std::optional<Vec2> pixel_to_world(PixelCoord p) const {
        if (!in_grid(p)) return std::nullopt;
        return pixel_center(p);
    }

    CellClass at(PixelCoord p) const { return cells[index(p)]; }
    bool is_explored(PixelCoord p) const { return explored[index(p)] != 0; }

    void mark_explored(PixelCoord p) {
        size_t i = index(p);
        if (!explored[i]) {
            explored[i] = 1;
            ++explored_cells;
        }
    }

    // Monotone class update; target/obstacle cells are always explored.
    void upgrade(PixelCoord p, CellClass c) {
        size_t i = index(p);
        if (static_cast<uint8_t>(c) > static_cast<uint8_t>(cells[i])) {
            if (c == CellClass::target) {
                ++target_revision;
                if (tgt_max_x < tgt_min_x) {
                    tgt_min_x = tgt_max_x = p.x;
                    tgt_min_y = tgt_max_y = p.y;
                } else {
                    tgt_min_x = std::min(tgt_min_x, p.x);
                    tgt_min_y = std::min(tgt_min_y, p.y);
                    tgt_max_x = std::max(tgt_max_x, p.x);
                    tgt_max_y = std::max(tgt_max_y, p.y);
                }
            } else if (c == CellClass::obstacle) {
                ++obstacle_revision;
            }
            cells[i] = c;
        }
        if (c == CellClass::target || c == CellClass::obstacle) mark_explored(p);
    }

    size_t explored_count() const { return explored_cells; }
    size_t count_class(CellClass c) const {
        size_t n = 0;
        for (CellClass v : cells) n += (v == c);
        return n;
    }
};

// Pinhole camera with a rigid camera-to-world transform. The simulator builds
// one per frame from the robot pose; tests exercise it standalone.
struct CameraModel {
    double fx = 1.0, fy = 1.0;
    double cx = 0.0, cy = 0.0;
    Mat3 rotation;   // camera-to-world
    Vec3 translation;

    bool valid() const {
        if (fx <= 0.0 || fy <= 0.0) return false;
        // Orthonormality and positive determinant.
        Vec3 c0{rotation.m[0][0], rotation.m[1][0], rotation.m[2][0]};
        Vec3 c1{rotation.m[0][1], rotation.m[1][1], rotation.m[2][1]};
        Vec3 c2{rotation.m[0][2], rotation.m[1][2], rotation.m[2][2]};
        auto near1 = [](double v) { return std::abs(v - 1.0) < 1e-9; };
        auto near0 = [](double v) { return std::abs(v) < 1e-9; };
        return near1(c0.norm()) && near1(c1.norm()) && near1(c2.norm()) &&
               near0(c0.dot(c1)) && near0(c0.dot(c2)) && near0(c1.dot(c2)) &&
               std::abs(rotation.det() - 1.0) < 1e-9;
    }
};

// Back-projects pixel (u, v) at depth z through the camera-to-world
// transform: homogeneous ray scaling followed by the rigid transform.
inline Vec3 backproject(double u, double v, double z, const CameraModel& cam) {
    if (z <= 0.0) throw std::invalid_argument("backproject requires positive depth");
    Vec3 p_cam{(u - cam.cx) / cam.fx * z, (v - cam.cy) / cam.fy * z, z};
    return cam.rotation * p_cam + cam.translation;
}

// Scanline camera for the planar simulator: optical axis along the robot
// heading, image x to the robot's right, image y along world -z. Ray i of a
// W-ray frame maps to the continuous pixel u = cx - fx*tan(bearing_i).
inline CameraModel scanline_camera(const Pose& pose, int rays, double fov) {
    CameraModel cam;
    cam.fx = cam.fy = (rays / 2.0) / std::tan(fov / 2.0);
    cam.cx = rays / 2.0;
    cam.cy = 0.5;
    double c = std::cos(pose.heading), s = std::sin(pose.heading);
    Vec3 x_axis{s, -c, 0.0};   // right
    Vec3 y_axis{0.0, 0.0, -1.0};
    Vec3 z_axis{c, s, 0.0};    // forward
    cam.rotation = Mat3::from_columns(x_axis, y_axis, z_axis);
    cam.translation = {pose.position.x, pose.position.y, 0.0};
    return cam;
}

namespace detail {

// Visits the grid cells crossed by a segment of length `range` from `origin`
// along `dir`, in order, as (cell, entry distance). Integer stepping with
// exact boundary distances, so no cell on the segment is skipped.
template <typename Fn>
inline void walk_cells(const OccupancyGrid& g, const Vec2& origin, const Vec2& dir,
                       double range, Fn&& visit) {
    PixelCoord c = g.pixel_of(origin);
    int step_x = dir.x > 0 ? 1 : (dir.x < 0 ? -1 : 0);
    int step_y = dir.y > 0 ? 1 : (dir.y < 0 ? -1 : 0);
    double cell = 1.0 / g.resolution;
    auto edge_x = [&](int px) { return g.origin.x + (px - g.width * 0.5) / g.resolution; };
    auto edge_y = [&](int py) { return g.origin.y + (py - g.height * 0.5) / g.resolution; };
    double inv_dx = dir.x != 0.0 ? 1.0 / dir.x : 0.0;
    double inv_dy = dir.y != 0.0 ? 1.0 / dir.y : 0.0;
    double t_max_x = dir.x > 0   ? (edge_x(c.x + 1) - origin.x) * inv_dx
                     : dir.x < 0 ? (edge_x(c.x) - origin.x) * inv_dx
                                 : std::numeric_limits<double>::infinity();
    double t_max_y = dir.y > 0   ? (edge_y(c.y + 1) - origin.y) * inv_dy
                     : dir.y < 0 ? (edge_y(c.y) - origin.y) * inv_dy
                                 : std::numeric_limits<double>::infinity();
    double t_delta_x = step_x != 0 ? cell * std::abs(inv_dx)
                                   : std::numeric_limits<double>::infinity();
    double t_delta_y = step_y != 0 ? cell * std::abs(inv_dy)
                                   : std::numeric_limits<double>::infinity();
    double t = 0.0;
    while (t < range) {
        double t_exit = std::min(t_max_x, t_max_y);
        if (!visit(c, t, t_exit)) return;
        if (t_exit >= range) return;
        if (t_max_x < t_max_y) {
            t = t_max_x;
            t_max_x += t_delta_x;
            c.x += step_x;
        } else {
            t = t_max_y;
            t_max_y += t_delta_y;
            c.y += step_y;
        }
    }
}

}  // namespace detail

// Folds one frame into the grid. Hit points are back-projected through the
// camera model and classified by their semantic label; cells crossed before
// the hit become free, and the explored mask is unioned per ray up to
// min(depth, d_max).
inline void integrate_frame(OccupancyGrid& grid, const SensorFrame& frame,
                            const CameraModel& cam) {
    const int w = frame.width();
    const double cell = 1.0 / grid.resolution;
    for (int i = 0; i < w; ++i) {
        double beta = frame.fov * (static_cast<double>(i) / (w - 1) - 0.5);
        bool hit = std::isfinite(frame.depth[i]) && frame.depth[i] <= frame.d_max;
        Vec2 dir = unit_from_angle(frame.bearing(i));
        if (!hit) {
            detail::walk_cells(grid, frame.pose.position, dir, frame.d_max,
                               [&](PixelCoord c, double, double) {
                                   if (!grid.in_grid(c)) return false;
                                   grid.upgrade(c, CellClass::free_space);
                                   grid.mark_explored(c);
                                   return true;
                               });
            continue;
        }
        // Pinhole path: pixel u on the scanline row, depth along the optical
        // axis, then camera-to-world. Hits land exactly on cell boundaries,
        // so the hit cell is taken a quarter cell past the surface point.
        double u = cam.cx - cam.fx * std::tan(beta);
        double z = frame.depth[i] * std::cos(beta);
        Vec3 pw = backproject(u, cam.cy, z, cam);
        Vec2 hit_point{pw.x, pw.y};
        PixelCoord hit_px = grid.pixel_of(hit_point + dir * (0.25 * cell));
        double t_hit = distance(frame.pose.position, hit_point);
        CellClass hit_class = frame.label[i] == RayLabel::target     ? CellClass::target
                              : frame.label[i] == RayLabel::obstacle ? CellClass::obstacle
                                                                     : CellClass::free_space;
        detail::walk_cells(grid, frame.pose.position, dir, t_hit + cell,
                           [&](PixelCoord c, double t_entry, double) {
                               if (!grid.in_grid(c)) return false;
                               if (c == hit_px) {
                                   grid.upgrade(c, hit_class);
                                   grid.mark_explored(c);
                                   return false;
                               }
                               if (t_entry > t_hit) return false;
                               grid.upgrade(c, CellClass::free_space);
                               grid.mark_explored(c);
                               return true;
                           });
    }
}

// -------- Persistence --------
//
// Versioned dump: one text header line, then raw class bytes and explored
// bytes. Round-trips exactly.

inline void save_grid(const OccupancyGrid& g, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write grid file: " + path);
    char header[256];
    std::snprintf(header, sizeof(header), "coral-grid 1 %.17g %.17g %.17g %d %d\n",
                  g.resolution, g.origin.x, g.origin.y, g.width, g.height);
    f << header;
    f.write(reinterpret_cast<const char*>(g.cells.data()), g.cells.size());
    f.write(reinterpret_cast<const char*>(g.explored.data()), g.explored.size());
    if (!f) throw std::runtime_error("grid write failed: " + path);
}

inline OccupancyGrid load_grid(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read grid file: " + path);
    std::string magic;
    int version = 0;
    OccupancyGrid g;
    f >> magic >> version >> g.resolution >> g.origin.x >> g.origin.y >> g.width >> g.height;
    if (magic != "coral-grid" || version != 1)
        throw std::runtime_error("bad grid file header: " + path);
    f.get();  // newline
    size_t n = static_cast<size_t>(g.width) * g.height;
    g.cells.resize(n);
    g.explored.resize(n);
    f.read(reinterpret_cast<char*>(g.cells.data()), n);
    f.read(reinterpret_cast<char*>(g.explored.data()), n);
    if (!f) throw std::runtime_error("grid read failed: " + path);
    for (uint8_t e : g.explored) g.explored_cells += e;
    // Rebuild the target bbox cache.
    g.tgt_max_x = -1;
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x)
            if (g.at({x, y}) == CellClass::target) {
                if (g.tgt_max_x < g.tgt_min_x) {
                    g.tgt_min_x = g.tgt_max_x = x;
                    g.tgt_min_y = g.tgt_max_y = y;
                } else {
                    g.tgt_min_x = std::min(g.tgt_min_x, x);
                    g.tgt_min_y = std::min(g.tgt_min_y, y);
                    g.tgt_max_x = std::max(g.tgt_max_x, x);
                    g.tgt_max_y = std::max(g.tgt_max_y, y);
                }
            }
    return g;
}

}  // namespace coral
