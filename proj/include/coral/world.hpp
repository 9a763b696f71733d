#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coral/geometry.hpp"
#include "coral/random.hpp"

namespace coral {

enum class Topology { L, S, K, E, O };

inline const char* topology_name(Topology t) {
    switch (t) {
        case Topology::L: return "L";
        case Topology::S: return "S";
        case Topology::K: return "K";
        case Topology::E: return "E";
        case Topology::O: return "O";
    }
    return "?";
}

inline Topology topology_from_name(const std::string& s) {
    if (s == "L") return Topology::L;
    if (s == "S") return Topology::S;
    if (s == "K") return Topology::K;
    if (s == "E") return Topology::E;
    if (s == "O") return Topology::O;
    throw std::invalid_argument("unknown topology: " + s);
}

// Reef spine: a small graph of layout edges in unit-square coordinates,
// scaled to world size at generation time. Cluster stations are sampled
// along its edges; only density and jitter are randomized per seed.
struct SpineGraph {
    std::vector<Vec2> vertices;
    std::vector<std::pair<int, int>> edges;

    int degree(int v) const {
        int d = 0;
        for (auto& e : edges) d += (e.first == v) + (e.second == v);
        return d;
    }
    int branch_vertex_count() const {
        int n = 0;
        for (int v = 0; v < static_cast<int>(vertices.size()); ++v)
            if (degree(v) >= 3) ++n;
        return n;
    }
    double total_length() const {
        double s = 0.0;
        for (auto& e : edges) s += distance(vertices[e.first], vertices[e.second]);
        return s;
    }
};

// Fixed polyline templates per class. O closes on itself via the edge list;
// vertex 0 is also the start-region anchor.
inline SpineGraph topology_spine(Topology t) {
    SpineGraph g;
    auto V = [&](double x, double y) {
        g.vertices.push_back({x, y});
        return static_cast<int>(g.vertices.size()) - 1;
    };
    auto E = [&](int a, int b) { g.edges.push_back({a, b}); };
    switch (t) {
        case Topology::L: {
            int a = V(0.20, 0.15), b = V(0.20, 0.80), c = V(0.82, 0.80);
            E(a, b); E(b, c);
            break;
        }
        case Topology::S: {
            int a = V(0.18, 0.14), b = V(0.80, 0.30), c = V(0.20, 0.55), d = V(0.82, 0.82);
            E(a, b); E(b, c); E(c, d);
            break;
        }
        case Topology::K: {
            int a = V(0.22, 0.14), b = V(0.22, 0.50), c = V(0.22, 0.85);
            int d = V(0.80, 0.85), e = V(0.80, 0.16);
            E(a, b); E(b, c); E(b, d); E(b, e);
            break;
        }
        case Topology::E: {
            int a = V(0.22, 0.14), b = V(0.22, 0.50), c = V(0.22, 0.86);
            int p1 = V(0.80, 0.14), p2 = V(0.80, 0.50), p3 = V(0.80, 0.86);
            E(a, b); E(b, c); E(a, p1); E(b, p2); E(c, p3);
            break;
        }
        case Topology::O: {
            int a = V(0.24, 0.22), b = V(0.78, 0.22), c = V(0.78, 0.78), d = V(0.24, 0.78);
            E(a, b); E(b, c); E(c, d); E(d, a);
            break;
        }
    }
    return g;
}

struct Obstacle {
    Vec2 center;
    double radius = 0.0;
};

struct TargetCluster {
    int id = 0;
    std::vector<CellIndex> cells;  // world-raster cells, sorted
    Vec2 centroid_gt;
};

struct WorldModel {
    Rect bounds;
    Topology topology = Topology::L;
    double cell_size = 0.1;  // world raster pitch, meters
    std::vector<TargetCluster> clusters;
    std::vector<Obstacle> obstacles;
    uint64_t seed = 0;
    Pose start;
    SpineGraph spine;  // scaled to world coordinates

    // Raster cache: cluster id per world cell, -1 when empty.
    int raster_w = 0, raster_h = 0;
    std::vector<int32_t> cluster_id_at;

    Vec2 cell_center(CellIndex c) const {
        return {bounds.lo.x + (c.x + 0.5) * cell_size,
                bounds.lo.y + (c.y + 0.5) * cell_size};
    }
    CellIndex cell_of(const Vec2& p) const {
        return {static_cast<int>(std::floor((p.x - bounds.lo.x) / cell_size)),
                static_cast<int>(std::floor((p.y - bounds.lo.y) / cell_size))};
    }
    bool cell_in_raster(CellIndex c) const {
        return c.x >= 0 && c.y >= 0 && c.x < raster_w && c.y < raster_h;
    }
    int32_t cluster_at(CellIndex c) const {
        if (!cell_in_raster(c)) return -1;
        return cluster_id_at[static_cast<size_t>(c.y) * raster_w + c.x];
    }

    void rebuild_raster() {
        raster_w = static_cast<int>(std::lround(bounds.width() / cell_size));
        raster_h = static_cast<int>(std::lround(bounds.height() / cell_size));
        cluster_id_at.assign(static_cast<size_t>(raster_w) * raster_h, -1);
        for (const auto& cl : clusters)
            for (const auto& c : cl.cells)
                if (cell_in_raster(c))
                    cluster_id_at[static_cast<size_t>(c.y) * raster_w + c.x] = cl.id;
    }
};

struct WorldGenConfig {
    double cluster_spacing = 2.6;       // station pitch along the spine, m
    double density_min = 0.60;          // per-seed cluster placement probability range
    double density_max = 0.95;
    double cluster_radius_min = 0.62;
    double cluster_radius_max = 0.95;
    double min_cluster_separation = 2.6;  // centroid-to-centroid, m
    int min_cluster_area_cells = 100;
    double obstacle_radius_min = 0.25;
    double obstacle_radius_max = 0.50;
    double obstacle_gap = 1.2;          // edge-to-edge clearance between obstacles, m
    double obstacle_spine_clearance = 1.1;  // center-to-spine beyond radius, m
    double obstacle_cluster_clearance = 0.8;
    double obstacle_bounds_margin = 0.5;
    double start_clear_radius = 1.5;    // no obstacle edge inside this disc
    int start_obstacles_base = 4;       // start region gets these plus density share
    double robot_radius = 0.3;
};

namespace detail {

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = ab.norm_sq();
    if (len2 == 0.0) return distance(p, a);
    double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

inline double spine_distance(const SpineGraph& g, const Vec2& p) {
    double best = std::numeric_limits<double>::infinity();
    for (auto& e : g.edges)
        best = std::min(best, point_segment_distance(p, g.vertices[e.first], g.vertices[e.second]));
    return best;
}

// Rasterizes a blob (union of discs) onto the world cell grid.
inline std::vector<CellIndex> rasterize_blob(const WorldModel& w,
                                             const std::vector<Obstacle>& discs) {
    double lo_x = 1e18, lo_y = 1e18, hi_x = -1e18, hi_y = -1e18;
    for (auto& d : discs) {
        lo_x = std::min(lo_x, d.center.x - d.radius);
        lo_y = std::min(lo_y, d.center.y - d.radius);
        hi_x = std::max(hi_x, d.center.x + d.radius);
        hi_y = std::max(hi_y, d.center.y + d.radius);
    }
    CellIndex c0 = w.cell_of({lo_x, lo_y});
    CellIndex c1 = w.cell_of({hi_x, hi_y});
    std::vector<CellIndex> cells;
    for (int y = std::max(0, c0.y); y <= std::min(w.raster_h - 1, c1.y); ++y)
        for (int x = std::max(0, c0.x); x <= std::min(w.raster_w - 1, c1.x); ++x) {
            Vec2 p = w.cell_center({x, y});
            for (auto& d : discs)
                if (distance(p, d.center) <= d.radius) {
                    cells.push_back({x, y});
                    break;
                }
        }
    return cells;
}

}  // namespace detail

// Deterministic procedural reef. Cluster stations follow the topology spine;
// obstacle placement is denser near the start and interspersed along the reef
// elsewhere, with clearances that keep the spine corridor traversable.
inline WorldModel generate_world(Topology topology, double size_m, uint64_t seed,
                                 const WorldGenConfig& cfg = {}) {
    if (size_m < 20.0 || size_m > 30.0)
        throw std::invalid_argument("world size must be within [20, 30] m");

    WorldModel w;
    w.bounds = {{0.0, 0.0}, {size_m, size_m}};
    w.topology = topology;
    w.seed = seed;
    w.spine = topology_spine(topology);
    for (auto& v : w.spine.vertices) v = v * size_m;
    w.rebuild_raster();

    Rng rng(derive_seed(seed, 0xC0'5EED));

    // Start pose: behind the first spine vertex, looking along the first edge.
    {
        const auto& e0 = w.spine.edges.front();
        Vec2 a = w.spine.vertices[e0.first];
        Vec2 dir = (w.spine.vertices[e0.second] - a).normalized();
        Vec2 s = a - dir * 2.0;
        s.x = std::clamp(s.x, 1.0, size_m - 1.0);
        s.y = std::clamp(s.y, 1.0, size_m - 1.0);
        w.start = {s, std::atan2(dir.y, dir.x)};
    }

    const double density = rng.uniform(cfg.density_min, cfg.density_max);

    // Clusters along the spine.
    int next_cluster_id = 0;
    std::vector<Vec2> accepted_centers;
    auto try_place_cluster = [&](Vec2 station, Vec2 lateral) {
        Vec2 center = station + lateral * rng.gaussian(0.0, 0.30);
        center.x = std::clamp(center.x, 1.2, size_m - 1.2);
        center.y = std::clamp(center.y, 1.2, size_m - 1.2);
        for (auto& c : accepted_centers)
            if (distance(c, center) < cfg.min_cluster_separation) return;
        double r0 = rng.uniform(cfg.cluster_radius_min, cfg.cluster_radius_max);
        int ndiscs = 1 + rng.uniform_int(0, 2);
        std::vector<Obstacle> discs;
        discs.push_back({center, r0});
        for (int i = 1; i < ndiscs; ++i) {
            double ang = rng.uniform(0.0, 2.0 * kPi);
            double off = rng.uniform(0.2, 0.5) * r0;
            double ri = r0 * rng.uniform(0.6, 0.9);
            discs.push_back({center + unit_from_angle(ang) * off, ri});
        }
        std::vector<CellIndex> cells;
        for (int attempt = 0; attempt < 3; ++attempt) {
            cells = detail::rasterize_blob(w, discs);
            if (static_cast<int>(cells.size()) >= cfg.min_cluster_area_cells) break;
            for (auto& d : discs) d.radius *= 1.3;
        }
        if (static_cast<int>(cells.size()) < cfg.min_cluster_area_cells) return;
        std::sort(cells.begin(), cells.end());
        TargetCluster cl;
        cl.id = next_cluster_id++;
        cl.cells = std::move(cells);
        Vec2 sum{0, 0};
        for (auto& c : cl.cells) sum += w.cell_center(c);
        cl.centroid_gt = sum / static_cast<double>(cl.cells.size());
        accepted_centers.push_back(center);
        w.clusters.push_back(std::move(cl));
    };

    for (auto& e : w.spine.edges) {
        Vec2 a = w.spine.vertices[e.first], b = w.spine.vertices[e.second];
        double len = distance(a, b);
        Vec2 dir = (b - a) / len;
        Vec2 lat = dir.perp_left();
        for (double s = cfg.cluster_spacing * 0.6; s < len - 0.3; s += cfg.cluster_spacing) {
            double sj = s + rng.uniform(-0.2, 0.2) * cfg.cluster_spacing;
            sj = std::clamp(sj, 0.0, len);
            if (rng.uniform() > density) continue;
            try_place_cluster(a + dir * sj, lat);
        }
    }
    // Guarantee at least two clusters so a chain always exists.
    if (w.clusters.size() < 2) {
        for (auto& e : w.spine.edges) {
            try_place_cluster(w.spine.vertices[e.first], (w.spine.vertices[e.second] - w.spine.vertices[e.first]).normalized().perp_left());
            try_place_cluster(w.spine.vertices[e.second], (w.spine.vertices[e.second] - w.spine.vertices[e.first]).normalized().perp_left());
            if (w.clusters.size() >= 2) break;
        }
    }
    w.rebuild_raster();

    // Obstacles. Clearance rules keep the corridor along the spine open and
    // the start disc free.
    Vec2 initial_wp = w.start.position + w.start.forward() * 3.0;
    auto obstacle_ok = [&](const Obstacle& o) {
        double m = cfg.obstacle_bounds_margin + o.radius;
        if (o.center.x < m || o.center.y < m || o.center.x > size_m - m || o.center.y > size_m - m)
            return false;
        if (distance(o.center, w.start.position) < cfg.start_clear_radius + o.radius + cfg.robot_radius)
            return false;
        if (distance(o.center, initial_wp) < 1.0 + o.radius) return false;
        if (detail::spine_distance(w.spine, o.center) < cfg.obstacle_spine_clearance + o.radius)
            return false;
        for (auto& e : w.obstacles)
            if (distance(o.center, e.center) < o.radius + e.radius + cfg.obstacle_gap)
                return false;
        // Keep clear of rasterized cluster cells.
        CellIndex c0 = w.cell_of(o.center - Vec2{1, 1} * (o.radius + cfg.obstacle_cluster_clearance));
        CellIndex c1 = w.cell_of(o.center + Vec2{1, 1} * (o.radius + cfg.obstacle_cluster_clearance));
        for (int y = std::max(0, c0.y); y <= std::min(w.raster_h - 1, c1.y); ++y)
            for (int x = std::max(0, c0.x); x <= std::min(w.raster_w - 1, c1.x); ++x)
                if (w.cluster_at({x, y}) >= 0 &&
                    distance(w.cell_center({x, y}), o.center) < o.radius + cfg.obstacle_cluster_clearance)
                    return false;
        return true;
    };

    int n_start = cfg.start_obstacles_base + static_cast<int>(std::lround(3.0 * density));
    for (int i = 0; i < n_start; ++i) {
        for (int attempt = 0; attempt < 60; ++attempt) {
            double ang = rng.uniform(0.0, 2.0 * kPi);
            double d = rng.uniform(2.2, 5.5);
            Obstacle o{w.start.position + unit_from_angle(ang) * d,
                       rng.uniform(cfg.obstacle_radius_min, cfg.obstacle_radius_max)};
            if (obstacle_ok(o)) {
                w.obstacles.push_back(o);
                break;
            }
        }
    }
    int n_rest = static_cast<int>(std::lround(density * w.spine.total_length() / 2.2));
    for (int i = 0; i < n_rest; ++i) {
        for (int attempt = 0; attempt < 60; ++attempt) {
            // Sample a spine point, offset laterally.
            auto& e = w.spine.edges[rng.uniform_int(0, static_cast<int>(w.spine.edges.size()) - 1)];
            Vec2 a = w.spine.vertices[e.first], b = w.spine.vertices[e.second];
            double t = rng.uniform();
            Vec2 at = a + (b - a) * t;
            Vec2 lat = (b - a).normalized().perp_left();
            double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
            Obstacle o{at + lat * (side * rng.uniform(1.6, 3.2)),
                       rng.uniform(cfg.obstacle_radius_min, cfg.obstacle_radius_max)};
            if (obstacle_ok(o)) {
                w.obstacles.push_back(o);
                break;
            }
        }
    }
    return w;
}

// -------- Sensor synthesis --------

enum class RayLabel : uint8_t { free_space = 0, obstacle = 1, target = 2 };

inline const char* ray_label_name(RayLabel l) {
    switch (l) {
        case RayLabel::free_space: return "free";
        case RayLabel::obstacle: return "obstacle";
        case RayLabel::target: return "target";
    }
    return "?";
}

// One scanline frame: W range/label pairs plus the capture geometry.
struct SensorFrame {
    std::vector<double> depth;     // range along the ray, +inf when no hit
    std::vector<RayLabel> label;
    Pose pose;
    double fov = 0.0;
    double d_max = 0.0;

    int width() const { return static_cast<int>(depth.size()); }
    double bearing(int i) const {
        return pose.heading + fov * (static_cast<double>(i) / (width() - 1) - 0.5);
    }
};

namespace detail {

// First positive intersection distance of ray (o, dir) with a circle, or +inf.
inline double ray_circle(const Vec2& o, const Vec2& dir, const Obstacle& c) {
    Vec2 oc = o - c.center;
    double b = oc.dot(dir);
    double q = oc.norm_sq() - c.radius * c.radius;
    double disc = b * b - q;
    if (disc < 0.0) return std::numeric_limits<double>::infinity();
    double s = std::sqrt(disc);
    double t1 = -b - s, t2 = -b + s;
    if (t1 > 0.0) return t1;
    if (t2 > 0.0) return t2;  // origin inside the circle
    return std::numeric_limits<double>::infinity();
}

// Grid DDA over the world raster; returns entry distance of the first target
// cell within t_limit, or +inf. The origin cell itself is skipped so a ray
// started on top of a cluster still reports a positive range.
inline double first_target_hit(const WorldModel& w, const Vec2& o, const Vec2& dir,
                               double t_limit) {
    CellIndex c = w.cell_of(o);
    int step_x = dir.x > 0 ? 1 : (dir.x < 0 ? -1 : 0);
    int step_y = dir.y > 0 ? 1 : (dir.y < 0 ? -1 : 0);
    double inv_dx = dir.x != 0.0 ? 1.0 / dir.x : 0.0;
    double inv_dy = dir.y != 0.0 ? 1.0 / dir.y : 0.0;
    auto boundary_x = [&](int cx) { return w.bounds.lo.x + cx * w.cell_size; };
    auto boundary_y = [&](int cy) { return w.bounds.lo.y + cy * w.cell_size; };
    double t_max_x = dir.x > 0   ? (boundary_x(c.x + 1) - o.x) * inv_dx
                     : dir.x < 0 ? (boundary_x(c.x) - o.x) * inv_dx
                                 : std::numeric_limits<double>::infinity();
    double t_max_y = dir.y > 0   ? (boundary_y(c.y + 1) - o.y) * inv_dy
                     : dir.y < 0 ? (boundary_y(c.y) - o.y) * inv_dy
                                 : std::numeric_limits<double>::infinity();
    double t_delta_x = step_x != 0 ? w.cell_size * std::abs(inv_dx)
                                   : std::numeric_limits<double>::infinity();
    double t_delta_y = step_y != 0 ? w.cell_size * std::abs(inv_dy)
                                   : std::numeric_limits<double>::infinity();
    double t = 0.0;
    while (t <= t_limit) {
        if (t_max_x < t_max_y) {
            t = t_max_x;
            t_max_x += t_delta_x;
            c.x += step_x;
        } else {
            t = t_max_y;
            t_max_y += t_delta_y;
            c.y += step_y;
        }
        if (t > t_limit) break;
        if (!w.cell_in_raster(c)) break;
        if (w.cluster_at(c) >= 0) return t;
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace detail

// Casts W rays across the horizontal FOV; ray i bears
// heading + fov * (i/(W-1) - 1/2). Depth is the first hit against any
// obstacle circle or cluster cell within d_max.
inline SensorFrame render_sensor(const WorldModel& world, const Pose& pose, double fov,
                                 double d_max, int rays) {
    if (!(fov > 0.0 && fov <= kPi)) throw std::invalid_argument("fov must be in (0, pi]");
    if (rays < 3) throw std::invalid_argument("need at least 3 rays");
    if (d_max <= 0.0) throw std::invalid_argument("d_max must be positive");

    SensorFrame f;
    f.pose = pose;
    f.fov = fov;
    f.d_max = d_max;
    f.depth.resize(rays);
    f.label.resize(rays);
    for (int i = 0; i < rays; ++i) {
        Vec2 dir = unit_from_angle(f.bearing(i));
        double d_obs = std::numeric_limits<double>::infinity();
        for (const auto& o : world.obstacles)
            d_obs = std::min(d_obs, detail::ray_circle(pose.position, dir, o));
        double d_tgt = detail::first_target_hit(world, pose.position, dir,
                                                std::min(d_max, d_obs));
        double d = std::min(d_obs, d_tgt);
        if (d <= d_max) {
            f.depth[i] = d;
            f.label[i] = d_tgt <= d_obs ? RayLabel::target : RayLabel::obstacle;
        } else {
            f.depth[i] = std::numeric_limits<double>::infinity();
            f.label[i] = RayLabel::free_space;
        }
    }
    return f;
}

// True iff the robot disc intersects any obstacle or leaves the bounds.
inline bool check_collision(const WorldModel& world, const Vec2& position,
                            double robot_radius) {
    if (position.x - robot_radius < world.bounds.lo.x ||
        position.y - robot_radius < world.bounds.lo.y ||
        position.x + robot_radius > world.bounds.hi.x ||
        position.y + robot_radius > world.bounds.hi.y)
        return true;
    for (const auto& o : world.obstacles)
        if (distance(position, o.center) < o.radius + robot_radius) return true;
    return false;
}

// -------- Archival format --------
//
// Versioned plain-text record stream:
//   coral-world 1
//   topology <L|S|K|E|O>
//   seed <u64>
//   cell_size <m>
//   bounds <lo.x> <lo.y> <hi.x> <hi.y>
//   start <x> <y> <heading>
//   spine_vertex <x> <y>      (repeated)
//   spine_edge <a> <b>        (repeated)
//   obstacle <cx> <cy> <r>    (repeated)
//   cluster <id> <cx> <cy> <ncells>
//   cell <ix> <iy>            (ncells times, after its cluster line)

namespace detail {
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace detail

inline void save_world(const WorldModel& w, std::ostream& out) {
    using detail::fmt_double;
    out << "coral-world 1\n";
    out << "topology " << topology_name(w.topology) << "\n";
    out << "seed " << w.seed << "\n";
    out << "cell_size " << fmt_double(w.cell_size) << "\n";
    out << "bounds " << fmt_double(w.bounds.lo.x) << " " << fmt_double(w.bounds.lo.y) << " "
        << fmt_double(w.bounds.hi.x) << " " << fmt_double(w.bounds.hi.y) << "\n";
    out << "start " << fmt_double(w.start.position.x) << " " << fmt_double(w.start.position.y)
        << " " << fmt_double(w.start.heading) << "\n";
    for (auto& v : w.spine.vertices)
        out << "spine_vertex " << fmt_double(v.x) << " " << fmt_double(v.y) << "\n";
    for (auto& e : w.spine.edges) out << "spine_edge " << e.first << " " << e.second << "\n";
    for (auto& o : w.obstacles)
        out << "obstacle " << fmt_double(o.center.x) << " " << fmt_double(o.center.y) << " "
            << fmt_double(o.radius) << "\n";
    for (auto& c : w.clusters) {
        out << "cluster " << c.id << " " << fmt_double(c.centroid_gt.x) << " "
            << fmt_double(c.centroid_gt.y) << " " << c.cells.size() << "\n";
        for (auto& cell : c.cells) out << "cell " << cell.x << " " << cell.y << "\n";
    }
}

inline void save_world(const WorldModel& w, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write world file: " + path);
    save_world(w, f);
}

inline WorldModel load_world(std::istream& in) {
    WorldModel w;
    std::string line;
    if (!std::getline(in, line) || line != "coral-world 1")
        throw std::runtime_error("bad world file header");
    TargetCluster* open_cluster = nullptr;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "topology") {
            std::string t;
            ls >> t;
            w.topology = topology_from_name(t);
        } else if (tag == "seed") {
            ls >> w.seed;
        } else if (tag == "cell_size") {
            ls >> w.cell_size;
        } else if (tag == "bounds") {
            ls >> w.bounds.lo.x >> w.bounds.lo.y >> w.bounds.hi.x >> w.bounds.hi.y;
        } else if (tag == "start") {
            ls >> w.start.position.x >> w.start.position.y >> w.start.heading;
        } else if (tag == "spine_vertex") {
            Vec2 v;
            ls >> v.x >> v.y;
            w.spine.vertices.push_back(v);
        } else if (tag == "spine_edge") {
            int a, b;
            ls >> a >> b;
            w.spine.edges.push_back({a, b});
        } else if (tag == "obstacle") {
            Obstacle o;
            ls >> o.center.x >> o.center.y >> o.radius;
            w.obstacles.push_back(o);
        } else if (tag == "cluster") {
            TargetCluster c;
            size_t n;
            ls >> c.id >> c.centroid_gt.x >> c.centroid_gt.y >> n;
            c.cells.reserve(n);
            w.clusters.push_back(std::move(c));
            open_cluster = &w.clusters.back();
        } else if (tag == "cell") {
            if (!open_cluster) throw std::runtime_error("cell record before cluster record");
            CellIndex c;
            ls >> c.x >> c.y;
            open_cluster->cells.push_back(c);
        } else {
            throw std::runtime_error("unknown world record: " + tag);
        }
        if (!ls) throw std::runtime_error("malformed world record: " + line);
    }
    w.rebuild_raster();
    return w;
}

inline WorldModel load_world_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read world file: " + path);
    return load_world(f);
}

}  // namespace coral
