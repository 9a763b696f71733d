#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "coral/geometry.hpp"
#include "coral/grid.hpp"

namespace coral {

struct Region {
    std::vector<PixelCoord> cells;
    int area() const { return static_cast<int>(cells.size()); }
};

// 8-connected component labeling over an arbitrary bit mask, dropping
// regions smaller than a_min cells. Regions are ordered by their first cell
// in scan order, which keeps the output deterministic.
inline std::vector<Region> connected_components(const std::vector<uint8_t>& mask, int width,
                                                int height, int a_min) {
    std::vector<Region> out;
    std::vector<uint8_t> seen(mask.size(), 0);
    std::vector<PixelCoord> stack;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            size_t i = static_cast<size_t>(y) * width + x;
            if (!mask[i] || seen[i]) continue;
            Region r;
            stack.clear();
            stack.push_back({x, y});
            seen[i] = 1;
            while (!stack.empty()) {
                PixelCoord c = stack.back();
                stack.pop_back();
                r.cells.push_back(c);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        int nx = c.x + dx, ny = c.y + dy;
                        if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
                        size_t ni = static_cast<size_t>(ny) * width + nx;
                        if (mask[ni] && !seen[ni]) {
                            seen[ni] = 1;
                            stack.push_back({nx, ny});
                        }
                    }
            }
            if (r.area() >= a_min) out.push_back(std::move(r));
        }
    return out;
}

// Target-cell components of an occupancy grid, scanning only the bounding
// box of target cells.
inline std::vector<Region> target_components(const OccupancyGrid& grid, int a_min) {
    if (grid.tgt_max_x < grid.tgt_min_x) return {};
    int bw = grid.tgt_max_x - grid.tgt_min_x + 1;
    int bh = grid.tgt_max_y - grid.tgt_min_y + 1;
    std::vector<uint8_t> mask(static_cast<size_t>(bw) * bh, 0);
    for (int y = 0; y < bh; ++y)
        for (int x = 0; x < bw; ++x)
            mask[static_cast<size_t>(y) * bw + x] =
                grid.at({grid.tgt_min_x + x, grid.tgt_min_y + y}) == CellClass::target;
    auto regions = connected_components(mask, bw, bh, a_min);
    for (auto& r : regions)
        for (auto& c : r.cells) {
            c.x += grid.tgt_min_x;
            c.y += grid.tgt_min_y;
        }
    return regions;
}

// Spatial mean of the member cell coordinates.
inline Vec2 region_centroid(const Region& r) {
    if (r.cells.empty()) throw std::invalid_argument("centroid of empty region");
    Vec2 sum{0, 0};
    for (auto& c : r.cells) sum += Vec2{static_cast<double>(c.x), static_cast<double>(c.y)};
    return sum / static_cast<double>(r.cells.size());
}

// Same, in world coordinates of the grid.
inline Vec2 region_centroid_world(const Region& r, const OccupancyGrid& grid) {
    if (r.cells.empty()) throw std::invalid_argument("centroid of empty region");
    Vec2 sum{0, 0};
    for (auto& c : r.cells) sum += grid.pixel_center(c);
    return sum / static_cast<double>(r.cells.size());
}

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

}  // namespace detail

// Greedy nearest-neighbor chain over a point set: starting from point 0, the
// path repeatedly extends whichever endpoint is closest to an unvisited
// point; union-find keeps the construction a single acyclic path. Returns a
// permutation of the input indices.
inline std::vector<int> order_chain(const std::vector<Vec2>& points) {
    int n = static_cast<int>(points.size());
    if (n == 0) return {};
    if (n == 1) return {0};

    std::vector<int> path;
    path.reserve(n);
    path.push_back(0);
    std::vector<uint8_t> used(n, 0);
    used[0] = 1;
    detail::UnionFind uf(n);

    while (static_cast<int>(path.size()) < n) {
        int head = path.front(), tail = path.back();
        int best = -1, best_end = 0;  // 0 = extend tail, 1 = extend head
        double best_d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            double dt = distance(points[tail], points[i]);
            if (dt < best_d) {
                best_d = dt;
                best = i;
                best_end = 0;
            }
            double dh = distance(points[head], points[i]);
            if (dh < best_d) {
                best_d = dh;
                best = i;
                best_end = 1;
            }
        }
        // A fresh point is always its own component, so this never closes a
        // cycle; the union-find merge records the segment membership.
        bool merged = uf.unite(best_end == 0 ? tail : head, best);
        if (!merged) throw std::logic_error("chain construction produced a cycle");
        used[best] = 1;
        if (best_end == 0)
            path.push_back(best);
        else
            path.insert(path.begin(), best);
    }
    // Chains are reported head-to-tail starting at the end nearer the lowest
    // index so the labeling is deterministic.
    if (path.front() != 0 && path.back() == 0) std::reverse(path.begin(), path.end());
    return path;
}

// -------- Cross-frame tracking --------

struct CentroidTrack {
    int id = 0;
    Vec2 position;
    int age = 0;
    int misses = 0;
    bool visited = false;
};

struct TrackerConfig {
    double d_merge = 1.5;
    double alpha_old = 0.7;
    double alpha_new = 0.3;
    int max_misses = 30;
};

struct ChainEntry {
    int id = 0;
    Vec2 position;
    bool visited = false;
};

// Chain snapshot handed to planners: entries in chain order, so the index of
// an entry is its label on the map.
struct CentroidChain {
    std::vector<ChainEntry> ordered;

    int size() const { return static_cast<int>(ordered.size()); }
    bool empty() const { return ordered.empty(); }
    std::vector<std::pair<Vec2, Vec2>> edges() const {
        std::vector<std::pair<Vec2, Vec2>> e;
        for (size_t i = 1; i < ordered.size(); ++i)
            e.push_back({ordered[i - 1].position, ordered[i].position});
        return e;
    }
};

// EMA tracker with stable ids. Matching is globally greedy by ascending
// pairwise distance (ties to the lower track id, then lower detection
// index), which makes the result independent of detection order.
class CentroidTracker {
public:
    explicit CentroidTracker(const TrackerConfig& cfg = {}) : cfg_(cfg) {
        if (!(cfg.alpha_old > 0.0 && cfg.alpha_old < 1.0) ||
            !(cfg.alpha_new > 0.0 && cfg.alpha_new < 1.0) ||
            std::abs(cfg.alpha_old + cfg.alpha_new - 1.0) > 1e-12)
            throw std::invalid_argument("EMA weights must be in (0,1) and sum to 1");
    }

    void update(const std::vector<Vec2>& detections) {
        struct Pair {
            double d;
            int track;
            int det;
        };
        std::vector<Pair> pairs;
        for (int t = 0; t < static_cast<int>(tracks_.size()); ++t)
            for (int d = 0; d < static_cast<int>(detections.size()); ++d) {
                double dist = distance(tracks_[t].position, detections[d]);
                if (dist <= cfg_.d_merge) pairs.push_back({dist, t, d});
            }
        std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
            if (a.d != b.d) return a.d < b.d;
            if (tracks_[a.track].id != tracks_[b.track].id)
                return tracks_[a.track].id < tracks_[b.track].id;
            return a.det < b.det;
        });
        std::vector<uint8_t> track_matched(tracks_.size(), 0);
        std::vector<uint8_t> det_matched(detections.size(), 0);
        for (const auto& p : pairs) {
            if (track_matched[p.track] || det_matched[p.det]) continue;
            track_matched[p.track] = 1;
            det_matched[p.det] = 1;
            auto& tr = tracks_[p.track];
            tr.position = tr.position * cfg_.alpha_old + detections[p.det] * cfg_.alpha_new;
            tr.misses = 0;
        }
        for (size_t t = 0; t < tracks_.size(); ++t) {
            ++tracks_[t].age;
            if (!track_matched[t]) ++tracks_[t].misses;
        }
        tracks_.erase(std::remove_if(tracks_.begin(), tracks_.end(),
                                     [&](const CentroidTrack& t) {
                                         return t.misses > cfg_.max_misses;
                                     }),
                      tracks_.end());
        for (size_t d = 0; d < detections.size(); ++d)
            if (!det_matched[d]) tracks_.push_back({next_id_++, detections[d], 0, 0, false});
    }

    const std::vector<CentroidTrack>& tracks() const { return tracks_; }

    void mark_visited(int id) {
        for (auto& t : tracks_)
            if (t.id == id) t.visited = true;
    }

    // Chain snapshot over the active tracks (input order by ascending id).
    CentroidChain chain() const {
        std::vector<const CentroidTrack*> by_id;
        for (auto& t : tracks_) by_id.push_back(&t);
        std::sort(by_id.begin(), by_id.end(),
                  [](const CentroidTrack* a, const CentroidTrack* b) { return a->id < b->id; });
        std::vector<Vec2> pts;
        for (auto* t : by_id) pts.push_back(t->position);
        std::vector<int> order = order_chain(pts);
        CentroidChain c;
        for (int idx : order)
            c.ordered.push_back({by_id[idx]->id, by_id[idx]->position, by_id[idx]->visited});
        return c;
    }

private:
    TrackerConfig cfg_;
    std::vector<CentroidTrack> tracks_;
    int next_id_ = 0;
};

}  // namespace coral
