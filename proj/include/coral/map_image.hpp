#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "coral/grid.hpp"

namespace coral {

struct Rgb {
    uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb& o) const { return r == o.r && g == o.g && b == o.b; }
};

// Fixed palette, bit-exact in the exported pixmap.
inline constexpr Rgb kColorUnknown{255, 255, 255};
inline constexpr Rgb kColorFree{160, 160, 160};
inline constexpr Rgb kColorObstacle{0, 0, 0};
inline constexpr Rgb kColorTarget{0, 200, 0};
inline constexpr Rgb kColorCentroid{255, 165, 0};
inline constexpr Rgb kColorChain{0, 0, 255};
inline constexpr Rgb kColorRobot{255, 0, 0};
inline constexpr Rgb kColorTrajectory{255, 255, 0};

struct MapOverlays {
    std::optional<Pose> robot;
    std::vector<Vec2> trajectory;
    // Centroid dots with their chain labels, in chain order.
    std::vector<std::pair<Vec2, int>> centroids;
    std::vector<std::pair<Vec2, Vec2>> chain_edges;
};

// RGB raster in image convention: row 0 at the top (world +y up).
struct MapImage {
    int width = 0, height = 0;
    std::vector<uint8_t> rgb;  // 3 bytes per pixel, row-major

    Rgb at(int x, int y) const {
        size_t i = (static_cast<size_t>(y) * width + x) * 3;
        return {rgb[i], rgb[i + 1], rgb[i + 2]};
    }
    void set(int x, int y, Rgb c) {
        if (x < 0 || y < 0 || x >= width || y >= height) return;
        size_t i = (static_cast<size_t>(y) * width + x) * 3;
        rgb[i] = c.r;
        rgb[i + 1] = c.g;
        rgb[i + 2] = c.b;
    }
    size_t count_color(Rgb c) const {
        size_t n = 0;
        for (size_t i = 0; i + 2 < rgb.size(); i += 3)
            n += (rgb[i] == c.r && rgb[i + 1] == c.g && rgb[i + 2] == c.b);
        return n;
    }
};

namespace detail {

// 3x5 digit glyphs, row-major, MSB-left in the low 3 bits.
inline const std::array<std::array<uint8_t, 5>, 10>& digit_glyphs() {
    static const std::array<std::array<uint8_t, 5>, 10> g = {{
        {0b111, 0b101, 0b101, 0b101, 0b111},  // 0
        {0b010, 0b110, 0b010, 0b010, 0b111},  // 1
        {0b111, 0b001, 0b111, 0b100, 0b111},  // 2
        {0b111, 0b001, 0b111, 0b001, 0b111},  // 3
        {0b101, 0b101, 0b111, 0b001, 0b001},  // 4
        {0b111, 0b100, 0b111, 0b001, 0b111},  // 5
        {0b111, 0b100, 0b111, 0b101, 0b111},  // 6
        {0b111, 0b001, 0b010, 0b010, 0b010},  // 7
        {0b111, 0b101, 0b111, 0b101, 0b111},  // 8
        {0b111, 0b101, 0b111, 0b001, 0b111},  // 9
    }};
    return g;
}

inline void draw_digit(MapImage& img, int x, int y, int digit, Rgb color) {
    const auto& glyph = digit_glyphs()[digit];
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 3; ++c)
            if (glyph[r] & (0b100 >> c)) img.set(x + c, y + r, color);
}

inline void draw_number(MapImage& img, int x, int y, int value, Rgb color) {
    std::string s = std::to_string(value);
    for (size_t i = 0; i < s.size(); ++i)
        draw_digit(img, x + static_cast<int>(i) * 4, y, s[i] - '0', color);
}

inline void draw_disc(MapImage& img, int cx, int cy, int radius, Rgb color) {
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) img.set(cx + dx, cy + dy, color);
}

inline void draw_line(MapImage& img, int x0, int y0, int x1, int y1, Rgb color) {
    int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        img.set(x0, y0, color);
        if (x0 == x1 && y0 == y1) break;
        int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

}  // namespace detail

inline MapImage render_map(const OccupancyGrid& grid, const MapOverlays& ov = {}) {
    MapImage img;
    img.width = grid.width;
    img.height = grid.height;
    img.rgb.assign(static_cast<size_t>(grid.width) * grid.height * 3, 0);

    auto to_img = [&](PixelCoord p) {
        return std::pair<int, int>{p.x, grid.height - 1 - p.y};
    };

    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x) {
            Rgb c;
            switch (grid.at({x, y})) {
                case CellClass::unknown: c = kColorUnknown; break;
                case CellClass::free_space: c = kColorFree; break;
                case CellClass::obstacle: c = kColorObstacle; break;
                case CellClass::target: c = kColorTarget; break;
            }
            auto [ix, iy] = to_img({x, y});
            img.set(ix, iy, c);
        }

    auto world_to_img = [&](const Vec2& p) { return to_img(grid.pixel_of(p)); };

    for (size_t i = 1; i < ov.trajectory.size(); ++i) {
        auto [x0, y0] = world_to_img(ov.trajectory[i - 1]);
        auto [x1, y1] = world_to_img(ov.trajectory[i]);
        detail::draw_line(img, x0, y0, x1, y1, kColorTrajectory);
    }
    for (auto& e : ov.chain_edges) {
        auto [x0, y0] = world_to_img(e.first);
        auto [x1, y1] = world_to_img(e.second);
        detail::draw_line(img, x0, y0, x1, y1, kColorChain);
    }
    for (auto& [pos, label] : ov.centroids) {
        auto [x, y] = world_to_img(pos);
        detail::draw_disc(img, x, y, 2, kColorCentroid);
        detail::draw_number(img, x + 4, y - 6, label, kColorCentroid);
    }
    if (ov.robot) {
        auto [x, y] = world_to_img(ov.robot->position);
        detail::draw_disc(img, x, y, 3, kColorRobot);
        Vec2 tip = ov.robot->position + ov.robot->forward() * (6.0 / grid.resolution);
        auto [tx, ty] = world_to_img(tip);
        detail::draw_line(img, x, y, tx, ty, kColorRobot);
    }
    return img;
}

inline std::string encode_ppm(const MapImage& img) {
    std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                      "\n255\n";
    out.append(reinterpret_cast<const char*>(img.rgb.data()), img.rgb.size());
    return out;
}

inline void write_ppm(const MapImage& img, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write image file: " + path);
    std::string data = encode_ppm(img);
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!f) throw std::runtime_error("image write failed: " + path);
}

// Map export entry point: paints the grid in the fixed palette and stacks
// trajectory, chain edges, labeled centroid dots, and the robot marker.
inline void export_map_image(const OccupancyGrid& grid, const MapOverlays& overlays,
                             const std::string& path) {
    write_ppm(render_map(grid, overlays), path);
}

}  // namespace coral
