#pragma once

#include <algorithm>
#include <cmath>

namespace sat {

/// Planar position in meters.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
};

inline double squared_distance(const Vec2& a, const Vec2& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double distance(const Vec2& a, const Vec2& b) { return std::sqrt(squared_distance(a, b)); }

/// Axis-aligned closed rectangle [x_min, x_max] x [y_min, y_max].
struct Rect {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    friend bool operator==(const Rect&, const Rect&) = default;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    bool contains(const Vec2& p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }
    bool intersects(const Rect& o) const {
        return x_min <= o.x_max && o.x_min <= x_max && y_min <= o.y_max && o.y_min <= y_max;
    }
    Rect intersection(const Rect& o) const {
        return {std::max(x_min, o.x_min), std::max(y_min, o.y_min), std::min(x_max, o.x_max),
                std::min(y_max, o.y_max)};
    }
    double diagonal() const { return std::hypot(width(), height()); }

    /// Square of side `side` centered on `c`.
    static Rect square(const Vec2& c, double side) {
        const double h = side / 2.0;
        return {c.x - h, c.y - h, c.x + h, c.y + h};
    }
};

/// Single-target state [x, vx, y, vy] (m, m/s).
struct KinematicState {
    double px = 0.0;
    double vx = 0.0;
    double py = 0.0;
    double vy = 0.0;

    friend bool operator==(const KinematicState&, const KinematicState&) = default;

    Vec2 position() const { return {px, py}; }
    bool finite() const {
        return std::isfinite(px) && std::isfinite(vx) && std::isfinite(py) && std::isfinite(vy);
    }
};

enum class Mode { Search, Track };

inline const char* to_string(Mode m) { return m == Mode::Search ? "search" : "track"; }

}  // namespace sat
