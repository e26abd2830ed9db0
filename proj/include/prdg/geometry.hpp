#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace prdg {

struct vec2 {
    double x = 0.0;
    double y = 0.0;

    vec2() = default;
    vec2(double x_, double y_) : x(x_), y(y_) {}

    vec2 operator+(const vec2& o) const { return {x + o.x, y + o.y}; }
    vec2 operator-(const vec2& o) const { return {x - o.x, y - o.y}; }
    vec2 operator*(double s) const { return {x * s, y * s}; }
    vec2 operator/(double s) const { return {x / s, y / s}; }
    vec2& operator+=(const vec2& o) { x += o.x; y += o.y; return *this; }

    double dot(const vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double squared_norm() const { return x * x + y * y; }
};

inline vec2 operator*(double s, const vec2& v) { return v * s; }

inline double cross(const vec2& a, const vec2& b) { return a.x * b.y - a.y * b.x; }
inline double dot(const vec2& a, const vec2& b) { return a.x * b.x + a.y * b.y; }

struct triangle {
    std::array<vec2, 3> v;

    double area() const {
        return 0.5 * cross(v[1] - v[0], v[2] - v[0]);
    }

    double diameter() const {
        double d01 = (v[1] - v[0]).norm();
        double d12 = (v[2] - v[1]).norm();
        double d20 = (v[0] - v[2]).norm();
        return std::max({d01, d12, d20});
    }

    /* Radius of the inscribed circle. */
    double inradius() const {
        double a = (v[1] - v[0]).norm();
        double b = (v[2] - v[1]).norm();
        double c = (v[0] - v[2]).norm();
        double s = a + b + c;
        return s > 0.0 ? 2.0 * std::abs(area()) / s : 0.0;
    }
};

/* Shoelace formula; positive for counter-clockwise loops. */
inline double polygon_signed_area(std::span<const vec2> pts) {
    double a = 0.0;
    size_t n = pts.size();
    for (size_t i = 0; i < n; ++i)
        a += cross(pts[i], pts[(i + 1) % n]);
    return 0.5 * a;
}

inline vec2 polygon_barycenter(std::span<const vec2> pts) {
    /* Area-weighted centroid; falls back to the vertex mean for degenerate loops. */
    double a = polygon_signed_area(pts);
    size_t n = pts.size();
    if (std::abs(a) < 1e-300) {
        vec2 m;
        for (const auto& p : pts) m += p;
        return m / double(n);
    }
    vec2 c;
    for (size_t i = 0; i < n; ++i) {
        const vec2& p = pts[i];
        const vec2& q = pts[(i + 1) % n];
        double w = cross(p, q);
        c += (p + q) * w;
    }
    return c / (6.0 * a);
}

inline double polygon_diameter(std::span<const vec2> pts) {
    double d2 = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            d2 = std::max(d2, (pts[j] - pts[i]).squared_norm());
    return std::sqrt(d2);
}

/* Convexity for a CCW loop: no right turns. Collinear runs are allowed. */
inline bool polygon_is_convex(std::span<const vec2> pts) {
    size_t n = pts.size();
    if (n < 4) return true;
    double scale = polygon_diameter(pts);
    double tol = -1e-12 * scale * scale;
    for (size_t i = 0; i < n; ++i) {
        const vec2& a = pts[i];
        const vec2& b = pts[(i + 1) % n];
        const vec2& c = pts[(i + 2) % n];
        if (cross(b - a, c - b) < tol) return false;
    }
    return true;
}

inline bool segments_properly_intersect(const vec2& a, const vec2& b,
                                        const vec2& c, const vec2& d) {
    auto side = [](const vec2& p, const vec2& q, const vec2& r) {
        return cross(q - p, r - p);
    };
    double d1 = side(a, b, c), d2 = side(a, b, d);
    double d3 = side(c, d, a), d4 = side(c, d, b);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) &&
           d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

/* Simple polygon check: no two non-adjacent edges cross. O(n^2), used at
 * construction/import time only. */
inline bool polygon_is_simple(std::span<const vec2> pts) {
    size_t n = pts.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            size_t in = (i + 1) % n, jn = (j + 1) % n;
            if (j == i || jn == i || in == j) continue;
            if (segments_properly_intersect(pts[i], pts[in], pts[j], pts[jn]))
                return false;
        }
    }
    return true;
}

inline bool point_in_triangle(const vec2& p, const vec2& a, const vec2& b, const vec2& c) {
    double d1 = cross(b - a, p - a);
    double d2 = cross(c - b, p - b);
    double d3 = cross(a - c, p - c);
    bool has_neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
    bool has_pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
    return !(has_neg && has_pos);
}

} // namespace prdg
