#pragma once

/** @file geom.hpp
 *  @brief Plane-geometry primitives: points, polygons, triangles, quadrature rules.
 */

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace pfecc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double px, double py) : x(px), y(py) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
};

using Point2 = Vec2;

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// z-component of the 3D cross product; positive when b is counter-clockwise from a.
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

constexpr double norm2(Vec2 a) { return dot(a, a); }

/// Clockwise quarter turn. For a CCW-oriented boundary, perp(b - a) is the
/// outward normal of the segment [a, b], scaled by the segment length.
constexpr Vec2 perp(Vec2 v) { return {v.y, -v.x}; }

/// Signed area of the triangle (a, b, c); positive for CCW orientation.
constexpr double triangle_signed_area(Vec2 a, Vec2 b, Vec2 c) {
    return 0.5 * cross(b - a, c - a);
}

/// Shoelace signed area; positive for CCW vertex order.
double polygon_signed_area(std::span<const Vec2> pts);

/// Area centroid of a simple polygon (any orientation).
Vec2 polygon_centroid(std::span<const Vec2> pts);

/// Largest pairwise vertex distance.
double polygon_diameter(std::span<const Vec2> pts);

/// True if p is strictly inside the simple polygon (crossing test; points on
/// the boundary are not inside).
bool point_in_polygon(Vec2 p, std::span<const Vec2> pts);

/// True if any two non-adjacent edges of the polygon intersect.
bool polygon_self_intersects(std::span<const Vec2> pts);

/// Diameter of the circle through the three triangle vertices (2R).
/// Returns +inf for a degenerate (zero-area) triangle.
double triangle_circumdiameter(Vec2 a, Vec2 b, Vec2 c);

/// Smallest interior angle of the triangle, in radians.
double triangle_min_angle(Vec2 a, Vec2 b, Vec2 c);

struct SegmentHit {
    bool hit = false;  ///< lines are non-parallel and the crossing lies in both ranges
    double t = 0.0;    ///< parameter along [p0, p1]
    double s = 0.0;    ///< parameter along [q0, q1]
    Vec2 point{};
};

/// Intersection of segments [p0, p1] and [q0, q1]. `hit` requires t and s in
/// the closed unit interval; callers apply their own open-interval margins.
SegmentHit segment_intersection(Vec2 p0, Vec2 p1, Vec2 q0, Vec2 q1);

/// Barycentric coordinates of p in triangle (a, b, c) (sums to 1, any sign).
std::array<double, 3> barycentric(Vec2 p, Vec2 a, Vec2 b, Vec2 c);

/// Degree-2 Gauss rule on the reference triangle: three points, equal weight 1/3.
/// Entries are barycentric coordinates of the quadrature points.
inline constexpr std::array<std::array<double, 3>, 3> kTriGauss3 = {{
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
    {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
}};

/// Degree-9 Gauss-Legendre rule on [0, 1]: positions and weights (sum 1).
struct GaussSegment5 {
    std::array<double, 5> t;
    std::array<double, 5> w;
};
const GaussSegment5& segment_gauss5();

}  // namespace pfecc
