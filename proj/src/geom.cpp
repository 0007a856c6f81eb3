#include "pfecc/geom.hpp"

#include <algorithm>
#include <limits>

namespace pfecc {

double polygon_signed_area(std::span<const Vec2> pts) {
    const std::size_t n = pts.size();
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = pts[i];
        const Vec2 b = pts[(i + 1) % n];
        twice += cross(a, b);
    }
    return 0.5 * twice;
}

Vec2 polygon_centroid(std::span<const Vec2> pts) {
    const std::size_t n = pts.size();
    double twice = 0.0;
    Vec2 acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = pts[i];
        const Vec2 b = pts[(i + 1) % n];
        const double c = cross(a, b);
        twice += c;
        acc += (a + b) * c;
    }
    // acc / (3 * signed area * 2); twice == 2 * signed area
    return acc / (3.0 * twice);
}

double polygon_diameter(std::span<const Vec2> pts) {
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            best = std::max(best, norm(pts[i] - pts[j]));
        }
    }
    return best;
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> pts) {
    const std::size_t n = pts.size();
    // Points on an edge are not inside; the crossing test alone misclassifies
    // them (e.g. a point on a horizontal edge), so screen for them first.
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = pts[i];
        const Vec2 b = pts[j];
        if (cross(b - a, p - a) == 0.0 && dot(p - a, p - b) <= 0.0) return false;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = pts[i];
        const Vec2 b = pts[j];
        const bool straddles = (a.y > p.y) != (b.y > p.y);
        if (straddles) {
            const double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

namespace {

bool proper_segment_overlap(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0));
}

}  // namespace

bool polygon_self_intersects(std::span<const Vec2> pts) {
    const std::size_t n = pts.size();
    if (n < 4) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = pts[i];
        const Vec2 b = pts[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            // Skip edges adjacent to edge i (shared endpoint).
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            const Vec2 c = pts[j];
            const Vec2 d = pts[(j + 1) % n];
            if (proper_segment_overlap(a, b, c, d)) return true;
        }
    }
    return false;
}

double triangle_circumdiameter(Vec2 a, Vec2 b, Vec2 c) {
    const double area = std::abs(triangle_signed_area(a, b, c));
    if (area <= 0.0) return std::numeric_limits<double>::infinity();
    const double la = norm(b - c);
    const double lb = norm(c - a);
    const double lc = norm(a - b);
    return (la * lb * lc) / (2.0 * area);
}

double triangle_min_angle(Vec2 a, Vec2 b, Vec2 c) {
    const auto angle_at = [](Vec2 v, Vec2 p, Vec2 q) {
        const Vec2 u = p - v;
        const Vec2 w = q - v;
        return std::atan2(std::abs(cross(u, w)), dot(u, w));
    };
    return std::min({angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)});
}

SegmentHit segment_intersection(Vec2 p0, Vec2 p1, Vec2 q0, Vec2 q1) {
    SegmentHit out;
    const Vec2 r = p1 - p0;
    const Vec2 s = q1 - q0;
    const double denom = cross(r, s);
    const double scale = norm(r) * norm(s);
    if (std::abs(denom) <= 1e-14 * scale) return out;  // parallel or degenerate
    const Vec2 qp = q0 - p0;
    out.t = cross(qp, s) / denom;
    out.s = cross(qp, r) / denom;
    out.point = p0 + r * out.t;
    out.hit = (out.t >= 0.0 && out.t <= 1.0 && out.s >= 0.0 && out.s <= 1.0);
    return out;
}

std::array<double, 3> barycentric(Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
    const double full = cross(b - a, c - a);
    const double wa = cross(b - p, c - p) / full;
    const double wb = cross(c - p, a - p) / full;
    return {wa, wb, 1.0 - wa - wb};
}

const GaussSegment5& segment_gauss5() {
    // Nodes/weights of 5-point Gauss-Legendre mapped from [-1, 1] to [0, 1].
    static const GaussSegment5 rule = [] {
        GaussSegment5 g;
        const double n1 = 0.0;
        const double n2 = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
        const double n3 = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
        const double w1 = 128.0 / 225.0;
        const double w2 = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
        const double w3 = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
        const std::array<double, 5> nodes = {-n3, -n2, n1, n2, n3};
        const std::array<double, 5> weights = {w3, w2, w1, w2, w3};
        for (int i = 0; i < 5; ++i) {
            g.t[i] = 0.5 * (nodes[i] + 1.0);
            g.w[i] = 0.5 * weights[i];
        }
        return g;
    }();
    return rule;
}

}  // namespace pfecc
