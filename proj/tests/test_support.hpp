#pragma once

// Helpers shared by the unit and acceptance suites: random inputs and
// brute-force oracles that do not touch the code paths they check.

#include "wheelbench/geom.hpp"
#include "wheelbench/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace wheelbench::testing {

using geom::Vec2;

/// Andrew's monotone chain; CCW hull without collinear points.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) {
        return pts;
    }
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    auto turn = [](Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
    for (const Vec2& p : pts) {
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) <= 1e-12) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && turn(hull[k - 2], hull[k - 1], pts[i - 1]) <= 1e-12) --k;
        hull[k++] = pts[i - 1];
    }
    hull.resize(k - 1);
    return hull;
}

/// Random convex polygon around `center` with vertices within `radius`.
inline geom::ConvexPolygon random_convex(Rng& rng, Vec2 center, double radius, int points = 8) {
    while (true) {
        std::vector<Vec2> pts;
        for (int i = 0; i < points; ++i) {
            const double a = rng.uniform(0.0, geom::kTwoPi);
            const double r = radius * std::sqrt(rng.uniform(0.05, 1.0));
            pts.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
        }
        auto hull = convex_hull(pts);
        if (hull.size() >= 3) {
            try {
                return geom::ConvexPolygon(hull);
            } catch (const geom::GeometryError&) {
                // nearly collinear triple survived the hull epsilon; draw again
            }
        }
    }
}

inline double raw_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const double vx = b.x - a.x;
    const double vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

/// Point-in-polygon by crossing number (works for any simple ring).
inline bool raw_inside(const std::vector<Vec2>& ring, Vec2 p) {
    bool in = false;
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
        if ((ring[i].y > p.y) != (ring[j].y > p.y)) {
            const double x = ring[j].x + (p.y - ring[j].y) * (ring[i].x - ring[j].x) / (ring[i].y - ring[j].y);
            if (p.x < x) in = !in;
        }
    }
    return in;
}

inline double raw_boundary_distance(const std::vector<Vec2>& ring, Vec2 p) {
    double best = 1e300;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        best = std::min(best, raw_segment_distance(p, ring[i], ring[(i + 1) % ring.size()]));
    }
    return best;
}

enum class Verdict { Intersect, Disjoint, Inconclusive };

/// Rasterization oracle: a grid point inside both polygons proves overlap; if
/// no grid point lies within `h * sqrt2` of both, they are disjoint;
/// anything else is too close to call at this resolution.
inline Verdict raster_intersect(const geom::ConvexPolygon& a, const geom::ConvexPolygon& b, double h) {
    const std::vector<Vec2> ra(a.vertices().begin(), a.vertices().end());
    const std::vector<Vec2> rb(b.vertices().begin(), b.vertices().end());
    // only the overlap of the two margin-grown boxes can hold a point near both
    const double margin = h * std::sqrt(2.0);
    auto box = [](const std::vector<Vec2>& ring) {
        std::array<Vec2, 2> bb{ring[0], ring[0]};
        for (const Vec2& v : ring) {
            bb[0] = {std::min(bb[0].x, v.x), std::min(bb[0].y, v.y)};
            bb[1] = {std::max(bb[1].x, v.x), std::max(bb[1].y, v.y)};
        }
        return bb;
    };
    const auto [amin, amax] = box(ra);
    const auto [bmin, bmax] = box(rb);
    const double xmin = std::max(amin.x, bmin.x) - 2 * margin;
    const double ymin = std::max(amin.y, bmin.y) - 2 * margin;
    const double xmax = std::min(amax.x, bmax.x) + 2 * margin;
    const double ymax = std::min(amax.y, bmax.y) + 2 * margin;
    bool near_both = false;
    for (double x = xmin; x <= xmax; x += h) {
        for (double y = ymin; y <= ymax; y += h) {
            const bool in_a = raw_inside(ra, {x, y});
            const bool in_b = raw_inside(rb, {x, y});
            if (in_a && in_b) {
                return Verdict::Intersect;
            }
            if (!near_both) {
                const bool near_a = in_a || raw_boundary_distance(ra, {x, y}) <= margin;
                const bool near_b = in_b || raw_boundary_distance(rb, {x, y}) <= margin;
                near_both = near_a && near_b;
            }
        }
    }
    return near_both ? Verdict::Inconclusive : Verdict::Disjoint;
}

}  // namespace wheelbench::testing
