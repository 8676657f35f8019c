#include "wheelbench/geom.hpp"

#include <algorithm>
#include <limits>

namespace wheelbench::geom {

double normalize_angle(double a) {
    if (!std::isfinite(a)) {
        throw GeometryError("normalize_angle: non-finite angle");
    }
    double r = std::remainder(a, kTwoPi);
    if (r <= -kPi) {
        r += kTwoPi;
    }
    return r;
}

Pose::Pose(double x, double y, double theta) : x_(x), y_(y), theta_(normalize_angle(theta)) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
        throw GeometryError("Pose: non-finite position");
    }
}

Transform::Transform(Vec2 translation, double rotation)
    : translation_(translation), rotation_(normalize_angle(rotation)) {
    cos_ = std::cos(rotation_);
    sin_ = std::sin(rotation_);
}

Vec2 Transform::apply(Vec2 p) const {
    return {cos_ * p.x - sin_ * p.y + translation_.x, sin_ * p.x + cos_ * p.y + translation_.y};
}

double signed_area(std::span<const Vec2> ring) {
    double twice = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        twice += cross(ring[i], ring[(i + 1) % ring.size()]);
    }
    return 0.5 * twice;
}

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n < 3) {
        throw GeometryError("ConvexPolygon: fewer than 3 vertices");
    }
    double turning = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = vertices_[i];
        const Vec2& b = vertices_[(i + 1) % n];
        const Vec2& c = vertices_[(i + 2) % n];
        if (!std::isfinite(a.x) || !std::isfinite(a.y)) {
            throw GeometryError("ConvexPolygon: non-finite vertex");
        }
        if (a == b) {
            throw GeometryError("ConvexPolygon: repeated vertex");
        }
        const Vec2 e1 = b - a;
        const Vec2 e2 = c - b;
        if (cross(e1, e2) <= 0.0) {
            throw GeometryError("ConvexPolygon: ring is not strictly convex and counter-clockwise");
        }
        turning += std::atan2(cross(e1, e2), dot(e1, e2));
    }
    // All left turns but winding more than once: a star, not a convex polygon.
    if (std::abs(turning - kTwoPi) > 1e-6) {
        throw GeometryError("ConvexPolygon: self-intersecting ring");
    }
    update_box();
}

ConvexPolygon::ConvexPolygon(Trusted, std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
    update_box();
}

ConvexPolygon ConvexPolygon::from_any_orientation(std::vector<Vec2> vertices) {
    if (vertices.size() >= 3 && signed_area(vertices) < 0.0) {
        std::reverse(vertices.begin(), vertices.end());
    }
    return ConvexPolygon(std::move(vertices));
}

ConvexPolygon ConvexPolygon::rectangle(double xmin, double ymin, double xmax, double ymax) {
    return ConvexPolygon({{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}});
}

void ConvexPolygon::update_box() {
    min_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    max_ = -min_;
    for (const Vec2& v : vertices_) {
        min_ = {std::min(min_.x, v.x), std::min(min_.y, v.y)};
        max_ = {std::max(max_.x, v.x), std::max(max_.y, v.y)};
    }
}

double ConvexPolygon::area() const { return signed_area(vertices_); }

bool ConvexPolygon::contains(Vec2 p) const {
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (cross(vertices_[(i + 1) % n] - vertices_[i], p - vertices_[i]) < 0.0) {
            return false;
        }
    }
    return true;
}

double ConvexPolygon::boundary_distance(Vec2 p) const {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        best = std::min(best, point_segment_distance(p, vertices_[i], vertices_[(i + 1) % n]));
    }
    return best;
}

double ConvexPolygon::circumscribed_radius() const {
    double r = 0.0;
    for (const Vec2& v : vertices_) {
        r = std::max(r, v.norm());
    }
    return r;
}

ConvexPolygon transform_polygon(const ConvexPolygon& p, const Transform& t) {
    std::vector<Vec2> out;
    out.reserve(p.size());
    for (const Vec2& v : p.vertices()) {
        out.push_back(t.apply(v));
    }
    // Rigid motions preserve convexity and orientation.
    return ConvexPolygon(ConvexPolygon::Trusted{}, std::move(out));
}

namespace {

// True if some edge normal of `a` separates the two closed polygons.
bool has_separating_axis(const ConvexPolygon& a, const ConvexPolygon& b) {
    const auto va = a.vertices();
    const auto vb = b.vertices();
    for (std::size_t i = 0; i < va.size(); ++i) {
        const Vec2 edge = va[(i + 1) % va.size()] - va[i];
        const Vec2 axis{edge.y, -edge.x};
        double a_min = std::numeric_limits<double>::infinity();
        double a_max = -a_min;
        for (const Vec2& v : va) {
            const double d = dot(axis, v);
            a_min = std::min(a_min, d);
            a_max = std::max(a_max, d);
        }
        double b_min = std::numeric_limits<double>::infinity();
        double b_max = -b_min;
        for (const Vec2& v : vb) {
            const double d = dot(axis, v);
            b_min = std::min(b_min, d);
            b_max = std::max(b_max, d);
        }
        if (a_max < b_min || b_max < a_min) {
            return true;
        }
    }
    return false;
}

}  // namespace

bool polygons_intersect(const ConvexPolygon& a, const ConvexPolygon& b) {
    const auto [amin, amax] = a.bounding_box();
    const auto [bmin, bmax] = b.bounding_box();
    if (amax.x < bmin.x || bmax.x < amin.x || amax.y < bmin.y || bmax.y < amin.y) {
        return false;
    }
    return !has_separating_axis(a, b) && !has_separating_axis(b, a);
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squared_norm();
    if (len2 == 0.0) {
        return distance(p, a);
    }
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

}  // namespace wheelbench::geom
