#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wheelbench::geom {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr bool operator==(const Vec2&) const = default;

    [[nodiscard]] double norm() const { return std::hypot(x, y); }
    [[nodiscard]] constexpr double squared_norm() const { return x * x + y * y; }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Maps any finite angle to its representative in (-pi, pi]. Throws GeometryError on NaN/inf.
double normalize_angle(double a);

/// Signed shortest rotation from `from` to `to`, in (-pi, pi].
inline double angle_diff(double to, double from) { return normalize_angle(to - from); }

/// SE(2) state. The heading is kept normalized; all fields are finite.
class Pose {
public:
    Pose() = default;
    Pose(double x, double y, double theta);
    Pose(Vec2 p, double theta) : Pose(p.x, p.y, theta) {}

    [[nodiscard]] double x() const { return x_; }
    [[nodiscard]] double y() const { return y_; }
    [[nodiscard]] double theta() const { return theta_; }
    [[nodiscard]] Vec2 position() const { return {x_, y_}; }

    bool operator==(const Pose&) const = default;

private:
    double x_ = 0.0;
    double y_ = 0.0;
    double theta_ = 0.0;
};

/// Rigid placement: rotate first, then translate.
class Transform {
public:
    Transform() = default;
    Transform(Vec2 translation, double rotation);
    explicit Transform(const Pose& p) : Transform(p.position(), p.theta()) {}

    [[nodiscard]] Vec2 translation() const { return translation_; }
    [[nodiscard]] double rotation() const { return rotation_; }
    [[nodiscard]] Vec2 apply(Vec2 p) const;

private:
    Vec2 translation_{};
    double rotation_ = 0.0;
    double cos_ = 1.0;
    double sin_ = 0.0;
};

/// Strictly convex, counter-clockwise polygon. Validated once at construction.
class ConvexPolygon {
public:
    /// Throws GeometryError unless the vertices form a strictly convex CCW ring.
    explicit ConvexPolygon(std::vector<Vec2> vertices);

    /// Accepts either orientation; a clockwise ring is reversed before validation.
    static ConvexPolygon from_any_orientation(std::vector<Vec2> vertices);
    static ConvexPolygon rectangle(double xmin, double ymin, double xmax, double ymax);

    [[nodiscard]] std::span<const Vec2> vertices() const { return vertices_; }
    [[nodiscard]] std::size_t size() const { return vertices_.size(); }
    [[nodiscard]] double area() const;
    [[nodiscard]] std::array<Vec2, 2> bounding_box() const { return {min_, max_}; }
    [[nodiscard]] bool contains(Vec2 p) const;
    /// Distance from p to the polygon boundary (also for interior points).
    [[nodiscard]] double boundary_distance(Vec2 p) const;
    /// Largest distance from the origin to any vertex.
    [[nodiscard]] double circumscribed_radius() const;

private:
    struct Trusted {};
    ConvexPolygon(Trusted, std::vector<Vec2> vertices);
    void update_box();

    std::vector<Vec2> vertices_;
    Vec2 min_{};
    Vec2 max_{};

    friend ConvexPolygon transform_polygon(const ConvexPolygon& p, const Transform& t);
};

/// Signed shoelace area; positive for CCW rings.
double signed_area(std::span<const Vec2> ring);

ConvexPolygon transform_polygon(const ConvexPolygon& p, const Transform& t);

/// Separating-axis test on closed polygons: touching counts as intersecting.
bool polygons_intersect(const ConvexPolygon& a, const ConvexPolygon& b);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

}  // namespace wheelbench::geom
