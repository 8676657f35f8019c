#pragma once

#include "wheelbench/env.hpp"
#include "wheelbench/steer.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>

namespace wheelbench::collision {

using env::Environment;
using geom::ConvexPolygon;
using geom::Pose;
using geom::Vec2;

/// Point robot, or a convex footprint given in the body frame.
class CollisionModel {
public:
    static CollisionModel point() { return CollisionModel(); }
    /// Throws geom::GeometryError unless the body origin lies inside the footprint.
    static CollisionModel footprint(ConvexPolygon body);
    /// 2.0 x 1.0 m rectangle, rear-axle origin 0.5 m from the rear.
    static CollisionModel car();
    /// 0.8 x 0.6 m rectangle centered on the origin.
    static CollisionModel warehouse_bot();
    /// "point", "car" or "warehouse_bot".
    static CollisionModel named(std::string_view name);

    [[nodiscard]] bool is_point() const { return !body_.has_value(); }
    [[nodiscard]] const ConvexPolygon& body() const { return *body_; }
    /// 0 for the point model.
    [[nodiscard]] double circumscribed_radius() const { return body_ ? body_->circumscribed_radius() : 0.0; }

private:
    CollisionModel() = default;
    std::optional<ConvexPolygon> body_;
};

/// Closed convex polygon against a closed axis-aligned box.
bool polygon_box_intersect(std::span<const Vec2> ring, Vec2 lo, Vec2 hi);

/// State and path validity for one run. Not shareable between threads: the
/// state-check counter is private to the checker.
class ValidityChecker {
public:
    /// `check_resolution` <= 0 selects min(0.1 m, cell_size / 4).
    ValidityChecker(std::shared_ptr<const Environment> env, CollisionModel model, double check_resolution = 0.0);

    [[nodiscard]] const Environment& env() const { return *env_; }
    [[nodiscard]] const std::shared_ptr<const Environment>& env_ptr() const { return env_; }
    [[nodiscard]] const CollisionModel& model() const { return model_; }
    [[nodiscard]] double check_resolution() const { return resolution_; }
    [[nodiscard]] std::uint64_t state_checks() const { return checks_; }

    bool is_state_valid(const Pose& p);
    /// Every pose sampled at check_resolution must be valid; stops at the first
    /// invalid one.
    bool is_path_valid(const steer::SteeredPath& path);

    /// Distance from p to the nearest obstacle, capped by the distance to the
    /// bounds; 0 inside an obstacle. Throws std::out_of_range outside the bounds.
    [[nodiscard]] double clearance(Vec2 p) const;

private:
    [[nodiscard]] bool grid_valid(const env::GridEnv& grid, const Pose& p) const;
    [[nodiscard]] bool polygon_valid(const env::PolygonEnv& poly, const Pose& p) const;

    std::shared_ptr<const Environment> env_;
    CollisionModel model_;
    double resolution_;
    std::uint64_t checks_ = 0;
};

}  // namespace wheelbench::collision
