#include "wheelbench/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wheelbench::collision {

CollisionModel CollisionModel::footprint(ConvexPolygon body) {
    if (!body.contains({0.0, 0.0})) {
        throw geom::GeometryError("footprint must contain the body-frame origin");
    }
    CollisionModel m;
    m.body_ = std::move(body);
    return m;
}

CollisionModel CollisionModel::car() { return footprint(ConvexPolygon::rectangle(-0.5, -0.5, 1.5, 0.5)); }

CollisionModel CollisionModel::warehouse_bot() { return footprint(ConvexPolygon::rectangle(-0.4, -0.3, 0.4, 0.3)); }

CollisionModel CollisionModel::named(std::string_view name) {
    if (name == "point") return point();
    if (name == "car") return car();
    if (name == "warehouse_bot" || name == "warehouse-bot") return warehouse_bot();
    throw std::invalid_argument("unknown collision model: " + std::string(name));
}

bool polygon_box_intersect(std::span<const Vec2> ring, Vec2 lo, Vec2 hi) {
    double pxmin = ring[0].x, pxmax = ring[0].x, pymin = ring[0].y, pymax = ring[0].y;
    for (const Vec2& v : ring) {
        pxmin = std::min(pxmin, v.x);
        pxmax = std::max(pxmax, v.x);
        pymin = std::min(pymin, v.y);
        pymax = std::max(pymax, v.y);
    }
    if (pxmax < lo.x || hi.x < pxmin || pymax < lo.y || hi.y < pymin) {
        return false;
    }
    const Vec2 corners[4] = {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = ring[i];
        const Vec2 e = ring[(i + 1) % n] - a;
        // outward normal of a CCW edge is (e.y, -e.x); every polygon vertex has
        // projection <= that of a, so the box is separated if all its corners lie beyond
        const Vec2 nrm{e.y, -e.x};
        const double limit = geom::dot(nrm, a);
        bool separated = true;
        for (const Vec2& c : corners) {
            if (geom::dot(nrm, c) <= limit) {
                separated = false;
                break;
            }
        }
        if (separated) {
            return false;
        }
    }
    return true;
}

ValidityChecker::ValidityChecker(std::shared_ptr<const Environment> env, CollisionModel model, double check_resolution)
    : env_(std::move(env)), model_(std::move(model)), resolution_(check_resolution) {
    if (!env_) {
        throw std::invalid_argument("ValidityChecker: missing environment");
    }
    if (resolution_ <= 0.0) {
        const auto* grid = std::get_if<env::GridEnv>(env_.get());
        resolution_ = grid ? std::min(0.1, grid->cell_size() / 4.0) : 0.1;
    }
}

bool ValidityChecker::grid_valid(const env::GridEnv& grid, const Pose& p) const {
    const env::Bounds b = grid.bounds();
    if (model_.is_point()) {
        if (!b.contains(p.position())) {
            return false;
        }
        const env::Cell c = grid.cell_of(p.position());
        // the far bound belongs to the last cell
        const int col = std::min(c.col, grid.width() - 1);
        const int row = std::min(c.row, grid.height() - 1);
        return !grid.occupied(col, row);
    }
    const geom::Transform t(p);
    const ConvexPolygon fp = geom::transform_polygon(model_.body(), t);
    const auto [lo, hi] = fp.bounding_box();
    if (lo.x < b.xmin || lo.y < b.ymin || hi.x > b.xmax || hi.y > b.ymax) {
        return false;
    }
    const double cs = grid.cell_size();
    const int c0 = std::max(0, static_cast<int>(std::ceil(lo.x / cs)) - 1);
    const int c1 = std::min(grid.width() - 1, static_cast<int>(std::floor(hi.x / cs)));
    const int r0 = std::max(0, static_cast<int>(std::ceil(lo.y / cs)) - 1);
    const int r1 = std::min(grid.height() - 1, static_cast<int>(std::floor(hi.y / cs)));
    for (int row = r0; row <= r1; ++row) {
        for (int col = c0; col <= c1; ++col) {
            if (grid.occupied(col, row) &&
                polygon_box_intersect(fp.vertices(), {col * cs, row * cs}, {(col + 1) * cs, (row + 1) * cs})) {
                return false;
            }
        }
    }
    return true;
}

bool ValidityChecker::polygon_valid(const env::PolygonEnv& poly, const Pose& p) const {
    const env::Bounds& b = poly.bounds();
    if (model_.is_point()) {
        if (!b.contains(p.position())) {
            return false;
        }
        return std::none_of(poly.obstacles().begin(), poly.obstacles().end(),
                            [&](const ConvexPolygon& o) { return o.contains(p.position()); });
    }
    const ConvexPolygon fp = geom::transform_polygon(model_.body(), geom::Transform(p));
    const auto [lo, hi] = fp.bounding_box();
    if (lo.x < b.xmin || lo.y < b.ymin || hi.x > b.xmax || hi.y > b.ymax) {
        return false;
    }
    return std::none_of(poly.obstacles().begin(), poly.obstacles().end(),
                        [&](const ConvexPolygon& o) { return geom::polygons_intersect(fp, o); });
}

bool ValidityChecker::is_state_valid(const Pose& p) {
    ++checks_;
    if (const auto* grid = std::get_if<env::GridEnv>(env_.get())) {
        return grid_valid(*grid, p);
    }
    return polygon_valid(std::get<env::PolygonEnv>(*env_), p);
}

bool ValidityChecker::is_path_valid(const steer::SteeredPath& path) {
    for (const steer::PathSample& s : steer::sample_path(path, resolution_)) {
        if (!is_state_valid(s.pose)) {
            return false;
        }
    }
    return true;
}

namespace {

double box_distance(Vec2 p, Vec2 lo, Vec2 hi) {
    const double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
    const double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
    return std::hypot(dx, dy);
}

}  // namespace

double ValidityChecker::clearance(Vec2 p) const {
    const env::Bounds b = env::bounds_of(*env_);
    if (!b.contains(p)) {
        throw std::out_of_range("clearance: point outside the environment bounds");
    }
    double best = std::min({p.x - b.xmin, b.xmax - p.x, p.y - b.ymin, b.ymax - p.y});
    if (const auto* grid = std::get_if<env::GridEnv>(env_.get())) {
        const double cs = grid->cell_size();
        const env::Cell c = grid->cell_of(p);
        // ring k holds cells at Chebyshev distance k from p's cell; none of them
        // is closer than (k - 1) cells
        const int kmax = std::max(grid->width(), grid->height());
        for (int k = 0; k <= kmax && (k - 1) * cs < best; ++k) {
            for (int row = c.row - k; row <= c.row + k; ++row) {
                const bool edge_row = row == c.row - k || row == c.row + k;
                for (int col = c.col - k; col <= c.col + k; col += (edge_row || k == 0) ? 1 : 2 * k) {
                    if (grid->in_grid(col, row) && grid->occupied(col, row)) {
                        best = std::min(best, box_distance(p, {col * cs, row * cs}, {(col + 1) * cs, (row + 1) * cs}));
                    }
                }
            }
        }
        return best;
    }
    for (const ConvexPolygon& o : std::get<env::PolygonEnv>(*env_).obstacles()) {
        if (o.contains(p)) {
            return 0.0;
        }
        best = std::min(best, o.boundary_distance(p));
    }
    return best;
}

}  // namespace wheelbench::collision
