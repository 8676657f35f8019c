#include "test_support.hpp"

#include "wheelbench/metrics.hpp"
#include "wheelbench/planners.hpp"
#include "wheelbench/smoothing.hpp"

#include <doctest.h>

using namespace wheelbench;
using namespace wheelbench::smoothing;
using env::GridEnv;
using geom::kPi;
using geom::Pose;
using steer::SegmentDescriptor;

namespace {

std::shared_ptr<const env::Environment> share(env::Environment e) {
    return std::make_shared<const env::Environment>(std::move(e));
}

const SteerFunction kRs(steer::SteerKind::ReedsShepp, {});

ValidityChecker point_checker(std::shared_ptr<const env::Environment> e) {
    return ValidityChecker(std::move(e), collision::CollisionModel::point());
}

SteeredPath through(const std::vector<Pose>& poses) {
    SteeredPath out(poses.front());
    for (std::size_t i = 1; i < poses.size(); ++i) out.append(*kRs.connect(poses[i - 1], poses[i]));
    return out;
}

// Polyline with a single right-angle corner at (8, 2).
SteeredPath corner() {
    std::vector<steer::TracePoint> t;
    for (int i = 0; i <= 60; ++i) t.push_back({Pose(2 + 0.1 * i, 2, 0), 0});
    t.back().pose = Pose(8, 2, kPi / 4);
    for (int i = 1; i <= 60; ++i) t.push_back({Pose(8, 2 + 0.1 * i, kPi / 2), 0});
    return SteeredPath(t.front().pose, {SegmentDescriptor::integrated(t, 1)});
}

void check_endpoints(const SteeredPath& in, const SmoothResult& r) {
    CHECK(r.path.start() == in.start());
    CHECK(r.path.end() == in.end());
}

// RRT solutions on small random maps
std::vector<std::pair<std::shared_ptr<const env::Environment>, SteeredPath>> rrt_paths(int count) {
    std::vector<std::pair<std::shared_ptr<const env::Environment>, SteeredPath>> out;
    Rng rng(77);
    for (std::uint64_t seed = 0; static_cast<int>(out.size()) < count; ++seed) {
        GridEnv g(25, 25);
        for (int r = 0; r < 25; ++r)
            for (int c = 0; c < 25; ++c) g.set_occupied(c, r, rng.bernoulli(0.08));
        g.set_occupied(2, 2, false);
        g.set_occupied(22, 22, false);
        const auto e = share(g);
        env::Scenario sc{"s", e, Pose(2.5, 2.5, 0), Pose(22.5, 22.5, kPi / 2), std::nullopt};
        planners::PlanningProblem p{sc, point_checker(e), kRs, {}};
        planners::PlannerParams params;
        params.rng_seed = seed;
        params.max_iterations = 20000;
        auto r = planners::rrt_plan(p, params, planners::Budget(5.0));
        if (r.path) out.emplace_back(e, *r.path);
    }
    return out;
}

}  // namespace

TEST_CASE("smoother parameters") {
    SmootherParams p;
    CHECK_NOTHROW(p.validate());
    p.time_budget = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    SmootherParams q;
    q.shortcut_rounds = -1;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    auto chk = point_checker(share(GridEnv(10, 10)));
    CHECK_THROWS_AS(smooth("chaikin", SteeredPath(Pose(1, 1, 0)), chk, kRs, {}), std::invalid_argument);
}

TEST_CASE("shortcut") {
    auto chk = point_checker(share(GridEnv(30, 30)));
    const SteeredPath line(Pose(2, 5, 0), {SegmentDescriptor::straight(20)});
    const auto r0 = shortcut(line, chk, kRs, {});
    CHECK(r0.length_after == doctest::Approx(20.0));
    check_endpoints(line, r0);

    std::vector<Pose> zig;
    for (int i = 0; i < 10; ++i) zig.emplace_back(3 + 2.5 * i, i % 2 == 0 ? 10 : 14, 0);
    const SteeredPath zz = through(zig);
    const auto r1 = shortcut(zz, chk, kRs, {});
    check_endpoints(zz, r1);
    CHECK(r1.length_after <= 1.05 * steer::reeds_shepp_distance(zig.front(), zig.back(), 1.0));
    CHECK(r1.length_after < r1.length_before);

    for (const auto& [e, path] : rrt_paths(100)) {
        auto c = point_checker(e);
        const auto r = shortcut(path, c, kRs, {});
        CHECK(r.length_after <= r.length_before);
        CHECK(c.is_path_valid(r.path));
        check_endpoints(path, r);
    }
}

TEST_CASE("bspline") {
    auto chk = point_checker(share(GridEnv(20, 20)));
    const SteeredPath c = corner();
    REQUIRE(chk.is_path_valid(c));
    const auto r = bspline_smooth(c, chk, {});
    check_endpoints(c, r);
    CHECK(r.max_curvature_after < r.max_curvature_before);
    CHECK(r.length_after <= r.length_before + 1e-9);

    // obstacle filling the inside of the corner: the path must stay valid
    GridEnv g(20, 20);
    for (int row = 3; row < 10; ++row)
        for (int col = 2; col < 8; ++col) g.set_occupied(col, row, true);
    auto blocked = point_checker(share(g));
    const SteeredPath flush = corner();
    REQUIRE(blocked.is_path_valid(flush));
    const auto rb = bspline_smooth(flush, blocked, {});
    CHECK(blocked.is_path_valid(rb.path));
    check_endpoints(flush, rb);

    const SteeredPath line(Pose(2, 5, 0.4), {SegmentDescriptor::straight(9)});
    const auto rl = bspline_smooth(line, chk, {});
    CHECK(std::abs(rl.length_after - 9.0) <= 1e-9);
    for (double s = 0; s <= 9.0; s += 0.37) {
        CHECK(geom::distance(rl.path.pose_at(s).position(), line.pose_at(s).position()) <= 1e-9);
    }
}

TEST_CASE("simplify_max") {
    for (const auto& [e, path] : rrt_paths(10)) {
        auto c = point_checker(e);
        const auto r = simplify_max(path, c, kRs, {});
        CHECK(r.length_after <= r.length_before);
        CHECK(c.is_path_valid(r.path));
        check_endpoints(path, r);
        const auto again = simplify_max(r.path, c, kRs, {});
        CHECK(again.length_after >= 0.95 * r.length_after);
    }
}

TEST_CASE("grips gradient stage") {
    // 6 m wide corridor along y in [2, 8]
    GridEnv g(30, 10);
    for (int c = 0; c < 30; ++c) {
        for (int r : {0, 1, 8, 9}) g.set_occupied(c, r, true);
    }
    auto chk = point_checker(share(g));
    const SteeredPath hugging(Pose(2, 2.6, 0), {SegmentDescriptor::straight(25)});
    GripsDiagnostics d;
    const auto r = grips(hugging, chk, kRs, {}, &d);
    CHECK(d.clearance_after_descent > d.clearance_before);
    CHECK(chk.is_path_valid(r.path));
    check_endpoints(hugging, r);

    const SteeredPath centered(Pose(2, 5, 0), {SegmentDescriptor::straight(25)});
    GripsDiagnostics dc;
    SmootherParams params;
    const auto rc = grips(centered, chk, kRs, params, &dc);
    REQUIRE_FALSE(dc.displacement.empty());
    for (const double v : dc.displacement) CHECK(v < 0.25);
    check_endpoints(centered, rc);
}

TEST_CASE("smoothers keep endpoints, validity and determinism") {
    const auto paths = rrt_paths(5);
    for (const auto& name : smoother_names()) {
        CAPTURE(name);
        for (const auto& [e, path] : paths) {
            auto c = point_checker(e);
            SmootherParams params;
            params.rng_seed = 3;
            const auto a = smooth(name, path, c, kRs, params);
            const auto b = smooth(name, path, c, kRs, params);
            check_endpoints(path, a);
            CHECK(c.is_path_valid(a.path));
            CHECK(a.length_after == b.length_after);
            CHECK_FALSE(a.input_invalid);
        }
    }
}

TEST_CASE("invalid input is returned unchanged") {
    GridEnv g(20, 20);
    g.set_occupied(10, 5, true);
    auto chk = point_checker(share(g));
    const SteeredPath bad(Pose(2, 5.5, 0), {SegmentDescriptor::straight(15)});
    for (const auto& name : smoother_names()) {
        const auto r = smooth(name, bad, chk, kRs, {});
        CHECK(r.input_invalid);
        CHECK(r.length_after == r.length_before);
        CHECK(r.path.segments().size() == 1);
    }
}
