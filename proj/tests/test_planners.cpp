#include "oracles/lattice_oracle.hpp"
#include "test_support.hpp"

#include "planner_support.hpp"
#include "wheelbench/planners.hpp"

#include <doctest.h>

#include <queue>
#include <unordered_map>

using namespace wheelbench;
using namespace wheelbench::planners;
using env::GridEnv;
using geom::kPi;

namespace {

std::shared_ptr<const env::Environment> share(env::Environment e) {
    return std::make_shared<const env::Environment>(std::move(e));
}

PlanningProblem problem(std::shared_ptr<const env::Environment> e, Pose start, Pose goal,
                        steer::SteerKind kind = steer::SteerKind::ReedsShepp,
                        collision::CollisionModel model = collision::CollisionModel::point()) {
    env::Scenario sc{"test", e, start, goal, std::nullopt};
    return PlanningProblem{sc, collision::ValidityChecker(e, std::move(model)),
                           steer::SteerFunction(kind, steer::SteerConfig{}), GoalTolerance{}};
}

GridEnv random_grid(Rng& rng, int w, int h, double p) {
    GridEnv g(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) g.set_occupied(c, r, rng.bernoulli(p));
    return g;
}

// The returned path must be valid at a fresh checker's resolution, start at the
// start pose and carry a truthful exact flag.
void check_solution(PlanningProblem& p, const PlanResult& r) {
    REQUIRE(r.status == Status::Solved);
    REQUIRE(r.path.has_value());
    collision::ValidityChecker fresh(p.checker.env_ptr(), p.checker.model());
    CHECK(fresh.is_path_valid(*r.path));
    CHECK(geom::distance(r.path->start().position(), p.start().position()) == 0.0);
    CHECK(r.path->start().theta() == p.start().theta());
    CHECK(r.exact == p.goal_tolerance.satisfied(r.path->end(), p.goal()));
}

PlannerParams capped(std::uint64_t seed, std::uint64_t iterations) {
    PlannerParams params;
    params.rng_seed = seed;
    params.max_iterations = iterations;
    return params;
}

}  // namespace

TEST_CASE("planner parameter validation") {
    PlannerParams ok;
    CHECK_NOTHROW(ok.validate());
    PlannerParams bias;
    bias.goal_bias = 1.0;
    CHECK_THROWS_AS(bias.validate(), std::invalid_argument);
    PlannerParams flat;
    flat.lattice.weights = {2.0, 2.0, 1.0};
    CHECK_THROWS_AS(flat.validate(), std::invalid_argument);
    PlannerParams low;
    low.lattice.weights = {2.0, 0.5};
    CHECK_THROWS_AS(low.validate(), std::invalid_argument);
}

TEST_CASE("registry") {
    auto& reg = Registry::instance();
    for (const char* name : {"rrt", "rrt_star", "informed_rrt_star", "prm", "prm_star", "theta_star", "lattice"}) {
        CHECK(reg.contains(name));
    }
    CHECK_THROWS_AS((void)reg.get("bit_star"), std::invalid_argument);
    reg.add("noop", [](PlanningProblem&, const PlannerParams&, const Budget&) { return PlanResult{}; });
    CHECK(reg.contains("noop"));
    auto p = problem(share(GridEnv(5, 5)), {1, 1, 0}, {4, 4, 0});
    CHECK(reg.get("noop")(p, {}, Budget(1.0)).status == Status::NotSolved);
}

TEST_CASE("nearest neighbours agree with brute force past the linear limit") {
    Rng rng(5);
    const env::Bounds b{0, 0, 50, 30};
    detail::NearestNeighbors nn(b, 1.0);
    std::vector<Pose> pts;
    for (int i = 0; i < 3000; ++i) {
        pts.push_back(detail::sample_pose(rng, b));
        nn.add(pts.back());
    }
    for (int q = 0; q < 200; ++q) {
        const Pose x = detail::sample_pose(rng, b);
        std::vector<std::pair<double, std::size_t>> all;
        for (std::size_t i = 0; i < pts.size(); ++i) all.emplace_back(se2_distance(x, pts[i], 1.0), i);
        std::sort(all.begin(), all.end());
        const auto got = nn.k_nearest(x, 12);
        REQUIRE(got.size() == 12);
        for (std::size_t i = 0; i < 12; ++i) CHECK(got[i] == all[i].second);
        CHECK(nn.nearest(x) == all[0].second);
    }
}

TEST_CASE("rrt solves an empty map on nearly every seed") {
    const auto e = share(GridEnv(20, 20));
    int solved = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto p = problem(e, {2, 2, 0}, {18, 18, 0});
        PlannerParams params;
        params.rng_seed = seed;
        const auto r = rrt_plan(p, params, Budget(5.0));
        if (r.status == Status::Solved) {
            ++solved;
            check_solution(p, r);
            CHECK(r.exact);
            CHECK(r.time_to_first_solution.has_value());
        }
    }
    CHECK(solved >= 95);
}

TEST_CASE("an enclosed goal is never reached") {
    GridEnv g(20, 20);
    for (int i = 12; i <= 16; ++i) {
        g.set_occupied(i, 12, true);
        g.set_occupied(i, 16, true);
        g.set_occupied(12, i, true);
        g.set_occupied(16, i, true);
    }
    const auto e = share(g);
    for (const std::string name : {"rrt", "rrt_star", "prm", "prm_star", "theta_star", "lattice"}) {
        CAPTURE(name);
        auto p = problem(e, {2.5, 2.5, 0}, {14.5, 14.5, 0});
        const auto r = Registry::instance().get(name)(p, capped(1, 3000), Budget(1.0));
        CHECK((r.status == Status::NotSolved || r.status == Status::Timeout));
        CHECK_FALSE(r.path.has_value());
        CHECK_FALSE(r.exact);
    }
}

TEST_CASE("invalid endpoints are reported up front") {
    GridEnv g(10, 10);
    g.set_occupied(8, 8, true);
    auto p = problem(share(g), {1.5, 1.5, 0}, {8.5, 8.5, 0});
    const auto r = rrt_plan(p, {}, Budget(1.0));
    CHECK(r.status == Status::StartOrGoalInvalid);
    CHECK(r.iterations == 0);
}

TEST_CASE("same seed, same result") {
    Rng rng(3);
    GridEnv g = random_grid(rng, 30, 30, 0.1);
    g.set_occupied(1, 1, false);
    g.set_occupied(27, 27, false);
    const auto e = share(g);
    for (const std::string name : {"rrt", "rrt_star", "informed_rrt_star", "prm", "prm_star"}) {
        CAPTURE(name);
        auto a = problem(e, {1.5, 1.5, 0}, {27.5, 27.5, 0});
        auto b = problem(e, {1.5, 1.5, 0}, {27.5, 27.5, 0});
        const auto ra = Registry::instance().get(name)(a, capped(9, 600), Budget(30.0));
        const auto rb = Registry::instance().get(name)(b, capped(9, 600), Budget(30.0));
        CHECK(ra.status == Status::Solved);
        CHECK(ra.status == rb.status);
        CHECK(ra.iterations == rb.iterations);
        CHECK(ra.state_checks == rb.state_checks);
        REQUIRE(ra.waypoints.size() == rb.waypoints.size());
        for (std::size_t i = 0; i < ra.waypoints.size(); ++i) CHECK(ra.waypoints[i] == rb.waypoints[i]);
        REQUIRE(ra.solution_history.size() == rb.solution_history.size());
        for (std::size_t i = 0; i < ra.solution_history.size(); ++i)
            CHECK(ra.solution_history[i].second == rb.solution_history[i].second);
    }
}

TEST_CASE("rrt* improves monotonically") {
    const auto corridor = env::gen_corridor_env(4, {40, 40, 3, 15});
    const auto e = share(corridor.grid);
    for (const bool informed : {false, true}) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            auto p = problem(e, corridor.start, corridor.goal);
            const auto r = rrt_star_plan(p, capped(seed, 3000), Budget(60.0), informed);
            check_solution(p, r);
            REQUIRE(!r.solution_history.empty());
            for (std::size_t i = 1; i < r.solution_history.size(); ++i) {
                CHECK(r.solution_history[i].second < r.solution_history[i - 1].second);
                CHECK(r.solution_history[i].first >= r.solution_history[i - 1].first);
            }
            CHECK(r.path->length() == doctest::Approx(r.solution_history.back().second).epsilon(1e-9));
        }
    }
}

TEST_CASE("informed samples respect the ellipse bound") {
    const auto e = share(GridEnv(30, 20));
    auto p = problem(e, {3, 3, 0}, {26, 16, kPi / 2});
    PlannerParams params = capped(2, 2000);
    const geom::Vec2 s = p.start().position();
    const geom::Vec2 g = p.goal().position();
    int accepted = 0;
    params.on_informed_sample = [&](const Pose& x, double best) {
        ++accepted;
        CHECK(geom::distance(s, x.position()) + geom::distance(x.position(), g) <=
              best + p.goal_tolerance.position + 1e-9);
    };
    const auto r = rrt_star_plan(p, params, Budget(60.0), true);
    check_solution(p, r);
    CHECK(accepted > 100);

    // a rejected state cannot lie on any path shorter than the incumbent
    Rng rng(8);
    const double best = r.path->length();
    const steer::SteerConfig cfg;
    int rejected = 0;
    for (int i = 0; i < 2000; ++i) {
        const Pose x = detail::sample_pose(rng, env::bounds_of(*e));
        if (geom::distance(s, x.position()) + geom::distance(x.position(), g) > best + p.goal_tolerance.position) {
            ++rejected;
            for (int k = 0; k < 8; ++k) {
                const Pose end(g.x + 0.5 * std::cos(k * kPi / 4), g.y + 0.5 * std::sin(k * kPi / 4), kPi / 2);
                CHECK(steer::reeds_shepp_distance(p.start(), x, 1.0) + steer::reeds_shepp_distance(x, end, 1.0) >= best);
            }
        }
    }
    CHECK(rejected > 100);
}

TEST_CASE("prm on an empty map approaches the direct steer length") {
    const auto e = share(GridEnv(20, 20));
    const Pose start(3, 3, 0);
    const Pose goal(16, 14, kPi / 2);
    auto p = problem(e, start, goal);
    const auto r = prm_plan(p, capped(4, 3000), Budget(60.0), true);
    check_solution(p, r);
    CHECK(r.exact);
    CHECK(r.path->length() <= 1.1 * steer::reeds_shepp_distance(start, goal, 1.0));

    auto q = problem(e, start, goal);
    PlannerParams none = capped(4, 200);
    none.roadmap_k = 0;
    CHECK(prm_plan(q, none, Budget(5.0), false).status == Status::NotSolved);

    auto d = problem(e, start, goal, steer::SteerKind::Dubins);
    const auto rd = prm_plan(d, capped(4, 2000), Budget(60.0), false);
    check_solution(d, rd);
}

TEST_CASE("theta* on an empty grid follows the straight line") {
    const auto e = share(GridEnv(20, 20));
    auto p = problem(e, {2.5, 2.5, kPi / 4}, {17.5, 17.5, kPi / 4});
    const auto r = theta_star_plan(p, {}, Budget(10.0));
    check_solution(p, r);
    CHECK(r.path->length() <= 1.01 * geom::distance(p.start().position(), p.goal().position()));

    auto poly = problem(share(env::PolygonEnv({0, 0, 10, 10}, {})), {1, 1, 0}, {9, 9, 0});
    CHECK_THROWS_AS(theta_star_plan(poly, {}, Budget(1.0)), EnvUnsupported);
}

TEST_CASE("theta* in a corridor maze stays in free cells") {
    const auto corridor = env::gen_corridor_env(11, {40, 40, 3, 15});
    const auto e = share(corridor.grid);
    auto p = problem(e, corridor.start, corridor.goal);
    const auto r = theta_star_plan(p, {}, Budget(30.0));
    check_solution(p, r);
    CHECK(r.exact);
    for (const auto& s : steer::sample_path(*r.path, p.checker.check_resolution())) {
        const auto c = corridor.grid.cell_of(s.pose.position());
        CHECK_FALSE(corridor.grid.occupied(std::min(c.col, 39), std::min(c.row, 39)));
    }
}

TEST_CASE("lattice search matches a uniform-cost oracle") {
    Rng rng(31);
    int solved = 0;
    for (int trial = 0; trial < 20; ++trial) {
        GridEnv g = random_grid(rng, 15, 15, 0.12);
        const Pose start(1.5 + static_cast<double>(rng.below(3)), 1.5 + static_cast<double>(rng.below(3)),
                         static_cast<double>(rng.below(8)) * kPi / 4 - 3 * kPi / 4);
        const Pose goal(12.5 - static_cast<double>(rng.below(3)), 12.5 - static_cast<double>(rng.below(3)),
                        rng.uniform(-kPi, kPi));
        for (const Pose& q : {start, goal}) {
            const auto c = g.cell_of(q.position());
            g.set_occupied(c.col, c.row, false);
        }
        const auto e = share(g);
        auto p = problem(e, start, goal);
        PlannerParams params;
        params.lattice.weights = {1.0};
        const auto r = lattice_plan(p, params, Budget(30.0));

        StateLattice lat(start, p.steer.config(), params.lattice, 0.5);
        collision::ValidityChecker chk(e, collision::CollisionModel::point());
        const std::int64_t best = oracle::lattice_cost(lat, chk, p);
        CAPTURE(trial);
        if (best < 0) {
            CHECK(r.status == Status::NotSolved);
            continue;
        }
        ++solved;
        check_solution(p, r);
        CHECK(r.exact);
        // every consecutive pair of states is one primitive; the costs add up to the oracle
        std::int64_t total = 0;
        for (std::size_t i = 0; i + 1 < r.waypoints.size(); ++i) {
            const LatticeKey a = lat.key_of(r.waypoints[i]);
            const LatticeKey b = lat.key_of(r.waypoints[i + 1]);
            std::int64_t edge = -1;
            for (const auto& s : lat.successors(a, chk)) {
                if (s.to == b && (edge < 0 || s.cost < edge)) edge = s.cost;
            }
            REQUIRE(edge >= 0);
            total += edge;
        }
        CHECK(total == best);
        CHECK(r.solution_history.back().second == static_cast<double>(best) / StateLattice::kCostScale);
    }
    CHECK(solved >= 10);
}

TEST_CASE("lattice anytime schedule never gets worse") {
    const auto corridor = env::gen_corridor_env(2, {30, 30, 3, 10});
    auto p = problem(share(corridor.grid), corridor.start, corridor.goal);
    PlannerParams params;
    params.lattice.weights = {3.0, 2.0, 1.0};
    const auto r = lattice_plan(p, params, Budget(60.0));
    check_solution(p, r);
    CHECK(r.exact);
    for (std::size_t i = 1; i < r.solution_history.size(); ++i)
        CHECK(r.solution_history[i].second < r.solution_history[i - 1].second);
}

TEST_CASE("deadlines are honoured") {
    const auto corridor = env::gen_corridor_env(5, {100, 100, 4, 40});
    const auto e = share(corridor.grid);
    for (const std::string name : {"rrt_star", "prm_star"}) {
        auto p = problem(e, corridor.start, corridor.goal);
        PlannerParams params;
        const auto r = Registry::instance().get(name)(p, params, Budget(0.3));
        CHECK(r.total_time < 0.3 + 0.2);
    }
}
