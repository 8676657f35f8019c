#include "oracles/steer_oracle.hpp"
#include "test_support.hpp"

#include "wheelbench/steer.hpp"

#include <doctest.h>

#include <vector>

using namespace wheelbench;
using geom::kPi;
using geom::Pose;
using steer::SegmentKind;
using steer::SteerConfig;

namespace {

Pose random_pose(Rng& rng, double extent = 5.0) {
    return {rng.uniform(-extent, extent), rng.uniform(-extent, extent), rng.uniform(-kPi, kPi)};
}

// End pose obtained by driving the descriptors with the oracle's own integrator.
oracle::Q replay(const steer::SteeredPath& path, double radius) {
    oracle::Q q{path.start().x() / radius, path.start().y() / radius, path.start().theta()};
    for (const auto& seg : path.segments()) {
        const int kappa = seg.kind == SegmentKind::Straight ? 0 : (seg.curvature > 0 ? 1 : -1);
        q = oracle::drive(q, kappa, seg.signed_length / radius);
    }
    return {q.x * radius, q.y * radius, q.th};
}

void check_endpoints(const steer::SteeredPath& path, const Pose& from, const Pose& to) {
    REQUIRE_FALSE(path.samples().empty());
    CHECK(path.samples().front().pose == from);
    const Pose& last = path.samples().back().pose;
    CHECK(geom::distance(last.position(), to.position()) <= 1e-6);
    CHECK(std::abs(geom::angle_diff(last.theta(), to.theta())) <= 1e-6);
}

}  // namespace

TEST_CASE("dubins examples") {
    const SteerConfig cfg;
    auto straight = steer::dubins_steer({0, 0, 0}, {10, 0, 0}, cfg);
    CHECK(straight.length() == doctest::Approx(10.0));
    REQUIRE(straight.segments().size() == 1);
    CHECK(straight.segments()[0].kind == SegmentKind::Straight);

    auto none = steer::dubins_steer({0, 0, 0}, {0, 0, 0}, cfg);
    CHECK(none.length() == 0.0);
    CHECK(none.segments().empty());
    CHECK(none.samples().size() == 1);

    auto half = steer::dubins_steer({0, 0, 0}, {0, 2, kPi}, cfg);
    CHECK(half.length() == doctest::Approx(kPi).epsilon(1e-9));
    REQUIRE(half.segments().size() == 1);
    CHECK(half.segments()[0].kind == SegmentKind::LeftArc);
    for (const auto& s : half.samples()) {
        CHECK(s.direction == 1);
        CHECK(std::abs(geom::distance(s.pose.position(), {0, 1}) - 1.0) < 1e-9);
    }
}

TEST_CASE("reeds-shepp examples") {
    const SteerConfig cfg;
    auto back = steer::reeds_shepp_steer({0, 0, 0}, {-5, 0, 0}, cfg);
    CHECK(back.length() == doctest::Approx(5.0));
    REQUIRE(back.segments().size() == 1);
    CHECK(back.segments()[0].kind == SegmentKind::Straight);
    CHECK(back.segments()[0].direction() == -1);
    for (const auto& s : back.samples()) {
        CHECK(s.direction == -1);
    }

    auto none = steer::reeds_shepp_steer({1, 2, 3}, {1, 2, 3}, cfg);
    CHECK(none.length() == 0.0);
    CHECK(none.samples().size() == 1);
}

TEST_CASE("reeds-shepp and dubins agree with the word-enumeration oracle") {
    Rng rng(31337);
    for (int i = 0; i < 150; ++i) {
        const Pose a = random_pose(rng);
        const Pose b = random_pose(rng);
        const auto q = oracle::relative(a.x(), a.y(), a.theta(), b.x(), b.y(), b.theta(), 1.0);
        CAPTURE(i);
        CHECK(std::abs(steer::reeds_shepp_distance(a, b, 1.0) - oracle::reeds_shepp(q)) <= 1e-4);
        CHECK(std::abs(steer::dubins_distance(a, b, 1.0) - oracle::dubins(q)) <= 1e-4);
    }
}

TEST_CASE("segment descriptors reproduce the goal") {
    Rng rng(4);
    for (double r : {0.5, 1.0, 2.5}) {
        SteerConfig cfg;
        cfg.turning_radius = r;
        for (int i = 0; i < 200; ++i) {
            const Pose a = random_pose(rng);
            const Pose b = random_pose(rng);
            for (const auto& path : {steer::dubins_steer(a, b, cfg), steer::reeds_shepp_steer(a, b, cfg)}) {
                const auto q = replay(path, r);
                CHECK(std::hypot(q.x - b.x(), q.y - b.y()) < 1e-6);
                CHECK(std::abs(oracle::wrap(q.th - b.theta())) < 1e-6);
                check_endpoints(path, a, b);
                double sum = 0.0;
                for (const auto& seg : path.segments()) {
                    sum += seg.length();
                    if (seg.kind != SegmentKind::Straight) {
                        CHECK(std::abs(std::abs(seg.curvature) - 1.0 / r) < 1e-12);
                    }
                }
                CHECK(path.length() == doctest::Approx(sum));
            }
        }
    }
}

TEST_CASE("steering invariants") {
    Rng rng(8);
    const SteerConfig cfg;
    for (int i = 0; i < 500; ++i) {
        const Pose a = random_pose(rng);
        const Pose b = random_pose(rng);
        const double euclid = geom::distance(a.position(), b.position());
        const double d = steer::dubins_distance(a, b, 1.0);
        const double rs = steer::reeds_shepp_distance(a, b, 1.0);
        CHECK(d >= euclid - 1e-9);
        CHECK(rs >= euclid - 1e-9);
        CHECK(rs <= d + 1e-9);
        CHECK(std::abs(rs - steer::reeds_shepp_distance(b, a, 1.0)) <= 1e-6);

        const double s = rng.uniform(0.2, 5.0);
        const Pose as(a.x() * s, a.y() * s, a.theta());
        const Pose bs(b.x() * s, b.y() * s, b.theta());
        CHECK(std::abs(steer::dubins_distance(as, bs, s) - s * d) <= 1e-9 * std::max(1.0, s * d));
        CHECK(std::abs(steer::reeds_shepp_distance(as, bs, s) - s * rs) <= 1e-9 * std::max(1.0, s * rs));

        for (const auto& path : {steer::dubins_steer(a, b, cfg), steer::reeds_shepp_steer(a, b, cfg)}) {
            const auto bounds = path.boundaries();
            const auto& samples = path.samples();
            for (std::size_t k = 0; k < samples.size(); ++k) {
                CHECK(std::abs(samples[k].curvature) <= 1.0 / cfg.turning_radius + 1e-9);
                if (k == 0) continue;
                CHECK(samples[k].arc_length >= samples[k - 1].arc_length);
                CHECK(samples[k].arc_length - samples[k - 1].arc_length <= cfg.sample_resolution + 1e-9);
                if (samples[k].direction != samples[k - 1].direction) {
                    const bool at_boundary = std::any_of(bounds.begin(), bounds.end(), [&](double b) {
                        return std::abs(b - samples[k - 1].arc_length) < 1e-9;
                    });
                    CHECK(at_boundary);
                }
            }
            CHECK(samples.back().arc_length == doctest::Approx(path.length()));
        }
    }
}

TEST_CASE("dubins paths are forward only") {
    Rng rng(12);
    const SteerConfig cfg;
    for (int i = 0; i < 100; ++i) {
        const auto path = steer::dubins_steer(random_pose(rng), random_pose(rng), cfg);
        for (const auto& s : path.samples()) {
            CHECK(s.direction == 1);
        }
    }
}

TEST_CASE("posq converges along the axis") {
    const SteerConfig cfg;
    REQUIRE(steer::posq_gains_stable(cfg.posq_gains));
    const auto path = steer::posq_steer({0, 0, 0}, {5, 0, 0}, cfg);
    CHECK(geom::distance(path.end().position(), {5, 0}) < cfg.posq_goal_eps);
    CHECK(path.samples().front().pose == Pose(0, 0, 0));
    double max_y = 0.0;
    for (const auto& s : path.samples()) {
        max_y = std::max(max_y, std::abs(s.pose.y()));
        CHECK(s.direction == 1);
    }
    CHECK(max_y < cfg.posq_goal_eps);
}

TEST_CASE("posq at the goal returns an empty path") {
    const SteerConfig cfg;
    const auto path = steer::posq_steer({1, 1, 0}, {1.02, 1.0, 2.0}, cfg);
    CHECK(path.length() == 0.0);
    CHECK(path.samples().size() == 1);
}

TEST_CASE("posq distance to the goal decreases after a short transient") {
    const SteerConfig cfg;
    const Pose goal(0, 5, kPi / 2);
    const auto path = steer::posq_steer({0, 0, 0}, goal, cfg);
    CHECK(geom::distance(path.end().position(), goal.position()) < cfg.posq_goal_eps);
    const auto& samples = path.samples();
    std::vector<double> rho;
    for (const auto& s : samples) {
        rho.push_back(geom::distance(s.pose.position(), goal.position()));
    }
    // index of the last increase bounds the transient
    std::size_t last_increase = 0;
    for (std::size_t k = 1; k < rho.size(); ++k) {
        if (rho[k] > rho[k - 1]) last_increase = k;
    }
    CHECK(last_increase <= rho.size() / 10);
}

TEST_CASE("posq reports non-convergence") {
    SteerConfig cfg;
    cfg.posq_max_time = 0.5;
    CHECK_THROWS_AS(steer::posq_steer({0, 0, 0}, {10, 0, 0}, cfg), steer::NotConverged);
    const steer::SteerFunction fn(steer::SteerKind::Posq, cfg);
    CHECK_FALSE(fn.connect({0, 0, 0}, {10, 0, 0}).has_value());
    CHECK(std::isinf(fn.distance({0, 0, 0}, {10, 0, 0})));
}

TEST_CASE("expand_primitives") {
    const std::vector<steer::Primitive> prims{{{1, 0}, 1}, {{1, 1}, kPi / 2}, {{-1, 0}, 2}};
    const auto paths = steer::expand_primitives({0, 0, 0}, prims);
    REQUIRE(paths.size() == 3);
    CHECK(paths[0].end().x() == doctest::Approx(1.0));
    CHECK(paths[0].end().y() == doctest::Approx(0.0));
    CHECK(paths[1].end().x() == doctest::Approx(1.0));
    CHECK(paths[1].end().y() == doctest::Approx(1.0));
    CHECK(paths[1].end().theta() == doctest::Approx(kPi / 2));
    CHECK(paths[2].end().x() == doctest::Approx(-2.0));
    CHECK(paths[2].segments()[0].direction() == -1);
    CHECK_THROWS(steer::expand_primitives({0, 0, 0}, std::vector<steer::Primitive>{}));
}

TEST_CASE("sample_path") {
    const steer::SteeredPath line(Pose(0, 0, 0), {steer::SegmentDescriptor::straight(1.0)});
    const auto samples = steer::sample_path(line, 0.25);
    REQUIRE(samples.size() == 5);
    for (int k = 0; k < 5; ++k) {
        CHECK(samples[k].arc_length == doctest::Approx(0.25 * k));
        CHECK(samples[k].pose.x() == doctest::Approx(0.25 * k));
    }
    CHECK(steer::sample_path(steer::SteeredPath(Pose(3, 4, 1)), 0.1).size() == 1);
    CHECK_THROWS(steer::sample_path(line, 0.0));

    const steer::SteerConfig cfg;
    const auto lsl = steer::dubins_steer({0, 0, 0}, {4, 3, 0.3}, cfg);
    const auto s = steer::sample_path(lsl, 0.25);
    CHECK(s.front().pose == lsl.start());
    CHECK(s.back().pose == lsl.end());
    for (std::size_t k = 1; k < s.size(); ++k) {
        CHECK(s[k].arc_length - s[k - 1].arc_length <= 0.25 + 1e-12);
    }
}

TEST_CASE("slice and append rebuild a path") {
    Rng rng(77);
    const SteerConfig cfg;
    for (int i = 0; i < 50; ++i) {
        const auto path = steer::reeds_shepp_steer(random_pose(rng), random_pose(rng), cfg);
        const double cut = rng.uniform(0.0, path.length());
        auto head = path.slice(0.0, cut);
        const auto tail = path.slice(cut, path.length());
        CHECK(head.length() + tail.length() == doctest::Approx(path.length()));
        head.append(tail);
        CHECK(head.end() == path.end());
        const Pose mid = path.pose_at(cut);
        CHECK(geom::distance(tail.start().position(), mid.position()) < 1e-12);
    }
}

TEST_CASE("config validation and parsing") {
    SteerConfig bad;
    bad.sample_resolution = 2.0;
    CHECK_THROWS(bad.validate());
    SteerConfig neg;
    neg.turning_radius = -1;
    CHECK_THROWS(neg.validate());
    CHECK(steer::parse_steer_kind("reeds-shepp") == steer::SteerKind::ReedsShepp);
    CHECK(steer::parse_steer_kind("dubins") == steer::SteerKind::Dubins);
    CHECK_THROWS(steer::parse_steer_kind("clothoid"));
    CHECK(steer::parse_segment_kind(steer::to_string(SegmentKind::RightArc)) == SegmentKind::RightArc);
}
