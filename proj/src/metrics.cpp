#include "wheelbench/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace wheelbench::metrics {

double path_length(const SteeredPath& path) {
    double total = 0.0;
    for (const steer::SegmentDescriptor& seg : path.segments()) {
        total += seg.length();
    }
    return total;
}

CurvatureStats curvature_stats(std::span<const PathSample> samples) {
    CurvatureStats out;
    if (samples.size() < 3) {
        out.degenerate = true;
        return out;
    }
    double weighted = 0.0;
    double weight = 0.0;
    std::size_t begin = 0;
    while (begin + 1 < samples.size()) {
        // a run ends at the last sample of its direction; the next run starts
        // on that same pose
        std::size_t end = begin + 1;
        while (end + 1 < samples.size() && samples[end + 1].direction == samples[begin + 1].direction) {
            ++end;
        }
        for (std::size_t i = begin + 1; i < end; ++i) {
            const double ds = samples[i + 1].arc_length - samples[i - 1].arc_length;
            if (ds <= 1e-12) {
                continue;
            }
            const double k = std::abs(geom::angle_diff(samples[i + 1].pose.theta(), samples[i - 1].pose.theta())) / ds;
            out.max = std::max(out.max, k);
            weighted += k * ds / 2.0;
            weight += ds / 2.0;
        }
        begin = end;
    }
    out.mean = weight > 0.0 ? weighted / weight : 0.0;
    return out;
}

CurvatureStats curvature_stats(const SteeredPath& path, double resolution) {
    const auto samples = steer::sample_path(path, resolution);
    return curvature_stats(samples);
}

int count_cusps(std::span<const PathSample> samples) {
    int n = 0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        n += samples[i].direction != samples[i - 1].direction;
    }
    return n;
}

int count_cusps(const SteeredPath& path) {
    int n = 0;
    int last = 0;
    for (const steer::SegmentDescriptor& seg : path.segments()) {
        if (seg.length() <= 0.0) {
            continue;
        }
        n += last != 0 && seg.direction() != last;
        last = seg.direction();
    }
    return n;
}

double mean_path_clearance(std::span<const PathSample> samples, const collision::ValidityChecker& checker) {
    if (samples.empty()) {
        return 0.0;
    }
    const env::Bounds b = env::bounds_of(checker.env());
    double total = 0.0;
    for (const PathSample& s : samples) {
        if (b.contains(s.pose.position())) {
            total += checker.clearance(s.pose.position());
        }
    }
    return total / static_cast<double>(samples.size());
}

double mean_path_clearance(const SteeredPath& path, const collision::ValidityChecker& checker, double resolution) {
    const auto samples = steer::sample_path(path, resolution);
    return mean_path_clearance(samples, checker);
}

MetricsRecord evaluate_path(const SteeredPath& path, const planners::PlanningProblem& problem) {
    MetricsRecord m;
    m.found = true;
    collision::ValidityChecker fresh(problem.checker.env_ptr(), problem.checker.model(),
                                     problem.checker.check_resolution());
    m.collision_free = fresh.is_path_valid(path);
    m.exact = problem.goal_tolerance.satisfied(path.end(), problem.goal());
    const auto samples = steer::sample_path(path, problem.steer.config().sample_resolution);
    m.length = path_length(path);
    const CurvatureStats k = curvature_stats(samples);
    m.mean_curvature = k.mean;
    m.max_curvature = k.max;
    m.cusps = count_cusps(samples);
    m.mean_clearance = mean_path_clearance(samples, problem.checker);
    return m;
}

MetricsRecord evaluate(const planners::PlanResult& result, const planners::PlanningProblem& problem) {
    MetricsRecord m;
    if (result.status == planners::Status::Solved && result.path) {
        m = evaluate_path(*result.path, problem);
    }
    m.planning_time = result.total_time;
    m.state_checks = result.state_checks;
    return m;
}

}  // namespace wheelbench::metrics
