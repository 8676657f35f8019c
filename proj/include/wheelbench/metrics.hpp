#pragma once

#include "wheelbench/planners.hpp"

#include <cstdint>
#include <optional>
#include <span>

namespace wheelbench::metrics {

using steer::PathSample;
using steer::SteeredPath;

/// Sum of segment lengths; Integrated segments contribute their chord lengths.
double path_length(const SteeredPath& path);

struct CurvatureStats {
    double mean = 0.0;
    double max = 0.0;
    /// Fewer than three samples; both values are 0.
    bool degenerate = false;
};

/// Discrete curvature |dtheta| / ds by central differences over each maximal
/// same-direction run of samples. The mean is weighted by arc length.
CurvatureStats curvature_stats(std::span<const PathSample> samples);
CurvatureStats curvature_stats(const SteeredPath& path, double resolution);

/// Direction sign changes between consecutive samples.
int count_cusps(std::span<const PathSample> samples);
int count_cusps(const SteeredPath& path);

/// Mean clearance over the samples. Samples outside the bounds count as 0.
double mean_path_clearance(std::span<const PathSample> samples, const collision::ValidityChecker& checker);
double mean_path_clearance(const SteeredPath& path, const collision::ValidityChecker& checker, double resolution);

struct MetricsRecord {
    bool found = false;
    bool collision_free = false;
    bool exact = false;
    std::optional<double> length;
    std::optional<double> mean_curvature;
    std::optional<double> max_curvature;
    std::optional<int> cusps;
    std::optional<double> mean_clearance;
    double planning_time = 0.0;
    std::uint64_t state_checks = 0;
};

/// Quality fields are left empty when no solution was found. Paths are
/// re-validated with a fresh copy of the problem's checker and sampled at the
/// steer sample resolution.
MetricsRecord evaluate(const planners::PlanResult& result, const planners::PlanningProblem& problem);

/// Metrics of an arbitrary path for the problem, e.g. a smoothed solution.
MetricsRecord evaluate_path(const SteeredPath& path, const planners::PlanningProblem& problem);

}  // namespace wheelbench::metrics
