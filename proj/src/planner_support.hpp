#pragma once

#include "wheelbench/planners.hpp"
#include "wheelbench/rng.hpp"

#include <cstdint>
#include <vector>

namespace wheelbench::planners::detail {

/// Nearest neighbours under se2_distance. Linear scan for small sets, then a
/// uniform bucket grid over the environment bounds. Ties go to the lower id.
class NearestNeighbors {
public:
    NearestNeighbors(const env::Bounds& bounds, double lambda);

    /// Returns the id of the new point (ids are insertion indices).
    std::size_t add(const Pose& p);
    [[nodiscard]] std::size_t size() const { return poses_.size(); }
    [[nodiscard]] std::size_t nearest(const Pose& q) const;
    /// Up to k ids ordered by increasing distance.
    [[nodiscard]] std::vector<std::size_t> k_nearest(const Pose& q, std::size_t k) const;

    static constexpr std::size_t kLinearLimit = 2000;

private:
    [[nodiscard]] std::vector<std::size_t> linear(const Pose& q, std::size_t k) const;
    [[nodiscard]] std::vector<std::size_t> bucketed(const Pose& q, std::size_t k) const;
    [[nodiscard]] int bucket_col(double x) const;
    [[nodiscard]] int bucket_row(double y) const;
    void insert_bucket(std::size_t id);

    env::Bounds bounds_;
    double lambda_;
    double cell_;
    int cols_;
    int rows_;
    std::vector<Pose> poses_;
    std::vector<std::vector<std::uint32_t>> buckets_;
};

Pose sample_pose(Rng& rng, const env::Bounds& b);

/// Configured extension limit, defaulting to five turning radii.
double extension_limit(const PlannerParams& params, const steer::SteerConfig& cfg);

bool out_of_iterations(const PlannerParams& params, std::uint64_t iterations);

/// True when `path` ends at `target` (the steer function reached it exactly).
bool reaches(const SteeredPath& path, const Pose& target);

/// Validates parameters and endpoints. Returns false (with the status set)
/// when the run cannot start.
bool begin_run(PlanningProblem& p, const PlannerParams& params, PlanResult& r);

/// Fills timing, state checks and the exact flag.
void end_run(PlanningProblem& p, const Budget& budget, std::uint64_t checks_before, PlanResult& r);

/// Concatenates edge paths starting at `start`.
SteeredPath concatenate(const Pose& start, const std::vector<const SteeredPath*>& edges);

}  // namespace wheelbench::planners::detail
