#pragma once

#include "wheelbench/collision.hpp"
#include "wheelbench/env.hpp"
#include "wheelbench/steer.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wheelbench::planners {

using geom::Pose;
using steer::SteeredPath;

class PlannerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The planner cannot work in this kind of environment.
class EnvUnsupported : public PlannerError {
public:
    using PlannerError::PlannerError;
};

enum class Status { Solved, NotSolved, Timeout, StartOrGoalInvalid };

std::string_view to_string(Status s);

struct GoalTolerance {
    double position = 0.5;  ///< meters
    double heading = 0.25;  ///< radians

    [[nodiscard]] bool satisfied(const Pose& p, const Pose& goal) const {
        return geom::distance(p.position(), goal.position()) <= position &&
               std::abs(geom::angle_diff(p.theta(), goal.theta())) <= heading;
    }
};

struct PlanningProblem {
    env::Scenario scenario;
    collision::ValidityChecker checker;
    steer::SteerFunction steer;
    GoalTolerance goal_tolerance{};

    [[nodiscard]] const Pose& start() const { return scenario.start; }
    [[nodiscard]] const Pose& goal() const { return scenario.goal; }
};

/// Wall-clock deadline plus an optional external cancel flag.
class Budget {
public:
    using Clock = std::chrono::steady_clock;

    Budget(double seconds, const std::atomic<bool>* cancel = nullptr)
        : begin_(Clock::now()),
          deadline_(begin_ + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds))),
          cancel_(cancel) {}

    [[nodiscard]] bool expired() const {
        return (cancel_ != nullptr && cancel_->load(std::memory_order_relaxed)) || Clock::now() >= deadline_;
    }
    [[nodiscard]] double elapsed() const { return std::chrono::duration<double>(Clock::now() - begin_).count(); }

private:
    Clock::time_point begin_;
    Clock::time_point deadline_;
    const std::atomic<bool>* cancel_;
};

struct LatticeParams {
    /// Heuristic inflation schedule; strictly decreasing, last value >= 1.
    std::vector<double> weights{3.0, 2.0, 1.0};
    int heading_bins = 16;
    /// Position resolution in meters; 0 selects half a grid cell (0.5 m in polygon worlds).
    double resolution = 0.0;
};

struct PlannerParams {
    double goal_bias = 0.05;
    /// Longest steer path added per RRT-family iteration; 0 selects 5 turning radii.
    double max_steer_extension = 0.0;
    /// RRT* neighbour count; 0 selects ceil(rewire_factor * e * (1 + 1/3) * log n).
    int rewire_neighbors = 0;
    double rewire_factor = 1.1;
    /// PRM neighbour count.
    int roadmap_k = 10;
    /// PRM* neighbour count is ceil(k_prm * log n).
    double k_prm = 2.0 * 2.718281828459045;
    LatticeParams lattice{};
    std::uint64_t rng_seed = 0;
    /// Iteration cap; 0 means the deadline alone ends the run. Anytime planners
    /// are only reproducible under an iteration cap.
    std::uint64_t max_iterations = 0;

    /// Called with every sample accepted by informed RRT* once a solution exists.
    std::function<void(const Pose& sample, double best_cost)> on_informed_sample;

    /// Throws std::invalid_argument on inconsistent values.
    void validate() const;
};

struct PlanResult {
    Status status = Status::NotSolved;
    std::optional<SteeredPath> path;
    std::vector<Pose> waypoints;
    bool exact = false;
    std::optional<double> time_to_first_solution;
    double total_time = 0.0;
    std::uint64_t iterations = 0;
    std::uint64_t state_checks = 0;
    /// (seconds since start, path length) at each improvement.
    std::vector<std::pair<double, double>> solution_history;
};

PlanResult rrt_plan(PlanningProblem& p, const PlannerParams& params, const Budget& budget);
PlanResult rrt_star_plan(PlanningProblem& p, const PlannerParams& params, const Budget& budget, bool informed);
PlanResult prm_plan(PlanningProblem& p, const PlannerParams& params, const Budget& budget, bool star);
PlanResult theta_star_plan(PlanningProblem& p, const PlannerParams& params, const Budget& budget);
PlanResult lattice_plan(PlanningProblem& p, const PlannerParams& params, const Budget& budget);

using PlannerFn = std::function<PlanResult(PlanningProblem&, const PlannerParams&, const Budget&)>;

/// Planners by name. The built-in planners are registered on first use; tests
/// and extensions may add more.
class Registry {
public:
    static Registry& instance();

    void add(const std::string& name, PlannerFn fn);
    [[nodiscard]] bool contains(const std::string& name) const;
    /// Throws std::invalid_argument for unknown names.
    [[nodiscard]] PlannerFn get(const std::string& name) const;
    [[nodiscard]] std::vector<std::string> names() const;

private:
    Registry();
    mutable std::mutex mutex_;
    std::map<std::string, PlannerFn> planners_;
};

/// Weighted SE(2) distance used for nearest-neighbour queries:
/// sqrt(dx^2 + dy^2) + lambda * |dtheta|.
inline double se2_distance(const Pose& a, const Pose& b, double lambda) {
    return geom::distance(a.position(), b.position()) + lambda * std::abs(geom::angle_diff(a.theta(), b.theta()));
}

// State lattice used by lattice_plan, exposed so its optimality can be checked
// against an independent search.

struct LatticeKey {
    int ix = 0;
    int iy = 0;
    int bin = 0;
    auto operator<=>(const LatticeKey&) const = default;
};

struct LatticeKeyHash {
    std::size_t operator()(const LatticeKey& k) const noexcept {
        const auto u = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.ix)) << 32U) ^
                       (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.iy)) << 8U) ^
                       static_cast<std::uint64_t>(k.bin);
        return static_cast<std::size_t>(u * 0x9e3779b97f4a7c15ULL ^ (u >> 29U));
    }
};

struct LatticeEdge {
    LatticeKey to;
    std::int64_t cost = 0;  ///< path length in micrometers
    int primitive = 0;
};

/// Lattice anchored at the start pose: state (ix, iy, bin) sits at
/// start + res * (ix, iy) with heading start.theta + bin * 2pi / bins.
class StateLattice {
public:
    StateLattice(const Pose& anchor, const steer::SteerConfig& cfg, const LatticeParams& params, double resolution);

    [[nodiscard]] Pose pose(const LatticeKey& k) const;
    [[nodiscard]] LatticeKey key_of(const Pose& p) const;
    [[nodiscard]] int primitive_count() const { return static_cast<int>(prims_by_bin_.front().size()); }
    [[nodiscard]] double resolution() const { return res_; }
    [[nodiscard]] int heading_bins() const { return bins_; }

    /// Valid successors of k; edge validity is cached across calls.
    std::vector<LatticeEdge> successors(const LatticeKey& k, collision::ValidityChecker& checker);
    /// The blended path of primitive `prim` applied at state k.
    [[nodiscard]] SteeredPath edge_path(const LatticeKey& k, int prim) const;

    static constexpr double kCostScale = 1e6;

private:
    // A primitive whose end is snapped onto the lattice. The snapping error is
    // spread linearly along the trace, whose positions are relative to the
    // source state.
    struct Prim {
        int dix = 0;
        int diy = 0;
        int dbin = 0;
        std::int64_t cost = 0;
        std::vector<steer::TracePoint> trace;
        int direction = 1;
    };
    Pose anchor_;
    double res_;
    int bins_;
    std::vector<std::vector<Prim>> prims_by_bin_;
    // per state: bit 2i set when primitive i was checked, bit 2i+1 when it is valid
    std::unordered_map<LatticeKey, std::uint64_t, LatticeKeyHash> valid_cache_;
};

}  // namespace wheelbench::planners
