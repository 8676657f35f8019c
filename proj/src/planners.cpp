#include "planner_support.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wheelbench::planners {

std::string_view to_string(Status s) {
    switch (s) {
        case Status::Solved: return "solved";
        case Status::NotSolved: return "not_solved";
        case Status::Timeout: return "timeout";
        case Status::StartOrGoalInvalid: return "start_or_goal_invalid";
    }
    return "unknown";
}

void PlannerParams::validate() const {
    if (!(goal_bias >= 0.0 && goal_bias < 1.0)) {
        throw std::invalid_argument("goal_bias must lie in [0, 1)");
    }
    if (max_steer_extension < 0.0) {
        throw std::invalid_argument("max_steer_extension must be non-negative");
    }
    if (rewire_neighbors < 0 || roadmap_k < 0) {
        throw std::invalid_argument("neighbour counts must be non-negative");
    }
    if (!(rewire_factor > 0.0) || !(k_prm > 0.0)) {
        throw std::invalid_argument("rewire_factor and k_prm must be positive");
    }
    if (lattice.weights.empty()) {
        throw std::invalid_argument("lattice weight schedule is empty");
    }
    for (std::size_t i = 0; i < lattice.weights.size(); ++i) {
        if (i > 0 && !(lattice.weights[i] < lattice.weights[i - 1])) {
            throw std::invalid_argument("lattice weight schedule must be strictly decreasing");
        }
    }
    if (!(lattice.weights.back() >= 1.0)) {
        throw std::invalid_argument("final lattice weight must be at least 1");
    }
    if (lattice.heading_bins < 4) {
        throw std::invalid_argument("lattice needs at least 4 heading bins");
    }
    if (lattice.resolution < 0.0) {
        throw std::invalid_argument("lattice resolution must be non-negative");
    }
}

Registry::Registry() {
    planners_["rrt"] = [](PlanningProblem& p, const PlannerParams& q, const Budget& b) { return rrt_plan(p, q, b); };
    planners_["rrt_star"] = [](PlanningProblem& p, const PlannerParams& q, const Budget& b) {
        return rrt_star_plan(p, q, b, false);
    };
    planners_["informed_rrt_star"] = [](PlanningProblem& p, const PlannerParams& q, const Budget& b) {
        return rrt_star_plan(p, q, b, true);
    };
    planners_["prm"] = [](PlanningProblem& p, const PlannerParams& q, const Budget& b) {
        return prm_plan(p, q, b, false);
    };
    planners_["prm_star"] = [](PlanningProblem& p, const PlannerParams& q, const Budget& b) {
        return prm_plan(p, q, b, true);
    };
    planners_["theta_star"] = [](PlanningProblem& p, const PlannerParams& q, const Budget& b) {
        return theta_star_plan(p, q, b);
    };
    planners_["lattice"] = [](PlanningProblem& p, const PlannerParams& q, const Budget& b) {
        return lattice_plan(p, q, b);
    };
}

Registry& Registry::instance() {
    static Registry r;
    return r;
}

void Registry::add(const std::string& name, PlannerFn fn) {
    const std::lock_guard lock(mutex_);
    planners_[name] = std::move(fn);
}

bool Registry::contains(const std::string& name) const {
    const std::lock_guard lock(mutex_);
    return planners_.contains(name);
}

PlannerFn Registry::get(const std::string& name) const {
    const std::lock_guard lock(mutex_);
    const auto it = planners_.find(name);
    if (it == planners_.end()) {
        throw std::invalid_argument("unknown planner: " + name);
    }
    return it->second;
}

std::vector<std::string> Registry::names() const {
    const std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [name, fn] : planners_) {
        out.push_back(name);
    }
    return out;
}

}  // namespace wheelbench::planners

namespace wheelbench::planners::detail {

NearestNeighbors::NearestNeighbors(const env::Bounds& bounds, double lambda)
    : bounds_(bounds), lambda_(lambda) {
    cell_ = std::max(0.5, std::max(bounds.width(), bounds.height()) / 64.0);
    cols_ = std::max(1, static_cast<int>(std::ceil(bounds.width() / cell_)));
    rows_ = std::max(1, static_cast<int>(std::ceil(bounds.height() / cell_)));
}

int NearestNeighbors::bucket_col(double x) const {
    return std::clamp(static_cast<int>(std::floor((x - bounds_.xmin) / cell_)), 0, cols_ - 1);
}

int NearestNeighbors::bucket_row(double y) const {
    return std::clamp(static_cast<int>(std::floor((y - bounds_.ymin) / cell_)), 0, rows_ - 1);
}

void NearestNeighbors::insert_bucket(std::size_t id) {
    const Pose& p = poses_[id];
    buckets_[static_cast<std::size_t>(bucket_row(p.y()) * cols_ + bucket_col(p.x()))].push_back(
        static_cast<std::uint32_t>(id));
}

std::size_t NearestNeighbors::add(const Pose& p) {
    poses_.push_back(p);
    const std::size_t id = poses_.size() - 1;
    if (poses_.size() == kLinearLimit) {
        buckets_.assign(static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_), {});
        for (std::size_t i = 0; i < poses_.size(); ++i) {
            insert_bucket(i);
        }
    } else if (poses_.size() > kLinearLimit) {
        insert_bucket(id);
    }
    return id;
}

std::size_t NearestNeighbors::nearest(const Pose& q) const {
    const auto ids = k_nearest(q, 1);
    if (ids.empty()) {
        throw std::logic_error("nearest neighbour query on an empty set");
    }
    return ids.front();
}

std::vector<std::size_t> NearestNeighbors::k_nearest(const Pose& q, std::size_t k) const {
    if (k == 0 || poses_.empty()) {
        return {};
    }
    if (poses_.size() < kLinearLimit || !bounds_.contains(q.position())) {
        return linear(q, k);
    }
    return bucketed(q, k);
}

namespace {

struct Candidate {
    double d;
    std::size_t id;
    bool operator<(const Candidate& o) const { return d < o.d || (d == o.d && id < o.id); }
};

// Keeps the k best candidates in a max-heap.
void offer(std::vector<Candidate>& heap, std::size_t k, Candidate c) {
    if (heap.size() < k) {
        heap.push_back(c);
        std::push_heap(heap.begin(), heap.end());
    } else if (c < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = c;
        std::push_heap(heap.begin(), heap.end());
    }
}

std::vector<std::size_t> ids_of(std::vector<Candidate>& heap) {
    std::sort(heap.begin(), heap.end());
    std::vector<std::size_t> out;
    out.reserve(heap.size());
    for (const Candidate& c : heap) {
        out.push_back(c.id);
    }
    return out;
}

}  // namespace

std::vector<std::size_t> NearestNeighbors::linear(const Pose& q, std::size_t k) const {
    std::vector<Candidate> heap;
    heap.reserve(k + 1);
    for (std::size_t i = 0; i < poses_.size(); ++i) {
        offer(heap, k, {se2_distance(q, poses_[i], lambda_), i});
    }
    return ids_of(heap);
}

std::vector<std::size_t> NearestNeighbors::bucketed(const Pose& q, std::size_t k) const {
    std::vector<Candidate> heap;
    heap.reserve(k + 1);
    const int c0 = bucket_col(q.x());
    const int r0 = bucket_row(q.y());
    const int kmax = std::max(cols_, rows_);
    for (int ring = 0; ring <= kmax; ++ring) {
        // buckets on ring `ring` are at least (ring - 1) cells away
        if (heap.size() == k && (ring - 1) * cell_ > heap.front().d) {
            break;
        }
        for (int row = r0 - ring; row <= r0 + ring; ++row) {
            if (row < 0 || row >= rows_) {
                continue;
            }
            const bool edge_row = row == r0 - ring || row == r0 + ring;
            const int step = (edge_row || ring == 0) ? 1 : 2 * ring;
            for (int col = c0 - ring; col <= c0 + ring; col += step) {
                if (col < 0 || col >= cols_) {
                    continue;
                }
                for (const std::uint32_t id : buckets_[static_cast<std::size_t>(row * cols_ + col)]) {
                    const Pose& p = poses_[id];
                    const double dp = geom::distance(q.position(), p.position());
                    if (heap.size() == k && dp > heap.front().d) {
                        continue;
                    }
                    offer(heap, k, {dp + lambda_ * std::abs(geom::angle_diff(q.theta(), p.theta())), id});
                }
            }
        }
    }
    return ids_of(heap);
}

Pose sample_pose(Rng& rng, const env::Bounds& b) {
    const double x = rng.uniform(b.xmin, b.xmax);
    const double y = rng.uniform(b.ymin, b.ymax);
    const double th = rng.uniform(-geom::kPi, geom::kPi);
    return {x, y, th};
}

double extension_limit(const PlannerParams& params, const steer::SteerConfig& cfg) {
    return params.max_steer_extension > 0.0 ? params.max_steer_extension : 5.0 * cfg.turning_radius;
}

bool out_of_iterations(const PlannerParams& params, std::uint64_t iterations) {
    return params.max_iterations > 0 && iterations >= params.max_iterations;
}

bool reaches(const SteeredPath& path, const Pose& target) {
    return geom::distance(path.end().position(), target.position()) <= 1e-6 &&
           std::abs(geom::angle_diff(path.end().theta(), target.theta())) <= 1e-6;
}

bool begin_run(PlanningProblem& p, const PlannerParams& params, PlanResult& r) {
    params.validate();
    if (!p.checker.is_state_valid(p.start()) || !p.checker.is_state_valid(p.goal())) {
        r.status = Status::StartOrGoalInvalid;
        return false;
    }
    return true;
}

void end_run(PlanningProblem& p, const Budget& budget, std::uint64_t checks_before, PlanResult& r) {
    r.total_time = budget.elapsed();
    r.state_checks = p.checker.state_checks() - checks_before;
    r.exact = r.path.has_value() && p.goal_tolerance.satisfied(r.path->end(), p.goal());
}

SteeredPath concatenate(const Pose& start, const std::vector<const SteeredPath*>& edges) {
    SteeredPath out(start);
    for (const SteeredPath* e : edges) {
        out.append(*e);
    }
    return out;
}

}  // namespace wheelbench::planners::detail
