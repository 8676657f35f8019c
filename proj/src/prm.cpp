#include "planner_support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace wheelbench::planners {

namespace {

constexpr std::uint64_t kPrmStream = 0x50524d0000000001ULL;

struct Arc {
    int to;
    double cost;
    bool reversed;  ///< stored as the reverse of the path to -> from
};

// The same curve driven backwards from its end.
SteeredPath reversed(const SteeredPath& path) {
    std::vector<steer::SegmentDescriptor> segs;
    for (auto it = path.segments().rbegin(); it != path.segments().rend(); ++it) {
        steer::SegmentDescriptor seg = *it;
        seg.signed_length = -seg.signed_length;
        segs.push_back(seg);
    }
    SteeredPath out(path.end(), std::move(segs));
    out.snap_end(path.start());
    return out;
}

class DisjointSets {
public:
    int add() {
        parent_.push_back(static_cast<int>(parent_.size()));
        return parent_.back();
    }
    int find(int x) {
        while (parent_[static_cast<std::size_t>(x)] != x) {
            auto& px = parent_[static_cast<std::size_t>(x)];
            px = parent_[static_cast<std::size_t>(px)];
            x = px;
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent_[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        }
    }

private:
    std::vector<int> parent_;
};

// Uniform-cost search from `from` to `to`; returns the node sequence.
std::vector<int> shortest(const std::vector<std::vector<Arc>>& out, int from, int to, double& cost,
                          std::vector<bool>& reversed_arcs) {
    const std::size_t n = out.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> prev(n, -1);
    std::vector<bool> prev_reversed(n, false);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[static_cast<std::size_t>(from)] = 0.0;
    open.emplace(0.0, from);
    while (!open.empty()) {
        const auto [d, u] = open.top();
        open.pop();
        if (d > dist[static_cast<std::size_t>(u)]) {
            continue;
        }
        if (u == to) {
            break;
        }
        for (const Arc& a : out[static_cast<std::size_t>(u)]) {
            const double nd = d + a.cost;
            if (nd < dist[static_cast<std::size_t>(a.to)]) {
                dist[static_cast<std::size_t>(a.to)] = nd;
                prev[static_cast<std::size_t>(a.to)] = u;
                prev_reversed[static_cast<std::size_t>(a.to)] = a.reversed;
                open.emplace(nd, a.to);
            }
        }
    }
    cost = dist[static_cast<std::size_t>(to)];
    if (!std::isfinite(cost)) {
        return {};
    }
    std::vector<int> seq;
    reversed_arcs.clear();
    for (int v = to; v >= 0; v = prev[static_cast<std::size_t>(v)]) {
        seq.push_back(v);
        if (v != from) {
            reversed_arcs.push_back(prev_reversed[static_cast<std::size_t>(v)]);
        }
    }
    std::reverse(seq.begin(), seq.end());
    std::reverse(reversed_arcs.begin(), reversed_arcs.end());
    return seq;
}

}  // namespace

PlanResult prm_plan(PlanningProblem& p, const PlannerParams& params, const Budget& budget, bool star) {
    PlanResult r;
    const std::uint64_t checks_before = p.checker.state_checks();
    if (!detail::begin_run(p, params, r)) {
        detail::end_run(p, budget, checks_before, r);
        return r;
    }
    if (!star && params.roadmap_k == 0) {
        // no roadmap edges can ever exist
        r.status = Status::NotSolved;
        detail::end_run(p, budget, checks_before, r);
        return r;
    }
    Rng rng(params.rng_seed, kPrmStream);
    const env::Bounds bounds = env::bounds_of(p.checker.env());
    detail::NearestNeighbors nn(bounds, p.steer.config().turning_radius);
    const bool reversible = p.steer.kind() == steer::SteerKind::ReedsShepp;

    std::vector<Pose> nodes;
    std::vector<std::vector<Arc>> out;
    DisjointSets sets;

    auto try_edge = [&](int a, int b) {
        auto path = p.steer.connect(nodes[static_cast<std::size_t>(a)], nodes[static_cast<std::size_t>(b)]);
        if (!path || !detail::reaches(*path, nodes[static_cast<std::size_t>(b)]) || !p.checker.is_path_valid(*path)) {
            return false;
        }
        out[static_cast<std::size_t>(a)].push_back({b, path->length(), false});
        return true;
    };

    auto insert = [&](const Pose& q) {
        const auto n = static_cast<double>(nodes.size() + 1);
        const std::size_t k = star ? static_cast<std::size_t>(std::ceil(params.k_prm * std::log(std::max(n, 2.0))))
                                   : static_cast<std::size_t>(params.roadmap_k);
        const std::vector<std::size_t> near = nn.k_nearest(q, k);
        const int id = static_cast<int>(nodes.size());
        nodes.push_back(q);
        out.emplace_back();
        sets.add();
        nn.add(q);
        for (const std::size_t j : near) {
            const int other = static_cast<int>(j);
            if (reversible) {
                // a Reeds-Shepp path driven backwards is the shortest path in reverse
                if (try_edge(id, other)) {
                    out[j].push_back({id, out[static_cast<std::size_t>(id)].back().cost, true});
                    sets.unite(id, other);
                }
            } else {
                const bool fwd = try_edge(id, other);
                const bool back = try_edge(other, id);
                if (fwd || back) {
                    sets.unite(id, other);
                }
            }
        }
    };

    insert(p.start());
    insert(p.goal());
    constexpr int kStart = 0;
    constexpr int kGoal = 1;

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_seq;
    std::vector<bool> best_reversed;
    std::uint64_t last_query = 0;
    bool timed_out = false;
    auto query = [&] {
        if (sets.find(kStart) != sets.find(kGoal)) {
            return;
        }
        double cost = 0.0;
        std::vector<bool> rev;
        auto seq = shortest(out, kStart, kGoal, cost, rev);
        if (!seq.empty() && cost < best - 1e-9) {
            best = cost;
            best_seq = std::move(seq);
            best_reversed = std::move(rev);
            const double t = budget.elapsed();
            if (!r.time_to_first_solution) {
                r.time_to_first_solution = t;
            }
            r.solution_history.emplace_back(t, best);
        }
    };
    query();

    while (star || best_seq.empty()) {
        if (budget.expired()) {
            timed_out = true;
            break;
        }
        if (detail::out_of_iterations(params, r.iterations)) {
            break;
        }
        ++r.iterations;
        const Pose q = detail::sample_pose(rng, bounds);
        if (!p.checker.is_state_valid(q)) {
            continue;
        }
        insert(q);
        const std::uint64_t every = star ? std::max<std::uint64_t>(1, nodes.size() / 100) : 1;
        if (r.iterations - last_query >= every) {
            last_query = r.iterations;
            query();
        }
    }
    if (star) {
        query();
    }

    if (!best_seq.empty()) {
        std::vector<SteeredPath> edges;
        for (std::size_t i = 0; i + 1 < best_seq.size(); ++i) {
            const Pose& a = nodes[static_cast<std::size_t>(best_seq[i])];
            const Pose& b = nodes[static_cast<std::size_t>(best_seq[i + 1])];
            edges.push_back(best_reversed[i] ? reversed(*p.steer.connect(b, a)) : *p.steer.connect(a, b));
        }
        std::vector<const SteeredPath*> ptrs;
        for (const auto& e : edges) {
            ptrs.push_back(&e);
        }
        for (const int v : best_seq) {
            r.waypoints.push_back(nodes[static_cast<std::size_t>(v)]);
        }
        r.path = detail::concatenate(p.start(), ptrs);
        r.solution_history.back().second = r.path->length();
        r.status = Status::Solved;
    } else {
        r.status = timed_out ? Status::Timeout : Status::NotSolved;
    }
    detail::end_run(p, budget, checks_before, r);
    return r;
}

}  // namespace wheelbench::planners
