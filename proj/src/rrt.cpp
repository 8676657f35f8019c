#include "planner_support.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wheelbench::planners {

namespace {

constexpr std::uint64_t kRrtStream = 0x5252540000000001ULL;

struct Tree {
    std::vector<Pose> pose;
    std::vector<int> parent;
    std::vector<double> cost;
    std::vector<SteeredPath> edge;
    std::vector<std::vector<int>> children;

    int add(const Pose& p, int par, SteeredPath e, double c) {
        pose.push_back(p);
        parent.push_back(par);
        cost.push_back(c);
        edge.push_back(std::move(e));
        children.emplace_back();
        const int id = static_cast<int>(pose.size()) - 1;
        if (par >= 0) {
            children[static_cast<std::size_t>(par)].push_back(id);
        }
        return id;
    }

    void reparent(int j, int par, SteeredPath e, double c) {
        auto& siblings = children[static_cast<std::size_t>(parent[static_cast<std::size_t>(j)])];
        siblings.erase(std::find(siblings.begin(), siblings.end(), j));
        parent[static_cast<std::size_t>(j)] = par;
        children[static_cast<std::size_t>(par)].push_back(j);
        edge[static_cast<std::size_t>(j)] = std::move(e);
        const double delta = c - cost[static_cast<std::size_t>(j)];
        std::vector<int> stack{j};
        while (!stack.empty()) {
            const int n = stack.back();
            stack.pop_back();
            cost[static_cast<std::size_t>(n)] += delta;
            for (const int ch : children[static_cast<std::size_t>(n)]) {
                stack.push_back(ch);
            }
        }
    }

    void extract(int node, PlanResult& r) const {
        std::vector<int> chain;
        for (int n = node; n >= 0; n = parent[static_cast<std::size_t>(n)]) {
            chain.push_back(n);
        }
        std::reverse(chain.begin(), chain.end());
        std::vector<const SteeredPath*> edges;
        r.waypoints.clear();
        for (const int n : chain) {
            r.waypoints.push_back(pose[static_cast<std::size_t>(n)]);
            if (parent[static_cast<std::size_t>(n)] >= 0) {
                edges.push_back(&edge[static_cast<std::size_t>(n)]);
            }
        }
        r.path = detail::concatenate(pose.front(), edges);
    }
};

// A steer path toward `target` truncated at `ext`, or nullopt.
std::optional<SteeredPath> extend(const PlanningProblem& p, const Pose& from, const Pose& target, double ext) {
    auto path = p.steer.connect(from, target);
    if (!path || path->length() < 1e-9) {
        return std::nullopt;
    }
    if (path->length() > ext) {
        return path->slice(0.0, ext);
    }
    return path;
}

}  // namespace

PlanResult rrt_plan(PlanningProblem& p, const PlannerParams& params, const Budget& budget) {
    PlanResult r;
    const std::uint64_t checks_before = p.checker.state_checks();
    if (!detail::begin_run(p, params, r)) {
        detail::end_run(p, budget, checks_before, r);
        return r;
    }
    Rng rng(params.rng_seed, kRrtStream);
    const env::Bounds bounds = env::bounds_of(p.checker.env());
    detail::NearestNeighbors nn(bounds, p.steer.config().turning_radius);
    const double ext = detail::extension_limit(params, p.steer.config());
    Tree tree;
    tree.add(p.start(), -1, SteeredPath(p.start()), 0.0);
    nn.add(p.start());
    bool timed_out = false;
    int solution = -1;
    if (p.goal_tolerance.satisfied(p.start(), p.goal())) {
        solution = 0;
    }
    while (solution < 0) {
        if (budget.expired()) {
            timed_out = true;
            break;
        }
        if (detail::out_of_iterations(params, r.iterations)) {
            break;
        }
        ++r.iterations;
        const Pose target = rng.bernoulli(params.goal_bias) ? p.goal() : detail::sample_pose(rng, bounds);
        const int near = static_cast<int>(nn.nearest(target));
        auto path = extend(p, tree.pose[static_cast<std::size_t>(near)], target, ext);
        if (!path || !p.checker.is_path_valid(*path)) {
            continue;
        }
        const Pose reached = path->end();
        const double c = tree.cost[static_cast<std::size_t>(near)] + path->length();
        const int id = tree.add(reached, near, std::move(*path), c);
        nn.add(reached);
        if (p.goal_tolerance.satisfied(reached, p.goal())) {
            solution = id;
        }
    }
    if (solution >= 0) {
        tree.extract(solution, r);
        r.status = Status::Solved;
        r.time_to_first_solution = budget.elapsed();
        r.solution_history.emplace_back(*r.time_to_first_solution, r.path->length());
    } else {
        r.status = timed_out ? Status::Timeout : Status::NotSolved;
    }
    detail::end_run(p, budget, checks_before, r);
    return r;
}

PlanResult rrt_star_plan(PlanningProblem& p, const PlannerParams& params, const Budget& budget, bool informed) {
    PlanResult r;
    const std::uint64_t checks_before = p.checker.state_checks();
    if (!detail::begin_run(p, params, r)) {
        detail::end_run(p, budget, checks_before, r);
        return r;
    }
    Rng rng(params.rng_seed, kRrtStream);
    const env::Bounds bounds = env::bounds_of(p.checker.env());
    detail::NearestNeighbors nn(bounds, p.steer.config().turning_radius);
    const double ext = detail::extension_limit(params, p.steer.config());
    const geom::Vec2 s = p.start().position();
    const geom::Vec2 g = p.goal().position();
    const double focal = geom::distance(s, g);
    const double k_rrt = params.rewire_factor * std::numbers::e * (1.0 + 1.0 / 3.0);

    Tree tree;
    tree.add(p.start(), -1, SteeredPath(p.start()), 0.0);
    nn.add(p.start());
    std::vector<int> goal_nodes;
    int best_node = -1;
    double best = std::numeric_limits<double>::infinity();
    bool timed_out = false;

    auto update_best = [&] {
        for (const int n : goal_nodes) {
            if (tree.cost[static_cast<std::size_t>(n)] < best - 1e-9) {
                best = tree.cost[static_cast<std::size_t>(n)];
                best_node = n;
                const double t = budget.elapsed();
                if (!r.time_to_first_solution) {
                    r.time_to_first_solution = t;
                }
                r.solution_history.emplace_back(t, best);
            }
        }
    };
    if (p.goal_tolerance.satisfied(p.start(), p.goal())) {
        goal_nodes.push_back(0);
        update_best();
    }

    // Rejection sampling inside the ellipse |x - s| + |x - g| <= c. A goal node
    // may sit up to the position tolerance away from g, hence the slack.
    auto informed_sample = [&](Pose& out) {
        const double c = best + p.goal_tolerance.position;
        const double a = c / 2.0;
        const double b = std::sqrt(std::max(0.0, c * c - focal * focal)) / 2.0;
        const double phi = std::atan2(g.y - s.y, g.x - s.x);
        const double ex = std::sqrt(a * a * std::cos(phi) * std::cos(phi) + b * b * std::sin(phi) * std::sin(phi));
        const double ey = std::sqrt(a * a * std::sin(phi) * std::sin(phi) + b * b * std::cos(phi) * std::cos(phi));
        const geom::Vec2 m = (s + g) * 0.5;
        const env::Bounds box{std::max(bounds.xmin, m.x - ex), std::max(bounds.ymin, m.y - ey),
                              std::min(bounds.xmax, m.x + ex), std::min(bounds.ymax, m.y + ey)};
        while (!budget.expired()) {
            const Pose q = detail::sample_pose(rng, box);
            if (geom::distance(s, q.position()) + geom::distance(q.position(), g) <= c) {
                out = q;
                return true;
            }
        }
        return false;
    };

    while (true) {
        if (budget.expired()) {
            timed_out = true;
            break;
        }
        if (detail::out_of_iterations(params, r.iterations)) {
            break;
        }
        ++r.iterations;
        Pose target = p.goal();
        if (!rng.bernoulli(params.goal_bias)) {
            if (informed && best_node >= 0) {
                if (!informed_sample(target)) {
                    continue;
                }
            } else {
                target = detail::sample_pose(rng, bounds);
            }
        }
        if (informed && best_node >= 0 && params.on_informed_sample) {
            params.on_informed_sample(target, best);
        }
        const int nearest = static_cast<int>(nn.nearest(target));
        auto first = extend(p, tree.pose[static_cast<std::size_t>(nearest)], target, ext);
        if (!first || !p.checker.is_path_valid(*first)) {
            continue;
        }
        const Pose x_new = first->end();
        const double via_nearest = tree.cost[static_cast<std::size_t>(nearest)] + first->length();

        const auto n = static_cast<double>(tree.pose.size() + 1);
        const std::size_t k = params.rewire_neighbors > 0 ? static_cast<std::size_t>(params.rewire_neighbors)
                                                           : static_cast<std::size_t>(std::ceil(k_rrt * std::log(n)));
        const std::vector<std::size_t> near = nn.k_nearest(x_new, k);

        // choose the cheapest valid parent, validating lazily in cost order
        std::vector<std::pair<double, int>> order;
        for (const std::size_t j : near) {
            if (static_cast<int>(j) == nearest) {
                continue;
            }
            const double c = tree.cost[j] + p.steer.distance(tree.pose[j], x_new);
            if (c < via_nearest - 1e-9) {
                order.emplace_back(c, static_cast<int>(j));
            }
        }
        std::sort(order.begin(), order.end());
        int parent = nearest;
        double cost = via_nearest;
        SteeredPath edge = std::move(*first);
        for (const auto& [c, j] : order) {
            auto path = p.steer.connect(tree.pose[static_cast<std::size_t>(j)], x_new);
            if (path && detail::reaches(*path, x_new) && p.checker.is_path_valid(*path)) {
                parent = j;
                cost = tree.cost[static_cast<std::size_t>(j)] + path->length();
                edge = std::move(*path);
                break;
            }
        }
        const int id = tree.add(x_new, parent, std::move(edge), cost);
        nn.add(x_new);

        for (const std::size_t j : near) {
            if (static_cast<int>(j) == parent) {
                continue;
            }
            const double d = p.steer.distance(x_new, tree.pose[j]);
            if (cost + d >= tree.cost[j] - 1e-9) {
                continue;
            }
            auto path = p.steer.connect(x_new, tree.pose[j]);
            if (path && detail::reaches(*path, tree.pose[j]) && p.checker.is_path_valid(*path)) {
                const double c = cost + path->length();
                if (c < tree.cost[j] - 1e-9) {
                    tree.reparent(static_cast<int>(j), id, std::move(*path), c);
                }
            }
        }
        if (p.goal_tolerance.satisfied(x_new, p.goal())) {
            goal_nodes.push_back(id);
        }
        update_best();
    }

    if (best_node >= 0) {
        tree.extract(best_node, r);
        r.status = Status::Solved;
        // the reported history ends at the returned path
        r.solution_history.back().second = r.path->length();
    } else {
        r.status = timed_out ? Status::Timeout : Status::NotSolved;
    }
    detail::end_run(p, budget, checks_before, r);
    return r;
}

}  // namespace wheelbench::planners
