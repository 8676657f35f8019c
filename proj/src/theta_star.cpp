#include "planner_support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace wheelbench::planners {

namespace {

struct Node {
    Pose pose;
    double g = std::numeric_limits<double>::infinity();
    int parent = -1;
    SteeredPath edge;
    bool closed = false;
};

}  // namespace

PlanResult theta_star_plan(PlanningProblem& p, const PlannerParams& params, const Budget& budget) {
    const auto* grid = std::get_if<env::GridEnv>(&p.checker.env());
    if (grid == nullptr) {
        throw EnvUnsupported("theta_star requires a grid environment");
    }
    PlanResult r;
    const std::uint64_t checks_before = p.checker.state_checks();
    if (!detail::begin_run(p, params, r)) {
        detail::end_run(p, budget, checks_before, r);
        return r;
    }
    const int w = grid->width();
    const int h = grid->height();
    const double cs = grid->cell_size();
    const int goal_id = w * h;
    const geom::Vec2 goal_pos = p.goal().position();
    std::vector<Node> nodes(static_cast<std::size_t>(w * h + 1));
    auto node = [&](int id) -> Node& { return nodes[static_cast<std::size_t>(id)]; };

    const env::Cell sc = grid->cell_of(p.start().position());
    const int start_id = std::min(sc.row, h - 1) * w + std::min(sc.col, w - 1);
    node(start_id).pose = p.start();
    node(start_id).g = 0.0;
    node(start_id).edge = SteeredPath(p.start());
    node(goal_id).pose = p.goal();

    auto heuristic = [&](int id) {
        return id == goal_id ? 0.0 : geom::distance(node(id).pose.position(), goal_pos);
    };
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    open.emplace(heuristic(start_id), start_id);

    // Steer from `from` to `target` (heading fixed by the caller) if the path is valid.
    auto connect = [&](int from, const Pose& target) -> std::optional<SteeredPath> {
        auto path = p.steer.connect(node(from).pose, target);
        if (!path || !detail::reaches(*path, target) || !p.checker.is_path_valid(*path)) {
            return std::nullopt;
        }
        return path;
    };
    // Relax `to` from the parent of `s` when visible, else from `s`.
    auto relax = [&](int s, int to, const geom::Vec2& to_pos, bool fixed_heading) {
        const int par = node(s).parent;
        for (const int from : {par, s}) {
            if (from < 0) {
                continue;
            }
            const geom::Vec2 d = to_pos - node(from).pose.position();
            const Pose target = fixed_heading ? node(to).pose : Pose(to_pos.x, to_pos.y, std::atan2(d.y, d.x));
            const double lb = node(from).g + geom::distance(node(from).pose.position(), to_pos);
            if (lb >= node(to).g) {
                if (from == par) {
                    continue;
                }
                return;
            }
            auto path = connect(from, target);
            if (!path) {
                continue;
            }
            const double g = node(from).g + path->length();
            if (g < node(to).g) {
                Node& n = node(to);
                n.g = g;
                n.parent = from;
                n.pose = target;
                n.edge = std::move(*path);
                open.emplace(g + heuristic(to), to);
            }
            return;
        }
    };

    bool timed_out = false;
    bool found = false;
    while (!open.empty()) {
        if (budget.expired()) {
            timed_out = true;
            break;
        }
        if (detail::out_of_iterations(params, r.iterations)) {
            break;
        }
        const auto [f, s] = open.top();
        open.pop();
        if (node(s).closed) {
            continue;
        }
        node(s).closed = true;
        ++r.iterations;
        if (s == goal_id) {
            found = true;
            break;
        }
        const int col = s % w;
        const int row = s / w;
        const geom::Vec2 center = grid->cell_center(col, row);
        if (geom::distance(center, goal_pos) <= 1.5 * cs || s == start_id) {
            relax(s, goal_id, goal_pos, true);
        }
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                const int nc = col + dc;
                const int nr = row + dr;
                if ((dr == 0 && dc == 0) || !grid->in_grid(nc, nr) || grid->occupied(nc, nr)) {
                    continue;
                }
                const int id = nr * w + nc;
                if (node(id).closed) {
                    continue;
                }
                relax(s, id, grid->cell_center(nc, nr), false);
            }
        }
    }

    if (found) {
        std::vector<int> chain;
        for (int n = goal_id; n >= 0; n = node(n).parent) {
            chain.push_back(n);
        }
        std::reverse(chain.begin(), chain.end());
        std::vector<const SteeredPath*> edges;
        for (const int n : chain) {
            r.waypoints.push_back(node(n).pose);
            if (n != start_id) {
                edges.push_back(&node(n).edge);
            }
        }
        r.path = detail::concatenate(p.start(), edges);
        r.status = Status::Solved;
        r.time_to_first_solution = budget.elapsed();
        r.solution_history.emplace_back(*r.time_to_first_solution, r.path->length());
    } else {
        r.status = timed_out ? Status::Timeout : Status::NotSolved;
    }
    detail::end_run(p, budget, checks_before, r);
    return r;
}

}  // namespace wheelbench::planners
