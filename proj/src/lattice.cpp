#include "planner_support.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

namespace wheelbench::planners {

namespace {

constexpr double kTraceStep = 0.05;

}  // namespace

StateLattice::StateLattice(const Pose& anchor, const steer::SteerConfig& cfg, const LatticeParams& params,
                           double resolution)
    : anchor_(anchor), res_(resolution), bins_(params.heading_bins) {
    if (!(res_ > 0.0) || bins_ < 4) {
        throw std::invalid_argument("StateLattice: bad resolution or heading bins");
    }
    const double dth = geom::kTwoPi / bins_;
    const double wmax = cfg.omega_max;
    const double duration = geom::kPi / (2.0 * wmax);
    prims_by_bin_.resize(static_cast<std::size_t>(bins_));
    for (int b = 0; b < bins_; ++b) {
        const double th = anchor_.theta() + b * dth;
        for (const int dir : {1, -1}) {
            const double v = dir * cfg.v_max;
            for (const double w : {-wmax, -wmax / 2.0, 0.0, wmax / 2.0, wmax}) {
                auto at = [&](double t) {
                    if (w == 0.0) {
                        return geom::Vec2{v * t * std::cos(th), v * t * std::sin(th)};
                    }
                    return geom::Vec2{v / w * (std::sin(th + w * t) - std::sin(th)),
                                      -v / w * (std::cos(th + w * t) - std::cos(th))};
                };
                const geom::Vec2 exact = at(duration);
                Prim prim;
                prim.dix = static_cast<int>(std::lround(exact.x / res_));
                prim.diy = static_cast<int>(std::lround(exact.y / res_));
                prim.dbin = static_cast<int>(std::lround(w * duration / dth));
                prim.direction = dir;
                if (prim.dix == 0 && prim.diy == 0 && prim.dbin == 0) {
                    continue;
                }
                const geom::Vec2 snapped{prim.dix * res_, prim.diy * res_};
                const geom::Vec2 pos_err = snapped - exact;
                const double th_err = prim.dbin * dth - w * duration;
                const int steps = std::max(2, static_cast<int>(std::ceil(cfg.v_max * duration / kTraceStep)));
                double length = 0.0;
                for (int i = 0; i <= steps; ++i) {
                    const double u = static_cast<double>(i) / steps;
                    geom::Vec2 q = at(u * duration) + pos_err * u;
                    double heading = th + w * u * duration + th_err * u;
                    if (i == steps) {
                        q = snapped;
                        heading = th + prim.dbin * dth;
                    }
                    if (i > 0) {
                        length += geom::distance(prim.trace.back().pose.position(), q);
                    }
                    prim.trace.push_back({Pose(q.x, q.y, heading), w / v});
                }
                prim.cost = static_cast<std::int64_t>(std::ceil(length * kCostScale));
                prims_by_bin_[static_cast<std::size_t>(b)].push_back(std::move(prim));
            }
        }
    }
}

Pose StateLattice::pose(const LatticeKey& k) const {
    return {anchor_.x() + k.ix * res_, anchor_.y() + k.iy * res_,
            anchor_.theta() + k.bin * geom::kTwoPi / bins_};
}

LatticeKey StateLattice::key_of(const Pose& p) const {
    const double dth = geom::kTwoPi / bins_;
    int bin = static_cast<int>(std::lround(geom::angle_diff(p.theta(), anchor_.theta()) / dth)) % bins_;
    if (bin < 0) {
        bin += bins_;
    }
    return {static_cast<int>(std::lround((p.x() - anchor_.x()) / res_)),
            static_cast<int>(std::lround((p.y() - anchor_.y()) / res_)), bin};
}

SteeredPath StateLattice::edge_path(const LatticeKey& k, int prim) const {
    const Prim& pr = prims_by_bin_[static_cast<std::size_t>(k.bin)][static_cast<std::size_t>(prim)];
    const Pose from = pose(k);
    std::vector<steer::TracePoint> trace = pr.trace;
    for (steer::TracePoint& t : trace) {
        t.pose = Pose(t.pose.x() + from.x(), t.pose.y() + from.y(), t.pose.theta());
    }
    trace.front().pose = from;
    return SteeredPath(from, {steer::SegmentDescriptor::integrated(std::move(trace), pr.direction)});
}

std::vector<LatticeEdge> StateLattice::successors(const LatticeKey& k, collision::ValidityChecker& checker) {
    const env::Bounds b = env::bounds_of(checker.env());
    std::uint64_t& bits = valid_cache_[k];
    const auto& prims = prims_by_bin_[static_cast<std::size_t>(k.bin)];
    std::vector<LatticeEdge> out;
    for (std::size_t i = 0; i < prims.size(); ++i) {
        const Prim& pr = prims[i];
        const LatticeKey to{k.ix + pr.dix, k.iy + pr.diy, ((k.bin + pr.dbin) % bins_ + bins_) % bins_};
        if (!b.contains(pose(to).position())) {
            continue;
        }
        const std::uint64_t seen = 1ULL << (2 * i);
        const std::uint64_t ok = 1ULL << (2 * i + 1);
        if ((bits & seen) == 0) {
            bits |= seen;
            if (checker.is_path_valid(edge_path(k, static_cast<int>(i)))) {
                bits |= ok;
            }
        }
        if ((bits & ok) != 0) {
            out.push_back({to, pr.cost, static_cast<int>(i)});
        }
    }
    return out;
}

PlanResult lattice_plan(PlanningProblem& p, const PlannerParams& params, const Budget& budget) {
    PlanResult r;
    const std::uint64_t checks_before = p.checker.state_checks();
    if (!detail::begin_run(p, params, r)) {
        detail::end_run(p, budget, checks_before, r);
        return r;
    }
    double res = params.lattice.resolution;
    if (res <= 0.0) {
        const auto* grid = std::get_if<env::GridEnv>(&p.checker.env());
        res = grid ? grid->cell_size() / 2.0 : 0.5;
    }
    StateLattice lattice(p.start(), p.steer.config(), params.lattice, res);
    const LatticeKey start{0, 0, 0};
    const double tol = p.goal_tolerance.position;
    auto heuristic = [&](const LatticeKey& k) {
        const double d = geom::distance(lattice.pose(k).position(), p.goal().position()) - tol;
        return d <= 0.0 ? std::int64_t{0} : static_cast<std::int64_t>(std::floor(d * StateLattice::kCostScale));
    };

    struct Back {
        LatticeKey from;
        int prim;
    };
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::vector<std::pair<LatticeKey, int>> best_chain;
    bool timed_out = false;

    for (const double w : params.lattice.weights) {
        std::unordered_map<LatticeKey, std::int64_t, LatticeKeyHash> g;
        std::unordered_map<LatticeKey, Back, LatticeKeyHash> back;
        using Item = std::tuple<double, std::int64_t, LatticeKey>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
        g[start] = 0;
        open.emplace(w * static_cast<double>(heuristic(start)), 0, start);
        std::optional<LatticeKey> reached;
        while (!open.empty()) {
            if (budget.expired()) {
                timed_out = true;
                break;
            }
            if (detail::out_of_iterations(params, r.iterations)) {
                break;
            }
            const auto [f, gk, k] = open.top();
            open.pop();
            if (gk > g[k]) {
                continue;
            }
            ++r.iterations;
            if (p.goal_tolerance.satisfied(lattice.pose(k), p.goal())) {
                reached = k;
                break;
            }
            for (const LatticeEdge& e : lattice.successors(k, p.checker)) {
                const std::int64_t ng = gk + e.cost;
                const auto it = g.find(e.to);
                if (it == g.end() || ng < it->second) {
                    g[e.to] = ng;
                    back[e.to] = {k, e.primitive};
                    open.emplace(static_cast<double>(ng) + w * static_cast<double>(heuristic(e.to)), ng, e.to);
                }
            }
        }
        if (!reached) {
            break;
        }
        const std::int64_t cost = g[*reached];
        if (cost < best) {
            best = cost;
            best_chain.clear();
            for (LatticeKey k = *reached; k != start;) {
                const Back& bk = back.at(k);
                best_chain.emplace_back(bk.from, bk.prim);
                k = bk.from;
            }
            std::reverse(best_chain.begin(), best_chain.end());
            const double t = budget.elapsed();
            if (!r.time_to_first_solution) {
                r.time_to_first_solution = t;
            }
            r.solution_history.emplace_back(t, static_cast<double>(cost) / StateLattice::kCostScale);
        }
    }

    if (best != std::numeric_limits<std::int64_t>::max()) {
        std::vector<SteeredPath> edges;
        r.waypoints.push_back(p.start());
        for (const auto& [k, prim] : best_chain) {
            edges.push_back(lattice.edge_path(k, prim));
            r.waypoints.push_back(edges.back().end());
        }
        std::vector<const SteeredPath*> ptrs;
        for (const auto& e : edges) {
            ptrs.push_back(&e);
        }
        r.path = detail::concatenate(p.start(), ptrs);
        r.status = Status::Solved;
    } else {
        r.status = timed_out ? Status::Timeout : Status::NotSolved;
    }
    detail::end_run(p, budget, checks_before, r);
    return r;
}

}  // namespace wheelbench::planners
