#include "wheelbench/smoothing.hpp"

#include "wheelbench/metrics.hpp"
#include "wheelbench/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace wheelbench::smoothing {

using geom::Pose;
using geom::Vec2;
using steer::SegmentDescriptor;
using steer::TracePoint;

void SmootherParams::validate() const {
    if (shortcut_rounds < 0 || bspline_rounds < 0 || grips.descent_rounds < 0) {
        throw std::invalid_argument("smoother round counts must be non-negative");
    }
    if (grips.eta < 0.0 || grips.gradient_eps < 0.0 || grips.min_node_spacing < 0.0) {
        throw std::invalid_argument("GRIPS step sizes must be non-negative (0 selects the default)");
    }
    if (!(time_budget > 0.0)) {
        throw std::invalid_argument("smoother time_budget must be positive");
    }
}

namespace {

constexpr std::uint64_t kSmoothStream = 0x534d4f4f54480001ULL;
constexpr double kPolylineSpacing = 0.5;

class Deadline {
public:
    explicit Deadline(double seconds)
        : begin_(std::chrono::steady_clock::now()),
          end_(begin_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(seconds))) {}
    [[nodiscard]] bool expired() const { return std::chrono::steady_clock::now() >= end_; }
    [[nodiscard]] double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - begin_).count();
    }

private:
    std::chrono::steady_clock::time_point begin_;
    std::chrono::steady_clock::time_point end_;
};

bool reaches(const SteeredPath& path, const Pose& target) {
    return geom::distance(path.end().position(), target.position()) <= 1e-6 &&
           std::abs(geom::angle_diff(path.end().theta(), target.theta())) <= 1e-6;
}

double cell_size(const env::Environment& e) {
    const auto* grid = std::get_if<env::GridEnv>(&e);
    return grid ? grid->cell_size() : 1.0;
}

double max_curvature(const SteeredPath& path, double resolution) {
    return metrics::curvature_stats(path, resolution).max;
}

// Shared bookkeeping: validates the input, and fills lengths and curvatures.
class Run {
public:
    Run(const SteeredPath& in, ValidityChecker& checker, const SmootherParams& params)
        : in_(in), checker_(checker), deadline_(params.time_budget) {
        params.validate();
        result_.length_before = in.length();
        result_.max_curvature_before = max_curvature(in, checker.check_resolution());
        valid_ = checker.is_path_valid(in);
        result_.input_invalid = !valid_;
    }
    [[nodiscard]] bool input_valid() const { return valid_; }
    [[nodiscard]] const Deadline& deadline() const { return deadline_; }

    SmoothResult finish(const SteeredPath& out) {
        // endpoints stay bit-identical and the output is never invalid
        const bool ok = valid_ && out.start() == in_.start() && out.end() == in_.end() && checker_.is_path_valid(out);
        result_.path = ok ? out : in_;
        result_.length_after = result_.path.length();
        result_.max_curvature_after = max_curvature(result_.path, checker_.check_resolution());
        result_.time = deadline_.elapsed();
        return result_;
    }

private:
    const SteeredPath& in_;
    ValidityChecker& checker_;
    Deadline deadline_;
    SmoothResult result_;
    bool valid_ = false;
};

SteeredPath assemble(const Pose& start, const Pose& end, const std::vector<SteeredPath>& pieces) {
    SteeredPath out(start);
    for (const SteeredPath& p : pieces) {
        out.append(p);
    }
    out.snap_end(end);
    return out;
}

SteeredPath shortcut_pass(SteeredPath path, ValidityChecker& checker, const SteerFunction& steer, int rounds, Rng& rng,
                          const Deadline& deadline) {
    const Pose end = path.end();
    for (int r = 0; r < rounds && !deadline.expired(); ++r) {
        const double len = path.length();
        double s0 = rng.uniform(0.0, len);
        double s1 = rng.uniform(0.0, len);
        if (s0 > s1) {
            std::swap(s0, s1);
        }
        if (s1 - s0 < 1e-6) {
            continue;
        }
        const Pose a = path.pose_at(s0);
        const Pose b = path.pose_at(s1);
        auto repl = steer.connect(a, b);
        if (!repl || !reaches(*repl, b) || repl->length() >= s1 - s0 - 1e-9 || !checker.is_path_valid(*repl)) {
            continue;
        }
        SteeredPath cand = path.slice(0.0, s0);
        cand.append(*repl);
        cand.append(path.slice(s1, len));
        cand.snap_end(end);
        if (checker.is_path_valid(cand)) {
            path = std::move(cand);
        }
    }
    return path;
}

// Pieces between segment boundaries, with Integrated segments cut further
// every `spacing` meters.
std::vector<SteeredPath> split(const SteeredPath& path, double spacing) {
    std::vector<double> cuts{0.0};
    double acc = 0.0;
    for (const SegmentDescriptor& seg : path.segments()) {
        if (seg.kind == steer::SegmentKind::Integrated) {
            const int n = std::max(1, static_cast<int>(std::ceil(seg.length() / spacing)));
            for (int k = 1; k < n; ++k) {
                cuts.push_back(acc + seg.length() * k / n);
            }
        }
        acc += seg.length();
        cuts.push_back(acc);
    }
    std::vector<SteeredPath> pieces;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] > 1e-9) {
            pieces.push_back(path.slice(cuts[i], cuts[i + 1]));
        }
    }
    return pieces;
}

// Greedily replaces two neighbouring pieces by one steer path when it is
// valid and not longer.
void prune(std::vector<SteeredPath>& pieces, ValidityChecker& checker, const SteerFunction& steer,
           const Deadline& deadline) {
    std::size_t i = 1;
    while (i < pieces.size() && !deadline.expired()) {
        const Pose& a = pieces[i - 1].start();
        const Pose& b = pieces[i].end();
        auto repl = steer.connect(a, b);
        if (repl && reaches(*repl, b) && repl->length() <= pieces[i - 1].length() + pieces[i].length() &&
            checker.is_path_valid(*repl)) {
            pieces[i - 1] = std::move(*repl);
            pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
}

SteeredPath reduce_vertices(const SteeredPath& path, ValidityChecker& checker, const SteerFunction& steer,
                            const Deadline& deadline) {
    auto pieces = split(path, kPolylineSpacing);
    if (pieces.size() < 2) {
        return path;
    }
    prune(pieces, checker, steer, deadline);
    SteeredPath out = assemble(path.start(), path.end(), pieces);
    return out.length() <= path.length() && checker.is_path_valid(out) ? out : path;
}

// Polyline form of a path: one vertex list per driving direction. The first and
// last vertex of every run keep their poses; interior headings follow the
// polyline tangent.
struct Polyline {
    struct Part {
        int direction = 1;
        std::vector<Vec2> points;
        double first_heading = 0.0;
        double last_heading = 0.0;
    };
    std::vector<Part> parts;
};

Polyline to_polyline(const SteeredPath& path, double spacing) {
    Polyline out;
    const auto samples = steer::sample_path(path, spacing);
    Polyline::Part cur;
    cur.points.push_back(samples.front().pose.position());
    cur.first_heading = samples.front().pose.theta();
    cur.direction = samples.size() > 1 ? samples[1].direction : 1;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (s.direction != cur.direction) {
            // the previous sample closes this run and opens the next one
            const auto& prev = samples[i - 1];
            cur.last_heading = prev.pose.theta();
            out.parts.push_back(cur);
            cur = Polyline::Part{};
            cur.direction = s.direction;
            cur.points.push_back(prev.pose.position());
            cur.first_heading = prev.pose.theta();
        }
        const bool last = i + 1 == samples.size();
        if (last || geom::distance(s.pose.position(), cur.points.back()) > 1e-6) {
            if (last && cur.points.size() > 1 && geom::distance(s.pose.position(), cur.points.back()) <= 1e-6) {
                cur.points.back() = s.pose.position();
            } else {
                cur.points.push_back(s.pose.position());
            }
        }
    }
    cur.last_heading = samples.back().pose.theta();
    out.parts.push_back(cur);
    return out;
}

double tangent(const Polyline::Part& part, std::size_t i) {
    const std::size_t n = part.points.size();
    if (i == 0) {
        return part.first_heading;
    }
    if (i + 1 == n) {
        return part.last_heading;
    }
    const Vec2 d = part.points[i + 1] - part.points[i - 1];
    const double h = std::atan2(d.y, d.x);
    return geom::normalize_angle(part.direction > 0 ? h : h + geom::kPi);
}

// Integrated trace of vertices [lo, hi] of a part.
std::vector<TracePoint> trace(const Polyline::Part& part, std::size_t lo, std::size_t hi) {
    std::vector<TracePoint> out;
    for (std::size_t i = lo; i <= hi; ++i) {
        double k = 0.0;
        if (i > 0 && i + 1 < part.points.size()) {
            const double ds = geom::distance(part.points[i - 1], part.points[i]) +
                              geom::distance(part.points[i], part.points[i + 1]);
            if (ds > 0.0) {
                k = geom::angle_diff(tangent(part, i + 1), tangent(part, i - 1)) / (part.direction * ds);
            }
        }
        out.push_back({Pose(part.points[i].x, part.points[i].y, tangent(part, i)), k});
    }
    return out;
}

SteeredPath from_polyline(const Polyline& poly, const Pose& start, const Pose& end) {
    std::vector<SegmentDescriptor> segs;
    for (const auto& part : poly.parts) {
        if (part.points.size() < 2) {
            continue;
        }
        auto t = trace(part, 0, part.points.size() - 1);
        segs.push_back(SegmentDescriptor::integrated(std::move(t), part.direction));
    }
    if (segs.empty()) {
        return SteeredPath(start);
    }
    segs.front().trace.front().pose = start;
    segs.back().trace.back().pose = end;
    SteeredPath out(start, std::move(segs));
    out.snap_end(end);
    return out;
}

bool window_valid(const Polyline::Part& part, std::size_t i, ValidityChecker& checker) {
    const std::size_t lo = i >= 2 ? i - 2 : 0;
    const std::size_t hi = std::min(part.points.size() - 1, i + 2);
    auto t = trace(part, lo, hi);
    const Pose first = t.front().pose;
    return checker.is_path_valid(SteeredPath(first, {SegmentDescriptor::integrated(std::move(t), part.direction)}));
}

SteeredPath bspline_pass(const SteeredPath& path, ValidityChecker& checker, int rounds, const Deadline& deadline) {
    Polyline poly = to_polyline(path, kPolylineSpacing);
    SteeredPath best = from_polyline(poly, path.start(), path.end());
    if (!checker.is_path_valid(best)) {
        return path;
    }
    const double min_edge = checker.check_resolution();
    for (int r = 0; r < rounds && !deadline.expired(); ++r) {
        Polyline next = poly;
        for (auto& part : next.parts) {
            std::vector<Vec2> dense;
            for (std::size_t i = 0; i + 1 < part.points.size(); ++i) {
                dense.push_back(part.points[i]);
                if (geom::distance(part.points[i], part.points[i + 1]) > 2.0 * min_edge) {
                    dense.push_back((part.points[i] + part.points[i + 1]) * 0.5);
                }
            }
            dense.push_back(part.points.back());
            part.points = std::move(dense);
            for (std::size_t i = 1; i + 1 < part.points.size(); ++i) {
                const Vec2 old = part.points[i];
                const Vec2 mid = (part.points[i - 1] + part.points[i + 1]) * 0.5;
                part.points[i] = old + (mid - old) * 0.5;
                if (!window_valid(part, i, checker)) {
                    part.points[i] = old;
                }
            }
        }
        SteeredPath cand = from_polyline(next, path.start(), path.end());
        if (!checker.is_path_valid(cand)) {
            break;
        }
        poly = std::move(next);
        best = std::move(cand);
    }
    return best;
}

double safe_clearance(const ValidityChecker& checker, Vec2 p) {
    return env::bounds_of(checker.env()).contains(p) ? checker.clearance(p) : 0.0;
}

}  // namespace

SmoothResult shortcut(const SteeredPath& path, ValidityChecker& checker, const SteerFunction& steer,
                      const SmootherParams& params) {
    Run run(path, checker, params);
    if (!run.input_valid()) {
        return run.finish(path);
    }
    Rng rng(params.rng_seed, kSmoothStream);
    return run.finish(shortcut_pass(path, checker, steer, params.shortcut_rounds, rng, run.deadline()));
}

SmoothResult bspline_smooth(const SteeredPath& path, ValidityChecker& checker, const SmootherParams& params) {
    Run run(path, checker, params);
    if (!run.input_valid() || path.empty()) {
        return run.finish(path);
    }
    return run.finish(bspline_pass(path, checker, params.bspline_rounds, run.deadline()));
}

SmoothResult simplify_max(const SteeredPath& path, ValidityChecker& checker, const SteerFunction& steer,
                          const SmootherParams& params) {
    Run run(path, checker, params);
    if (!run.input_valid() || path.empty()) {
        return run.finish(path);
    }
    Rng rng(params.rng_seed, kSmoothStream);
    SteeredPath cur = path;
    while (!run.deadline().expired()) {
        const double before = cur.length();
        cur = reduce_vertices(cur, checker, steer, run.deadline());
        cur = shortcut_pass(cur, checker, steer, params.shortcut_rounds, rng, run.deadline());
        SteeredPath smooth = bspline_pass(cur, checker, params.bspline_rounds, run.deadline());
        if (smooth.length() <= cur.length()) {
            cur = std::move(smooth);
        }
        if (before - cur.length() <= 1e-3 * before) {
            break;
        }
    }
    return run.finish(cur);
}

SmoothResult grips(const SteeredPath& path, ValidityChecker& checker, const SteerFunction& steer,
                   const SmootherParams& params, GripsDiagnostics* diagnostics) {
    Run run(path, checker, params);
    if (!run.input_valid() || path.empty()) {
        return run.finish(path);
    }
    const double cs = cell_size(checker.env());
    const double eta = params.grips.eta > 0.0 ? params.grips.eta : 0.25 * cs;
    const double eps = params.grips.gradient_eps > 0.0 ? params.grips.gradient_eps : checker.check_resolution();
    const double spacing = params.grips.min_node_spacing > 0.0 ? params.grips.min_node_spacing : 2.0 * cs;
    const Deadline& deadline = run.deadline();

    // (1) vertices at most `spacing` apart, plus every cusp
    const double len = path.length();
    std::vector<double> cuts;
    const int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    for (int k = 0; k <= n; ++k) {
        cuts.push_back(len * k / n);
    }
    const auto bounds = path.boundaries();
    const auto segs = path.segments();
    for (std::size_t i = 1; i < segs.size(); ++i) {
        if (segs[i].direction() != segs[i - 1].direction()) {
            cuts.push_back(bounds[i]);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return b - a < 1e-6; }), cuts.end());
    cuts.back() = len;
    std::vector<Pose> verts;
    std::vector<bool> fixed;
    std::vector<SteeredPath> pieces;
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        verts.push_back(k == 0 ? path.start() : (k + 1 == cuts.size() ? path.end() : path.pose_at(cuts[k])));
        const bool cusp = std::any_of(bounds.begin() + 1, bounds.end() - 1, [&](double b) {
            return std::abs(b - cuts[k]) < 1e-6;
        });
        fixed.push_back(k == 0 || k + 1 == cuts.size() || cusp);
        if (k > 0) {
            pieces.push_back(path.slice(cuts[k - 1], cuts[k]));
        }
    }
    // slices are rebuilt from the vertices so neighbouring pieces meet exactly
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        pieces[k].snap_end(verts[k + 1], 1e-6);
    }

    // (2) move vertices up the clearance gradient
    const std::vector<Pose> original = verts;
    for (int round = 0; round < params.grips.descent_rounds && !deadline.expired(); ++round) {
        for (std::size_t i = 1; i + 1 < verts.size(); ++i) {
            if (fixed[i]) {
                continue;
            }
            const Vec2 p = verts[i].position();
            const Vec2 grad{(safe_clearance(checker, p + Vec2{eps, 0}) - safe_clearance(checker, p - Vec2{eps, 0})) /
                                (2 * eps),
                            (safe_clearance(checker, p + Vec2{0, eps}) - safe_clearance(checker, p - Vec2{0, eps})) /
                                (2 * eps)};
            const double norm = grad.norm();
            if (norm < 1e-9) {
                continue;
            }
            const Vec2 q = p + grad * (eta / norm);
            const Pose cand(q.x, q.y, verts[i].theta());
            auto left = steer.connect(verts[i - 1], cand);
            if (!left || !reaches(*left, cand) || !checker.is_path_valid(*left)) {
                continue;
            }
            auto right = steer.connect(cand, verts[i + 1]);
            if (!right || !reaches(*right, verts[i + 1]) || !checker.is_path_valid(*right)) {
                continue;
            }
            left->snap_end(cand);
            right->snap_end(verts[i + 1]);
            verts[i] = cand;
            pieces[i - 1] = std::move(*left);
            pieces[i] = std::move(*right);
        }
    }
    if (diagnostics != nullptr) {
        diagnostics->displacement.clear();
        for (std::size_t i = 1; i + 1 < verts.size(); ++i) {
            diagnostics->displacement.push_back(geom::distance(verts[i].position(), original[i].position()));
        }
        diagnostics->clearance_before = metrics::mean_path_clearance(path, checker, checker.check_resolution());
        diagnostics->clearance_after_descent =
            metrics::mean_path_clearance(assemble(path.start(), path.end(), pieces), checker, checker.check_resolution());
    }

    // (3) drop vertices that can be bridged directly, (4) shortcut
    prune(pieces, checker, steer, deadline);
    SteeredPath out = assemble(path.start(), path.end(), pieces);
    if (!checker.is_path_valid(out)) {
        return run.finish(path);
    }
    Rng rng(params.rng_seed, kSmoothStream);
    return run.finish(shortcut_pass(out, checker, steer, params.shortcut_rounds, rng, deadline));
}

SmoothResult smooth(const std::string& name, const SteeredPath& path, ValidityChecker& checker,
                    const SteerFunction& steer, const SmootherParams& params) {
    if (name == "shortcut") {
        return shortcut(path, checker, steer, params);
    }
    if (name == "bspline") {
        return bspline_smooth(path, checker, params);
    }
    if (name == "simplify_max") {
        return simplify_max(path, checker, steer, params);
    }
    if (name == "grips") {
        return grips(path, checker, steer, params);
    }
    throw std::invalid_argument("unknown smoother: " + name);
}

std::vector<std::string> smoother_names() { return {"bspline", "grips", "shortcut", "simplify_max"}; }

}  // namespace wheelbench::smoothing
