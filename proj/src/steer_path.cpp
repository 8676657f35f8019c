#include "wheelbench/steer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wheelbench::steer {

using geom::angle_diff;
using geom::normalize_angle;

std::string_view to_string(SegmentKind kind) {
    switch (kind) {
        case SegmentKind::Straight: return "straight";
        case SegmentKind::LeftArc: return "left";
        case SegmentKind::RightArc: return "right";
        case SegmentKind::Integrated: return "integrated";
    }
    return "?";
}

SegmentKind parse_segment_kind(std::string_view name) {
    if (name == "straight") return SegmentKind::Straight;
    if (name == "left") return SegmentKind::LeftArc;
    if (name == "right") return SegmentKind::RightArc;
    if (name == "integrated") return SegmentKind::Integrated;
    throw std::invalid_argument("unknown segment kind: " + std::string(name));
}

SegmentDescriptor SegmentDescriptor::straight(double signed_length) {
    return {SegmentKind::Straight, signed_length, 0.0, {}};
}

SegmentDescriptor SegmentDescriptor::arc(double signed_length, double curvature) {
    if (curvature == 0.0) {
        return straight(signed_length);
    }
    return {curvature > 0.0 ? SegmentKind::LeftArc : SegmentKind::RightArc, signed_length, curvature, {}};
}

SegmentDescriptor SegmentDescriptor::integrated(std::vector<TracePoint> trace, int direction) {
    if (trace.empty()) {
        throw std::invalid_argument("integrated segment needs at least one trace point");
    }
    double len = 0.0;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        len += geom::distance(trace[i - 1].pose.position(), trace[i].pose.position());
    }
    const double turn = angle_diff(trace.back().pose.theta(), trace.front().pose.theta());
    SegmentDescriptor seg;
    seg.kind = SegmentKind::Integrated;
    seg.signed_length = direction < 0 ? -len : len;
    seg.curvature = len > 0.0 ? turn / seg.signed_length : 0.0;
    seg.trace = std::move(trace);
    return seg;
}

namespace {

struct TraceCursor {
    Pose pose;
    double curvature;
};

// Interpolated point at chord distance d along an integrated trace.
TraceCursor trace_at(const std::vector<TracePoint>& trace, double d) {
    if (d <= 0.0 || trace.size() == 1) {
        return {trace.front().pose, trace.front().curvature};
    }
    double acc = 0.0;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const Vec2 a = trace[i - 1].pose.position();
        const Vec2 b = trace[i].pose.position();
        const double step = geom::distance(a, b);
        if (acc + step >= d && step > 0.0) {
            const double t = (d - acc) / step;
            const Vec2 p = a + (b - a) * t;
            const double th0 = trace[i - 1].pose.theta();
            const double th = th0 + t * angle_diff(trace[i].pose.theta(), th0);
            const double k = trace[i - 1].curvature + t * (trace[i].curvature - trace[i - 1].curvature);
            return {Pose(p, th), k};
        }
        acc += step;
    }
    return {trace.back().pose, trace.back().curvature};
}

double sample_count(double length, double resolution) {
    return std::max(1.0, std::ceil(length / resolution - 1e-9));
}

}  // namespace

Pose advance(const Pose& from, const SegmentDescriptor& seg, double distance_along) {
    const double signed_d = seg.direction() * distance_along;
    switch (seg.kind) {
        case SegmentKind::Straight:
            return {from.x() + signed_d * std::cos(from.theta()), from.y() + signed_d * std::sin(from.theta()),
                    from.theta()};
        case SegmentKind::LeftArc:
        case SegmentKind::RightArc: {
            const double k = seg.curvature;
            const double th = from.theta() + k * signed_d;
            return {from.x() + (std::sin(th) - std::sin(from.theta())) / k,
                    from.y() - (std::cos(th) - std::cos(from.theta())) / k, th};
        }
        case SegmentKind::Integrated:
            return trace_at(seg.trace, distance_along).pose;
    }
    return from;
}

SteeredPath::SteeredPath(Pose start) : start_(start), end_(start) {}

SteeredPath::SteeredPath(Pose start, std::vector<SegmentDescriptor> segments)
    : start_(start), end_(start), segments_(std::move(segments)) {
    Pose cur = start_;
    for (const SegmentDescriptor& seg : segments_) {
        cur = seg.kind == SegmentKind::Integrated ? seg.trace.back().pose : advance(cur, seg, seg.length());
        length_ += seg.length();
    }
    end_ = cur;
}

SteeredPath& SteeredPath::materialize(double resolution) {
    samples_ = sample_path(*this, resolution);
    return *this;
}

SteeredPath& SteeredPath::drop_samples() {
    samples_.clear();
    samples_.shrink_to_fit();
    return *this;
}

SteeredPath& SteeredPath::snap_end(const Pose& exact, double tolerance) {
    const double pos_err = geom::distance(end_.position(), exact.position());
    const double ang_err = std::abs(angle_diff(end_.theta(), exact.theta()));
    if (pos_err > tolerance || ang_err > tolerance) {
        throw std::logic_error("snap_end: integrated end pose deviates from target by " + std::to_string(pos_err) +
                               " m / " + std::to_string(ang_err) + " rad");
    }
    end_ = exact;
    if (!samples_.empty()) {
        samples_.back().pose = exact;
    }
    return *this;
}

Pose SteeredPath::pose_at(double s) const {
    if (s <= 0.0) {
        return start_;
    }
    if (s >= length_) {
        return end_;
    }
    Pose cur = start_;
    double acc = 0.0;
    for (const SegmentDescriptor& seg : segments_) {
        const double len = seg.length();
        if (acc + len >= s) {
            return advance(cur, seg, s - acc);
        }
        cur = seg.kind == SegmentKind::Integrated ? seg.trace.back().pose : advance(cur, seg, len);
        acc += len;
    }
    return end_;
}

std::vector<double> SteeredPath::boundaries() const {
    std::vector<double> out{0.0};
    double acc = 0.0;
    for (const SegmentDescriptor& seg : segments_) {
        acc += seg.length();
        out.push_back(acc);
    }
    return out;
}

SteeredPath SteeredPath::slice(double s0, double s1) const {
    s0 = std::clamp(s0, 0.0, length_);
    s1 = std::clamp(s1, 0.0, length_);
    if (s1 <= s0) {
        return SteeredPath(pose_at(s0));
    }
    std::vector<SegmentDescriptor> out;
    Pose cur = start_;
    double acc = 0.0;
    for (const SegmentDescriptor& seg : segments_) {
        const double len = seg.length();
        const double lo = std::max(s0, acc);
        const double hi = std::min(s1, acc + len);
        if (hi > lo) {
            if (seg.kind == SegmentKind::Integrated) {
                std::vector<TracePoint> sub;
                const TraceCursor first = trace_at(seg.trace, lo - acc);
                sub.push_back({first.pose, first.curvature});
                double chord = 0.0;
                for (std::size_t i = 1; i < seg.trace.size(); ++i) {
                    chord += geom::distance(seg.trace[i - 1].pose.position(), seg.trace[i].pose.position());
                    if (chord > lo - acc && chord < hi - acc) {
                        sub.push_back(seg.trace[i]);
                    }
                }
                const TraceCursor last = trace_at(seg.trace, hi - acc);
                sub.push_back({last.pose, last.curvature});
                out.push_back(SegmentDescriptor::integrated(std::move(sub), seg.direction()));
            } else {
                SegmentDescriptor part = seg;
                part.signed_length = seg.direction() * (hi - lo);
                out.push_back(part);
            }
        }
        cur = seg.kind == SegmentKind::Integrated ? seg.trace.back().pose : advance(cur, seg, len);
        acc += len;
        if (acc >= s1) {
            break;
        }
    }
    SteeredPath result(pose_at(s0), std::move(out));
    if (s1 >= length_) {
        result.end_ = end_;
    }
    return result;
}

SteeredPath& SteeredPath::append(const SteeredPath& tail, double tolerance) {
    const double gap = geom::distance(end_.position(), tail.start_.position());
    if (gap > tolerance || std::abs(angle_diff(end_.theta(), tail.start_.theta())) > tolerance) {
        throw std::logic_error("append: paths are not contiguous (gap " + std::to_string(gap) + " m)");
    }
    segments_.insert(segments_.end(), tail.segments_.begin(), tail.segments_.end());
    length_ += tail.length_;
    end_ = tail.end_;
    samples_.clear();
    return *this;
}

std::vector<PathSample> sample_path(const SteeredPath& path, double resolution) {
    if (!(resolution > 0.0)) {
        throw std::invalid_argument("sample_path: resolution must be positive");
    }
    std::vector<PathSample> out;
    int first_dir = 1;
    double first_curv = 0.0;
    for (const SegmentDescriptor& seg : path.segments()) {
        if (seg.length() > 0.0) {
            first_dir = seg.direction();
            first_curv = seg.kind == SegmentKind::Integrated ? seg.trace.front().curvature : seg.curvature;
            break;
        }
    }
    out.push_back({path.start(), 0.0, first_dir, first_curv});

    Pose cur = path.start();
    double acc = 0.0;
    for (const SegmentDescriptor& seg : path.segments()) {
        const double len = seg.length();
        if (len <= 0.0) {
            continue;
        }
        const double n = sample_count(len, resolution);
        for (int k = 1; k <= static_cast<int>(n); ++k) {
            const double d = len * k / n;
            if (seg.kind == SegmentKind::Integrated) {
                const TraceCursor c = trace_at(seg.trace, d);
                out.push_back({c.pose, acc + d, seg.direction(), c.curvature});
            } else {
                out.push_back({advance(cur, seg, d), acc + d, seg.direction(), seg.curvature});
            }
        }
        cur = seg.kind == SegmentKind::Integrated ? seg.trace.back().pose : advance(cur, seg, len);
        acc += len;
    }
    out.back().pose = path.end();
    out.back().arc_length = path.length();
    return out;
}

}  // namespace wheelbench::steer
