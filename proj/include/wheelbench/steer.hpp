#pragma once

#include "wheelbench/geom.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wheelbench::steer {

using geom::Pose;
using geom::Vec2;

class SteerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// POSQ ran out of simulated time before reaching the goal position.
class NotConverged : public SteerError {
public:
    using SteerError::SteerError;
};

/// Unicycle control: x' = v cos(theta), y' = v sin(theta), theta' = omega.
struct Control {
    double v = 0.0;      ///< m/s, negative drives in reverse
    double omega = 0.0;  ///< rad/s
};

struct Primitive {
    Control control;
    double duration = 0.0;  ///< seconds
};

enum class SegmentKind { Straight, LeftArc, RightArc, Integrated };

std::string_view to_string(SegmentKind kind);
SegmentKind parse_segment_kind(std::string_view name);

struct TracePoint {
    Pose pose;
    double curvature = 0.0;
};

/// One piece of a path. Analytic pieces (straight and arcs) are relative to the
/// pose where they begin; Integrated pieces carry an absolute trace whose first
/// point is that pose. The sign of `signed_length` is the driving direction;
/// `curvature` is d(theta)/d(signed_length), so a LeftArc always has +1/r.
struct SegmentDescriptor {
    SegmentKind kind = SegmentKind::Straight;
    double signed_length = 0.0;
    double curvature = 0.0;
    std::vector<TracePoint> trace;

    static SegmentDescriptor straight(double signed_length);
    static SegmentDescriptor arc(double signed_length, double curvature);
    /// The trace is a sequence of poses driven in one direction (+1 or -1);
    /// its length is the sum of chord lengths.
    static SegmentDescriptor integrated(std::vector<TracePoint> trace, int direction);

    [[nodiscard]] double length() const { return std::abs(signed_length); }
    [[nodiscard]] int direction() const { return signed_length < 0.0 ? -1 : 1; }
};

struct PathSample {
    Pose pose;
    double arc_length = 0.0;
    int direction = 1;
    double curvature = 0.0;
};

/// Pose reached after driving `signed_length` along `seg` starting from `from`.
/// For Integrated segments the partial pose is interpolated on the trace.
Pose advance(const Pose& from, const SegmentDescriptor& seg, double distance_along);

/// A geometric path: start pose, ordered segments, exact end pose and an
/// optional materialized sample list.
class SteeredPath {
public:
    SteeredPath() = default;
    explicit SteeredPath(Pose start);
    /// End pose is obtained by integrating the segments.
    SteeredPath(Pose start, std::vector<SegmentDescriptor> segments);

    [[nodiscard]] const Pose& start() const { return start_; }
    [[nodiscard]] const Pose& end() const { return end_; }
    [[nodiscard]] std::span<const SegmentDescriptor> segments() const { return segments_; }
    [[nodiscard]] double length() const { return length_; }
    [[nodiscard]] bool empty() const { return segments_.empty(); }

    /// Samples materialized by `materialize`; empty if never requested.
    [[nodiscard]] const std::vector<PathSample>& samples() const { return samples_; }
    SteeredPath& materialize(double resolution);
    SteeredPath& drop_samples();

    /// Overwrite the integrated end pose with `exact`. Throws std::logic_error if
    /// they differ by more than `tolerance` in position or heading.
    SteeredPath& snap_end(const Pose& exact, double tolerance = 1e-6);

    [[nodiscard]] Pose pose_at(double s) const;
    /// Sub-path between arc lengths s0 < s1 (clamped to [0, length]).
    [[nodiscard]] SteeredPath slice(double s0, double s1) const;
    /// Cumulative arc length at each segment boundary (size = segments + 1).
    [[nodiscard]] std::vector<double> boundaries() const;

    /// Appends `tail`, whose start must coincide with this path's end.
    SteeredPath& append(const SteeredPath& tail, double tolerance = 1e-6);

private:
    Pose start_{};
    Pose end_{};
    std::vector<SegmentDescriptor> segments_;
    double length_ = 0.0;
    std::vector<PathSample> samples_;
};

/// Samples spaced at most `resolution` apart in arc length, including every
/// segment boundary and both endpoints. Poses are exact on analytic segments.
std::vector<PathSample> sample_path(const SteeredPath& path, double resolution);

struct PosqGains {
    double k_rho = 1.0;
    double k_alpha = 6.0;
    double k_phi = -1.0;
    double k_v = 3.8;
};

struct SteerConfig {
    double turning_radius = 1.0;
    double v_max = 1.0;
    double omega_max = 1.0;
    double sample_resolution = 0.1;
    PosqGains posq_gains{};
    double posq_dt = 0.01;
    double posq_goal_eps = 0.05;
    double posq_max_time = 60.0;
    /// Reserved for continuous-curvature steering; unused by the current solvers.
    double curvature_rate = 0.0;

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

SteeredPath dubins_steer(const Pose& from, const Pose& to, const SteerConfig& cfg);
SteeredPath reeds_shepp_steer(const Pose& from, const Pose& to, const SteerConfig& cfg);
/// Throws NotConverged if posq_max_time of simulated time elapses first.
SteeredPath posq_steer(const Pose& from, const Pose& to, const SteerConfig& cfg);

/// Length-only queries, cheaper than building the path.
double dubins_distance(const Pose& from, const Pose& to, double turning_radius);
double reeds_shepp_distance(const Pose& from, const Pose& to, double turning_radius);

std::vector<SteeredPath> expand_primitives(const Pose& from, std::span<const Primitive> primitives);

/// POSQ stability condition: k_rho > 0, k_phi < 0, k_alpha + 5/3 k_phi - 2/pi k_rho > 0.
bool posq_gains_stable(const PosqGains& g);

enum class SteerKind { Dubins, ReedsShepp, Posq };

std::string_view to_string(SteerKind kind);
/// Accepts "dubins", "reeds-shepp" (or "reeds_shepp"), "posq".
SteerKind parse_steer_kind(std::string_view name);

/// A steer function bound to its configuration, as passed to planners and smoothers.
class SteerFunction {
public:
    SteerFunction(SteerKind kind, SteerConfig cfg);

    [[nodiscard]] SteerKind kind() const { return kind_; }
    [[nodiscard]] const SteerConfig& config() const { return cfg_; }
    [[nodiscard]] std::string_view name() const { return to_string(kind_); }

    /// Path without materialized samples; nullopt when the two poses cannot be connected.
    [[nodiscard]] std::optional<SteeredPath> connect(const Pose& from, const Pose& to) const;
    /// Steer path length, +inf when unconnectable.
    [[nodiscard]] double distance(const Pose& from, const Pose& to) const;
    /// True when the path ends exactly at the requested goal pose.
    [[nodiscard]] bool exact_endpoint() const { return kind_ != SteerKind::Posq; }

private:
    SteerKind kind_;
    SteerConfig cfg_;
};

}  // namespace wheelbench::steer
