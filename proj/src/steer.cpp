#include "steer_internal.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wheelbench::steer {

using geom::angle_diff;
using geom::kPi;
using geom::normalize_angle;

void SteerConfig::validate() const {
    const std::array<double, 11> positive{turning_radius, v_max,          omega_max,  sample_resolution,
                                          posq_gains.k_rho, posq_gains.k_alpha, posq_gains.k_v, posq_dt,
                                          posq_goal_eps,  posq_max_time,  1.0};
    for (double v : positive) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("SteerConfig: parameters must be finite and strictly positive");
        }
    }
    if (!(posq_gains.k_phi < 0.0)) {
        throw std::invalid_argument("SteerConfig: POSQ k_phi must be negative");
    }
    if (!(sample_resolution < turning_radius)) {
        throw std::invalid_argument("SteerConfig: sample_resolution must be below the turning radius");
    }
    if (curvature_rate < 0.0) {
        throw std::invalid_argument("SteerConfig: curvature_rate must be non-negative");
    }
}

bool posq_gains_stable(const PosqGains& g) {
    return g.k_rho > 0.0 && g.k_phi < 0.0 && g.k_alpha + 5.0 / 3.0 * g.k_phi - 2.0 / kPi * g.k_rho > 0.0;
}

namespace {

struct State {
    double x, y, theta;
};

// POSQ feedback law. rho: distance to goal; alpha: bearing of the goal relative
// to the heading; phi: heading error w.r.t. the goal heading.
Control posq_law(const State& s, const Pose& goal, const PosqGains& g) {
    const double dx = goal.x() - s.x;
    const double dy = goal.y() - s.y;
    const double rho = std::hypot(dx, dy);
    const double alpha = normalize_angle(std::atan2(dy, dx) - s.theta);
    const double phi = normalize_angle(s.theta - goal.theta());
    return {g.k_rho * std::tanh(g.k_v * rho), g.k_alpha * alpha + g.k_phi * phi};
}

State derivative(const State& s, const Control& u) {
    return {u.v * std::cos(s.theta), u.v * std::sin(s.theta), u.omega};
}

State axpy(const State& s, const State& d, double h) {
    return {s.x + h * d.x, s.y + h * d.y, s.theta + h * d.theta};
}

}  // namespace

SteeredPath detail::posq_path(const Pose& from, const Pose& to, const SteerConfig& cfg) {
    const PosqGains& g = cfg.posq_gains;
    const double dt = cfg.posq_dt;
    State s{from.x(), from.y(), from.theta()};
    auto rho_of = [&](const State& st) { return std::hypot(to.x() - st.x, to.y() - st.y); };

    if (rho_of(s) < cfg.posq_goal_eps) {
        return SteeredPath(from);
    }

    // The trace keeps points about half a sample apart; the full-rate
    // integration is only used for stepping.
    const double keep_spacing = 0.5 * cfg.sample_resolution;
    std::vector<TracePoint> trace;
    Control u0 = posq_law(s, to, g);
    trace.push_back({from, u0.v > 0.0 ? u0.omega / u0.v : 0.0});
    double since_kept = 0.0;
    const auto max_steps = static_cast<long>(std::ceil(cfg.posq_max_time / dt));
    for (long step = 0; step < max_steps; ++step) {
        const State k1 = derivative(s, posq_law(s, to, g));
        const State s2 = axpy(s, k1, 0.5 * dt);
        const State k2 = derivative(s2, posq_law(s2, to, g));
        const State s3 = axpy(s, k2, 0.5 * dt);
        const State k3 = derivative(s3, posq_law(s3, to, g));
        const State s4 = axpy(s, k3, dt);
        const State k4 = derivative(s4, posq_law(s4, to, g));
        const State next{s.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
                         s.y + dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
                         s.theta + dt / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta)};
        since_kept += std::hypot(next.x - s.x, next.y - s.y);
        s = next;
        const bool done = rho_of(s) < cfg.posq_goal_eps;
        if (done || since_kept >= keep_spacing) {
            const Control u = posq_law(s, to, g);
            trace.push_back({Pose(s.x, s.y, s.theta), u.v > 0.0 ? u.omega / u.v : 0.0});
            since_kept = 0.0;
        }
        if (done) {
            return SteeredPath(from, {SegmentDescriptor::integrated(std::move(trace), 1)});
        }
    }
    throw NotConverged("posq_steer: goal tolerance not reached within posq_max_time");
}

SteeredPath posq_steer(const Pose& from, const Pose& to, const SteerConfig& cfg) {
    cfg.validate();
    SteeredPath path = detail::posq_path(from, to, cfg);
    path.materialize(cfg.sample_resolution);
    return path;
}

std::vector<SteeredPath> expand_primitives(const Pose& from, std::span<const Primitive> primitives) {
    if (primitives.empty()) {
        throw std::invalid_argument("expand_primitives: empty primitive set");
    }
    std::vector<SteeredPath> out;
    out.reserve(primitives.size());
    for (const Primitive& p : primitives) {
        if (p.control.v == 0.0 || !(p.duration > 0.0)) {
            throw std::invalid_argument("expand_primitives: primitives need v != 0 and a positive duration");
        }
        const double signed_length = p.control.v * p.duration;
        const double curvature = p.control.omega / p.control.v;
        std::vector<SegmentDescriptor> segs{SegmentDescriptor::arc(signed_length, curvature)};
        out.emplace_back(from, std::move(segs));
    }
    return out;
}

std::string_view to_string(SteerKind kind) {
    switch (kind) {
        case SteerKind::Dubins: return "dubins";
        case SteerKind::ReedsShepp: return "reeds-shepp";
        case SteerKind::Posq: return "posq";
    }
    return "?";
}

SteerKind parse_steer_kind(std::string_view name) {
    if (name == "dubins") return SteerKind::Dubins;
    if (name == "reeds-shepp" || name == "reeds_shepp") return SteerKind::ReedsShepp;
    if (name == "posq") return SteerKind::Posq;
    throw std::invalid_argument("unknown steer function: " + std::string(name));
}

SteerFunction::SteerFunction(SteerKind kind, SteerConfig cfg) : kind_(kind), cfg_(cfg) { cfg_.validate(); }

std::optional<SteeredPath> SteerFunction::connect(const Pose& from, const Pose& to) const {
    switch (kind_) {
        case SteerKind::Dubins: return detail::dubins_path(from, to, cfg_.turning_radius);
        case SteerKind::ReedsShepp: return detail::reeds_shepp_path(from, to, cfg_.turning_radius);
        case SteerKind::Posq:
            try {
                return detail::posq_path(from, to, cfg_);
            } catch (const NotConverged&) {
                return std::nullopt;
            }
    }
    return std::nullopt;
}

double SteerFunction::distance(const Pose& from, const Pose& to) const {
    switch (kind_) {
        case SteerKind::Dubins: return dubins_distance(from, to, cfg_.turning_radius);
        case SteerKind::ReedsShepp: return reeds_shepp_distance(from, to, cfg_.turning_radius);
        case SteerKind::Posq: {
            const auto path = connect(from, to);
            return path ? path->length() : std::numeric_limits<double>::infinity();
        }
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace wheelbench::steer
