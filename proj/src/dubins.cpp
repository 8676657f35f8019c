#include "steer_internal.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace wheelbench::steer {

namespace {

using geom::kPi;
using geom::kTwoPi;

// [0, 2pi)
double wrap_positive(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) {
        r += kTwoPi;
    }
    return r;
}

enum class Turn { L, S, R };

struct Word {
    std::array<Turn, 3> turns;
    std::array<double, 3> params;  // normalized by the turning radius
    [[nodiscard]] double total() const { return params[0] + params[1] + params[2]; }
};

struct Local {
    double d, alpha, beta;
};

// Goal expressed in the frame aligned with the start->goal chord, scaled by 1/r.
Local to_local(const Pose& from, const Pose& to, double r) {
    const double dx = to.x() - from.x();
    const double dy = to.y() - from.y();
    const double d = std::hypot(dx, dy) / r;
    const double chord = d > 0.0 ? wrap_positive(std::atan2(dy, dx)) : 0.0;
    return {d, wrap_positive(from.theta() - chord), wrap_positive(to.theta() - chord)};
}

constexpr double kInvalid = std::numeric_limits<double>::infinity();

// The six Dubins families.
std::array<Word, 6> dubins_words(const Local& q) {
    const double d = q.d;
    const double a = q.alpha;
    const double b = q.beta;
    const double sa = std::sin(a);
    const double sb = std::sin(b);
    const double ca = std::cos(a);
    const double cb = std::cos(b);
    const double c_ab = std::cos(a - b);
    std::array<Word, 6> w{};

    {
        const double p_sq = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sa - sb);
        w[0].turns = {Turn::L, Turn::S, Turn::L};
        if (p_sq >= 0.0) {
            const double t = std::atan2(cb - ca, d + sa - sb);
            w[0].params = {wrap_positive(t - a), std::sqrt(p_sq), wrap_positive(b - t)};
        } else {
            w[0].params = {kInvalid, 0, 0};
        }
    }
    {
        const double p_sq = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sb - sa);
        w[1].turns = {Turn::R, Turn::S, Turn::R};
        if (p_sq >= 0.0) {
            const double t = std::atan2(ca - cb, d - sa + sb);
            w[1].params = {wrap_positive(a - t), std::sqrt(p_sq), wrap_positive(t - b)};
        } else {
            w[1].params = {kInvalid, 0, 0};
        }
    }
    {
        const double p_sq = -2.0 + d * d + 2.0 * c_ab + 2.0 * d * (sa + sb);
        w[2].turns = {Turn::L, Turn::S, Turn::R};
        if (p_sq >= 0.0) {
            const double p = std::sqrt(p_sq);
            const double t = std::atan2(-ca - cb, d + sa + sb) - std::atan2(-2.0, p);
            w[2].params = {wrap_positive(t - a), p, wrap_positive(t - b)};
        } else {
            w[2].params = {kInvalid, 0, 0};
        }
    }
    {
        const double p_sq = -2.0 + d * d + 2.0 * c_ab - 2.0 * d * (sa + sb);
        w[3].turns = {Turn::R, Turn::S, Turn::L};
        if (p_sq >= 0.0) {
            const double p = std::sqrt(p_sq);
            const double t = std::atan2(ca + cb, d - sa - sb) - std::atan2(2.0, p);
            w[3].params = {wrap_positive(a - t), p, wrap_positive(b - t)};
        } else {
            w[3].params = {kInvalid, 0, 0};
        }
    }
    {
        const double c = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sa - sb)) / 8.0;
        w[4].turns = {Turn::R, Turn::L, Turn::R};
        if (std::abs(c) <= 1.0) {
            const double phi = std::atan2(ca - cb, d - sa + sb);
            const double p = wrap_positive(kTwoPi - std::acos(c));
            const double t = wrap_positive(a - phi + wrap_positive(p / 2.0));
            w[4].params = {t, p, wrap_positive(a - b - t + wrap_positive(p))};
        } else {
            w[4].params = {kInvalid, 0, 0};
        }
    }
    {
        const double c = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sb - sa)) / 8.0;
        w[5].turns = {Turn::L, Turn::R, Turn::L};
        if (std::abs(c) <= 1.0) {
            const double phi = std::atan2(ca - cb, d + sa - sb);
            const double p = wrap_positive(kTwoPi - std::acos(c));
            const double t = wrap_positive(-a - phi + p / 2.0);
            w[5].params = {t, p, wrap_positive(wrap_positive(b) - a - t + wrap_positive(p))};
        } else {
            w[5].params = {kInvalid, 0, 0};
        }
    }
    return w;
}

Word best_word(const Pose& from, const Pose& to, double r) {
    const auto words = dubins_words(to_local(from, to, r));
    const Word* best = &words[0];
    for (const Word& w : words) {
        if (w.total() < best->total()) {
            best = &w;
        }
    }
    return *best;
}

}  // namespace

double dubins_distance(const Pose& from, const Pose& to, double turning_radius) {
    return best_word(from, to, turning_radius).total() * turning_radius;
}

SteeredPath detail::dubins_path(const Pose& from, const Pose& to, double r) {
    const Word w = best_word(from, to, r);
    std::vector<SegmentDescriptor> segs;
    for (std::size_t i = 0; i < 3; ++i) {
        const double len = w.params[i] * r;
        if (len < 1e-9 * std::max(1.0, r)) {
            continue;
        }
        switch (w.turns[i]) {
            case Turn::L: segs.push_back(SegmentDescriptor::arc(len, 1.0 / r)); break;
            case Turn::R: segs.push_back(SegmentDescriptor::arc(len, -1.0 / r)); break;
            case Turn::S: segs.push_back(SegmentDescriptor::straight(len)); break;
        }
    }
    SteeredPath path(from, std::move(segs));
    path.snap_end(to);
    return path;
}

SteeredPath dubins_steer(const Pose& from, const Pose& to, const SteerConfig& cfg) {
    cfg.validate();
    SteeredPath path = detail::dubins_path(from, to, cfg.turning_radius);
    path.materialize(cfg.sample_resolution);
    return path;
}

}  // namespace wheelbench::steer
