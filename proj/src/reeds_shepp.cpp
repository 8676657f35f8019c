#include "steer_internal.hpp"

#include <array>
#include <cmath>
#include <limits>

// Reeds-Shepp word families with the timeflip / reflect / backwards
// reductions. Every formula solves the unit-radius problem from the origin
// to (x, y, phi); symmetric variants are obtained by transforming the query.

namespace wheelbench::steer {

namespace {

using geom::kPi;
using geom::kTwoPi;

constexpr double kZero = 10.0 * std::numeric_limits<double>::epsilon();
constexpr double kHalfPi = 0.5 * kPi;

enum class Turn { L, S, R, None };

struct Word {
    std::array<Turn, 5> turns{Turn::None, Turn::None, Turn::None, Turn::None, Turn::None};
    std::array<double, 5> lengths{};
    double total = std::numeric_limits<double>::infinity();
};

double mod2pi(double x) {
    double v = std::fmod(x, kTwoPi);
    if (v < -kPi) {
        v += kTwoPi;
    } else if (v > kPi) {
        v -= kTwoPi;
    }
    return v;
}

void polar(double x, double y, double& r, double& theta) {
    r = std::hypot(x, y);
    theta = std::atan2(y, x);
}

void tau_omega(double u, double v, double xi, double eta, double phi, double& tau, double& omega) {
    const double delta = mod2pi(u - v);
    const double a = std::sin(u) - std::sin(delta);
    const double b = std::cos(u) - std::cos(delta) - 1.0;
    const double t1 = std::atan2(eta * a - xi * b, xi * a + eta * b);
    const double t2 = 2.0 * (std::cos(delta) - std::cos(v) - std::cos(u)) + 3.0;
    tau = t2 < 0.0 ? mod2pi(t1 + kPi) : mod2pi(t1);
    omega = mod2pi(tau - u + v - phi);
}

Turn flip(Turn t) {
    switch (t) {
        case Turn::L: return Turn::R;
        case Turn::R: return Turn::L;
        default: return t;
    }
}

class Search {
public:
    void consider(std::array<Turn, 5> turns, std::array<double, 5> lengths, bool reflect) {
        double total = 0.0;
        for (double l : lengths) {
            total += std::abs(l);
        }
        if (total < best.total) {
            if (reflect) {
                for (Turn& t : turns) {
                    t = flip(t);
                }
            }
            best.turns = turns;
            best.lengths = lengths;
            best.total = total;
        }
    }
    Word best;
};

constexpr Turn L = Turn::L;
constexpr Turn R = Turn::R;
constexpr Turn S = Turn::S;
constexpr Turn N = Turn::None;

// L+ S+ L+
bool lp_sp_lp(double x, double y, double phi, double& t, double& u, double& v) {
    polar(x - std::sin(phi), y - 1.0 + std::cos(phi), u, t);
    if (t >= -kZero) {
        v = mod2pi(phi - t);
        return v >= -kZero;
    }
    return false;
}

// L+ S+ R+
bool lp_sp_rp(double x, double y, double phi, double& t, double& u, double& v) {
    double t1 = 0.0;
    double u1 = 0.0;
    polar(x + std::sin(phi), y - 1.0 - std::cos(phi), u1, t1);
    u1 = u1 * u1;
    if (u1 >= 4.0) {
        u = std::sqrt(u1 - 4.0);
        const double theta = std::atan2(2.0, u);
        t = mod2pi(t1 + theta);
        v = mod2pi(t - phi);
        return t >= -kZero && v >= -kZero;
    }
    return false;
}

void csc(double x, double y, double phi, Search& s) {
    double t = 0, u = 0, v = 0;
    if (lp_sp_lp(x, y, phi, t, u, v)) s.consider({L, S, L, N, N}, {t, u, v, 0, 0}, false);
    if (lp_sp_lp(-x, y, -phi, t, u, v)) s.consider({L, S, L, N, N}, {-t, -u, -v, 0, 0}, false);
    if (lp_sp_lp(x, -y, -phi, t, u, v)) s.consider({L, S, L, N, N}, {t, u, v, 0, 0}, true);
    if (lp_sp_lp(-x, -y, phi, t, u, v)) s.consider({L, S, L, N, N}, {-t, -u, -v, 0, 0}, true);
    if (lp_sp_rp(x, y, phi, t, u, v)) s.consider({L, S, R, N, N}, {t, u, v, 0, 0}, false);
    if (lp_sp_rp(-x, y, -phi, t, u, v)) s.consider({L, S, R, N, N}, {-t, -u, -v, 0, 0}, false);
    if (lp_sp_rp(x, -y, -phi, t, u, v)) s.consider({L, S, R, N, N}, {t, u, v, 0, 0}, true);
    if (lp_sp_rp(-x, -y, phi, t, u, v)) s.consider({L, S, R, N, N}, {-t, -u, -v, 0, 0}, true);
}

// L+ R- L
bool lp_rm_l(double x, double y, double phi, double& t, double& u, double& v) {
    const double xi = x - std::sin(phi);
    const double eta = y - 1.0 + std::cos(phi);
    double u1 = 0.0;
    double theta = 0.0;
    polar(xi, eta, u1, theta);
    if (u1 <= 4.0) {
        u = -2.0 * std::asin(0.25 * u1);
        t = mod2pi(theta + 0.5 * u + kPi);
        v = mod2pi(phi - t + u);
        return t >= -kZero && u <= kZero;
    }
    return false;
}

void ccc(double x, double y, double phi, Search& s) {
    double t = 0, u = 0, v = 0;
    if (lp_rm_l(x, y, phi, t, u, v)) s.consider({L, R, L, N, N}, {t, u, v, 0, 0}, false);
    if (lp_rm_l(-x, y, -phi, t, u, v)) s.consider({L, R, L, N, N}, {-t, -u, -v, 0, 0}, false);
    if (lp_rm_l(x, -y, -phi, t, u, v)) s.consider({L, R, L, N, N}, {t, u, v, 0, 0}, true);
    if (lp_rm_l(-x, -y, phi, t, u, v)) s.consider({L, R, L, N, N}, {-t, -u, -v, 0, 0}, true);

    const double xb = x * std::cos(phi) + y * std::sin(phi);
    const double yb = x * std::sin(phi) - y * std::cos(phi);
    if (lp_rm_l(xb, yb, phi, t, u, v)) s.consider({L, R, L, N, N}, {v, u, t, 0, 0}, false);
    if (lp_rm_l(-xb, yb, -phi, t, u, v)) s.consider({L, R, L, N, N}, {-v, -u, -t, 0, 0}, false);
    if (lp_rm_l(xb, -yb, -phi, t, u, v)) s.consider({L, R, L, N, N}, {v, u, t, 0, 0}, true);
    if (lp_rm_l(-xb, -yb, phi, t, u, v)) s.consider({L, R, L, N, N}, {-v, -u, -t, 0, 0}, true);
}

// L+ R+u L-u R-
bool lp_rup_lum_rm(double x, double y, double phi, double& t, double& u, double& v) {
    const double xi = x + std::sin(phi);
    const double eta = y - 1.0 - std::cos(phi);
    const double rho = 0.25 * (2.0 + std::hypot(xi, eta));
    if (rho <= 1.0) {
        u = std::acos(rho);
        tau_omega(u, -u, xi, eta, phi, t, v);
        return t >= -kZero && v <= kZero;
    }
    return false;
}

// L+ R-u L-u R+
bool lp_rum_lum_rp(double x, double y, double phi, double& t, double& u, double& v) {
    const double xi = x + std::sin(phi);
    const double eta = y - 1.0 - std::cos(phi);
    const double rho = (20.0 - xi * xi - eta * eta) / 16.0;
    if (rho >= 0.0 && rho <= 1.0) {
        u = -std::acos(rho);
        if (u >= -kHalfPi) {
            tau_omega(u, u, xi, eta, phi, t, v);
            return t >= -kZero && v >= -kZero;
        }
    }
    return false;
}

void cccc(double x, double y, double phi, Search& s) {
    double t = 0, u = 0, v = 0;
    if (lp_rup_lum_rm(x, y, phi, t, u, v)) s.consider({L, R, L, R, N}, {t, u, -u, v, 0}, false);
    if (lp_rup_lum_rm(-x, y, -phi, t, u, v)) s.consider({L, R, L, R, N}, {-t, -u, u, -v, 0}, false);
    if (lp_rup_lum_rm(x, -y, -phi, t, u, v)) s.consider({L, R, L, R, N}, {t, u, -u, v, 0}, true);
    if (lp_rup_lum_rm(-x, -y, phi, t, u, v)) s.consider({L, R, L, R, N}, {-t, -u, u, -v, 0}, true);

    if (lp_rum_lum_rp(x, y, phi, t, u, v)) s.consider({L, R, L, R, N}, {t, u, u, v, 0}, false);
    if (lp_rum_lum_rp(-x, y, -phi, t, u, v)) s.consider({L, R, L, R, N}, {-t, -u, -u, -v, 0}, false);
    if (lp_rum_lum_rp(x, -y, -phi, t, u, v)) s.consider({L, R, L, R, N}, {t, u, u, v, 0}, true);
    if (lp_rum_lum_rp(-x, -y, phi, t, u, v)) s.consider({L, R, L, R, N}, {-t, -u, -u, -v, 0}, true);
}

// L+ R-(pi/2) S- L-
bool lp_rm_sm_lm(double x, double y, double phi, double& t, double& u, double& v) {
    const double xi = x - std::sin(phi);
    const double eta = y - 1.0 + std::cos(phi);
    double rho = 0.0;
    double theta = 0.0;
    polar(xi, eta, rho, theta);
    if (rho >= 2.0) {
        const double r = std::sqrt(rho * rho - 4.0);
        u = 2.0 - r;
        t = mod2pi(theta + std::atan2(r, -2.0));
        v = mod2pi(phi - kHalfPi - t);
        return t >= -kZero && u <= kZero && v <= kZero;
    }
    return false;
}

// L+ R-(pi/2) S- R-
bool lp_rm_sm_rm(double x, double y, double phi, double& t, double& u, double& v) {
    const double xi = x + std::sin(phi);
    const double eta = y - 1.0 - std::cos(phi);
    double rho = 0.0;
    double theta = 0.0;
    polar(-eta, xi, rho, theta);
    if (rho >= 2.0) {
        t = theta;
        u = 2.0 - rho;
        v = mod2pi(t + kHalfPi - phi);
        return t >= -kZero && u <= kZero && v <= kZero;
    }
    return false;
}

void ccsc(double x, double y, double phi, Search& s) {
    double t = 0, u = 0, v = 0;
    if (lp_rm_sm_lm(x, y, phi, t, u, v)) s.consider({L, R, S, L, N}, {t, -kHalfPi, u, v, 0}, false);
    if (lp_rm_sm_lm(-x, y, -phi, t, u, v)) s.consider({L, R, S, L, N}, {-t, kHalfPi, -u, -v, 0}, false);
    if (lp_rm_sm_lm(x, -y, -phi, t, u, v)) s.consider({L, R, S, L, N}, {t, -kHalfPi, u, v, 0}, true);
    if (lp_rm_sm_lm(-x, -y, phi, t, u, v)) s.consider({L, R, S, L, N}, {-t, kHalfPi, -u, -v, 0}, true);

    if (lp_rm_sm_rm(x, y, phi, t, u, v)) s.consider({L, R, S, R, N}, {t, -kHalfPi, u, v, 0}, false);
    if (lp_rm_sm_rm(-x, y, -phi, t, u, v)) s.consider({L, R, S, R, N}, {-t, kHalfPi, -u, -v, 0}, false);
    if (lp_rm_sm_rm(x, -y, -phi, t, u, v)) s.consider({L, R, S, R, N}, {t, -kHalfPi, u, v, 0}, true);
    if (lp_rm_sm_rm(-x, -y, phi, t, u, v)) s.consider({L, R, S, R, N}, {-t, kHalfPi, -u, -v, 0}, true);

    const double xb = x * std::cos(phi) + y * std::sin(phi);
    const double yb = x * std::sin(phi) - y * std::cos(phi);
    if (lp_rm_sm_lm(xb, yb, phi, t, u, v)) s.consider({L, S, R, L, N}, {v, u, -kHalfPi, t, 0}, false);
    if (lp_rm_sm_lm(-xb, yb, -phi, t, u, v)) s.consider({L, S, R, L, N}, {-v, -u, kHalfPi, -t, 0}, false);
    if (lp_rm_sm_lm(xb, -yb, -phi, t, u, v)) s.consider({L, S, R, L, N}, {v, u, -kHalfPi, t, 0}, true);
    if (lp_rm_sm_lm(-xb, -yb, phi, t, u, v)) s.consider({L, S, R, L, N}, {-v, -u, kHalfPi, -t, 0}, true);

    if (lp_rm_sm_rm(xb, yb, phi, t, u, v)) s.consider({R, S, R, L, N}, {v, u, -kHalfPi, t, 0}, false);
    if (lp_rm_sm_rm(-xb, yb, -phi, t, u, v)) s.consider({R, S, R, L, N}, {-v, -u, kHalfPi, -t, 0}, false);
    if (lp_rm_sm_rm(xb, -yb, -phi, t, u, v)) s.consider({R, S, R, L, N}, {v, u, -kHalfPi, t, 0}, true);
    if (lp_rm_sm_rm(-xb, -yb, phi, t, u, v)) s.consider({R, S, R, L, N}, {-v, -u, kHalfPi, -t, 0}, true);
}

// L+ R-(pi/2) S- L-(pi/2) R+
bool lp_rm_slm_rp(double x, double y, double phi, double& t, double& u, double& v) {
    const double xi = x + std::sin(phi);
    const double eta = y - 1.0 - std::cos(phi);
    double rho = 0.0;
    double theta = 0.0;
    polar(xi, eta, rho, theta);
    if (rho >= 2.0) {
        u = 4.0 - std::sqrt(rho * rho - 4.0);
        if (u <= kZero) {
            t = mod2pi(std::atan2((4.0 - u) * xi - 2.0 * eta, -2.0 * xi + (u - 4.0) * eta));
            v = mod2pi(t - phi);
            return t >= -kZero && v >= -kZero;
        }
    }
    return false;
}

void ccscc(double x, double y, double phi, Search& s) {
    double t = 0, u = 0, v = 0;
    if (lp_rm_slm_rp(x, y, phi, t, u, v)) s.consider({L, R, S, L, R}, {t, -kHalfPi, u, -kHalfPi, v}, false);
    if (lp_rm_slm_rp(-x, y, -phi, t, u, v)) s.consider({L, R, S, L, R}, {-t, kHalfPi, -u, kHalfPi, -v}, false);
    if (lp_rm_slm_rp(x, -y, -phi, t, u, v)) s.consider({L, R, S, L, R}, {t, -kHalfPi, u, -kHalfPi, v}, true);
    if (lp_rm_slm_rp(-x, -y, phi, t, u, v)) s.consider({L, R, S, L, R}, {-t, kHalfPi, -u, kHalfPi, -v}, true);
}

Word solve(const Pose& from, const Pose& to, double r) {
    const double dx = to.x() - from.x();
    const double dy = to.y() - from.y();
    const double c = std::cos(from.theta());
    const double s = std::sin(from.theta());
    const double x = (c * dx + s * dy) / r;
    const double y = (-s * dx + c * dy) / r;
    const double phi = to.theta() - from.theta();
    Search search;
    csc(x, y, phi, search);
    ccc(x, y, phi, search);
    cccc(x, y, phi, search);
    ccsc(x, y, phi, search);
    ccscc(x, y, phi, search);
    return search.best;
}

}  // namespace

double reeds_shepp_distance(const Pose& from, const Pose& to, double turning_radius) {
    return solve(from, to, turning_radius).total * turning_radius;
}

SteeredPath detail::reeds_shepp_path(const Pose& from, const Pose& to, double r) {
    const Word w = solve(from, to, r);
    std::vector<SegmentDescriptor> segs;
    for (std::size_t i = 0; i < w.turns.size(); ++i) {
        const double len = w.lengths[i] * r;
        if (w.turns[i] == Turn::None || std::abs(len) < 1e-9 * std::max(1.0, r)) {
            continue;
        }
        switch (w.turns[i]) {
            case Turn::L: segs.push_back(SegmentDescriptor::arc(len, 1.0 / r)); break;
            case Turn::R: segs.push_back(SegmentDescriptor::arc(len, -1.0 / r)); break;
            case Turn::S: segs.push_back(SegmentDescriptor::straight(len)); break;
            case Turn::None: break;
        }
    }
    SteeredPath path(from, std::move(segs));
    path.snap_end(to);
    return path;
}

SteeredPath reeds_shepp_steer(const Pose& from, const Pose& to, const SteerConfig& cfg) {
    cfg.validate();
    SteeredPath path = detail::reeds_shepp_path(from, to, cfg.turning_radius);
    path.materialize(cfg.sample_resolution);
    return path;
}

}  // namespace wheelbench::steer
