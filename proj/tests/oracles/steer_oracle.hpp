#pragma once

// Brute-force shortest-path oracle for car-like steering at unit turning radius.
// Every candidate word (a turn/straight sequence with signed lengths) is solved
// for the goal by Newton's method started from a grid of parameter guesses, and
// the shortest converged solution wins. Nothing here calls the library solvers.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

namespace wheelbench::oracle {

constexpr double kPi = std::numbers::pi;

struct Q {
    double x = 0, y = 0, th = 0;
};

inline double wrap(double a) {
    a = std::fmod(a + kPi, 2 * kPi);
    if (a < 0) a += 2 * kPi;
    return a - kPi;
}

// One segment slot of a word. `param` < 0 means a fixed length `fixed`;
// otherwise the slot's length is `sign * p[param]`.
struct Slot {
    int kappa;  // +1 left, -1 right, 0 straight
    int param;
    double sign;
    double fixed;
};

using Word = std::vector<Slot>;

inline Q drive(Q q, int kappa, double len) {
    if (kappa == 0) {
        return {q.x + len * std::cos(q.th), q.y + len * std::sin(q.th), q.th};
    }
    const double th = q.th + kappa * len;
    return {q.x + kappa * (std::sin(th) - std::sin(q.th)), q.y - kappa * (std::cos(th) - std::cos(q.th)), th};
}

inline double slot_length(const Slot& s, const std::array<double, 3>& p) {
    return s.param < 0 ? s.fixed : s.sign * p[s.param];
}

// End pose and its Jacobian w.r.t. the three free parameters.
inline Q evaluate(const Word& w, const std::array<double, 3>& p, double jac[3][3]) {
    std::array<Q, 5> ends;
    Q q;
    for (std::size_t i = 0; i < w.size(); ++i) {
        q = drive(q, w[i].kappa, slot_length(w[i], p));
        ends[i] = q;
    }
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) jac[r][c] = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const Slot& s = w[i];
        if (s.param < 0) continue;
        // Stretching slot i moves its end along the tangent and rotates the rest
        // of the path about that point.
        const Q& e = ends[i];
        const double dx = std::cos(e.th) - s.kappa * (q.y - e.y);
        const double dy = std::sin(e.th) + s.kappa * (q.x - e.x);
        jac[0][s.param] += s.sign * dx;
        jac[1][s.param] += s.sign * dy;
        jac[2][s.param] += s.sign * s.kappa;
    }
    return q;
}

inline bool solve3(const double a[3][3], const double b[3], double x[3]) {
    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    if (std::abs(det) < 1e-12) return false;
    for (int k = 0; k < 3; ++k) {
        double m[3][3];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m[r][c] = c == k ? b[r] : a[r][c];
        x[k] = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])) /
               det;
    }
    return true;
}

inline std::optional<std::array<double, 3>> newton(const Word& w, std::array<double, 3> p, const Q& goal) {
    double jac[3][3];
    for (int it = 0; it < 40; ++it) {
        const Q e = evaluate(w, p, jac);
        const double res[3] = {goal.x - e.x, goal.y - e.y, wrap(goal.th - e.th)};
        const double err = std::abs(res[0]) + std::abs(res[1]) + std::abs(res[2]);
        if (err < 1e-11) return p;
        if (it >= 15 && err > 1e-3) return std::nullopt;
        double step[3];
        if (!solve3(jac, res, step)) return std::nullopt;
        const double norm = std::abs(step[0]) + std::abs(step[1]) + std::abs(step[2]);
        const double scale = norm > 2.0 ? 2.0 / norm : 1.0;
        for (int k = 0; k < 3; ++k) p[k] += scale * step[k];
        if (std::abs(p[0]) + std::abs(p[1]) + std::abs(p[2]) > 100) return std::nullopt;
    }
    return std::nullopt;
}

inline Slot free_slot(int kappa, int param, double sign = 1.0) { return {kappa, param, sign, 0.0}; }
inline Slot fixed_slot(int kappa, double len) { return {kappa, -1, 1.0, len}; }

/// Word families: every C?C triple, CCCC with equal middle magnitudes, CCSC and
/// CSCC with a quarter-turn arc, CCSCC with two quarter-turn arcs.
inline std::vector<Word> reeds_shepp_words() {
    std::vector<Word> out;
    for (int a : {1, -1})
        for (int c : {1, -1}) out.push_back({free_slot(a, 0), free_slot(0, 1), free_slot(c, 2)});
    for (int a : {1, -1}) out.push_back({free_slot(a, 0), free_slot(-a, 1), free_slot(a, 2)});
    for (int a : {1, -1})
        for (double s : {1.0, -1.0})
            out.push_back({free_slot(a, 0), free_slot(-a, 1), free_slot(a, 1, s), free_slot(-a, 2)});
    const double q = kPi / 2;
    for (int a : {1, -1})
        for (int c : {1, -1})
            for (double s : {1.0, -1.0}) {
                out.push_back({free_slot(a, 0), fixed_slot(-a, s * q), free_slot(0, 1), free_slot(c, 2)});
                out.push_back({free_slot(c, 0), free_slot(0, 1), fixed_slot(a, s * q), free_slot(-a, 2)});
            }
    for (int a : {1, -1})
        for (double s1 : {1.0, -1.0})
            for (double s2 : {1.0, -1.0})
                out.push_back({free_slot(a, 0), fixed_slot(-a, s1 * q), free_slot(0, 1), fixed_slot(a, s2 * q),
                               free_slot(-a, 2)});
    return out;
}

inline std::vector<Word> dubins_words() {
    auto all = reeds_shepp_words();
    all.resize(6);
    return all;
}

// Shortest representative of an arc length: whole turns can be removed.
inline double reduce_arc(double len, bool forward_only) {
    if (forward_only) {
        double r = std::fmod(len, 2 * kPi);
        return r < 0 ? r + 2 * kPi : r;
    }
    return wrap(len);
}

inline double word_cost(const Word& w, const std::array<double, 3>& p, bool forward_only) {
    double cost = 0;
    for (const Slot& s : w) {
        double len = slot_length(s, p);
        if (s.kappa != 0 && s.param >= 0) {
            // a free arc appears at most once in a word except in CCCC, where the
            // shared parameter must not be reduced independently
            bool shared = false;
            for (const Slot& o : w)
                if (&o != &s && o.param == s.param) shared = true;
            if (!shared) len = reduce_arc(len, forward_only);
        }
        if (forward_only && len < -1e-9) return std::numeric_limits<double>::infinity();
        cost += std::abs(len);
    }
    return cost;
}

/// Shortest length over `words` from the origin to `goal` at unit radius.
inline double shortest(const std::vector<Word>& words, const Q& goal, bool forward_only) {
    static const double arc_guess[] = {-2.3, -0.8, 0.7, 2.2};
    static const double line_guess[] = {-7.0, -1.8, 1.7, 6.5};
    double best = std::numeric_limits<double>::infinity();
    for (const Word& w : words) {
        // guess tables depend on what each parameter drives
        std::array<const double*, 3> table{};
        for (const Slot& s : w)
            if (s.param >= 0) table[s.param] = s.kappa == 0 ? line_guess : arc_guess;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k) {
                    const auto sol = newton(w, {table[0][i], table[1][j], table[2][k]}, goal);
                    if (sol) best = std::min(best, word_cost(w, *sol, forward_only));
                }
    }
    return best;
}

inline double reeds_shepp(const Q& goal) {
    static const auto words = reeds_shepp_words();
    return shortest(words, goal, false);
}

inline double dubins(const Q& goal) {
    static const auto words = dubins_words();
    return shortest(words, goal, true);
}

/// Relative goal of `to` seen from `from`, scaled by 1 / radius.
inline Q relative(double fx, double fy, double fth, double tx, double ty, double tth, double radius) {
    const double dx = tx - fx;
    const double dy = ty - fy;
    const double c = std::cos(fth);
    const double s = std::sin(fth);
    return {(c * dx + s * dy) / radius, (-s * dx + c * dy) / radius, wrap(tth - fth)};
}

}  // namespace wheelbench::oracle
