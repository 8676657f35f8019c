#pragma once

#include "wheelbench/collision.hpp"
#include "wheelbench/steer.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wheelbench::smoothing {

using collision::ValidityChecker;
using steer::SteeredPath;
using steer::SteerFunction;

struct GripsParams {
    /// Vertex step along the clearance gradient; 0 selects a quarter cell (0.25 m in polygon worlds).
    double eta = 0.0;
    /// Finite-difference step; 0 selects the checker's resolution.
    double gradient_eps = 0.0;
    int descent_rounds = 5;
    /// Initial vertex spacing; 0 selects two cells (2 m in polygon worlds).
    double min_node_spacing = 0.0;
};

struct SmootherParams {
    int shortcut_rounds = 200;
    int bspline_rounds = 5;
    GripsParams grips{};
    std::uint64_t rng_seed = 0;
    double time_budget = 5.0;  ///< seconds

    /// Throws std::invalid_argument on inconsistent values.
    void validate() const;
};

struct SmoothResult {
    SteeredPath path;
    double time = 0.0;
    double length_before = 0.0;
    double length_after = 0.0;
    double max_curvature_before = 0.0;
    double max_curvature_after = 0.0;
    /// The input failed validation and was returned unchanged.
    bool input_invalid = false;
};

struct GripsDiagnostics {
    /// Distance each interior vertex moved during gradient descent.
    std::vector<double> displacement;
    double clearance_before = 0.0;
    double clearance_after_descent = 0.0;
};

/// Random shortcuts by direct steer paths; accepts only valid, strictly shorter ones.
SmoothResult shortcut(const SteeredPath& path, ValidityChecker& checker, const SteerFunction& steer,
                      const SmootherParams& params);

/// Corner cutting on the path's polyline: midpoint insertion plus vertex
/// relaxation. The result consists of Integrated segments, one per driving direction.
SmoothResult bspline_smooth(const SteeredPath& path, ValidityChecker& checker, const SmootherParams& params);

/// Rounds of vertex reduction, shortcutting and corner cutting until the
/// length improves by no more than 0.1%.
SmoothResult simplify_max(const SteeredPath& path, ValidityChecker& checker, const SteerFunction& steer,
                          const SmootherParams& params);

/// Resample, move vertices up the clearance gradient, prune vertices, shortcut.
SmoothResult grips(const SteeredPath& path, ValidityChecker& checker, const SteerFunction& steer,
                   const SmootherParams& params, GripsDiagnostics* diagnostics = nullptr);

/// "shortcut", "bspline", "simplify_max" or "grips".
SmoothResult smooth(const std::string& name, const SteeredPath& path, ValidityChecker& checker,
                    const SteerFunction& steer, const SmootherParams& params);
std::vector<std::string> smoother_names();

}  // namespace wheelbench::smoothing
