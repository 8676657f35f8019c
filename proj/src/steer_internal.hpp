#pragma once

#include "wheelbench/steer.hpp"

// Unsampled path builders shared by the public steer functions and SteerFunction.
namespace wheelbench::steer::detail {

SteeredPath dubins_path(const Pose& from, const Pose& to, double turning_radius);
SteeredPath reeds_shepp_path(const Pose& from, const Pose& to, double turning_radius);
SteeredPath posq_path(const Pose& from, const Pose& to, const SteerConfig& cfg);

}  // namespace wheelbench::steer::detail
