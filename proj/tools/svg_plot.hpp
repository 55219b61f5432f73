#pragma once

#include <string>

#include "epinet/simulate.hpp"

namespace epinet::cli {

/// Renders all state components of a trajectory as a static SVG line plot
/// (fixed 960x540 viewport, linear axes, legend of state labels).
std::string render_svg(const Trajectory& traj, const std::string& title);

}  // namespace epinet::cli
