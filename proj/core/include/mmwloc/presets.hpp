#pragma once

#include <string>
#include <vector>

#include "mmwloc/geometry.hpp"

namespace mmwloc {

// Canonical urban scenes. Canyon: walls x=0 and x=20, FE1 (-1,2), FE2
// (21,48). Corner: walls x=0 and y=0, FE1 (18,10), FE2 (18,48). "beam-corner" is
// the one-FE corner used for the beamwidth study. Every preset uses the
// region [0,20] x [0,50].

std::vector<std::string> scenario_preset_names();
Scenario scenario_preset(const std::string& name, const NoiseProfile& profile);
Scenario scenario_preset(const std::string& name);  ///< 73GHz profile

/// Example UE position drawn for the preset.
Point2 example_ue(const std::string& name);

/// Straight UE trajectory with `points` evenly spaced positions, both ends
/// included.
std::vector<Point2> straight_trajectory(Point2 from, Point2 to, std::size_t points);

/// Default REM-map trajectory: street center for canyons, a line parallel
/// to the vertical wall for corners.
std::vector<Point2> trajectory_preset(const std::string& name, std::size_t points = 20);

}  // namespace mmwloc
