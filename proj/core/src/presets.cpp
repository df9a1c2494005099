#include "mmwloc/presets.hpp"

#include "mmwloc/errors.hpp"

namespace mmwloc {

namespace {

constexpr Rect kRegion{0.0, 20.0, 0.0, 50.0};

const Wall kLeftWall{WallAxis::Vertical, 0.0, Side::Positive};
const Wall kRightWall{WallAxis::Vertical, 20.0, Side::Negative};
const Wall kGroundWall{WallAxis::Horizontal, 0.0, Side::Positive};

}  // namespace

std::vector<std::string> scenario_preset_names() {
    return {"canyon-1fe", "canyon-2fe", "corner-1fe", "corner-2fe", "beam-corner"};
}

Scenario scenario_preset(const std::string& name, const NoiseProfile& profile) {
    Scenario s;
    s.name = name;
    s.noise = profile;
    s.region = kRegion;
    if (name == "canyon-1fe" || name == "canyon-2fe") {
        s.walls = {kLeftWall, kRightWall};
        s.fes = {{-1.0, 2.0}};
        if (name == "canyon-2fe") s.fes.push_back({21.0, 48.0});
    } else if (name == "corner-1fe" || name == "corner-2fe" || name == "beam-corner") {
        s.walls = {kLeftWall, kGroundWall};
        s.fes = {{18.0, 10.0}};
        if (name == "corner-2fe") s.fes.push_back({18.0, 48.0});
    } else {
        throw ConfigError("unknown scenario preset '" + name + "'");
    }
    return s;
}

Scenario scenario_preset(const std::string& name) { return scenario_preset(name, NoiseProfile::preset("73GHz")); }

Point2 example_ue(const std::string& name) {
    if (name == "canyon-1fe" || name == "canyon-2fe") return {10.0, 40.0};
    if (name == "corner-1fe") return {15.0, 15.0};
    if (name == "corner-2fe" || name == "beam-corner") return {8.0, 35.0};
    throw ConfigError("unknown scenario preset '" + name + "'");
}

std::vector<Point2> straight_trajectory(Point2 from, Point2 to, std::size_t points) {
    std::vector<Point2> out;
    if (points == 0) return out;
    if (points == 1) return {from};
    out.reserve(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(points - 1);
        out.push_back(from + t * (to - from));
    }
    return out;
}

std::vector<Point2> trajectory_preset(const std::string& name, std::size_t points) {
    if (name == "canyon-1fe" || name == "canyon-2fe") return straight_trajectory({10.0, 5.0}, {10.0, 45.0}, points);
    if (name == "corner-1fe" || name == "corner-2fe" || name == "beam-corner") {
        return straight_trajectory({14.0, 12.0}, {14.0, 46.0}, points);
    }
    throw ConfigError("unknown scenario preset '" + name + "'");
}

}  // namespace mmwloc
