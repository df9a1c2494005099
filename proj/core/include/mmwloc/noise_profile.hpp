#pragma once

#include <string>

namespace mmwloc {

/// Per-path-class standard deviations of the measured AOA, AOD and path
/// distance. Angles are stored in radians, distances in meters.
struct NoiseProfile {
    double sigma_alpha_los{};
    double sigma_beta_los{};
    double sigma_alpha_nlos{};
    double sigma_beta_nlos{};
    double sigma_d_los{};
    double sigma_d_nlos{};
    std::string label;

    /// Builds a profile from angles in degrees and distances in meters.
    static NoiseProfile from_degrees(double alpha_los_deg, double beta_los_deg, double d_los_m,
                                     double alpha_nlos_deg, double beta_nlos_deg, double d_nlos_m,
                                     std::string label = "custom");

    /// All four angular deviations tied to one value, both distance
    /// deviations tied to another.
    static NoiseProfile tied(double sigma_angle_rad, double sigma_d_m, std::string label = "tied");

    /// Named presets: "28GHz" and "73GHz". Throws ConfigError otherwise.
    static NoiseProfile preset(const std::string& name);

    /// Throws ConfigError naming the first non-positive field.
    void validate() const;

    double max_angle_sigma() const;
};

}  // namespace mmwloc
