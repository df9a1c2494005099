#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mmwloc/geometry.hpp"

namespace mmwloc {

/// REM: scatterers known, only the UE position is estimated.
/// NoRem: scatterers are nuisance parameters estimated jointly.
enum class Mode { Rem, NoRem };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

/// Unknown parameters. In NoRem mode holds one scatterer per NLOS path; in
/// Rem mode `scatterers` is empty and NLOS paths use their true scatterer.
struct ParamVector {
    Point2 ue;
    std::vector<Point2> scatterers;
    Mode mode{Mode::NoRem};

    std::size_t dim() const { return 2 + 2 * scatterers.size(); }

    /// Flat layout [p_x, p_y, s_x(1..N), s_y(1..N)].
    Eigen::VectorXd to_vector() const;
    static ParamVector from_vector(const Eigen::VectorXd& v, Mode mode);

    /// Ground truth for `paths`: true scatterers in NoRem mode, none in Rem.
    static ParamVector truth(Point2 ue, const PathSet& paths, Mode mode);
};

/// Stacked measurement z = [alpha'; beta'; d'] with diagonal covariance in
/// the same order, LOS entries first inside each block.
struct Observation {
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
    Eigen::VectorXd dist;
    Eigen::VectorXd covariance_diag;
    PathSet paths;

    std::size_t path_count() const { return paths.size(); }
    std::size_t size() const { return 3 * paths.size(); }
    Eigen::VectorXd stacked() const;

    /// Observation restricted to a subset of paths (see PathSet::subset).
    Observation subset(const std::vector<std::size_t>& indices) const;
};

struct PathParams {
    double alpha{};
    double beta{};
    double d{};
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Four-quadrant arctangent of y/x with range (-pi, pi]. Throws
/// UndefinedAngle at the origin.
double atan2q(double y, double x);

/// x - 2*pi*floor((x + pi) / (2*pi)), range [-pi, pi).
double wrap(double x);

/// AOA, AOD and travelled distance of one path for parameters `theta`.
PathParams path_params(const PathDescriptor& path, const ParamVector& theta, const Scenario& scenario);

/// h(theta) stacked as [alpha; beta; d].
Eigen::VectorXd forward(const ParamVector& theta, const PathSet& paths, const Scenario& scenario);

/// Diagonal of R for n_los LOS and n_nlos NLOS paths.
Eigen::VectorXd covariance(const NoiseProfile& profile, std::size_t n_los, std::size_t n_nlos);

/// h(theta_true) plus zero-mean Gaussian noise drawn from the scenario's
/// profile. `noise_scale` multiplies every deviation (0 gives the noiseless
/// observation) while the reported covariance stays that of the profile.
Observation synthesize(const ParamVector& theta_true, const PathSet& paths, const Scenario& scenario,
                       std::uint64_t rng_seed, double noise_scale = 1.0);

/// LOS indicator: true iff ||wrap(alpha - beta)| - pi| <= xi.
bool classify_los(double alpha_meas, double beta_meas, double xi);

/// 3 * max angular deviation of the profile.
double default_los_threshold(const NoiseProfile& profile);

}  // namespace mmwloc
