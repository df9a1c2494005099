#pragma once

// Random problem instances for property tests.

#include <random>
#include <vector>

#include <Eigen/Core>

#include "mmwloc/measurement.hpp"
#include "mmwloc/rng.hpp"

namespace mmwloc::testgen {

struct Instance {
    Scenario scenario;
    PathSet paths;
    ParamVector theta;  ///< NoRem truth; use ParamVector::truth for Rem
};

inline Point2 uniform_point(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    const double x = u(rng);
    return {x, u(rng)};
}

/// Points in a `box` square, pairwise at least `min_sep` apart.
inline std::vector<Point2> separated_points(Rng& rng, std::size_t n, double box, double min_sep) {
    std::vector<Point2> out;
    while (out.size() < n) {
        const Point2 p = uniform_point(rng, 0.0, box);
        bool ok = true;
        for (const Point2& q : out) ok = ok && distance(p, q) >= min_sep;
        if (ok) out.push_back(p);
    }
    return out;
}

/// 1-2 FEs, 0-2 LOS paths and 1-3 NLOS paths with arbitrary (not
/// necessarily specular) scatterers, all points in a box and separated.
inline Instance random_instance(Rng& rng, double box = 50.0, double min_sep = 1.0) {
    std::uniform_int_distribution<int> n_fe_dist(1, 2);
    std::uniform_int_distribution<int> n_nlos_dist(1, 3);
    const auto n_fe = static_cast<std::size_t>(n_fe_dist(rng));
    const auto n_nlos = static_cast<std::size_t>(n_nlos_dist(rng));
    std::uniform_int_distribution<std::size_t> n_los_dist(0, n_fe);
    const std::size_t n_los = n_los_dist(rng);
    const auto pts = separated_points(rng, 1 + n_fe + n_nlos, box, min_sep);

    Instance inst;
    inst.scenario.name = "random";
    inst.scenario.noise = NoiseProfile::preset("73GHz");
    inst.scenario.region = {0.0, box, 0.0, box};
    inst.scenario.fes.assign(pts.begin() + 1, pts.begin() + 1 + static_cast<long>(n_fe));
    std::vector<PathDescriptor> descs;
    for (std::size_t i = 0; i < n_los; ++i) descs.push_back({PathKind::Los, i, std::nullopt, std::nullopt, std::nullopt});
    std::uniform_int_distribution<std::size_t> fe_pick(0, n_fe - 1);
    for (std::size_t k = 0; k < n_nlos; ++k) {
        descs.push_back({PathKind::Nlos, fe_pick(rng), k, pts[1 + n_fe + k], std::nullopt});
    }
    inst.paths = PathSet(descs);
    inst.theta = ParamVector::truth(pts[0], inst.paths, Mode::NoRem);
    return inst;
}

/// Central differences of forward(), angle rows through wrap; written
/// independently of the library's own finite-difference helper.
inline Eigen::MatrixXd central_difference_jacobian(const ParamVector& theta, const PathSet& paths,
                                                   const Scenario& scenario, double h) {
    const Eigen::VectorXd x0 = theta.to_vector();
    const auto n_angle = static_cast<Eigen::Index>(2 * paths.size());
    const Eigen::VectorXd f0 = forward(theta, paths, scenario);
    Eigen::MatrixXd out(f0.size(), x0.size());
    for (Eigen::Index c = 0; c < x0.size(); ++c) {
        Eigen::VectorXd xp = x0;
        Eigen::VectorXd xm = x0;
        xp[c] += h;
        xm[c] -= h;
        const Eigen::VectorXd fp = forward(ParamVector::from_vector(xp, theta.mode), paths, scenario);
        const Eigen::VectorXd fm = forward(ParamVector::from_vector(xm, theta.mode), paths, scenario);
        for (Eigen::Index r = 0; r < f0.size(); ++r) {
            double diff = fp[r] - fm[r];
            if (r < n_angle) diff = std::remainder(diff, 2.0 * std::numbers::pi);
            out(r, c) = diff / (2.0 * h);
        }
    }
    return out;
}

/// max |a - b| / max(|a|, floor) over all entries.
inline double max_relative_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numeric, double floor) {
    double worst = 0.0;
    for (Eigen::Index r = 0; r < analytic.rows(); ++r) {
        for (Eigen::Index c = 0; c < analytic.cols(); ++c) {
            const double denom = std::max(std::abs(analytic(r, c)), floor);
            worst = std::max(worst, std::abs(analytic(r, c) - numeric(r, c)) / denom);
        }
    }
    return worst;
}

}  // namespace mmwloc::testgen
