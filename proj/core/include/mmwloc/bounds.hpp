#pragma once

#include <vector>

#include <Eigen/Core>

#include "mmwloc/measurement.hpp"

namespace mmwloc {

struct CrbReport {
    Eigen::MatrixXd fisher;
    Eigen::VectorXd inverse_diagonal;  ///< diag(I^{-1}), UE entries first
    double rmse_crb{};
    Mode mode{Mode::NoRem};
};

/// J^T R^{-1} J with the analytic Jacobian; the mode of `theta` selects the
/// parameter space. Angular deviations may be +inf (no angle information).
Eigen::MatrixXd fisher(const ParamVector& theta, const PathSet& paths, const Scenario& scenario,
                       const NoiseProfile& profile);

/// Fisher matrix, its inverse diagonal and sqrt(I^-1_11 + I^-1_22). Throws
/// SingularFisher when the condition number exceeds 1e12.
CrbReport crb_report(const ParamVector& theta, const PathSet& paths, const Scenario& scenario,
                     const NoiseProfile& profile);

/// Position RMSE bound at the true geometry of `paths` in the given mode.
double rmse_crb(Point2 ue, const PathSet& paths, const Scenario& scenario, const NoiseProfile& profile,
                Mode mode);

/// Bound with known scatterers from distance measurements alone.
double rmse_crb_range_only(Point2 ue, const PathSet& paths, const Scenario& scenario,
                           const NoiseProfile& profile);

/// UE grid: nodes lo + k*spacing inside `area`, skipping nodes closer than
/// `margin` to a wall or an FE.
struct GridSpec {
    Rect area;
    double spacing{1.0};
    double margin{0.5};

    /// Region of the scenario shrunk by the margin, 1 m spacing.
    static GridSpec for_scenario(const Scenario& s, double spacing = 1.0, double margin = 0.5);
};

struct Field {
    std::vector<Point2> nodes;
    std::vector<double> values;  ///< NaN where the bound is undefined

    std::vector<double> valid_values() const;
};

std::vector<Point2> grid_nodes(const Scenario& scenario, const GridSpec& grid);

/// rmse_crb at every grid node using all paths of the scenario.
Field crb_grid(const Scenario& scenario, const GridSpec& grid, const NoiseProfile& profile, Mode mode,
               unsigned workers = 0);

}  // namespace mmwloc
