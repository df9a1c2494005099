#include "mmwloc/bounds.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "mmwloc/errors.hpp"
#include "mmwloc/likelihood.hpp"
#include "mmwloc/parallel.hpp"

namespace mmwloc {

namespace {

constexpr double kMaxCondition = 1e12;

}  // namespace

Eigen::MatrixXd fisher(const ParamVector& theta, const PathSet& paths, const Scenario& scenario,
                       const NoiseProfile& profile) {
    const Eigen::MatrixXd J = jacobian(theta, paths, scenario);
    const Eigen::VectorXd info = covariance(profile, paths.los_count(), paths.nlos_count()).cwiseInverse();
    Eigen::MatrixXd F = J.transpose() * info.asDiagonal() * J;
    // Exact symmetry regardless of summation order.
    return 0.5 * (F + F.transpose());
}

CrbReport crb_report(const ParamVector& theta, const PathSet& paths, const Scenario& scenario,
                     const NoiseProfile& profile) {
    CrbReport report;
    report.mode = theta.mode;
    report.fisher = fisher(theta, paths, scenario, profile);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(report.fisher);
    if (eig.info() != Eigen::Success) throw SingularFisher("eigendecomposition of the Fisher matrix failed");
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double lo = lambda.minCoeff();
    const double hi = lambda.maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxCondition) {
        throw SingularFisher("Fisher matrix is singular (condition number above 1e12)");
    }
    const Eigen::MatrixXd& V = eig.eigenvectors();
    const Eigen::MatrixXd inverse = V * lambda.cwiseInverse().asDiagonal() * V.transpose();
    report.inverse_diagonal = inverse.diagonal();
    report.rmse_crb = std::sqrt(inverse(0, 0) + inverse(1, 1));
    return report;
}

double rmse_crb(Point2 ue, const PathSet& paths, const Scenario& scenario, const NoiseProfile& profile, Mode mode) {
    return crb_report(ParamVector::truth(ue, paths, mode), paths, scenario, profile).rmse_crb;
}

double rmse_crb_range_only(Point2 ue, const PathSet& paths, const Scenario& scenario, const NoiseProfile& profile) {
    NoiseProfile ranges = profile;
    const double inf = std::numeric_limits<double>::infinity();
    ranges.sigma_alpha_los = ranges.sigma_beta_los = inf;
    ranges.sigma_alpha_nlos = ranges.sigma_beta_nlos = inf;
    return rmse_crb(ue, paths, scenario, ranges, Mode::Rem);
}

GridSpec GridSpec::for_scenario(const Scenario& s, double spacing, double margin) {
    return GridSpec{s.region, spacing, margin};
}

std::vector<double> Field::valid_values() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
        if (std::isfinite(v)) out.push_back(v);
    }
    return out;
}

std::vector<Point2> grid_nodes(const Scenario& scenario, const GridSpec& grid) {
    if (!(grid.spacing > 0.0)) throw ConfigError("grid spacing must be > 0");
    const Rect& a = grid.area;
    const auto nx = static_cast<long>(std::floor((a.x_max - a.x_min) / grid.spacing + 1e-9));
    const auto ny = static_cast<long>(std::floor((a.y_max - a.y_min) / grid.spacing + 1e-9));
    std::vector<Point2> nodes;
    for (long i = 0; i <= nx; ++i) {
        for (long j = 0; j <= ny; ++j) {
            const Point2 p{a.x_min + static_cast<double>(i) * grid.spacing,
                           a.y_min + static_cast<double>(j) * grid.spacing};
            if (p.x < a.x_min + grid.margin || p.x > a.x_max - grid.margin || p.y < a.y_min + grid.margin ||
                p.y > a.y_max - grid.margin) {
                continue;
            }
            bool keep = true;
            for (const Wall& w : scenario.walls) keep = keep && w.signed_distance(p) >= grid.margin;
            for (const Point2& fe : scenario.fes) keep = keep && distance(p, fe) >= grid.margin;
            if (keep) nodes.push_back(p);
        }
    }
    return nodes;
}

Field crb_grid(const Scenario& scenario, const GridSpec& grid, const NoiseProfile& profile, Mode mode,
               unsigned workers) {
    Field field;
    field.nodes = grid_nodes(scenario, grid);
    field.values.assign(field.nodes.size(), std::numeric_limits<double>::quiet_NaN());
    parallel_for(field.nodes.size(), workers, [&](std::size_t i) {
        try {
            const PathSet paths = enumerate_paths(scenario, field.nodes[i]);
            field.values[i] = rmse_crb(field.nodes[i], paths, scenario, profile, mode);
        } catch (const Error&) {
            // left as NaN
        }
    });
    return field;
}

}  // namespace mmwloc
