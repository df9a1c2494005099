#pragma once

#include <Eigen/Core>

#include "mmwloc/measurement.hpp"

namespace mmwloc {

/// z - h(theta) with the angle blocks wrapped into [-pi, pi).
Eigen::VectorXd residual(const Observation& z, const ParamVector& theta, const Scenario& scenario);

/// Gaussian log-likelihood of z under theta using the wrapped residual.
/// Throws SingularCovariance if any variance is not strictly positive.
double log_likelihood(const Observation& z, const ParamVector& theta, const Scenario& scenario);

/// Analytic dh/dtheta, rows in measurement order, columns
/// [p_x, p_y, s_x(1..N), s_y(1..N)] (only the first two in Rem mode).
/// The AOD of an NLOS path does not depend on the UE, so that block is zero.
Eigen::MatrixXd jacobian(const ParamVector& theta, const PathSet& paths, const Scenario& scenario);

/// Central differences of `forward`; angle rows are differenced through wrap.
Eigen::MatrixXd jacobian_fd(const ParamVector& theta, const PathSet& paths, const Scenario& scenario,
                            double step = 1e-6);

/// Precomputed likelihood of one observation over flat parameter vectors.
/// Used by the estimator's inner loops; the free functions above are thin
/// wrappers with the same semantics.
class LikelihoodModel {
public:
    LikelihoodModel(const Observation& z, const Scenario& scenario, Mode mode);

    Mode mode() const { return mode_; }
    std::size_t dim() const { return dim_; }
    std::size_t measurement_count() const { return 3 * n_paths_; }
    const Observation& observation() const { return z_; }

    /// -1/2 ln((2 pi)^M |R|)
    double log_normalizer() const { return log_normalizer_; }

    /// Whitened wrapped residual R^{-1/2} [z - h(theta)]_A and, if requested,
    /// the whitened Jacobian of h. Throws DegenerateGeometry (Jacobian) or
    /// UndefinedAngle (residual) on coincident points.
    void evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd& whitened_residual,
                  Eigen::MatrixXd* whitened_jacobian) const;

    /// 1/2 |R^{-1/2} r|^2
    double cost(const Eigen::VectorXd& theta) const;
    double log_likelihood(const Eigen::VectorXd& theta) const { return log_normalizer_ - cost(theta); }

private:
    Observation z_;
    Mode mode_;
    std::size_t n_paths_{};
    std::size_t n_los_{};
    std::size_t dim_{};
    std::vector<Point2> fe_of_path_;
    std::vector<Point2> known_scatterer_;
    Eigen::VectorXd z_stacked_;
    Eigen::VectorXd inv_sigma_;
    double log_normalizer_{};
};

}  // namespace mmwloc
