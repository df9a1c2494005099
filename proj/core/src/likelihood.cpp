#include "mmwloc/likelihood.hpp"

#include <cmath>

#include "mmwloc/errors.hpp"

namespace mmwloc {

namespace {

// Values of one path and their partial derivatives with respect to the UE
// (p) and, for NLOS paths, the path's scatterer (s).
struct PathTerms {
    double alpha{}, beta{}, d{};
    double dalpha_dp[2]{}, dbeta_dp[2]{}, dd_dp[2]{};
    double dalpha_ds[2]{}, dbeta_ds[2]{}, dd_ds[2]{};
};

[[noreturn]] void throw_coincident(const char* what) { throw DegenerateGeometry(what); }

PathTerms los_terms(Point2 p, Point2 q) {
    const double ux = q.x - p.x;
    const double uy = q.y - p.y;
    const double r2 = ux * ux + uy * uy;
    if (r2 == 0.0) throw_coincident("UE coincides with FE");
    const double r = std::sqrt(r2);
    PathTerms t;
    t.alpha = atan2q(ux, uy);
    t.beta = atan2q(-ux, -uy);
    t.d = r;
    t.dalpha_dp[0] = (p.y - q.y) / r2;
    t.dalpha_dp[1] = (q.x - p.x) / r2;
    // The AOD differs from the AOA by pi, so both share one gradient.
    t.dbeta_dp[0] = t.dalpha_dp[0];
    t.dbeta_dp[1] = t.dalpha_dp[1];
    t.dd_dp[0] = (p.x - q.x) / r;
    t.dd_dp[1] = (p.y - q.y) / r;
    return t;
}

PathTerms nlos_terms(Point2 p, Point2 q, Point2 s) {
    const double ax = s.x - p.x;
    const double ay = s.y - p.y;
    const double bx = s.x - q.x;
    const double by = s.y - q.y;
    const double ra2 = ax * ax + ay * ay;
    const double rb2 = bx * bx + by * by;
    if (ra2 == 0.0) throw_coincident("UE coincides with scatterer");
    if (rb2 == 0.0) throw_coincident("FE coincides with scatterer");
    const double ra = std::sqrt(ra2);
    const double rb = std::sqrt(rb2);
    PathTerms t;
    t.alpha = atan2q(ax, ay);
    t.beta = atan2q(bx, by);
    t.d = ra + rb;
    t.dalpha_dp[0] = (p.y - s.y) / ra2;
    t.dalpha_dp[1] = (s.x - p.x) / ra2;
    t.dd_dp[0] = (p.x - s.x) / ra;
    t.dd_dp[1] = (p.y - s.y) / ra;
    t.dalpha_ds[0] = (s.y - p.y) / ra2;
    t.dalpha_ds[1] = (p.x - s.x) / ra2;
    t.dbeta_ds[0] = (s.y - q.y) / rb2;
    t.dbeta_ds[1] = (q.x - s.x) / rb2;
    t.dd_ds[0] = (s.x - p.x) / ra + (s.x - q.x) / rb;
    t.dd_ds[1] = (s.y - p.y) / ra + (s.y - q.y) / rb;
    return t;
}

void check_covariance(const Eigen::VectorXd& cov) {
    for (Eigen::Index i = 0; i < cov.size(); ++i) {
        if (!(cov[i] > 0.0)) throw SingularCovariance("covariance entry " + std::to_string(i) + " is not positive");
    }
}

}  // namespace

Eigen::VectorXd residual(const Observation& z, const ParamVector& theta, const Scenario& scenario) {
    const Eigen::VectorXd h = forward(theta, z.paths, scenario);
    Eigen::VectorXd r = z.stacked() - h;
    const auto n = static_cast<Eigen::Index>(z.paths.size());
    for (Eigen::Index i = 0; i < 2 * n; ++i) r[i] = wrap(r[i]);
    return r;
}

double log_likelihood(const Observation& z, const ParamVector& theta, const Scenario& scenario) {
    check_covariance(z.covariance_diag);
    const Eigen::VectorXd r = residual(z, theta, scenario);
    const auto m = static_cast<double>(r.size());
    const double log_det = z.covariance_diag.array().log().sum();
    const double quad = (r.array().square() / z.covariance_diag.array()).sum();
    return -0.5 * (m * std::log(kTwoPi) + log_det) - 0.5 * quad;
}

Eigen::MatrixXd jacobian(const ParamVector& theta, const PathSet& paths, const Scenario& scenario) {
    const auto n = static_cast<Eigen::Index>(paths.size());
    const auto nn = static_cast<Eigen::Index>(paths.nlos_count());
    const bool scatter_cols = theta.mode == Mode::NoRem;
    if (scatter_cols && theta.scatterers.size() != paths.nlos_count()) {
        throw std::invalid_argument("theta scatterer count does not match the NLOS path count");
    }
    const Eigen::Index cols = scatter_cols ? 2 + 2 * nn : 2;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3 * n, cols);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& path = paths[static_cast<std::size_t>(j)];
        const Point2 q = scenario.fes.at(path.fe_index);
        if (path.is_los()) {
            const PathTerms t = los_terms(theta.ue, q);
            for (int c = 0; c < 2; ++c) {
                J(j, c) = t.dalpha_dp[c];
                J(n + j, c) = t.dbeta_dp[c];
                J(2 * n + j, c) = t.dd_dp[c];
            }
            continue;
        }
        const auto i = static_cast<Eigen::Index>(*path.scatterer_index);
        const Point2 s = scatter_cols ? theta.scatterers[static_cast<std::size_t>(i)] : *path.true_scatterer;
        const PathTerms t = nlos_terms(theta.ue, q, s);
        for (int c = 0; c < 2; ++c) {
            J(j, c) = t.dalpha_dp[c];
            J(2 * n + j, c) = t.dd_dp[c];
        }
        if (scatter_cols) {
            const Eigen::Index cx = 2 + i;
            const Eigen::Index cy = 2 + nn + i;
            J(j, cx) = t.dalpha_ds[0];
            J(j, cy) = t.dalpha_ds[1];
            J(n + j, cx) = t.dbeta_ds[0];
            J(n + j, cy) = t.dbeta_ds[1];
            J(2 * n + j, cx) = t.dd_ds[0];
            J(2 * n + j, cy) = t.dd_ds[1];
        }
    }
    return J;
}

Eigen::MatrixXd jacobian_fd(const ParamVector& theta, const PathSet& paths, const Scenario& scenario,
                            double step) {
    if (!(step > 0.0)) throw std::invalid_argument("jacobian_fd: step must be positive");
    // Coincident points have no derivative even if the shifted evaluations exist.
    (void)jacobian(theta, paths, scenario);
    const Eigen::VectorXd v = theta.to_vector();
    const Eigen::Index cols = theta.mode == Mode::NoRem ? v.size() : 2;
    const auto n = static_cast<Eigen::Index>(paths.size());
    Eigen::MatrixXd J(3 * n, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        Eigen::VectorXd plus = v;
        Eigen::VectorXd minus = v;
        plus[c] += step;
        minus[c] -= step;
        const Eigen::VectorXd hp = forward(ParamVector::from_vector(plus, theta.mode), paths, scenario);
        const Eigen::VectorXd hm = forward(ParamVector::from_vector(minus, theta.mode), paths, scenario);
        for (Eigen::Index r = 0; r < 3 * n; ++r) {
            const double diff = r < 2 * n ? wrap(hp[r] - hm[r]) : hp[r] - hm[r];
            J(r, c) = diff / (2.0 * step);
        }
    }
    return J;
}

LikelihoodModel::LikelihoodModel(const Observation& z, const Scenario& scenario, Mode mode)
    : z_(z), mode_(mode), n_paths_(z.paths.size()), n_los_(z.paths.los_count()) {
    check_covariance(z.covariance_diag);
    dim_ = mode == Mode::Rem ? 2 : 2 + 2 * z.paths.nlos_count();
    fe_of_path_.reserve(n_paths_);
    known_scatterer_.resize(n_paths_);
    for (std::size_t j = 0; j < n_paths_; ++j) {
        const auto& path = z.paths[j];
        fe_of_path_.push_back(scenario.fes.at(path.fe_index));
        if (!path.is_los() && mode == Mode::Rem) {
            if (!path.true_scatterer) throw std::invalid_argument("REM mode needs every NLOS path's true scatterer");
            known_scatterer_[j] = *path.true_scatterer;
        }
    }
    z_stacked_ = z.stacked();
    inv_sigma_ = z.covariance_diag.array().sqrt().inverse();
    const auto m = static_cast<double>(z_stacked_.size());
    log_normalizer_ = -0.5 * (m * std::log(kTwoPi) + z.covariance_diag.array().log().sum());
}

void LikelihoodModel::evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd& wr, Eigen::MatrixXd* wj) const {
    const auto n = static_cast<Eigen::Index>(n_paths_);
    const auto nn = static_cast<Eigen::Index>(n_paths_ - n_los_);
    const auto dim = static_cast<Eigen::Index>(dim_);
    wr.resize(3 * n);
    if (wj) {
        wj->resize(3 * n, dim);
        wj->setZero();
    }
    const Point2 p{theta[0], theta[1]};
    for (Eigen::Index j = 0; j < n; ++j) {
        const Point2 q = fe_of_path_[static_cast<std::size_t>(j)];
        const bool los = j < static_cast<Eigen::Index>(n_los_);
        Eigen::Index i = 0;
        PathTerms t;
        if (los) {
            t = los_terms(p, q);
        } else {
            i = j - static_cast<Eigen::Index>(n_los_);
            const Point2 s = mode_ == Mode::NoRem ? Point2{theta[2 + i], theta[2 + nn + i]}
                                                  : known_scatterer_[static_cast<std::size_t>(j)];
            t = nlos_terms(p, q, s);
        }
        const double wa = inv_sigma_[j];
        const double wb = inv_sigma_[n + j];
        const double wd = inv_sigma_[2 * n + j];
        wr[j] = wa * wrap(z_stacked_[j] - t.alpha);
        wr[n + j] = wb * wrap(z_stacked_[n + j] - t.beta);
        wr[2 * n + j] = wd * (z_stacked_[2 * n + j] - t.d);
        if (!wj) continue;
        auto& J = *wj;
        for (int c = 0; c < 2; ++c) {
            J(j, c) = wa * t.dalpha_dp[c];
            J(n + j, c) = wb * t.dbeta_dp[c];
            J(2 * n + j, c) = wd * t.dd_dp[c];
        }
        if (!los && mode_ == Mode::NoRem) {
            const Eigen::Index cx = 2 + i;
            const Eigen::Index cy = 2 + nn + i;
            J(j, cx) = wa * t.dalpha_ds[0];
            J(j, cy) = wa * t.dalpha_ds[1];
            J(n + j, cx) = wb * t.dbeta_ds[0];
            J(n + j, cy) = wb * t.dbeta_ds[1];
            J(2 * n + j, cx) = wd * t.dd_ds[0];
            J(2 * n + j, cy) = wd * t.dd_ds[1];
        }
    }
}

double LikelihoodModel::cost(const Eigen::VectorXd& theta) const {
    Eigen::VectorXd wr;
    evaluate(theta, wr, nullptr);
    return 0.5 * wr.squaredNorm();
}

}  // namespace mmwloc
