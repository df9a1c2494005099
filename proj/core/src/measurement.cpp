#include "mmwloc/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mmwloc/errors.hpp"
#include "mmwloc/rng.hpp"

namespace mmwloc {

NoiseProfile NoiseProfile::from_degrees(double alpha_los_deg, double beta_los_deg, double d_los_m,
                                        double alpha_nlos_deg, double beta_nlos_deg, double d_nlos_m,
                                        std::string label) {
    return NoiseProfile{deg2rad(alpha_los_deg),  deg2rad(beta_los_deg), deg2rad(alpha_nlos_deg),
                        deg2rad(beta_nlos_deg),  d_los_m,               d_nlos_m,
                        std::move(label)};
}

NoiseProfile NoiseProfile::tied(double sigma_angle_rad, double sigma_d_m, std::string label) {
    return NoiseProfile{sigma_angle_rad, sigma_angle_rad, sigma_angle_rad, sigma_angle_rad,
                        sigma_d_m,       sigma_d_m,       std::move(label)};
}

NoiseProfile NoiseProfile::preset(const std::string& name) {
    if (name == "28GHz") return from_degrees(10.5, 8.5, 0.75, 10.1, 9.0, 0.75, "28GHz");
    if (name == "73GHz") return from_degrees(8.5, 5.5, 0.75, 6.0, 7.0, 0.75, "73GHz");
    throw ConfigError("unknown noise profile preset '" + name + "' (expected 28GHz or 73GHz)");
}

void NoiseProfile::validate() const {
    const std::pair<const char*, double> fields[] = {
        {"sigma_alpha_los", sigma_alpha_los}, {"sigma_beta_los", sigma_beta_los},
        {"sigma_alpha_nlos", sigma_alpha_nlos}, {"sigma_beta_nlos", sigma_beta_nlos},
        {"sigma_d_los", sigma_d_los},         {"sigma_d_nlos", sigma_d_nlos},
    };
    for (const auto& [field, value] : fields) {
        if (!(value > 0.0)) {
            throw ConfigError(std::string("noise profile '") + label + "': " + field + " must be > 0");
        }
    }
}

double NoiseProfile::max_angle_sigma() const {
    return std::max({sigma_alpha_los, sigma_beta_los, sigma_alpha_nlos, sigma_beta_nlos});
}

std::string to_string(Mode m) { return m == Mode::Rem ? "REM" : "NoREM"; }

Mode mode_from_string(const std::string& s) {
    if (s == "REM" || s == "rem") return Mode::Rem;
    if (s == "NoREM" || s == "norem" || s == "NOREM") return Mode::NoRem;
    throw ConfigError("unknown mode '" + s + "' (expected REM or NoREM)");
}

Eigen::VectorXd ParamVector::to_vector() const {
    const auto n = static_cast<Eigen::Index>(scatterers.size());
    Eigen::VectorXd v(2 + 2 * n);
    v[0] = ue.x;
    v[1] = ue.y;
    for (Eigen::Index i = 0; i < n; ++i) {
        v[2 + i] = scatterers[static_cast<std::size_t>(i)].x;
        v[2 + n + i] = scatterers[static_cast<std::size_t>(i)].y;
    }
    return v;
}

ParamVector ParamVector::from_vector(const Eigen::VectorXd& v, Mode mode) {
    ParamVector p;
    p.mode = mode;
    p.ue = {v[0], v[1]};
    const Eigen::Index n = (v.size() - 2) / 2;
    p.scatterers.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) p.scatterers.push_back({v[2 + i], v[2 + n + i]});
    return p;
}

ParamVector ParamVector::truth(Point2 ue, const PathSet& paths, Mode mode) {
    ParamVector p{ue, {}, mode};
    if (mode == Mode::Rem) return p;
    for (const auto& path : paths) {
        if (path.is_los()) continue;
        if (!path.true_scatterer) throw DegenerateGeometry("NLOS path without a true scatterer");
        p.scatterers.push_back(*path.true_scatterer);
    }
    return p;
}

Eigen::VectorXd Observation::stacked() const {
    Eigen::VectorXd z(3 * alpha.size());
    z << alpha, beta, dist;
    return z;
}

Observation Observation::subset(const std::vector<std::size_t>& indices) const {
    std::vector<std::size_t> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    const auto n = static_cast<Eigen::Index>(sorted.size());
    const auto full = static_cast<Eigen::Index>(paths.size());
    Observation out;
    out.paths = paths.subset(sorted);
    out.alpha.resize(n);
    out.beta.resize(n);
    out.dist.resize(n);
    out.covariance_diag.resize(3 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(sorted[static_cast<std::size_t>(k)]);
        out.alpha[k] = alpha[i];
        out.beta[k] = beta[i];
        out.dist[k] = dist[i];
        for (Eigen::Index b = 0; b < 3; ++b) out.covariance_diag[b * n + k] = covariance_diag[b * full + i];
    }
    return out;
}

double atan2q(double y, double x) {
    if (x == 0.0) {
        if (y > 0.0) return kPi / 2.0;
        if (y < 0.0) return -kPi / 2.0;
        throw UndefinedAngle("atan2q: both arguments are zero");
    }
    // x < 0, y == -0.0 belongs to the y >= 0 branch, giving +pi.
    if (x < 0.0 && y == 0.0) return kPi;
    return std::atan2(y, x);
}

double wrap(double x) {
    double r = x - kTwoPi * std::floor((x + kPi) / kTwoPi);
    if (r >= kPi) r -= kTwoPi;
    if (r < -kPi) r += kTwoPi;
    return r;
}

namespace {

Point2 scatterer_for(const PathDescriptor& path, const ParamVector& theta) {
    if (theta.mode == Mode::NoRem) {
        const std::size_t i = *path.scatterer_index;
        if (i >= theta.scatterers.size()) throw std::invalid_argument("theta has too few scatterers for the path set");
        return theta.scatterers[i];
    }
    if (!path.true_scatterer) throw std::invalid_argument("REM mode needs the path's true scatterer");
    return *path.true_scatterer;
}

}  // namespace

PathParams path_params(const PathDescriptor& path, const ParamVector& theta, const Scenario& scenario) {
    const Point2 p = theta.ue;
    const Point2 q = scenario.fes.at(path.fe_index);
    if (path.is_los()) {
        return {atan2q(q.x - p.x, q.y - p.y), atan2q(p.x - q.x, p.y - q.y), distance(p, q)};
    }
    const Point2 s = scatterer_for(path, theta);
    return {atan2q(s.x - p.x, s.y - p.y), atan2q(s.x - q.x, s.y - q.y), distance(s, p) + distance(s, q)};
}

Eigen::VectorXd forward(const ParamVector& theta, const PathSet& paths, const Scenario& scenario) {
    if (theta.mode == Mode::NoRem && theta.scatterers.size() != paths.nlos_count()) {
        throw std::invalid_argument("theta scatterer count does not match the NLOS path count");
    }
    const auto n = static_cast<Eigen::Index>(paths.size());
    Eigen::VectorXd h(3 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const PathParams pp = path_params(paths[static_cast<std::size_t>(j)], theta, scenario);
        h[j] = pp.alpha;
        h[n + j] = pp.beta;
        h[2 * n + j] = pp.d;
    }
    return h;
}

Eigen::VectorXd covariance(const NoiseProfile& profile, std::size_t n_los, std::size_t n_nlos) {
    const auto nl = static_cast<Eigen::Index>(n_los);
    const auto nn = static_cast<Eigen::Index>(n_nlos);
    const Eigen::Index n = nl + nn;
    Eigen::VectorXd r(3 * n);
    auto fill = [&](Eigen::Index block, double los_sigma, double nlos_sigma) {
        r.segment(block * n, nl).setConstant(los_sigma * los_sigma);
        r.segment(block * n + nl, nn).setConstant(nlos_sigma * nlos_sigma);
    };
    fill(0, profile.sigma_alpha_los, profile.sigma_alpha_nlos);
    fill(1, profile.sigma_beta_los, profile.sigma_beta_nlos);
    fill(2, profile.sigma_d_los, profile.sigma_d_nlos);
    return r;
}

Observation synthesize(const ParamVector& theta_true, const PathSet& paths, const Scenario& scenario,
                       std::uint64_t rng_seed, double noise_scale) {
    const Eigen::VectorXd h = forward(theta_true, paths, scenario);
    const auto n = static_cast<Eigen::Index>(paths.size());
    Observation z;
    z.paths = paths;
    z.covariance_diag = covariance(scenario.noise, paths.los_count(), paths.nlos_count());
    Eigen::VectorXd noisy = h;
    if (noise_scale != 0.0) {
        Rng rng = make_rng(rng_seed, StreamTag::Synthesis, 0);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Eigen::Index i = 0; i < 3 * n; ++i) {
            noisy[i] += noise_scale * std::sqrt(z.covariance_diag[i]) * normal(rng);
        }
    }
    z.alpha = noisy.segment(0, n);
    z.beta = noisy.segment(n, n);
    z.dist = noisy.segment(2 * n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        z.alpha[j] = wrap(z.alpha[j]);
        z.beta[j] = wrap(z.beta[j]);
    }
    return z;
}

bool classify_los(double alpha_meas, double beta_meas, double xi) {
    return std::abs(std::abs(wrap(alpha_meas - beta_meas)) - kPi) <= xi;
}

double default_los_threshold(const NoiseProfile& profile) { return 3.0 * profile.max_angle_sigma(); }

}  // namespace mmwloc
