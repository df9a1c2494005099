#include "mmwloc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>

#include "mmwloc/errors.hpp"

namespace mmwloc {

namespace {

constexpr double kDefaultSearchPadding = 5.0;
constexpr int kMaxRedraws = 10;
constexpr double kLambdaInit = 1e-3;
constexpr double kLambdaMax = 1e12;

std::vector<double> axis_nodes(double lo, double hi, double spacing) {
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / spacing + 1e-9));
    out.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) out.push_back(lo + static_cast<double>(k) * spacing);
    return out;
}

std::vector<Point2> box_nodes(const Rect& box, double spacing) {
    const auto xs = axis_nodes(box.x_min, box.x_max, spacing);
    const auto ys = axis_nodes(box.y_min, box.y_max, spacing);
    std::vector<Point2> nodes;
    nodes.reserve(xs.size() * ys.size());
    for (double x : xs) {
        for (double y : ys) nodes.push_back({x, y});
    }
    return nodes;
}

double safe_log_likelihood(const LikelihoodModel& model, const Eigen::VectorXd& theta) {
    try {
        return model.log_likelihood(theta);
    } catch (const Error&) {
        return -std::numeric_limits<double>::infinity();
    }
}

// argmax over `nodes` of the model with `slot` (two consecutive-or-split
// coordinates) set to the node. Ties keep the first node.
struct NodeSearch {
    Point2 best{};
    double log_likelihood{-std::numeric_limits<double>::infinity()};
};

NodeSearch search_nodes(const LikelihoodModel& model, Eigen::VectorXd theta, Eigen::Index ix, Eigen::Index iy,
                        const std::vector<Point2>& nodes) {
    NodeSearch out;
    out.best = nodes.front();
    for (const Point2& node : nodes) {
        theta[ix] = node.x;
        theta[iy] = node.y;
        const double ll = safe_log_likelihood(model, theta);
        if (ll > out.log_likelihood) {
            out.log_likelihood = ll;
            out.best = node;
        }
    }
    return out;
}

std::vector<std::size_t> iota_indices(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> v(end - begin);
    std::iota(v.begin(), v.end(), begin);
    return v;
}

ParticleSet iterate(const LikelihoodModel& model, const ParticleSet& ps, const GapfConfig& cfg,
                    std::size_t iteration_index) {
    Rng resample_rng = make_rng(cfg.rng_seed, StreamTag::Resample, iteration_index);
    ParticleSet next = resample_systematic(ps, resample_rng);
    const std::size_t n = next.particles.size();
    const double spread = cfg.process_std_position * std::pow(cfg.anneal_factor, static_cast<double>(iteration_index));
    const Mode mode = model.mode();

    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = make_rng(cfg.rng_seed, StreamTag::Particle, iteration_index * n + i);
        std::normal_distribution<double> normal(0.0, 1.0);
        const Eigen::VectorXd parent = next.particles[i].to_vector();
        Eigen::VectorXd refined = parent;
        double cost = 0.0;
        bool done = false;
        for (int attempt = 0; attempt < kMaxRedraws && !done; ++attempt) {
            Eigen::VectorXd drawn = parent;
            if (spread > 0.0) {
                for (Eigen::Index c = 0; c < drawn.size(); ++c) drawn[c] += spread * normal(rng);
            }
            try {
                refined = lm_refine(model, drawn, cfg, &cost);
                done = true;
            } catch (const Error&) {
                // degenerate draw, redraw
            }
        }
        if (!done) {
            refined = parent;
            cost = model.cost(parent);
        }
        next.particles[i] = ParamVector::from_vector(refined, mode);
        next.log_likelihoods[i] = model.log_normalizer() - cost;
    }

    // Weights from shifted log-likelihoods so that a uniformly tiny
    // likelihood does not underflow to an all-zero weight vector.
    const double max_ll = *std::max_element(next.log_likelihoods.begin(), next.log_likelihoods.end());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        next.weights[i] = std::exp(next.log_likelihoods[i] - max_ll);
        total += next.weights[i];
    }
    for (double& w : next.weights) w /= total;

    for (std::size_t i = 0; i < n; ++i) {
        if (next.log_likelihoods[i] > next.best_log_likelihood) {
            next.best_log_likelihood = next.log_likelihoods[i];
            next.best = next.particles[i];
            next.best_iteration = iteration_index + 1;
        }
    }
    return next;
}

EstimateReport estimate_joint(const Observation& z, const Scenario& scenario, Mode mode, const GapfConfig& cfg) {
    const LikelihoodModel model(z, scenario, mode);
    EstimateReport report;
    report.seed = cfg.rng_seed;
    report.mode = mode;
    report.theta_init = grid_init(z, z.paths, scenario, cfg, mode);

    ParticleSet ps = ParticleSet::uniform(report.theta_init, cfg.n_particles);
    ps.best = report.theta_init;
    ps.best_log_likelihood = safe_log_likelihood(model, report.theta_init.to_vector());
    ps.best_iteration = 0;
    std::fill(ps.log_likelihoods.begin(), ps.log_likelihoods.end(), ps.best_log_likelihood);

    report.best_log_likelihood_trace.reserve(cfg.n_iterations);
    for (std::size_t k = 0; k < cfg.n_iterations; ++k) {
        ps = iterate(model, ps, cfg, k);
        report.best_log_likelihood_trace.push_back(ps.best_log_likelihood);
    }
    report.iterations_run = cfg.n_iterations;
    report.theta_hat = ps.best;
    return report;
}

// Localize from groups of NLOS paths (pairs, a trailing triple when the
// count is odd), each joined with every LOS path, and average the UE.
EstimateReport estimate_subset_average(const Observation& z, const Scenario& scenario, const GapfConfig& cfg) {
    const std::size_t nl = z.paths.los_count();
    const std::size_t nn = z.paths.nlos_count();
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t g = 0; g + 1 < nn; g += 2) {
        std::vector<std::size_t> group{nl + g, nl + g + 1};
        if (nn - (g + 2) == 1) {
            group.push_back(nl + g + 2);
            g += 1;
        }
        groups.push_back(std::move(group));
    }

    EstimateReport report;
    report.seed = cfg.rng_seed;
    report.mode = Mode::NoRem;
    report.theta_hat.mode = Mode::NoRem;
    report.theta_hat.scatterers.assign(nn, Point2{});
    report.theta_init = report.theta_hat;
    Point2 ue_sum{};
    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::vector<std::size_t> indices = iota_indices(0, nl);
        indices.insert(indices.end(), groups[g].begin(), groups[g].end());
        GapfConfig sub = cfg;
        sub.rng_seed = derive_seed(cfg.rng_seed, StreamTag::Estimator, g);
        const EstimateReport part = estimate_joint(z.subset(indices), scenario, Mode::NoRem, sub);
        ue_sum = ue_sum + part.theta_hat.ue;
        for (std::size_t k = 0; k < groups[g].size(); ++k) {
            report.theta_hat.scatterers[groups[g][k] - nl] = part.theta_hat.scatterers[k];
            report.theta_init.scatterers[groups[g][k] - nl] = part.theta_init.scatterers[k];
        }
    }
    report.theta_hat.ue = (1.0 / static_cast<double>(groups.size())) * ue_sum;
    report.theta_init.ue = report.theta_hat.ue;
    report.iterations_run = cfg.n_iterations;
    return report;
}

}  // namespace

void GapfConfig::validate() const {
    if (n_particles < 1) throw ConfigError("estimator.n_particles must be >= 1");
    if (!(anneal_factor > 0.0 && anneal_factor <= 1.0)) throw ConfigError("estimator.anneal_factor must be in (0, 1]");
    if (!(grid_spacing > 0.0)) throw ConfigError("estimator.grid_spacing must be > 0");
    if (!(process_std_position >= 0.0)) throw ConfigError("estimator.process_std_position must be >= 0");
    if (!(lm_tolerance > 0.0)) throw ConfigError("estimator.lm_tolerance must be > 0");
    if (search_box && !search_box->valid()) throw ConfigError("estimator.search_box is empty");
}

Rect GapfConfig::resolve_search_box(const Scenario& scenario) const {
    if (search_box) return *search_box;
    return scenario.bounding_box().padded(kDefaultSearchPadding);
}

ParticleSet ParticleSet::uniform(const ParamVector& theta, std::size_t n) {
    ParticleSet ps;
    ps.particles.assign(n, theta);
    ps.weights.assign(n, 1.0 / static_cast<double>(n));
    ps.log_likelihoods.assign(n, -std::numeric_limits<double>::infinity());
    ps.best = theta;
    return ps;
}

Eigen::VectorXd lm_refine(const LikelihoodModel& model, const Eigen::VectorXd& theta0, const GapfConfig& cfg,
                          double* final_cost) {
    Eigen::VectorXd theta = theta0;
    Eigen::VectorXd r;
    Eigen::MatrixXd J;
    model.evaluate(theta, r, &J);
    double cost = 0.5 * r.squaredNorm();

    Eigen::VectorXd r_trial;
    Eigen::MatrixXd J_trial;
    double lambda = kLambdaInit;
    for (std::size_t iter = 0; iter < cfg.lm_max_iters; ++iter) {
        const Eigen::MatrixXd A = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        const Eigen::VectorXd scale = A.diagonal().cwiseMax(1e-9 * std::max(1.0, A.diagonal().maxCoeff()));
        bool accepted = false;
        double step_norm = 0.0;
        while (lambda <= kLambdaMax) {
            Eigen::MatrixXd damped = A;
            damped.diagonal() += lambda * scale;
            const Eigen::VectorXd delta = damped.ldlt().solve(g);
            step_norm = delta.norm();
            if (!std::isfinite(step_norm)) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd candidate = theta + delta;
            try {
                model.evaluate(candidate, r_trial, &J_trial);
            } catch (const Error&) {
                lambda *= 10.0;
                continue;
            }
            const double trial_cost = 0.5 * r_trial.squaredNorm();
            if (trial_cost < cost) {
                theta = candidate;
                r.swap(r_trial);
                J.swap(J_trial);
                cost = trial_cost;
                lambda = std::max(lambda * 0.1, 1e-12);
                accepted = true;
                break;
            }
            if (step_norm < cfg.lm_tolerance) break;
            lambda *= 10.0;
        }
        if (!accepted || step_norm < cfg.lm_tolerance) break;
    }
    if (final_cost) *final_cost = cost;
    return theta;
}

ParamVector lm_refine(const Observation& z, const ParamVector& theta0, const Scenario& scenario,
                      const GapfConfig& cfg) {
    const LikelihoodModel model(z, scenario, theta0.mode);
    if (static_cast<std::size_t>(theta0.to_vector().size()) != model.dim()) {
        throw std::invalid_argument("lm_refine: theta dimension does not match the observation");
    }
    return ParamVector::from_vector(lm_refine(model, theta0.to_vector(), cfg), theta0.mode);
}

ParamVector grid_init(const Observation& z, const PathSet& paths, const Scenario& scenario,
                      const GapfConfig& cfg, Mode mode) {
    if (!paths.sufficient()) {
        throw InsufficientPaths("need at least one LOS path or two NLOS paths (have " +
                                std::to_string(paths.los_count()) + " LOS, " + std::to_string(paths.nlos_count()) +
                                " NLOS)");
    }
    const std::vector<Point2> nodes = box_nodes(cfg.resolve_search_box(scenario), cfg.grid_spacing);
    const std::size_t nl = paths.los_count();
    const std::size_t nn = paths.nlos_count();

    if (mode == Mode::Rem) {
        const LikelihoodModel model(z, scenario, Mode::Rem);
        const NodeSearch ue = search_nodes(model, Eigen::VectorXd::Zero(2), 0, 1, nodes);
        return ParamVector{ue.best, {}, Mode::Rem};
    }

    ParamVector theta{{}, std::vector<Point2>(nn), Mode::NoRem};
    const std::vector<std::size_t> los = iota_indices(0, nl);

    if (nl > 0) {
        const LikelihoodModel los_model(z.subset(los), scenario, Mode::NoRem);
        theta.ue = search_nodes(los_model, Eigen::VectorXd::Zero(2), 0, 1, nodes).best;
        for (std::size_t j = 0; j < nn; ++j) {
            std::vector<std::size_t> indices = los;
            indices.push_back(nl + j);
            const LikelihoodModel model(z.subset(indices), scenario, Mode::NoRem);
            Eigen::VectorXd v(4);
            v << theta.ue.x, theta.ue.y, 0.0, 0.0;
            theta.scatterers[j] = search_nodes(model, v, 2, 3, nodes).best;
        }
        return theta;
    }

    // NLOS only: the pair with the smallest measured distances. The joint
    // grid over (p, s_m, s_n) separates given p, so the exhaustive product
    // grid is searched as max_p [max_sm L_m + max_sn L_n].
    std::vector<std::size_t> order = iota_indices(0, nn);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return z.dist[static_cast<Eigen::Index>(nl + a)] < z.dist[static_cast<Eigen::Index>(nl + b)];
    });
    const std::size_t m = std::min(order[0], order[1]);
    const std::size_t n = std::max(order[0], order[1]);
    const LikelihoodModel model_m(z.subset({m}), scenario, Mode::NoRem);
    const LikelihoodModel model_n(z.subset({n}), scenario, Mode::NoRem);
    double best_total = -std::numeric_limits<double>::infinity();
    for (const Point2& p : nodes) {
        Eigen::VectorXd v(4);
        v << p.x, p.y, 0.0, 0.0;
        const NodeSearch sm = search_nodes(model_m, v, 2, 3, nodes);
        const NodeSearch sn = search_nodes(model_n, v, 2, 3, nodes);
        const double total = sm.log_likelihood + sn.log_likelihood;
        if (total > best_total) {
            best_total = total;
            theta.ue = p;
            theta.scatterers[m] = sm.best;
            theta.scatterers[n] = sn.best;
        }
    }
    for (std::size_t j = 0; j < nn; ++j) {
        if (j == m || j == n) continue;
        const LikelihoodModel model(z.subset({j}), scenario, Mode::NoRem);
        Eigen::VectorXd v(4);
        v << theta.ue.x, theta.ue.y, 0.0, 0.0;
        theta.scatterers[j] = search_nodes(model, v, 2, 3, nodes).best;
    }
    return theta;
}

ParticleSet resample_systematic(const ParticleSet& ps, Rng& rng) {
    const std::size_t n = ps.particles.size();
    ParticleSet out;
    out.particles.reserve(n);
    out.log_likelihoods.reserve(n);
    out.weights.assign(n, 1.0 / static_cast<double>(n));
    out.best = ps.best;
    out.best_log_likelihood = ps.best_log_likelihood;
    out.best_iteration = ps.best_iteration;

    std::uniform_real_distribution<double> uniform(0.0, 1.0 / static_cast<double>(n));
    const double u0 = uniform(rng);
    double cumulative = ps.weights[0];
    std::size_t i = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double u = u0 + static_cast<double>(k) / static_cast<double>(n);
        while (u > cumulative && i + 1 < n) cumulative += ps.weights[++i];
        out.particles.push_back(ps.particles[i]);
        out.log_likelihoods.push_back(ps.log_likelihoods[i]);
    }
    return out;
}

ParticleSet gapf_iterate(const ParticleSet& ps, const Observation& z, const Scenario& scenario,
                         const GapfConfig& cfg, std::size_t iteration_index) {
    const Mode mode = ps.particles.empty() ? Mode::NoRem : ps.particles.front().mode;
    const LikelihoodModel model(z, scenario, mode);
    return iterate(model, ps, cfg, iteration_index);
}

EstimateReport estimate(const Observation& z, const Scenario& scenario, Mode mode, const GapfConfig& cfg) {
    cfg.validate();
    if (!z.paths.sufficient()) {
        throw InsufficientPaths("need at least one LOS path or two NLOS paths");
    }
    EstimateReport report;
    if (cfg.strategy == Strategy::SubsetAverage && mode == Mode::NoRem && z.paths.nlos_count() >= 2) {
        report = estimate_subset_average(z, scenario, cfg);
    } else {
        report = estimate_joint(z, scenario, mode, cfg);
    }
    const std::size_t expected_dim = mode == Mode::Rem ? 2 : 2 + 2 * z.paths.nlos_count();
    if (report.theta_hat.dim() != expected_dim) {
        throw std::logic_error("estimate: parameter dimension mismatch");
    }
    report.log_likelihood = log_likelihood(z, report.theta_hat, scenario);
    return report;
}

}  // namespace mmwloc
