#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "mmwloc/likelihood.hpp"
#include "mmwloc/rng.hpp"

namespace mmwloc {

enum class Strategy {
    Joint,          ///< all paths in one parameter vector (default)
    SubsetAverage,  ///< localize from groups of NLOS paths, average the UE
};

struct GapfConfig {
    std::size_t n_particles{50};
    std::size_t n_iterations{20};
    double process_std_position{2.0};  ///< meters, sqrt of each diagonal entry of Q
    double anneal_factor{0.9};         ///< per-iteration multiplier on the process std
    std::size_t lm_max_iters{50};
    double lm_tolerance{1e-7};         ///< meters, step-norm stopping rule
    double grid_spacing{1.0};          ///< meters
    std::optional<Rect> search_box;    ///< default: scenario bounding box padded 5 m
    std::uint64_t rng_seed{0};
    Strategy strategy{Strategy::Joint};

    void validate() const;
    Rect resolve_search_box(const Scenario& scenario) const;
};

struct ParticleSet {
    std::vector<ParamVector> particles;
    std::vector<double> weights;
    std::vector<double> log_likelihoods;
    ParamVector best;
    double best_log_likelihood{-std::numeric_limits<double>::infinity()};
    std::size_t best_iteration{};

    /// n copies of `theta` with uniform weights.
    static ParticleSet uniform(const ParamVector& theta, std::size_t n);
};

struct EstimateReport {
    ParamVector theta_hat;
    double log_likelihood{};
    std::size_t iterations_run{};
    std::uint64_t seed{};
    Mode mode{Mode::NoRem};
    ParamVector theta_init;
    std::vector<double> best_log_likelihood_trace;  ///< running best after each iteration
};

/// Damped Gauss-Newton (Levenberg-Marquardt) ascent of the log-likelihood
/// from theta0. Never returns a point worse than theta0.
ParamVector lm_refine(const Observation& z, const ParamVector& theta0, const Scenario& scenario,
                      const GapfConfig& cfg);

/// Same, on a prebuilt model and flat vector. Returns the refined vector;
/// `final_cost` receives 1/2 |whitened residual|^2 at the result.
Eigen::VectorXd lm_refine(const LikelihoodModel& model, const Eigen::VectorXd& theta0, const GapfConfig& cfg,
                          double* final_cost = nullptr);

/// Staged grid initialization. Rem mode searches the UE over all paths in
/// one 2-D grid.
ParamVector grid_init(const Observation& z, const PathSet& paths, const Scenario& scenario,
                      const GapfConfig& cfg, Mode mode = Mode::NoRem);

/// Systematic resampling; output weights are uniform.
ParticleSet resample_systematic(const ParticleSet& ps, Rng& rng);

/// One iteration of the gradient-assisted particle filter (0-based index).
ParticleSet gapf_iterate(const ParticleSet& ps, const Observation& z, const Scenario& scenario,
                         const GapfConfig& cfg, std::size_t iteration_index);

/// Maximum-likelihood estimate: grid_init followed by cfg.n_iterations of
/// gapf_iterate, returning the best particle seen.
EstimateReport estimate(const Observation& z, const Scenario& scenario, Mode mode, const GapfConfig& cfg);

}  // namespace mmwloc
