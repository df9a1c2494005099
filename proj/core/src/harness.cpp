#include "mmwloc/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "mmwloc/errors.hpp"
#include "mmwloc/parallel.hpp"

namespace mmwloc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double crb_or_nan(Point2 ue, const PathSet& paths, const Scenario& scenario, const NoiseProfile& profile, Mode mode) {
    try {
        return rmse_crb(ue, paths, scenario, profile, mode);
    } catch (const Error&) {
        return kNaN;
    }
}

}  // namespace

double rmse_from_estimates(Point2 truth, const std::vector<Point2>& estimates) {
    const auto n = static_cast<double>(estimates.size());
    double sum = 0.0;
    for (const Point2& e : estimates) {
        const double dx = truth.x - e.x;
        const double dy = truth.y - e.y;
        sum += dx * dx / n + dy * dy / n;
    }
    return std::sqrt(sum);
}

McResult mc_rmse(const Scenario& scenario, Point2 ue, Mode mode, const GapfConfig& cfg, std::size_t n_trials,
                 std::uint64_t seed, const McOptions& options) {
    const PathSet all = enumerate_paths(scenario, ue);
    const PathSet paths = options.path_subset ? all.subset(*options.path_subset) : all;
    if (!paths.sufficient()) throw InsufficientPaths("Monte-Carlo path set fails the sufficiency condition");
    const ParamVector truth = ParamVector::truth(ue, paths, Mode::NoRem);

    McResult result;
    result.seed = seed;
    result.truth = ue;
    result.n_trials = n_trials;
    result.rmse_crb = crb_or_nan(ue, paths, scenario, scenario.noise, mode);
    result.trials.resize(n_trials);

    parallel_for(n_trials, options.workers, [&](std::size_t t) {
        McTrial& trial = result.trials[t];
        trial.index = t;
        const std::uint64_t trial_seed = derive_seed(seed, StreamTag::Trial, t);
        try {
            const Observation z = synthesize(truth, paths, scenario, trial_seed, options.noise_scale);
            GapfConfig trial_cfg = cfg;
            trial_cfg.rng_seed = derive_seed(trial_seed, StreamTag::Estimator, 0);
            trial.estimate = estimate(z, scenario, mode, trial_cfg).theta_hat.ue;
            trial.ok = true;
        } catch (const Error& e) {
            trial.error = e.kind() + ": " + e.what();
        }
    });

    std::vector<Point2> estimates;
    estimates.reserve(n_trials);
    for (const McTrial& t : result.trials) {
        if (t.ok) {
            estimates.push_back(t.estimate);
        } else {
            ++result.failures;
        }
    }
    if (estimates.empty()) throw AllTrialsFailed("all " + std::to_string(n_trials) + " Monte-Carlo trials failed");
    result.rmse_est = rmse_from_estimates(ue, estimates);
    return result;
}

std::vector<PathSubset> sufficient_subsets(const PathSet& paths) {
    const std::size_t n = paths.size();
    if (n >= 20) throw std::invalid_argument("sufficient_subsets: too many paths to enumerate");
    std::vector<PathSubset> out;
    for (std::size_t size = 1; size <= n; ++size) {
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            if (static_cast<std::size_t>(std::popcount(mask)) != size) continue;
            PathSubset subset;
            std::size_t n_los = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!(mask & (1u << i))) continue;
                subset.indices.push_back(i);
                if (paths[i].is_los()) ++n_los;
                if (!subset.id.empty()) subset.id += "+";
                subset.id += paths.label(i);
            }
            if (n_los >= 1 || subset.indices.size() - n_los >= 2) out.push_back(std::move(subset));
        }
    }
    return out;
}

std::string SweepCurve::id() const { return to_string(mode) + ":" + subset_id + ":" + kind; }

SweepResult beamwidth_sweep(const Scenario& scenario, Point2 ue, const std::vector<double>& sigma_angle_rad,
                            const std::vector<PathSubset>& subsets, const std::vector<Mode>& modes,
                            const GapfConfig& cfg, const SweepOptions& options) {
    const PathSet all = enumerate_paths(scenario, ue);
    SweepResult result;
    result.sigma_angle_values = sigma_angle_rad;
    result.sigma_d = options.sigma_d;
    const std::size_t ns = sigma_angle_rad.size();

    for (const PathSubset& subset : subsets) {
        const PathSet paths = all.subset(subset.indices);
        for (Mode mode : modes) {
            SweepCurve curve{subset.id, mode, "crb", std::vector<double>(ns, kNaN)};
            for (std::size_t k = 0; k < ns; ++k) {
                const NoiseProfile profile = NoiseProfile::tied(sigma_angle_rad[k], options.sigma_d);
                curve.rmse[k] = crb_or_nan(ue, paths, scenario, profile, mode);
            }
            result.curves.push_back(std::move(curve));
        }
        if (options.range_only_reference) {
            SweepCurve curve{subset.id, Mode::Rem, "range_only", std::vector<double>(ns, kNaN)};
            double bound = kNaN;
            try {
                bound = rmse_crb_range_only(ue, paths, scenario, NoiseProfile::tied(1.0, options.sigma_d));
            } catch (const Error&) {
            }
            std::fill(curve.rmse.begin(), curve.rmse.end(), bound);
            result.curves.push_back(std::move(curve));
        }
    }

    if (options.monte_carlo) {
        std::size_t cell = 0;
        for (const PathSubset& subset : subsets) {
            for (Mode mode : modes) {
                SweepCurve curve{subset.id, mode, "mc", std::vector<double>(ns, kNaN)};
                for (std::size_t k = 0; k < ns; ++k, ++cell) {
                    const Scenario scen =
                        scenario.with_noise(NoiseProfile::tied(sigma_angle_rad[k], options.sigma_d));
                    McOptions mc;
                    mc.path_subset = subset.indices;
                    mc.workers = options.workers;
                    try {
                        curve.rmse[k] = mc_rmse(scen, ue, mode, cfg, options.n_trials,
                                                derive_seed(options.seed, StreamTag::Sweep, cell), mc)
                                            .rmse_est;
                    } catch (const Error&) {
                    }
                }
                result.curves.push_back(std::move(curve));
            }
        }
    }
    return result;
}

std::string CdfCurve::id() const { return profile_label + ":" + to_string(mode); }

double CdfCurve::median() const {
    if (rmse.empty()) return kNaN;
    const std::size_t n = rmse.size();
    return n % 2 == 1 ? rmse[n / 2] : 0.5 * (rmse[n / 2 - 1] + rmse[n / 2]);
}

double CdfCurve::cdf(double r) const {
    if (rmse.empty()) return kNaN;
    const auto it = std::upper_bound(rmse.begin(), rmse.end(), r);
    return static_cast<double>(it - rmse.begin()) / static_cast<double>(rmse.size());
}

CdfCurve make_cdf(std::vector<double> values, std::string profile_label, Mode mode) {
    std::erase_if(values, [](double v) { return !std::isfinite(v); });
    std::sort(values.begin(), values.end());
    CdfCurve curve{std::move(profile_label), mode, std::move(values), {}};
    const auto n = static_cast<double>(curve.rmse.size());
    curve.probability.reserve(curve.rmse.size());
    for (std::size_t i = 0; i < curve.rmse.size(); ++i) curve.probability.push_back(static_cast<double>(i + 1) / n);
    return curve;
}

std::vector<CdfCurve> cdf_curve(const Scenario& scenario, const GridSpec& grid,
                                const std::vector<NoiseProfile>& profiles, const std::vector<Mode>& modes,
                                unsigned workers) {
    std::vector<CdfCurve> curves;
    for (const NoiseProfile& profile : profiles) {
        for (Mode mode : modes) {
            const Field field = crb_grid(scenario, grid, profile, mode, workers);
            curves.push_back(make_cdf(field.values, profile.label, mode));
        }
    }
    return curves;
}

bool cdf_dominates(const CdfCurve& a, const CdfCurve& b) {
    auto check = [&](const std::vector<double>& points) {
        return std::all_of(points.begin(), points.end(), [&](double r) { return a.cdf(r) >= b.cdf(r); });
    };
    return check(a.rmse) && check(b.rmse);
}

Field delta_field(const Scenario& scenario, const GridSpec& grid, const NoiseProfile& profile, unsigned workers) {
    const Field norem = crb_grid(scenario, grid, profile, Mode::NoRem, workers);
    const Field rem = crb_grid(scenario, grid, profile, Mode::Rem, workers);
    Field delta;
    delta.nodes = norem.nodes;
    delta.values.resize(norem.values.size());
    for (std::size_t i = 0; i < delta.values.size(); ++i) delta.values[i] = norem.values[i] - rem.values[i];
    return delta;
}

RemMap build_rem_map(const Scenario& scenario, const std::vector<Point2>& trajectory, const GapfConfig& cfg,
                     std::uint64_t seed, unsigned workers) {
    std::vector<std::vector<RemMapEntry>> per_point(trajectory.size());
    std::vector<std::string> errors(trajectory.size());
    parallel_for(trajectory.size(), workers, [&](std::size_t t) {
        const Point2 ue = trajectory[t];
        try {
            const PathSet paths = enumerate_paths(scenario, ue);
            if (!paths.sufficient()) throw InsufficientPaths("trajectory point fails the sufficiency condition");
            const std::uint64_t point_seed = derive_seed(seed, StreamTag::Trajectory, t);
            const Observation z = synthesize(ParamVector::truth(ue, paths, Mode::NoRem), paths, scenario, point_seed);
            GapfConfig point_cfg = cfg;
            point_cfg.rng_seed = derive_seed(point_seed, StreamTag::Estimator, 0);
            const EstimateReport report = estimate(z, scenario, Mode::NoRem, point_cfg);
            for (std::size_t j = paths.los_count(); j < paths.size(); ++j) {
                const auto& path = paths[j];
                const auto idx = static_cast<Eigen::Index>(j);
                per_point[t].push_back(RemMapEntry{report.theta_hat.scatterers[*path.scatterer_index], ue,
                                                   report.theta_hat.ue, t, j, path.fe_index,
                                                   path.wall_index.value_or(0), z.alpha[idx], z.beta[idx],
                                                   z.dist[idx]});
            }
        } catch (const Error& e) {
            errors[t] = e.kind() + ": " + e.what();
        }
    });
    RemMap map;
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
        if (!errors[t].empty()) map.failures.emplace_back(t, errors[t]);
        map.entries.insert(map.entries.end(), per_point[t].begin(), per_point[t].end());
    }
    return map;
}

}  // namespace mmwloc
