#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmwloc/bounds.hpp"
#include "mmwloc/estimator.hpp"

namespace mmwloc {

struct McOptions {
    std::optional<std::vector<std::size_t>> path_subset;  ///< indices into enumerate_paths(scenario, ue)
    double noise_scale{1.0};
    unsigned workers{0};
};

struct McTrial {
    std::size_t index{};
    bool ok{false};
    Point2 estimate;
    std::string error;
};

struct McResult {
    double rmse_est{};
    double rmse_crb{};
    std::size_t n_trials{};
    std::size_t failures{};
    std::uint64_t seed{};
    Point2 truth;
    std::vector<McTrial> trials;
};

/// sqrt(sum_i |p - p_hat_i|^2 / N) over the given estimates.
double rmse_from_estimates(Point2 truth, const std::vector<Point2>& estimates);

/// Independent synthesize -> estimate trials at one UE position.
/// Throws AllTrialsFailed if no trial succeeds.
McResult mc_rmse(const Scenario& scenario, Point2 ue, Mode mode, const GapfConfig& cfg, std::size_t n_trials,
                 std::uint64_t seed, const McOptions& options = {});

struct PathSubset {
    std::string id;                    ///< e.g. "LOS+NLOS1"
    std::vector<std::size_t> indices;  ///< into the full path set
};

/// Every sufficient subset of `paths`, smallest first.
std::vector<PathSubset> sufficient_subsets(const PathSet& paths);

struct SweepCurve {
    std::string subset_id;
    Mode mode{Mode::NoRem};
    std::string kind;               ///< "crb", "mc" or "range_only"
    std::vector<double> rmse;       ///< one per sigma, NaN on failure

    std::string id() const;
};

struct SweepResult {
    std::vector<double> sigma_angle_values;  ///< radians
    double sigma_d{};
    std::vector<SweepCurve> curves;
};

struct SweepOptions {
    double sigma_d{0.75};
    bool monte_carlo{false};
    std::size_t n_trials{500};
    std::uint64_t seed{0};
    unsigned workers{0};
    bool range_only_reference{true};  ///< add Rem distance-only bound curves
};

/// Bound (and optionally Monte-Carlo) curves versus tied angular deviation.
SweepResult beamwidth_sweep(const Scenario& scenario, Point2 ue, const std::vector<double>& sigma_angle_rad,
                            const std::vector<PathSubset>& subsets, const std::vector<Mode>& modes,
                            const GapfConfig& cfg, const SweepOptions& options = {});

struct CdfCurve {
    std::string profile_label;
    Mode mode{Mode::NoRem};
    std::vector<double> rmse;         ///< sorted ascending
    std::vector<double> probability;  ///< (i+1)/n

    std::string id() const;
    double median() const;
    /// Empirical CDF F(r) = #{rmse <= r} / n.
    double cdf(double r) const;
};

CdfCurve make_cdf(std::vector<double> values, std::string profile_label, Mode mode);

/// Empirical CDF of the bound over the grid for every (profile, mode) pair.
std::vector<CdfCurve> cdf_curve(const Scenario& scenario, const GridSpec& grid,
                                const std::vector<NoiseProfile>& profiles, const std::vector<Mode>& modes,
                                unsigned workers = 0);

/// True when F_a(r) >= F_b(r) at every value of either sample.
bool cdf_dominates(const CdfCurve& a, const CdfCurve& b);

/// RMSE_NoREM - RMSE_REM over the grid.
Field delta_field(const Scenario& scenario, const GridSpec& grid, const NoiseProfile& profile,
                  unsigned workers = 0);

struct RemMapEntry {
    Point2 scatterer;
    Point2 ue_true;
    Point2 ue_estimate;
    std::size_t trajectory_index{};
    std::size_t path_index{};
    std::size_t fe_index{};
    std::size_t wall_index{};
    double alpha{};
    double beta{};
    double d{};
};

struct RemMap {
    std::vector<RemMapEntry> entries;
    std::vector<std::pair<std::size_t, std::string>> failures;  ///< trajectory index, reason
};

/// NoRem estimates along a trajectory; every estimated scatterer is stored
/// with the measured (alpha', beta', d') of its path.
RemMap build_rem_map(const Scenario& scenario, const std::vector<Point2>& trajectory, const GapfConfig& cfg,
                     std::uint64_t seed, unsigned workers = 0);

}  // namespace mmwloc
