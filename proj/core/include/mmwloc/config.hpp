#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmwloc/estimator.hpp"

namespace mmwloc {

/// Subcommand-specific settings. Only the fields used by the selected
/// experiment are read; the rest keep their defaults.
struct ExperimentConfig {
    std::optional<Point2> ue;             ///< default: example UE of the preset
    bool noiseless{false};                ///< estimate, mc
    std::size_t n_trials{500};            ///< mc, sweep with monte_carlo
    std::vector<double> sigma_deg{1, 3, 6, 9, 20, 40};  ///< sweep
    double sigma_d{0.75};                 ///< sweep, meters
    std::vector<std::string> subsets;     ///< sweep; empty = every sufficient subset
    bool monte_carlo{false};              ///< sweep
    bool range_only_reference{true};      ///< sweep
    std::vector<NoiseProfile> profiles;   ///< cdf; empty = 28GHz and 73GHz
    double spacing{1.0};                  ///< cdf, field
    double margin{0.5};                   ///< cdf, field
    std::vector<Point2> trajectory;       ///< remmap; empty = preset trajectory
};

struct RunConfig {
    Scenario scenario;
    bool scenario_is_preset{false};
    NoiseProfile profile;
    std::vector<Mode> modes{Mode::Rem, Mode::NoRem};
    GapfConfig estimator;
    ExperimentConfig experiment;
    std::filesystem::path output_dir{"out"};
    std::uint64_t seed{0};

    /// Example UE from the config, else the preset's, else the region center.
    Point2 resolved_ue() const;
    std::vector<Point2> resolved_trajectory() const;
    std::vector<NoiseProfile> resolved_profiles() const;

    /// Fully expanded form: presets replaced by their contents, every
    /// default written out. Parsing it again yields the same RunConfig.
    nlohmann::json to_json() const;
};

/// Every violated invariant, one human-readable line each. An empty list
/// means the document parses into a usable RunConfig.
std::vector<std::string> validate_config(const nlohmann::json& doc);

/// Throws ConfigError listing every violation.
RunConfig parse_config(const nlohmann::json& doc);

/// Reads a JSON file. Throws ConfigError on I/O or syntax errors.
nlohmann::json read_config_file(const std::filesystem::path& path);

}  // namespace mmwloc
