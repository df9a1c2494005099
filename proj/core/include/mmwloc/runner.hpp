#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmwloc/config.hpp"

namespace mmwloc {

inline constexpr int kSummarySchemaVersion = 1;

/// Exit codes of run().
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitExperiment = 3,
    kExitInternal = 4,
};

const std::vector<std::string>& subcommands();

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> output_dir;
    unsigned workers{0};
};

/// Runs one experiment on a parsed config, writes its CSV files and
/// summary.json into cfg.output_dir and returns the summary.
nlohmann::json run_experiment(const std::string& subcommand, const RunConfig& cfg, unsigned workers = 0);

/// Loads, validates and runs. On failure writes error.json (when the output
/// directory is known), prints the same record to stderr and returns a
/// nonzero exit code.
int run(const std::string& subcommand, const std::filesystem::path& config_path, const RunOverrides& overrides = {});

/// Machine-readable failure record.
nlohmann::json error_record(const std::string& kind, const std::string& message, const std::string& subcommand);

}  // namespace mmwloc
