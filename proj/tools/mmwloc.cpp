// Command-line entry point: one subcommand per experiment family, plus
// `validate` which only checks a config file.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mmwloc/config.hpp"
#include "mmwloc/errors.hpp"
#include "mmwloc/runner.hpp"

namespace {

int validate(const std::string& path) {
    nlohmann::json report;
    report["schema_version"] = mmwloc::kSummarySchemaVersion;
    report["config"] = path;
    nlohmann::json doc;
    try {
        doc = mmwloc::read_config_file(path);
    } catch (const mmwloc::ConfigError& e) {
        std::cerr << mmwloc::error_record(e.kind(), e.what(), "validate").dump() << '\n';
        return mmwloc::kExitConfig;
    }
    const auto issues = mmwloc::validate_config(doc);
    report["valid"] = issues.empty();
    report["issues"] = issues;
    std::cout << report.dump(2) << '\n';
    return issues.empty() ? mmwloc::kExitOk : mmwloc::kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mmWave multipath localization experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    unsigned workers = 0;

    for (const auto& name : mmwloc::subcommands()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("-c,--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "overrides the config seed");
        sub->add_option("-o,--output-dir", output_dir, "overrides the config output_dir");
        sub->add_option("-w,--workers", workers, "worker threads (0 = all cores)");
    }
    auto* val = app.add_subcommand("validate", "check a config file without running anything");
    val->add_option("-c,--config", config_path, "JSON config file")->required();

    CLI11_PARSE(app, argc, argv);

    auto* chosen = app.get_subcommands().front();
    if (chosen == val) return validate(config_path);

    mmwloc::RunOverrides overrides;
    overrides.seed = seed;
    if (output_dir) overrides.output_dir = *output_dir;
    overrides.workers = workers;
    return mmwloc::run(chosen->get_name(), config_path, overrides);
}
