#include "mmwloc/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include "mmwloc/csv.hpp"
#include "mmwloc/errors.hpp"
#include "mmwloc/harness.hpp"

namespace mmwloc {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json point_json(Point2 p) { return json::array({p.x, p.y}); }

/// Median of the finite values (NaN if none); sorted copy, mean of the two
/// middle values for even counts.
double finite_median(const std::vector<double>& values) {
    std::vector<double> v;
    for (double x : values) {
        if (std::isfinite(x)) v.push_back(x);
    }
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json finite_stats(const std::vector<double>& values) {
    std::size_t n = 0;
    double lo = INFINITY;
    double hi = -INFINITY;
    for (double x : values) {
        if (!std::isfinite(x)) continue;
        ++n;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    json j;
    j["n"] = values.size();
    j["n_finite"] = n;
    j["min"] = n ? json(lo) : json(nullptr);
    j["max"] = n ? json(hi) : json(nullptr);
    j["median"] = n ? json(finite_median(values)) : json(nullptr);
    return j;
}

std::uint64_t trial_seed(std::uint64_t seed) { return derive_seed(seed, StreamTag::Trial, 0); }

json run_estimate(const RunConfig& cfg, json& files) {
    const fs::path file = cfg.output_dir / "estimate.csv";
    CsvWriter csv(file, {"mode", "parameter", "truth", "estimate"});
    const Point2 ue = cfg.resolved_ue();
    const PathSet paths = enumerate_paths(cfg.scenario, ue);
    const std::uint64_t synth_seed = trial_seed(cfg.seed);
    const Observation z = synthesize(ParamVector::truth(ue, paths, Mode::NoRem), paths, cfg.scenario, synth_seed,
                                     cfg.experiment.noiseless ? 0.0 : 1.0);
    json results = json::object();
    for (Mode mode : cfg.modes) {
        GapfConfig est = cfg.estimator;
        est.rng_seed = derive_seed(synth_seed, StreamTag::Estimator, 0);
        const EstimateReport rep = estimate(z, cfg.scenario, mode, est);
        const ParamVector truth = ParamVector::truth(ue, paths, mode);
        const std::string m = to_string(mode);
        csv.row(m, "ue_x", truth.ue.x, rep.theta_hat.ue.x);
        csv.row(m, "ue_y", truth.ue.y, rep.theta_hat.ue.y);
        double max_scatterer_error = 0.0;
        for (std::size_t i = 0; i < truth.scatterers.size(); ++i) {
            const std::string name = "s" + std::to_string(i + 1);
            csv.row(m, name + "_x", truth.scatterers[i].x, rep.theta_hat.scatterers[i].x);
            csv.row(m, name + "_y", truth.scatterers[i].y, rep.theta_hat.scatterers[i].y);
            max_scatterer_error = std::max(max_scatterer_error, distance(truth.scatterers[i], rep.theta_hat.scatterers[i]));
        }
        json r;
        r["rmse"] = rmse_from_estimates(truth.ue, {rep.theta_hat.ue});
        r["ue_estimate"] = point_json(rep.theta_hat.ue);
        r["max_scatterer_error"] = max_scatterer_error;
        r["log_likelihood"] = rep.log_likelihood;
        r["iterations_run"] = rep.iterations_run;
        r["estimator_seed"] = rep.seed;
        results[m] = r;
    }
    csv.close();
    files.push_back(file.filename().string());
    json out;
    out["synthesis_seed"] = synth_seed;
    out["ue_true"] = point_json(ue);
    out["n_paths"] = paths.size();
    out["modes"] = results;
    return out;
}

json run_mc(const RunConfig& cfg, unsigned workers, json& files) {
    const fs::path file = cfg.output_dir / "mc.csv";
    CsvWriter csv(file, {"mode", "trial", "ok", "ue_x", "ue_y"});
    const Point2 ue = cfg.resolved_ue();
    McOptions opts;
    opts.noise_scale = cfg.experiment.noiseless ? 0.0 : 1.0;
    opts.workers = workers;
    json results = json::object();
    for (Mode mode : cfg.modes) {
        const McResult mc = mc_rmse(cfg.scenario, ue, mode, cfg.estimator, cfg.experiment.n_trials, cfg.seed, opts);
        const std::string m = to_string(mode);
        for (const McTrial& t : mc.trials) {
            csv.row(m, t.index, t.ok ? 1 : 0, t.ok ? t.estimate.x : std::nan(""), t.ok ? t.estimate.y : std::nan(""));
        }
        json r;
        r["rmse_est"] = mc.rmse_est;
        r["rmse_crb"] = std::isfinite(mc.rmse_crb) ? json(mc.rmse_crb) : json(nullptr);
        r["n_trials"] = mc.n_trials;
        r["failures"] = mc.failures;
        results[m] = r;
    }
    csv.close();
    files.push_back(file.filename().string());
    json out;
    out["ue_true"] = point_json(ue);
    out["modes"] = results;
    return out;
}

json run_sweep(const RunConfig& cfg, unsigned workers, json& files) {
    const Point2 ue = cfg.resolved_ue();
    const PathSet all = enumerate_paths(cfg.scenario, ue);
    std::vector<PathSubset> subsets = sufficient_subsets(all);
    if (!cfg.experiment.subsets.empty()) {
        std::vector<PathSubset> chosen;
        for (const auto& id : cfg.experiment.subsets) {
            auto it = std::find_if(subsets.begin(), subsets.end(), [&](const PathSubset& s) { return s.id == id; });
            if (it == subsets.end()) throw ConfigError("experiment.subsets: '" + id + "' is not a sufficient subset");
            chosen.push_back(*it);
        }
        subsets = chosen;
    }
    std::vector<double> sigma_rad;
    for (double deg : cfg.experiment.sigma_deg) sigma_rad.push_back(deg2rad(deg));
    SweepOptions opts;
    opts.sigma_d = cfg.experiment.sigma_d;
    opts.monte_carlo = cfg.experiment.monte_carlo;
    opts.n_trials = cfg.experiment.n_trials;
    opts.seed = cfg.seed;
    opts.workers = workers;
    opts.range_only_reference = cfg.experiment.range_only_reference;
    const SweepResult sweep = beamwidth_sweep(cfg.scenario, ue, sigma_rad, subsets, cfg.modes, cfg.estimator, opts);

    const fs::path file = cfg.output_dir / "sweep.csv";
    CsvWriter csv(file, {"sigma_deg", "curve", "rmse"});
    json curves = json::object();
    for (const SweepCurve& c : sweep.curves) {
        for (std::size_t i = 0; i < c.rmse.size(); ++i) csv.row(cfg.experiment.sigma_deg[i], c.id(), c.rmse[i]);
        curves[c.id()] = finite_stats(c.rmse);
    }
    csv.close();
    files.push_back(file.filename().string());
    json out;
    out["ue_true"] = point_json(ue);
    out["subsets"] = json::array();
    for (const auto& s : subsets) out["subsets"].push_back(s.id);
    out["curves"] = curves;
    return out;
}

json run_cdf(const RunConfig& cfg, unsigned workers, json& files) {
    const GridSpec grid{cfg.scenario.region, cfg.experiment.spacing, cfg.experiment.margin};
    const auto curves = cdf_curve(cfg.scenario, grid, cfg.resolved_profiles(), cfg.modes, workers);
    const fs::path file = cfg.output_dir / "cdf.csv";
    CsvWriter csv(file, {"curve", "rmse", "prob"});
    json stats = json::object();
    for (const CdfCurve& c : curves) {
        for (std::size_t i = 0; i < c.rmse.size(); ++i) csv.row(c.id(), c.rmse[i], c.probability[i]);
        json s;
        s["n"] = c.rmse.size();
        s["median"] = c.rmse.empty() ? json(nullptr) : json(c.median());
        stats[c.id()] = s;
    }
    csv.close();
    files.push_back(file.filename().string());
    json out;
    out["grid_nodes"] = grid_nodes(cfg.scenario, grid).size();
    out["curves"] = stats;
    return out;
}

void write_field(const fs::path& file, const Field& f) {
    CsvWriter csv(file, {"x", "y", "value"});
    for (std::size_t i = 0; i < f.nodes.size(); ++i) csv.row(f.nodes[i].x, f.nodes[i].y, f.values[i]);
    csv.close();
}

json run_field(const RunConfig& cfg, unsigned workers, json& files) {
    const GridSpec grid{cfg.scenario.region, cfg.experiment.spacing, cfg.experiment.margin};
    json fields = json::object();
    for (Mode mode : cfg.modes) {
        const Field f = crb_grid(cfg.scenario, grid, cfg.profile, mode, workers);
        const std::string name = "field_" + to_string(mode) + ".csv";
        write_field(cfg.output_dir / name, f);
        files.push_back(name);
        fields[to_string(mode)] = finite_stats(f.values);
    }
    if (cfg.modes.size() == 2) {
        const Field d = delta_field(cfg.scenario, grid, cfg.profile, workers);
        write_field(cfg.output_dir / "field_delta.csv", d);
        files.push_back("field_delta.csv");
        fields["delta"] = finite_stats(d.values);
    }
    json out;
    out["fields"] = fields;
    return out;
}

json run_remmap(const RunConfig& cfg, unsigned workers, json& files) {
    const auto traj = cfg.resolved_trajectory();
    const RemMap map = build_rem_map(cfg.scenario, traj, cfg.estimator, cfg.seed, workers);
    const fs::path file = cfg.output_dir / "remmap.csv";
    CsvWriter csv(file, {"x", "y", "ue_x", "ue_y", "alpha", "beta", "d", "trajectory_index", "fe", "wall",
                         "ue_true_x", "ue_true_y"});
    double sum = 0.0;
    for (const RemMapEntry& e : map.entries) {
        csv.row(e.scatterer.x, e.scatterer.y, e.ue_estimate.x, e.ue_estimate.y, e.alpha, e.beta, e.d,
                e.trajectory_index, e.fe_index, e.wall_index, e.ue_true.x, e.ue_true.y);
        sum += std::abs(cfg.scenario.walls[e.wall_index].signed_distance(e.scatterer));
    }
    csv.close();
    files.push_back(file.filename().string());
    json out;
    out["trajectory_points"] = traj.size();
    out["entries"] = map.entries.size();
    out["failures"] = json::array();
    for (const auto& [index, reason] : map.failures) out["failures"].push_back({{"trajectory_index", index}, {"reason", reason}});
    out["mean_wall_distance"] = map.entries.empty() ? json(nullptr) : json(sum / static_cast<double>(map.entries.size()));
    return out;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"estimate", "mc", "sweep", "cdf", "field", "remmap"};
    return names;
}

nlohmann::json run_experiment(const std::string& subcommand, const RunConfig& cfg, unsigned workers) {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec || !fs::is_directory(cfg.output_dir)) {
        throw ConfigError("output_dir '" + cfg.output_dir.string() + "' cannot be created");
    }
    json files = json::array();
    json results;
    if (subcommand == "estimate") {
        results = run_estimate(cfg, files);
    } else if (subcommand == "mc") {
        results = run_mc(cfg, workers, files);
    } else if (subcommand == "sweep") {
        results = run_sweep(cfg, workers, files);
    } else if (subcommand == "cdf") {
        results = run_cdf(cfg, workers, files);
    } else if (subcommand == "field") {
        results = run_field(cfg, workers, files);
    } else if (subcommand == "remmap") {
        results = run_remmap(cfg, workers, files);
    } else {
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    }
    json summary;
    summary["schema_version"] = kSummarySchemaVersion;
    summary["status"] = "ok";
    summary["subcommand"] = subcommand;
    summary["seed"] = cfg.seed;
    summary["config"] = cfg.to_json();
    summary["results"] = results;
    files.push_back("summary.json");
    summary["files"] = files;
    write_json(cfg.output_dir / "summary.json", summary);
    return summary;
}

nlohmann::json error_record(const std::string& kind, const std::string& message, const std::string& subcommand) {
    json j;
    j["schema_version"] = kSummarySchemaVersion;
    j["status"] = "error";
    j["subcommand"] = subcommand;
    j["kind"] = kind;
    j["message"] = message;
    return j;
}

int run(const std::string& subcommand, const fs::path& config_path, const RunOverrides& overrides) {
    std::optional<fs::path> output_dir = overrides.output_dir;
    auto fail = [&](int code, json record) {
        if (output_dir) {
            std::error_code ec;
            fs::create_directories(*output_dir, ec);
            try {
                write_json(*output_dir / "error.json", record);
            } catch (const std::exception&) {
            }
        }
        std::cerr << record.dump() << '\n';
        return code;
    };
    try {
        json doc = read_config_file(config_path);
        if (overrides.seed && doc.is_object()) doc["seed"] = *overrides.seed;
        if (overrides.output_dir && doc.is_object()) doc["output_dir"] = overrides.output_dir->string();
        RunConfig cfg = parse_config(doc);
        output_dir = cfg.output_dir;
        run_experiment(subcommand, cfg, overrides.workers);
        return kExitOk;
    } catch (const ConfigError& e) {
        return fail(kExitConfig, error_record(e.kind(), e.what(), subcommand));
    } catch (const Error& e) {
        json record = error_record("ExperimentError", subcommand + " failed: " + e.what(), subcommand);
        record["cause"] = e.kind();
        return fail(kExitExperiment, record);
    } catch (const std::exception& e) {
        return fail(kExitInternal, error_record("InternalError", e.what(), subcommand));
    }
}

}  // namespace mmwloc
