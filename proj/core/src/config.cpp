#include "mmwloc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mmwloc/errors.hpp"
#include "mmwloc/harness.hpp"
#include "mmwloc/presets.hpp"

namespace mmwloc {

namespace {

using nlohmann::json;

const std::set<std::string> kTopKeys{"scenario", "profile", "mode", "estimator", "experiment", "output_dir", "seed"};
const std::set<std::string> kScenarioKeys{"name", "walls", "fes", "region"};
const std::set<std::string> kWallKeys{"axis", "offset", "side"};
const std::set<std::string> kEstimatorKeys{"n_particles",  "n_iterations", "process_std_position",
                                           "anneal_factor", "lm_max_iters", "lm_tolerance",
                                           "grid_spacing", "search_box",   "strategy"};
const std::set<std::string> kExperimentKeys{"ue",      "noiseless",   "n_trials", "sigma_deg",
                                            "sigma_d", "subsets",     "monte_carlo", "range_only_reference",
                                            "profiles", "spacing",    "margin",   "trajectory"};

struct ProfileField {
    const char* name;
    double NoiseProfile::*member;
    bool angle;
};

const ProfileField kProfileFields[] = {
    {"alpha_los", &NoiseProfile::sigma_alpha_los, true},   {"beta_los", &NoiseProfile::sigma_beta_los, true},
    {"d_los", &NoiseProfile::sigma_d_los, false},          {"alpha_nlos", &NoiseProfile::sigma_alpha_nlos, true},
    {"beta_nlos", &NoiseProfile::sigma_beta_nlos, true},   {"d_nlos", &NoiseProfile::sigma_d_nlos, false},
};

class Reader {
public:
    std::vector<std::string> issues;

    void issue(const std::string& where, const std::string& what) { issues.push_back(where + ": " + what); }

    void unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
        for (const auto& [key, value] : obj.items()) {
            if (!allowed.count(key)) issue(where.empty() ? key : where + "." + key, "unknown key");
        }
    }

    std::optional<double> number(const json& obj, const char* key, const std::string& where) {
        if (!obj.contains(key)) return std::nullopt;
        const json& v = obj.at(key);
        if (!v.is_number()) {
            issue(where + "." + key, "must be a number");
            return std::nullopt;
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            issue(where + "." + key, "must be finite");
            return std::nullopt;
        }
        return d;
    }

    void positive(const json& obj, const char* key, const std::string& where, double& out) {
        if (auto v = number(obj, key, where)) {
            if (*v > 0.0) {
                out = *v;
            } else {
                issue(where + "." + key, "must be > 0 (got " + format(*v) + ")");
            }
        }
    }

    void count(const json& obj, const char* key, const std::string& where, std::size_t& out, std::size_t min) {
        if (!obj.contains(key)) return;
        const json& v = obj.at(key);
        if (!v.is_number_integer() || v.get<std::int64_t>() < static_cast<std::int64_t>(min)) {
            issue(where + "." + key, "must be an integer >= " + std::to_string(min));
            return;
        }
        out = v.get<std::size_t>();
    }

    void boolean(const json& obj, const char* key, const std::string& where, bool& out) {
        if (!obj.contains(key)) return;
        if (!obj.at(key).is_boolean()) {
            issue(where + "." + key, "must be true or false");
            return;
        }
        out = obj.at(key).get<bool>();
    }

    std::optional<Point2> point(const json& v, const std::string& where) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            issue(where, "must be [x, y]");
            return std::nullopt;
        }
        Point2 p{v[0].get<double>(), v[1].get<double>()};
        if (!p.finite()) {
            issue(where, "must be finite");
            return std::nullopt;
        }
        return p;
    }

    std::optional<Rect> rect(const json& v, const std::string& where) {
        if (!v.is_array() || v.size() != 4) {
            issue(where, "must be [x_min, x_max, y_min, y_max]");
            return std::nullopt;
        }
        for (const auto& e : v) {
            if (!e.is_number() || !std::isfinite(e.get<double>())) {
                issue(where, "must hold four finite numbers");
                return std::nullopt;
            }
        }
        Rect r{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()};
        if (!r.valid()) {
            issue(where, "is empty (need x_min < x_max and y_min < y_max)");
            return std::nullopt;
        }
        return r;
    }

    std::optional<NoiseProfile> profile(const json& v, const std::string& where) {
        if (v.is_string()) {
            const auto name = v.get<std::string>();
            if (name != "28GHz" && name != "73GHz") {
                issue(where, "unknown profile preset '" + name + "' (expected 28GHz or 73GHz)");
                return std::nullopt;
            }
            return NoiseProfile::preset(name);
        }
        if (!v.is_object()) {
            issue(where, "must be a preset name or an object of deviations");
            return std::nullopt;
        }
        NoiseProfile p;
        p.label = v.value("label", std::string("custom"));
        std::set<std::string> allowed{"label"};
        bool ok = true;
        for (const auto& f : kProfileFields) {
            const std::string unit = f.angle ? "_deg" : "_m";
            const std::string plain = std::string(f.name) + unit;
            const std::string raw = std::string(f.name) + (f.angle ? "_rad" : "_m");
            allowed.insert(plain);
            allowed.insert(raw);
            std::optional<double> value;
            if (v.contains(raw)) {
                value = number(v, raw.c_str(), where);
            } else if (v.contains(plain)) {
                value = number(v, plain.c_str(), where);
                if (value && f.angle) *value = deg2rad(*value);
            } else {
                issue(where + "." + plain, "missing");
                ok = false;
                continue;
            }
            if (!value) {
                ok = false;
            } else if (!(*value > 0.0)) {
                issue(where + "." + plain, "must be > 0 (got " + format(f.angle ? rad2deg(*value) : *value) + ")");
                ok = false;
            } else {
                p.*f.member = *value;
            }
        }
        unknown_keys(v, allowed, where);
        if (!ok) return std::nullopt;
        return p;
    }

    static std::string format(double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    }
};

std::optional<Mode> parse_mode(const std::string& s) {
    if (s == "REM") return Mode::Rem;
    if (s == "NoREM") return Mode::NoRem;
    return std::nullopt;
}

json point_json(Point2 p) { return json::array({p.x, p.y}); }

json rect_json(const Rect& r) { return json::array({r.x_min, r.x_max, r.y_min, r.y_max}); }

json profile_json(const NoiseProfile& p) {
    json j;
    j["label"] = p.label;
    for (const auto& f : kProfileFields) {
        j[std::string(f.name) + (f.angle ? "_rad" : "_m")] = p.*f.member;
    }
    return j;
}

json scenario_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["walls"] = json::array();
    for (const Wall& w : s.walls) {
        j["walls"].push_back({{"axis", w.axis == WallAxis::Vertical ? "vertical" : "horizontal"},
                              {"offset", w.offset},
                              {"side", w.reflective_side == Side::Positive ? "+" : "-"}});
    }
    j["fes"] = json::array();
    for (Point2 fe : s.fes) j["fes"].push_back(point_json(fe));
    j["region"] = rect_json(s.region);
    return j;
}

/// Parses into `out` and returns every problem found.
std::vector<std::string> read(const json& doc, RunConfig& out) {
    Reader r;
    if (!doc.is_object()) {
        r.issue("config", "top level must be an object");
        return r.issues;
    }
    r.unknown_keys(doc, kTopKeys, "");

    if (doc.contains("profile")) {
        if (auto p = r.profile(doc.at("profile"), "profile")) out.profile = *p;
    } else {
        out.profile = NoiseProfile::preset("73GHz");
    }

    bool have_scenario = false;
    std::string preset_name;
    if (!doc.contains("scenario")) {
        r.issue("scenario", "missing");
    } else if (doc.at("scenario").is_string()) {
        preset_name = doc.at("scenario").get<std::string>();
        try {
            out.scenario = scenario_preset(preset_name, out.profile);
            out.scenario_is_preset = true;
            have_scenario = true;
        } catch (const ConfigError&) {
            std::string names;
            for (const auto& n : scenario_preset_names()) names += (names.empty() ? "" : ", ") + n;
            r.issue("scenario", "unknown preset '" + preset_name + "' (expected one of " + names + ")");
        }
    } else if (doc.at("scenario").is_object()) {
        const json& sj = doc.at("scenario");
        r.unknown_keys(sj, kScenarioKeys, "scenario");
        Scenario s;
        s.name = sj.value("name", std::string("custom"));
        s.noise = out.profile;
        bool ok = true;
        if (sj.contains("walls")) {
            if (!sj.at("walls").is_array()) {
                r.issue("scenario.walls", "must be a list");
                ok = false;
            } else {
                for (std::size_t i = 0; i < sj.at("walls").size(); ++i) {
                    const json& wj = sj.at("walls")[i];
                    const std::string where = "scenario.walls[" + std::to_string(i) + "]";
                    if (!wj.is_object()) {
                        r.issue(where, "must be an object");
                        ok = false;
                        continue;
                    }
                    r.unknown_keys(wj, kWallKeys, where);
                    Wall w;
                    const std::string axis = wj.value("axis", std::string());
                    if (axis == "vertical") {
                        w.axis = WallAxis::Vertical;
                    } else if (axis == "horizontal") {
                        w.axis = WallAxis::Horizontal;
                    } else {
                        r.issue(where + ".axis", "must be \"vertical\" or \"horizontal\"");
                        ok = false;
                    }
                    if (auto off = r.number(wj, "offset", where)) {
                        w.offset = *off;
                    } else {
                        if (!wj.contains("offset")) r.issue(where + ".offset", "missing");
                        ok = false;
                    }
                    const std::string side = wj.value("side", std::string("+"));
                    if (side == "+") {
                        w.reflective_side = Side::Positive;
                    } else if (side == "-") {
                        w.reflective_side = Side::Negative;
                    } else {
                        r.issue(where + ".side", "must be \"+\" or \"-\"");
                        ok = false;
                    }
                    s.walls.push_back(w);
                }
            }
        }
        if (sj.contains("fes") && sj.at("fes").is_array()) {
            for (std::size_t i = 0; i < sj.at("fes").size(); ++i) {
                if (auto p = r.point(sj.at("fes")[i], "scenario.fes[" + std::to_string(i) + "]")) {
                    s.fes.push_back(*p);
                } else {
                    ok = false;
                }
            }
        } else if (sj.contains("fes")) {
            r.issue("scenario.fes", "must be a list of [x, y]");
            ok = false;
        }
        if (s.fes.empty() && ok) {
            r.issue("scenario.fes", "no FE, so no sufficient path set exists (need >= 1 LOS or >= 2 NLOS paths)");
            ok = false;
        }
        if (!sj.contains("region")) {
            r.issue("scenario.region", "missing");
            ok = false;
        } else if (auto rect = r.rect(sj.at("region"), "scenario.region")) {
            s.region = *rect;
        } else {
            ok = false;
        }
        if (ok) {
            for (std::size_t i = 0; i < s.walls.size(); ++i) {
                for (std::size_t j = i + 1; j < s.walls.size(); ++j) {
                    if (s.walls[i].axis == s.walls[j].axis && s.walls[i].offset == s.walls[j].offset) {
                        r.issue("scenario.walls", "walls " + std::to_string(i) + " and " + std::to_string(j) +
                                                      " coincide");
                        ok = false;
                    }
                }
            }
        }
        out.scenario = s;
        have_scenario = ok;
    } else {
        r.issue("scenario", "must be a preset name or an object");
    }

    if (doc.contains("mode")) {
        const json& m = doc.at("mode");
        const std::string s = m.is_string() ? m.get<std::string>() : "";
        if (s == "both") {
            out.modes = {Mode::Rem, Mode::NoRem};
        } else if (auto mode = parse_mode(s)) {
            out.modes = {*mode};
        } else {
            r.issue("mode", "must be \"REM\", \"NoREM\" or \"both\"");
        }
    }

    if (doc.contains("seed")) {
        const json& sv = doc.at("seed");
        if (sv.is_number_unsigned() || (sv.is_number_integer() && sv.get<std::int64_t>() >= 0)) {
            out.seed = sv.get<std::uint64_t>();
        } else {
            r.issue("seed", "must be a non-negative integer");
        }
    }

    if (doc.contains("output_dir")) {
        if (!doc.at("output_dir").is_string() || doc.at("output_dir").get<std::string>().empty()) {
            r.issue("output_dir", "must be a non-empty path");
        } else {
            out.output_dir = doc.at("output_dir").get<std::string>();
            std::error_code ec;
            if (std::filesystem::exists(out.output_dir, ec) && !std::filesystem::is_directory(out.output_dir, ec)) {
                r.issue("output_dir", "exists and is not a directory");
            }
        }
    }

    GapfConfig& est = out.estimator;
    if (doc.contains("estimator")) {
        const json& ej = doc.at("estimator");
        if (!ej.is_object()) {
            r.issue("estimator", "must be an object");
        } else {
            r.unknown_keys(ej, kEstimatorKeys, "estimator");
            r.count(ej, "n_particles", "estimator", est.n_particles, 1);
            r.count(ej, "n_iterations", "estimator", est.n_iterations, 0);
            r.count(ej, "lm_max_iters", "estimator", est.lm_max_iters, 0);
            if (auto v = r.number(ej, "process_std_position", "estimator")) {
                if (*v >= 0.0) {
                    est.process_std_position = *v;
                } else {
                    r.issue("estimator.process_std_position", "must be >= 0");
                }
            }
            if (auto v = r.number(ej, "anneal_factor", "estimator")) {
                if (*v > 0.0 && *v <= 1.0) {
                    est.anneal_factor = *v;
                } else {
                    r.issue("estimator.anneal_factor", "must be in (0, 1] (got " + Reader::format(*v) + ")");
                }
            }
            r.positive(ej, "lm_tolerance", "estimator", est.lm_tolerance);
            r.positive(ej, "grid_spacing", "estimator", est.grid_spacing);
            if (ej.contains("search_box") && !ej.at("search_box").is_null()) {
                est.search_box = r.rect(ej.at("search_box"), "estimator.search_box");
            }
            if (ej.contains("strategy")) {
                const std::string s = ej.at("strategy").is_string() ? ej.at("strategy").get<std::string>() : "";
                if (s == "joint") {
                    est.strategy = Strategy::Joint;
                } else if (s == "subset_average") {
                    est.strategy = Strategy::SubsetAverage;
                } else {
                    r.issue("estimator.strategy", "must be \"joint\" or \"subset_average\"");
                }
            }
        }
    }

    ExperimentConfig& ex = out.experiment;
    if (doc.contains("experiment")) {
        const json& xj = doc.at("experiment");
        if (!xj.is_object()) {
            r.issue("experiment", "must be an object");
        } else {
            r.unknown_keys(xj, kExperimentKeys, "experiment");
            if (xj.contains("ue")) ex.ue = r.point(xj.at("ue"), "experiment.ue");
            r.boolean(xj, "noiseless", "experiment", ex.noiseless);
            r.count(xj, "n_trials", "experiment", ex.n_trials, 1);
            if (xj.contains("sigma_deg")) {
                const json& sj = xj.at("sigma_deg");
                if (!sj.is_array() || sj.empty()) {
                    r.issue("experiment.sigma_deg", "must be a non-empty list of angles in degrees");
                } else {
                    ex.sigma_deg.clear();
                    for (std::size_t i = 0; i < sj.size(); ++i) {
                        const double v = sj[i].is_number() ? sj[i].get<double>() : -1.0;
                        if (!(v > 0.0) || !std::isfinite(v)) {
                            r.issue("experiment.sigma_deg[" + std::to_string(i) + "]", "must be > 0");
                        } else {
                            ex.sigma_deg.push_back(v);
                        }
                    }
                }
            }
            r.positive(xj, "sigma_d", "experiment", ex.sigma_d);
            if (xj.contains("subsets")) {
                const json& sj = xj.at("subsets");
                if (!sj.is_array()) {
                    r.issue("experiment.subsets", "must be a list of subset ids");
                } else {
                    for (const auto& e : sj) {
                        if (e.is_string()) {
                            ex.subsets.push_back(e.get<std::string>());
                        } else {
                            r.issue("experiment.subsets", "entries must be strings like \"LOS1+NLOS2\"");
                        }
                    }
                }
            }
            r.boolean(xj, "monte_carlo", "experiment", ex.monte_carlo);
            r.boolean(xj, "range_only_reference", "experiment", ex.range_only_reference);
            if (xj.contains("profiles")) {
                const json& pj = xj.at("profiles");
                if (!pj.is_array() || pj.empty()) {
                    r.issue("experiment.profiles", "must be a non-empty list");
                } else {
                    for (std::size_t i = 0; i < pj.size(); ++i) {
                        if (auto p = r.profile(pj[i], "experiment.profiles[" + std::to_string(i) + "]")) {
                            ex.profiles.push_back(*p);
                        }
                    }
                }
            }
            r.positive(xj, "spacing", "experiment", ex.spacing);
            if (auto v = r.number(xj, "margin", "experiment")) {
                if (*v >= 0.0) {
                    ex.margin = *v;
                } else {
                    r.issue("experiment.margin", "must be >= 0");
                }
            }
            if (xj.contains("trajectory")) {
                const json& tj = xj.at("trajectory");
                if (tj.is_array()) {
                    for (std::size_t i = 0; i < tj.size(); ++i) {
                        if (auto p = r.point(tj[i], "experiment.trajectory[" + std::to_string(i) + "]")) {
                            ex.trajectory.push_back(*p);
                        }
                    }
                } else if (tj.is_object()) {
                    auto from = tj.contains("from") ? r.point(tj.at("from"), "experiment.trajectory.from")
                                                    : std::nullopt;
                    auto to = tj.contains("to") ? r.point(tj.at("to"), "experiment.trajectory.to") : std::nullopt;
                    std::size_t points = 20;
                    r.count(tj, "points", "experiment.trajectory", points, 2);
                    if (from && to) {
                        ex.trajectory = straight_trajectory(*from, *to, points);
                    } else {
                        r.issue("experiment.trajectory", "needs \"from\" and \"to\" points");
                    }
                } else {
                    r.issue("experiment.trajectory", "must be a list of points or {from, to, points}");
                }
            }
        }
    }

    if (!have_scenario) return r.issues;

    // Checks that need the resolved scenario.
    const Scenario& sc = out.scenario;
    const Rect box = est.resolve_search_box(sc);
    if (est.grid_spacing > std::min(box.x_max - box.x_min, box.y_max - box.y_min)) {
        r.issue("estimator.grid_spacing", "larger than the search box");
    }
    auto check_ue = [&](Point2 ue, const std::string& where) {
        if (!box.contains(ue)) r.issue(where, "outside the estimator search box");
        try {
            const PathSet paths = enumerate_paths(sc, ue);
            if (!paths.sufficient()) {
                r.issue(where, "path set is not sufficient (need >= 1 LOS or >= 2 NLOS paths)");
            }
            return std::optional<PathSet>(paths);
        } catch (const Error& e) {
            r.issue(where, e.what());
        }
        return std::optional<PathSet>();
    };
    const Point2 ue = out.resolved_ue();
    const auto paths = check_ue(ue, "experiment.ue");
    if (paths && !ex.subsets.empty()) {
        std::set<std::string> known;
        for (const auto& s : sufficient_subsets(*paths)) known.insert(s.id);
        for (const auto& id : ex.subsets) {
            if (!known.count(id)) r.issue("experiment.subsets", "'" + id + "' is not a sufficient path subset here");
        }
    }
    const auto traj = out.resolved_trajectory();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        check_ue(traj[i], "experiment.trajectory[" + std::to_string(i) + "]");
    }
    GridSpec grid{sc.region, ex.spacing, ex.margin};
    if (ex.spacing > 0.0 && grid_nodes(sc, grid).empty()) {
        r.issue("experiment.spacing", "UE grid has no nodes inside the region");
    }
    return r.issues;
}

}  // namespace

Point2 RunConfig::resolved_ue() const {
    if (experiment.ue) return *experiment.ue;
    if (scenario_is_preset) return example_ue(scenario.name);
    return {0.5 * (scenario.region.x_min + scenario.region.x_max), 0.5 * (scenario.region.y_min + scenario.region.y_max)};
}

std::vector<Point2> RunConfig::resolved_trajectory() const {
    if (!experiment.trajectory.empty()) return experiment.trajectory;
    if (scenario_is_preset) return trajectory_preset(scenario.name);
    const Rect& r = scenario.region;
    const double xm = 0.5 * (r.x_min + r.x_max);
    return straight_trajectory({xm, r.y_min + 0.1 * (r.y_max - r.y_min)}, {xm, r.y_max - 0.1 * (r.y_max - r.y_min)}, 20);
}

std::vector<NoiseProfile> RunConfig::resolved_profiles() const {
    if (!experiment.profiles.empty()) return experiment.profiles;
    return {NoiseProfile::preset("28GHz"), NoiseProfile::preset("73GHz")};
}

nlohmann::json RunConfig::to_json() const {
    json j;
    j["scenario"] = scenario_json(scenario);
    j["profile"] = profile_json(profile);
    j["mode"] = modes.size() == 2 ? "both" : to_string(modes.front());
    json e;
    e["n_particles"] = estimator.n_particles;
    e["n_iterations"] = estimator.n_iterations;
    e["process_std_position"] = estimator.process_std_position;
    e["anneal_factor"] = estimator.anneal_factor;
    e["lm_max_iters"] = estimator.lm_max_iters;
    e["lm_tolerance"] = estimator.lm_tolerance;
    e["grid_spacing"] = estimator.grid_spacing;
    e["search_box"] = rect_json(estimator.resolve_search_box(scenario));
    e["strategy"] = estimator.strategy == Strategy::Joint ? "joint" : "subset_average";
    j["estimator"] = e;
    json x;
    x["ue"] = point_json(resolved_ue());
    x["noiseless"] = experiment.noiseless;
    x["n_trials"] = experiment.n_trials;
    x["sigma_deg"] = experiment.sigma_deg;
    x["sigma_d"] = experiment.sigma_d;
    x["subsets"] = experiment.subsets;
    x["monte_carlo"] = experiment.monte_carlo;
    x["range_only_reference"] = experiment.range_only_reference;
    x["profiles"] = json::array();
    for (const auto& p : resolved_profiles()) x["profiles"].push_back(profile_json(p));
    x["spacing"] = experiment.spacing;
    x["margin"] = experiment.margin;
    x["trajectory"] = json::array();
    for (Point2 p : resolved_trajectory()) x["trajectory"].push_back(point_json(p));
    j["experiment"] = x;
    j["output_dir"] = output_dir.string();
    j["seed"] = seed;
    return j;
}

std::vector<std::string> validate_config(const nlohmann::json& doc) {
    RunConfig cfg;
    return read(doc, cfg);
}

RunConfig parse_config(const nlohmann::json& doc) {
    RunConfig cfg;
    const auto issues = read(doc, cfg);
    if (!issues.empty()) {
        std::string msg = "invalid config:";
        for (const auto& i : issues) msg += "\n  " + i;
        throw ConfigError(msg);
    }
    return cfg;
}

nlohmann::json read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
}

}  // namespace mmwloc
