#include "doctest.h"

#include <cmath>
#include <numeric>

#include "generators.hpp"
#include "mmwloc/errors.hpp"
#include "mmwloc/estimator.hpp"
#include "mmwloc/presets.hpp"

using namespace mmwloc;

namespace {

struct BeamCorner {
    Scenario scenario = scenario_preset("beam-corner");
    PathSet paths = enumerate_paths(scenario, {8, 35});
    ParamVector truth = ParamVector::truth({8, 35}, paths, Mode::NoRem);
};

double max_param_error(const ParamVector& a, const ParamVector& b) {
    return (a.to_vector() - b.to_vector()).cwiseAbs().maxCoeff();
}

ParticleSet weighted(std::vector<double> w) {
    ParticleSet ps;
    for (std::size_t i = 0; i < w.size(); ++i) {
        ps.particles.push_back({{static_cast<double>(i), 0.0}, {}, Mode::Rem});
        ps.log_likelihoods.push_back(0.0);
    }
    ps.weights = std::move(w);
    return ps;
}

std::vector<int> counts(const ParticleSet& ps, std::size_t n) {
    std::vector<int> c(n, 0);
    for (const auto& p : ps.particles) ++c[static_cast<std::size_t>(p.ue.x)];
    return c;
}

}  // namespace

TEST_SUITE("estimator") {

TEST_CASE("lm_refine converges from nearby starts on clean data") {
    BeamCorner f;
    const Observation z = synthesize(f.truth, f.paths, f.scenario, 1, 0.0);
    Rng rng = make_rng(401, StreamTag::Start, 0);
    for (int i = 0; i < 20; ++i) {
        ParamVector start = f.truth;
        start.ue = start.ue + testgen::uniform_point(rng, -0.7, 0.7);
        for (auto& s : start.scatterers) s = s + testgen::uniform_point(rng, -0.7, 0.7);
        const ParamVector out = lm_refine(z, start, f.scenario, GapfConfig{});
        CHECK(max_param_error(out, f.truth) < 1e-6);
    }
}

TEST_CASE("lm_refine never lowers the likelihood and stays at a local maximum") {
    BeamCorner f;
    GapfConfig cfg;
    cfg.lm_max_iters = 1000;
    const Rect box = cfg.resolve_search_box(f.scenario);
    std::uniform_real_distribution<double> ux(box.x_min, box.x_max);
    std::uniform_real_distribution<double> uy(box.y_min, box.y_max);
    bool found_local = false;
    for (std::uint64_t obs = 0; obs < 50 && !found_local; ++obs) {
        const Observation z = synthesize(f.truth, f.paths, f.scenario, derive_seed(402, StreamTag::Trial, obs));
        const double global = log_likelihood(z, lm_refine(z, f.truth, f.scenario, cfg), f.scenario);
        Rng rng = make_rng(402, StreamTag::Start, obs);
        for (int i = 0; i < 10 && !found_local; ++i) {
            ParamVector start{{ux(rng), uy(rng)}, {}, Mode::NoRem};
            for (std::size_t k = 0; k < f.paths.nlos_count(); ++k) start.scatterers.push_back({ux(rng), uy(rng)});
            ParamVector out;
            try {
                out = lm_refine(z, start, f.scenario, cfg);
            } catch (const Error&) {
                continue;
            }
            const double ll_out = log_likelihood(z, out, f.scenario);
            CHECK(ll_out >= log_likelihood(z, start, f.scenario));
            if (ll_out < global - 1.0) {
                // A local maximum away from the global one: refining from it
                // stays there.
                GapfConfig settle = cfg;
                settle.lm_max_iters = 5000;
                const ParamVector local = lm_refine(z, out, f.scenario, settle);
                const ParamVector again = lm_refine(z, local, f.scenario, GapfConfig{});
                CHECK(distance(again.ue, local.ue) < 1e-3);
                CHECK(log_likelihood(z, again, f.scenario) >= ll_out);
                CHECK(log_likelihood(z, again, f.scenario) < global - 1.0);
                found_local = true;
            }
        }
    }
    CHECK(found_local);
}

TEST_CASE("grid_init") {
    BeamCorner f;
    GapfConfig cfg;
    SUBCASE("single LOS path peaks at the truth cell") {
        const PathSet los = f.paths.subset({0});
        const Observation z = synthesize(ParamVector::truth({8, 35}, los, Mode::NoRem), los, f.scenario, 1, 0.0);
        const ParamVector t0 = grid_init(z, los, f.scenario, cfg);
        CHECK(t0.ue == Point2{8, 35});
    }
    SUBCASE("one NLOS path is not enough") {
        const PathSet one = f.paths.subset({1});
        const Observation z = synthesize(ParamVector::truth({8, 35}, one, Mode::NoRem), one, f.scenario, 1, 0.0);
        CHECK_THROWS_AS(grid_init(z, one, f.scenario, cfg), InsufficientPaths);
    }
    SUBCASE("LOS and two NLOS paths at low noise") {
        Scenario quiet = f.scenario.with_noise(NoiseProfile::tied(deg2rad(1.0), 0.1));
        const Observation z = synthesize(f.truth, f.paths, quiet, 3);
        const ParamVector t0 = grid_init(z, f.paths, quiet, cfg);
        CHECK(distance(t0.ue, f.truth.ue) <= cfg.grid_spacing);
        for (std::size_t k = 0; k < 2; ++k) CHECK(distance(t0.scatterers[k], f.truth.scatterers[k]) <= 2 * cfg.grid_spacing);
    }
}

TEST_CASE("systematic resampling") {
    Rng rng = make_rng(403, StreamTag::Resample, 0);
    CHECK(counts(resample_systematic(weighted({0.75, 0.25, 0.0, 0.0}), rng), 4) == std::vector<int>{3, 1, 0, 0});
    CHECK(counts(resample_systematic(weighted({0.0, 0.0, 1.0, 0.0}), rng), 4) == std::vector<int>{0, 0, 4, 0});
    for (int rep = 0; rep < 20; ++rep) {
        const auto c = counts(resample_systematic(weighted(std::vector<double>(10, 0.1)), rng), 10);
        for (int v : c) CHECK(std::abs(v - 1) <= 1);
    }
    const ParticleSet out = resample_systematic(weighted({0.1, 0.2, 0.3, 0.4}), rng);
    CHECK(std::accumulate(out.weights.begin(), out.weights.end(), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("resampling of the (0.75, 0.25) example for every offset") {
    for (int s = 0; s < 50; ++s) {
        Rng rng = make_rng(404, StreamTag::Resample, static_cast<std::uint64_t>(s));
        CHECK(counts(resample_systematic(weighted({0.75, 0.25, 0.0, 0.0}), rng), 4) == std::vector<int>{3, 1, 0, 0});
    }
}

TEST_CASE("gapf_iterate with zero process noise returns LM fixed points") {
    BeamCorner f;
    const Observation z = synthesize(f.truth, f.paths, f.scenario, 31);
    GapfConfig cfg;
    cfg.process_std_position = 0.0;
    cfg.lm_max_iters = 500;
    const ParamVector fixed = lm_refine(z, f.truth, f.scenario, cfg);
    ParticleSet ps = ParticleSet::uniform(fixed, 8);
    const ParticleSet next = gapf_iterate(ps, z, f.scenario, cfg, 0);
    for (const auto& p : next.particles) CHECK(max_param_error(p, fixed) < 1e-6);
    CHECK(std::accumulate(next.weights.begin(), next.weights.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("estimate") {
    BeamCorner f;
    const Observation z = synthesize(f.truth, f.paths, f.scenario, 41);
    GapfConfig cfg;
    cfg.rng_seed = 5;
    const EstimateReport a = estimate(z, f.scenario, Mode::NoRem, cfg);
    const EstimateReport b = estimate(z, f.scenario, Mode::NoRem, cfg);
    CHECK(a.theta_hat.to_vector() == b.theta_hat.to_vector());
    CHECK(a.log_likelihood == b.log_likelihood);
    CHECK(a.best_log_likelihood_trace == b.best_log_likelihood_trace);

    REQUIRE(a.best_log_likelihood_trace.size() == cfg.n_iterations);
    for (std::size_t k = 1; k < a.best_log_likelihood_trace.size(); ++k) {
        CHECK(a.best_log_likelihood_trace[k] >= a.best_log_likelihood_trace[k - 1]);
    }
    CHECK(a.theta_hat.dim() == 6);
    CHECK(a.log_likelihood >= log_likelihood(z, a.theta_init, f.scenario));

    const EstimateReport rem = estimate(z, f.scenario, Mode::Rem, cfg);
    CHECK(rem.theta_hat.dim() == 2);
    CHECK(rem.theta_hat.scatterers.empty());
}

TEST_CASE("estimate recovers clean data exactly on the canonical scenes") {
    for (const char* name : {"canyon-1fe", "canyon-2fe", "corner-1fe", "corner-2fe", "beam-corner"}) {
        CAPTURE(name);
        const Scenario s = scenario_preset(name);
        const Point2 ue = example_ue(name);
        const PathSet paths = enumerate_paths(s, ue);
        const ParamVector truth = ParamVector::truth(ue, paths, Mode::NoRem);
        const Observation z = synthesize(truth, paths, s, 1, 0.0);
        const EstimateReport r = estimate(z, s, Mode::NoRem, GapfConfig{});
        CHECK(max_param_error(r.theta_hat, truth) < 1e-4);
        const EstimateReport rem = estimate(z, s, Mode::Rem, GapfConfig{});
        CHECK(distance(rem.theta_hat.ue, ue) < 1e-4);
    }
}

TEST_CASE("subset-average strategy") {
    const Scenario s = scenario_preset("corner-2fe");
    const PathSet paths = enumerate_paths(s, {8, 35});
    const ParamVector truth = ParamVector::truth({8, 35}, paths, Mode::NoRem);
    const Observation z = synthesize(truth, paths, s, 1, 0.0);
    GapfConfig cfg;
    cfg.strategy = Strategy::SubsetAverage;
    const EstimateReport r = estimate(z, s, Mode::NoRem, cfg);
    CHECK(distance(r.theta_hat.ue, {8, 35}) < 1e-4);
    CHECK(r.theta_hat.dim() == truth.dim());
}

TEST_CASE("estimator config validation") {
    GapfConfig cfg;
    cfg.n_particles = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = GapfConfig{};
    cfg.anneal_factor = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = GapfConfig{};
    cfg.search_box = Rect{0, -1, 0, 1};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    const Rect box = GapfConfig{}.resolve_search_box(scenario_preset("canyon-1fe"));
    CHECK(box.x_min == -6.0);
    CHECK(box.x_max == 25.0);
    CHECK(box.y_min == -5.0);
    CHECK(box.y_max == 55.0);
}

}
