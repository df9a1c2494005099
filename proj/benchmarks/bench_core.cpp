#include <benchmark/benchmark.h>

#include "mmwloc/bounds.hpp"
#include "mmwloc/estimator.hpp"
#include "mmwloc/presets.hpp"

using namespace mmwloc;

namespace {

struct Problem {
    Scenario scenario;
    PathSet paths;
    ParamVector truth;
    Observation z;

    explicit Problem(const char* name)
        : scenario(scenario_preset(name)),
          paths(enumerate_paths(scenario, example_ue(name))),
          truth(ParamVector::truth(example_ue(name), paths, Mode::NoRem)),
          z(synthesize(truth, paths, scenario, 1)) {}
};

void BM_LikelihoodEvaluate(benchmark::State& state) {
    const Problem p(state.range(0) ? "corner-2fe" : "beam-corner");
    const LikelihoodModel model(p.z, p.scenario, Mode::NoRem);
    const Eigen::VectorXd theta = p.truth.to_vector();
    Eigen::VectorXd r;
    Eigen::MatrixXd j;
    for (auto _ : state) {
        model.evaluate(theta, r, &j);
        benchmark::DoNotOptimize(j.data());
    }
}
BENCHMARK(BM_LikelihoodEvaluate)->Arg(0)->Arg(1);

void BM_LogLikelihoodFree(benchmark::State& state) {
    const Problem p("beam-corner");
    for (auto _ : state) benchmark::DoNotOptimize(log_likelihood(p.z, p.truth, p.scenario));
}
BENCHMARK(BM_LogLikelihoodFree);

void BM_LmRefine(benchmark::State& state) {
    const Problem p("beam-corner");
    ParamVector start = p.truth;
    start.ue = start.ue + Point2{1.5, -1.0};
    for (auto& s : start.scatterers) s = s + Point2{0.5, 0.5};
    const GapfConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(lm_refine(p.z, start, p.scenario, cfg).ue.x);
}
BENCHMARK(BM_LmRefine);

void BM_GridInit(benchmark::State& state) {
    const Problem p("beam-corner");
    const GapfConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(grid_init(p.z, p.paths, p.scenario, cfg).ue.x);
}
BENCHMARK(BM_GridInit)->Unit(benchmark::kMillisecond);

void BM_Estimate(benchmark::State& state) {
    const Problem p(state.range(0) ? "corner-2fe" : "beam-corner");
    const Mode mode = state.range(1) ? Mode::Rem : Mode::NoRem;
    const GapfConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(estimate(p.z, p.scenario, mode, cfg).log_likelihood);
}
BENCHMARK(BM_Estimate)->Args({0, 0})->Args({0, 1})->Args({1, 0})->Unit(benchmark::kMillisecond);

void BM_CrbGrid(benchmark::State& state) {
    const Scenario s = scenario_preset("corner-2fe");
    const GridSpec grid = GridSpec::for_scenario(s);
    for (auto _ : state) benchmark::DoNotOptimize(crb_grid(s, grid, s.noise, Mode::NoRem, 1).values.data());
}
BENCHMARK(BM_CrbGrid)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
