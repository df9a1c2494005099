#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "generators.hpp"
#include "mmwloc/bounds.hpp"
#include "mmwloc/harness.hpp"
#include "mmwloc/errors.hpp"
#include "mmwloc/presets.hpp"

using namespace mmwloc;

namespace {

Scenario origin_fe(const NoiseProfile& p) {
    Scenario s;
    s.name = "origin";
    s.fes = {{0, 0}};
    s.noise = p;
    s.region = {-20, 20, -20, 20};
    return s;
}

const PathSet kLos({{PathKind::Los, 0, std::nullopt, std::nullopt, std::nullopt}});

double min_eigenvalue(const Eigen::MatrixXd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("single LOS path by hand") {
    const NoiseProfile p = NoiseProfile::tied(0.1, 1.0);
    const Scenario s = origin_fe(p);
    const ParamVector ue{{10, 0}, {}, Mode::NoRem};
    const Eigen::MatrixXd f = fisher(ue, kLos, s, p);
    CHECK(std::abs(f(0, 0) - 1.0) < 1e-9);
    CHECK(std::abs(f(1, 1) - 2.0) < 1e-9);
    CHECK(std::abs(f(0, 1)) < 1e-9);
    CHECK(std::abs(rmse_crb({10, 0}, kLos, s, p, Mode::NoRem) - std::sqrt(1.5)) < 1e-9);
}

TEST_CASE("single NLOS path without a map is singular") {
    const Scenario s = scenario_preset("beam-corner");
    const PathSet one = enumerate_paths(s, {8, 35}).subset({1});
    CHECK_THROWS_AS(rmse_crb({8, 35}, one, s, s.noise, Mode::NoRem), SingularFisher);
}

TEST_CASE("Fisher matrices are symmetric PSD and grow with paths") {
    Rng rng = make_rng(501, StreamTag::Trial, 0);
    for (int i = 0; i < 100; ++i) {
        const testgen::Instance inst = testgen::random_instance(rng);
        const Eigen::MatrixXd f = fisher(inst.theta, inst.paths, inst.scenario, inst.scenario.noise);
        CHECK((f - f.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(min_eigenvalue(f) >= -1e-10);
    }
    // Adding a path to a fixed parameter space never removes information.
    const Scenario s = scenario_preset("corner-2fe");
    const PathSet all = enumerate_paths(s, {8, 35});
    const ParamVector rem = ParamVector::truth({8, 35}, all, Mode::Rem);
    std::vector<std::size_t> idx;
    Eigen::MatrixXd prev = Eigen::MatrixXd::Zero(2, 2);
    for (std::size_t k = 0; k < all.size(); ++k) {
        idx.push_back(k);
        const PathSet sub = all.subset(idx);
        const Eigen::MatrixXd f = fisher(ParamVector::truth({8, 35}, sub, Mode::Rem), sub, s, s.noise);
        CHECK(min_eigenvalue(f - prev) >= -1e-10);
        prev = f;
    }
    CHECK(rem.dim() == 2);
}

TEST_CASE("map knowledge never hurts and 73 GHz beats 28 GHz") {
    const NoiseProfile p28 = NoiseProfile::preset("28GHz");
    const NoiseProfile p73 = NoiseProfile::preset("73GHz");
    for (const auto& name : scenario_preset_names()) {
        const Scenario s = scenario_preset(name);
        for (Point2 ue : {Point2{5, 30}, Point2{12, 20}, Point2{16, 44}}) {
            const PathSet paths = enumerate_paths(s, ue);
            const double rem = rmse_crb(ue, paths, s, p73, Mode::Rem);
            const double norem = rmse_crb(ue, paths, s, p73, Mode::NoRem);
            CHECK(rem <= norem * (1 + 1e-12));
            for (Mode m : {Mode::Rem, Mode::NoRem}) {
                CHECK(rmse_crb(ue, paths, s, p73, m) <= rmse_crb(ue, paths, s, p28, m) * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("bound grows with tied angular deviation") {
    const Scenario s = scenario_preset("beam-corner");
    const PathSet paths = enumerate_paths(s, {8, 35});
    for (Mode m : {Mode::Rem, Mode::NoRem}) {
        double prev = 0.0;
        for (double deg = 1.0; deg <= 40.0; deg += 1.0) {
            const double v = rmse_crb({8, 35}, paths, s, NoiseProfile::tied(deg2rad(deg), 0.75), m);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("REM bound approaches the range-only bound for very wide beams") {
    const Scenario s = scenario_preset("beam-corner");
    const PathSet paths = enumerate_paths(s, {8, 35});
    for (const auto& idx : {std::vector<std::size_t>{0, 1}, std::vector<std::size_t>{0, 2},
                            std::vector<std::size_t>{1, 2}, std::vector<std::size_t>{0, 1, 2}}) {
        const PathSet sub = paths.subset(idx);
        const NoiseProfile wide = NoiseProfile::tied(deg2rad(1000.0), 0.75);
        const double rem = rmse_crb({8, 35}, sub, s, wide, Mode::Rem);
        const double range = rmse_crb_range_only({8, 35}, sub, s, wide);
        CHECK(rem <= range);
        CHECK(rem / range > 0.99);
    }
}

TEST_CASE("mixed-path ordering at the beamwidth-study geometry") {
    const Scenario s = scenario_preset("beam-corner");
    const PathSet paths = enumerate_paths(s, {8, 35});
    for (double deg : {1.0, 5.0, 10.0, 20.0, 40.0}) {
        const NoiseProfile p = NoiseProfile::tied(deg2rad(deg), 0.75);
        const double all = rmse_crb({8, 35}, paths, s, p, Mode::NoRem);
        const double los = rmse_crb({8, 35}, paths.subset({0}), s, p, Mode::NoRem);
        const double nlos = rmse_crb({8, 35}, paths.subset({1, 2}), s, p, Mode::NoRem);
        CHECK(all <= los);
        CHECK(los <= nlos);
    }
}

TEST_CASE("UE grid") {
    const Scenario canyon = scenario_preset("canyon-1fe");
    const GridSpec g = GridSpec::for_scenario(canyon);
    const auto nodes = grid_nodes(canyon, g);
    CHECK(nodes.size() == 931);
    for (Point2 n : nodes) {
        CHECK(n.x >= 1.0);
        CHECK(n.x <= 19.0);
        CHECK(distance(n, canyon.fes[0]) >= 0.5);
    }
    CHECK(grid_nodes(scenario_preset("corner-1fe"), GridSpec::for_scenario(scenario_preset("corner-1fe"))).size() ==
          930);
}

TEST_CASE("fields") {
    const Scenario s = scenario_preset("canyon-1fe");
    const NoiseProfile p = NoiseProfile::preset("73GHz");
    const GridSpec coarse{s.region, 2.0, 0.5};
    const GridSpec fine{s.region, 1.0, 0.5};
    const Field a = crb_grid(s, coarse, p, Mode::NoRem, 1);
    const Field b = crb_grid(s, fine, p, Mode::NoRem, 1);
    std::size_t matched = 0;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        for (std::size_t j = 0; j < b.nodes.size(); ++j) {
            if (b.nodes[j] == a.nodes[i]) {
                CHECK(a.values[i] == b.values[j]);
                ++matched;
            }
        }
    }
    CHECK(matched == a.nodes.size());

    const Field d = delta_field(s, fine, p, 1);
    for (double v : d.valid_values()) CHECK(v >= 0.0);

    // Bound grows away from the FE along the street center.
    double prev = 0.0;
    for (std::size_t j = 0; j < b.nodes.size(); ++j) {
        if (b.nodes[j].x != 10.0 || b.nodes[j].y < 5.0) continue;
        CHECK(b.values[j] >= prev);
        prev = b.values[j];
    }

    // REM gain is small next to the FE and large far from it, and larger
    // next to the reflecting wall than at the street center.
    auto at = [&](Point2 q) {
        for (std::size_t j = 0; j < d.nodes.size(); ++j) {
            if (d.nodes[j] == q) return d.values[j];
        }
        return std::nan("");
    };
    CHECK(at({2, 5}) < at({10, 45}));
    CHECK(at({18, 30}) > at({10, 30}));
}

TEST_CASE("parallel grid evaluation is order independent") {
    const Scenario s = scenario_preset("corner-2fe");
    const GridSpec g = GridSpec::for_scenario(s, 2.0);
    const Field one = crb_grid(s, g, s.noise, Mode::NoRem, 1);
    const Field four = crb_grid(s, g, s.noise, Mode::NoRem, 4);
    REQUIRE(one.values.size() == four.values.size());
    for (std::size_t i = 0; i < one.values.size(); ++i) {
        CHECK((one.values[i] == four.values[i] || (std::isnan(one.values[i]) && std::isnan(four.values[i]))));
    }
}

}
