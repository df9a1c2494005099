#include "doctest.h"

#include "generators.hpp"
#include "mmwloc/errors.hpp"
#include "mmwloc/geometry.hpp"
#include "mmwloc/presets.hpp"

using namespace mmwloc;

namespace {

const Wall kX0{WallAxis::Vertical, 0.0, Side::Positive};
const Wall kY0{WallAxis::Horizontal, 0.0, Side::Positive};

// Equal angles of incidence and reflection: the tangential components of
// the unit vectors towards fe and ue agree, the normal components are equal.
bool equal_angles(Point2 fe, Point2 s, Point2 ue, const Wall& w) {
    const Point2 a = fe - s;
    const Point2 b = ue - s;
    const double na = a.norm();
    const double nb = b.norm();
    if (w.axis == WallAxis::Vertical) {
        return std::abs(a.x / na - b.x / nb) < 1e-12 && std::abs(a.y / na + b.y / nb) < 1e-12;
    }
    return std::abs(a.y / na - b.y / nb) < 1e-12 && std::abs(a.x / na + b.x / nb) < 1e-12;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("image_reflect") {
    CHECK(image_reflect({18, 10}, kX0) == Point2{-18, 10});
    CHECK(image_reflect({18, 10}, kY0) == Point2{18, -10});
    CHECK(image_reflect({0, 5}, kX0) == Point2{0, 5});
}

TEST_CASE("image_reflect is an involution") {
    Rng rng = make_rng(101, StreamTag::Trial, 0);
    const Wall x20{WallAxis::Vertical, 20.0, Side::Negative};
    for (int i = 0; i < 200; ++i) {
        // Exact for the canonical walls on quarter-metre coordinates.
        const Point2 q = testgen::uniform_point(rng, -60.0, 60.0);
        const Point2 p{std::round(q.x * 4.0) / 4.0, std::round(q.y * 4.0) / 4.0};
        for (const Wall& w : {kX0, kY0, x20}) CHECK(image_reflect(image_reflect(p, w), w) == p);
        // Sign flip only: exact for any point.
        CHECK(image_reflect(image_reflect(q, kX0), kX0) == q);
        CHECK(image_reflect(image_reflect(q, kY0), kY0) == q);
        // General offsets: 2c - (2c - x) can round, by a few ulps at most.
        const Wall w{i % 2 ? WallAxis::Vertical : WallAxis::Horizontal, q.x / 3.0, Side::Positive};
        const Point2 back = image_reflect(image_reflect(q, w), w);
        CHECK(distance(back, q) <= 1e-14 * (std::abs(w.offset) + q.norm()));
    }
}

TEST_CASE("specular points of the beamwidth-study corner") {
    const auto sx = specular_point({18, 10}, {8, 35}, kX0);
    REQUIRE(sx.has_value());
    CHECK(sx->x == 0.0);
    CHECK(sx->y == doctest::Approx(27.3077).epsilon(1e-5));
    CHECK(equal_angles({18, 10}, *sx, {8, 35}, kX0));

    const auto sy = specular_point({18, 10}, {8, 35}, kY0);
    REQUIRE(sy.has_value());
    CHECK(sy->x == doctest::Approx(15.7778).epsilon(1e-5));
    CHECK(sy->y == 0.0);
    CHECK(equal_angles({18, 10}, *sy, {8, 35}, kY0));
}

TEST_CASE("no reflection for an FE behind the wall") {
    CHECK_FALSE(specular_point({-1, 2}, {-1, 40}, kX0).has_value());
    CHECK_FALSE(specular_point({-1, 2}, {10, 40}, kX0).has_value());
}

TEST_CASE("specular path length equals image distance") {
    Rng rng = make_rng(102, StreamTag::Trial, 0);
    for (int i = 0; i < 200; ++i) {
        const Point2 fe = testgen::uniform_point(rng, 0.5, 50.0);
        const Point2 ue = testgen::uniform_point(rng, 0.5, 50.0);
        const Wall& w = i % 2 ? kX0 : kY0;
        const auto s = specular_point(fe, ue, w);
        REQUIRE(s.has_value());
        const double via = distance(fe, *s) + distance(*s, ue);
        const double image = distance(image_reflect(fe, w), ue);
        CHECK(std::abs(via - image) <= 1e-9 * image);
        CHECK(equal_angles(fe, *s, ue, w));
    }
}

TEST_CASE("path inventory of the canonical scenes") {
    const PathSet beam = enumerate_paths(scenario_preset("beam-corner"), {8, 35});
    CHECK(beam.los_count() == 1);
    CHECK(beam.nlos_count() == 2);
    CHECK(beam[1].true_scatterer->y == doctest::Approx(27.307692307692307));
    CHECK(beam[2].true_scatterer->x == doctest::Approx(15.777777777777779));

    const PathSet canyon = enumerate_paths(scenario_preset("canyon-1fe"), {10, 40});
    CHECK(canyon.los_count() == 1);
    REQUIRE(canyon.nlos_count() == 1);
    CHECK(canyon[1].true_scatterer->x == 20.0);

    const Scenario corner2 = scenario_preset("corner-2fe");
    for (Point2 ue : {Point2{8, 35}, Point2{2, 2}, Point2{19, 49}, Point2{10, 25}}) {
        const PathSet p = enumerate_paths(corner2, ue);
        CHECK(p.los_count() == 2);
        CHECK(p.nlos_count() == 4);
    }
    const PathSet canyon2 = enumerate_paths(scenario_preset("canyon-2fe"), {10, 40});
    CHECK(canyon2.los_count() == 2);
    CHECK(canyon2.nlos_count() == 2);
}

TEST_CASE("LOS paths come first and enumeration is stable") {
    const Scenario s = scenario_preset("corner-2fe");
    const PathSet a = enumerate_paths(s, {8, 35});
    const PathSet b = enumerate_paths(s, {8, 35});
    REQUIRE(a.size() == b.size());
    bool seen_nlos = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_los()) seen_nlos = true;
        CHECK(a[i].is_los() != seen_nlos);
        CHECK(a[i].kind == b[i].kind);
        CHECK(a[i].fe_index == b[i].fe_index);
        CHECK(a[i].true_scatterer == b[i].true_scatterer);
    }
    CHECK(a.label(0) == "LOS1");
    CHECK(a.label(2) == "NLOS1");
}

TEST_CASE("subset renumbers scatterers and keeps LOS first") {
    const PathSet all = enumerate_paths(scenario_preset("beam-corner"), {8, 35});
    const PathSet sub = all.subset({2, 0});
    REQUIRE(sub.size() == 2);
    CHECK(sub[0].is_los());
    CHECK(*sub[1].scatterer_index == 0);
    CHECK(sub.sufficient());
    CHECK_FALSE(all.subset({1}).sufficient());
}

TEST_CASE("degenerate UE placements") {
    const Scenario s = scenario_preset("corner-1fe");
    CHECK_THROWS_AS(enumerate_paths(s, {18, 10}), DegenerateGeometry);
    CHECK_THROWS_AS(enumerate_paths(s, {0, 10}), DegenerateGeometry);
    CHECK_THROWS_AS(enumerate_paths(s, {-3, 10}), DegenerateGeometry);
}

}
