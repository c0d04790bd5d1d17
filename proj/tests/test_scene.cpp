#include "uavsec/errors.hpp"
#include "uavsec/scene.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace uavsec;
using scene::MobilityKind;
using scene::MobilityPolicy;
using scene::NodeSpec;
using scene::Position3D;
using scene::Role;

namespace {

NodeSpec make_node(std::string id, Role role, Position3D pos, MobilityPolicy mob = {}) {
    NodeSpec n;
    n.id = std::move(id);
    n.role = role;
    n.initial_position = pos;
    n.mobility = std::move(mob);
    return n;
}

} // namespace

TEST_CASE("static node stays put") {
    std::vector<NodeSpec> roster{make_node("bs1", Role::base_station, {0, 0, 30})};
    const auto p = scene::position_at(roster[0], roster, 57.0);
    CHECK(p == Position3D{0, 0, 30});
}

TEST_CASE("linear mobility integrates velocity") {
    MobilityPolicy m;
    m.kind = MobilityKind::linear;
    m.velocity = {10, 0, 0};
    std::vector<NodeSpec> roster{make_node("ue1", Role::user, {0, 0, 0}, m)};
    const auto p = scene::position_at(roster[0], roster, 25.0);
    CHECK(p.x == doctest::Approx(250.0));
    CHECK(p.y == doctest::Approx(0.0));
    CHECK(p.z == doctest::Approx(0.0));
}

TEST_CASE("linear mobility is additive in time") {
    MobilityPolicy m;
    m.kind = MobilityKind::linear;
    m.velocity = {3.5, -1.25, 0.5};
    std::vector<NodeSpec> roster{make_node("n", Role::user, {10, 20, 5}, m)};
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> dt(0.0, 50.0);
    for (int i = 0; i < 50; ++i) {
        const double t1 = dt(gen), t2 = dt(gen);
        const auto a = scene::position_at(roster[0], roster, t1 + t2);
        const auto b = scene::position_at(roster[0], roster, t1);
        CHECK(a.x - b.x == doctest::Approx(m.velocity.x * t2).epsilon(1e-9));
        CHECK(a.y - b.y == doctest::Approx(m.velocity.y * t2).epsilon(1e-9));
        CHECK(a.z - b.z == doctest::Approx(m.velocity.z * t2).epsilon(1e-9));
    }
}

TEST_CASE("follow keeps constant offset above its target") {
    MobilityPolicy lm;
    lm.kind = MobilityKind::linear;
    lm.velocity = {10, 0, 0};
    MobilityPolicy fm;
    fm.kind = MobilityKind::follow;
    fm.follow_target = "ue1";
    fm.follow_offset = {0, 0, 20};
    std::vector<NodeSpec> roster{make_node("ue1", Role::user, {0, 0, 0}, lm),
                                 make_node("uav1", Role::uav_relay, {0, 0, 20}, fm)};
    for (double t : {0.0, 3.0, 30.0, 77.7}) {
        const auto u = scene::position_at(roster[0], roster, t);
        const auto v = scene::position_at(roster[1], roster, t);
        CHECK(v.x - u.x == doctest::Approx(0.0));
        CHECK(v.y - u.y == doctest::Approx(0.0));
        CHECK(v.z - u.z == doctest::Approx(20.0));
    }
    // offset identity at a known point
    const auto at300 = scene::position_at(roster[1], roster, 30.0);
    CHECK(at300.x == doctest::Approx(300.0));
    CHECK(at300.z == doctest::Approx(20.0));
}

TEST_CASE("follow offsets clamp to the ground") {
    MobilityPolicy fm;
    fm.kind = MobilityKind::follow;
    fm.follow_target = "ue1";
    fm.follow_offset = {0, 0, -5};
    std::vector<NodeSpec> roster{make_node("ue1", Role::user, {0, 0, 0}),
                                 make_node("uav1", Role::uav_relay, {0, 0, 20}, fm)};
    CHECK(scene::position_at(roster[1], roster, 1.0).z == 0.0);
}

TEST_CASE("missing follow target and cycles are config errors") {
    MobilityPolicy fm;
    fm.kind = MobilityKind::follow;
    fm.follow_target = "ghost";
    std::vector<NodeSpec> roster{make_node("uav1", Role::uav_relay, {0, 0, 20}, fm)};
    CHECK_THROWS_AS(scene::validate_mobility(roster), config_error);
    CHECK_THROWS_AS(scene::position_at(roster[0], roster, 0.0), config_error);

    MobilityPolicy fa, fb;
    fa.kind = MobilityKind::follow;
    fa.follow_target = "b";
    fb.kind = MobilityKind::follow;
    fb.follow_target = "a";
    std::vector<NodeSpec> cyc{make_node("a", Role::uav_relay, {0, 0, 10}, fa),
                              make_node("b", Role::uav_relay, {0, 0, 10}, fb)};
    CHECK_THROWS_AS(scene::validate_mobility(cyc), config_error);
    CHECK_THROWS_AS(scene::position_at(cyc[0], cyc, 1.0), config_error);
}

TEST_CASE("position_at is pure") {
    MobilityPolicy m;
    m.kind = MobilityKind::linear;
    m.velocity = {1, 2, 3};
    std::vector<NodeSpec> roster{make_node("n", Role::user, {4, 5, 6}, m)};
    const auto a = scene::position_at(roster[0], roster, 12.25);
    const auto b = scene::position_at(roster[0], roster, 12.25);
    CHECK(a == b);
}

TEST_CASE("distance basics") {
    CHECK(scene::distance({0, 0, 0}, {0, 0, 0}) == 0.0);
    CHECK(scene::distance({0, 0, 30}, {250, 0, 0}) == doctest::Approx(251.794).epsilon(1e-5));
}

TEST_CASE("distance is symmetric and satisfies the triangle inequality") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> coord(-500.0, 500.0);
    for (int i = 0; i < 200; ++i) {
        const Position3D a{coord(gen), coord(gen), std::abs(coord(gen))};
        const Position3D b{coord(gen), coord(gen), std::abs(coord(gen))};
        const Position3D c{coord(gen), coord(gen), std::abs(coord(gen))};
        CHECK(scene::distance(a, b) == doctest::Approx(scene::distance(b, a)));
        CHECK(scene::distance(a, c) <= scene::distance(a, b) + scene::distance(b, c) + 1e-9);
    }
}

TEST_CASE("elevation angle") {
    CHECK(scene::elevation_angle({0, 0, 0}, {20, 0, 20}) == doctest::Approx(45.0));
    CHECK(scene::elevation_angle({5, 5, 0}, {5, 5, 33}) == doctest::Approx(90.0));
    CHECK(scene::elevation_angle({250, 0, 0}, {0, 0, 30}) ==
          doctest::Approx(6.843).epsilon(1e-4));
    CHECK_THROWS_AS(scene::elevation_angle({0, 0, 10}, {5, 0, 10}), std::domain_error);
    CHECK_THROWS_AS(scene::elevation_angle({0, 0, 10}, {5, 0, 3}), std::domain_error);
}
