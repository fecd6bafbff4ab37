#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "factoryguard/errors.hpp"
#include "factoryguard/mppi.hpp"
#include "oracles.hpp"

using namespace fg;
using namespace fg::planning;

namespace {

ControlSeq constant(int n, VelocityCommand c) { return ControlSeq(static_cast<std::size_t>(n), c); }

}  // namespace

TEST_CASE("rollout integrates body-frame velocity") {
    const auto traj = rollout({}, constant(10, {1.0, 0.0, 0.0}), 0.1);
    REQUIRE(traj.size() == 11);
    CHECK(traj.back().x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(traj.back().y == doctest::Approx(0.0));

    const auto side = rollout({0, 0, std::numbers::pi / 2}, constant(5, {0.0, 1.0, 0.0}), 0.2);
    CHECK(side.back().x == doctest::Approx(-1.0));
    CHECK(side.back().y == doctest::Approx(0.0).epsilon(1e-12));

    // Pure rotation for a full period returns the heading modulo 2 pi.
    const auto spin = rollout({1, 2, 0.3}, constant(40, {0.0, 0.0, std::numbers::pi / 2}), 0.1);
    CHECK(spin.back().x == 1.0);
    CHECK(spin.back().y == 2.0);
    CHECK(wrap_angle(spin.back().theta - 0.3) == doctest::Approx(0.0).scale(1.0));

    CHECK(rollout({}, {}, 0.1).size() == 1);
    CHECK_THROWS_AS(rollout({}, {}, 0.0), DomainError);
}

TEST_CASE("parameter validation") {
    MppiParams p;
    CHECK_NOTHROW(p.validate());
    auto bad = [](auto mutate) {
        MppiParams q;
        mutate(q);
        CHECK_THROWS_AS(q.validate(), DomainError);
    };
    bad([](MppiParams& q) { q.horizon = 0; });
    bad([](MppiParams& q) { q.samples = 0; });
    bad([](MppiParams& q) { q.dt = 0.0; });
    bad([](MppiParams& q) { q.lambda = 0.0; });
    bad([](MppiParams& q) { q.noise_std[1] = -0.1; });
    bad([](MppiParams& q) { q.noise_correlation = 1.5; });
}

TEST_CASE("zero noise returns the nominal exactly") {
    MppiParams p;
    p.noise_std = {0.0, 0.0, 0.0};
    ControlSeq nom;
    for (int t = 0; t < p.horizon; ++t) nom.push_back({0.3 + 0.01 * t, -0.2, 0.1 * std::sin(t)});
    const auto cost = waypoint_cost(nullptr, {4, 1}, p);
    const auto r = mppi_step({0.5, 0.5, 0.2}, nom, cost, p, 11);
    CHECK(r.nominal == nom);
    CHECK(r.command == nom.front());
    CHECK(r.updated_cost == r.nominal_cost);
}

TEST_CASE("clamp keeps commands inside the gait envelope") {
    MppiParams p;
    const auto c = clamp_command({3.0, 4.0, -9.0}, p);
    CHECK(c.speed() == doctest::Approx(kMaxGaitSpeed));
    CHECK(c.vx / c.vy == doctest::Approx(0.75));
    CHECK(c.omega == -p.max_omega);
    p.gait = Gait::Walk;
    CHECK(clamp_command({2.0, 0.0, 0.0}, p).vx == doctest::Approx(1.0));
    CHECK(clamp_command({0.4, 0.1, 0.2}, p) == VelocityCommand{0.4, 0.1, 0.2});
}

TEST_CASE("cost terms") {
    MppiParams p;
    OccupancyGrid g(10, 10, 1.0);
    g.set_blocked({2, 0}, true);
    const auto cost = waypoint_cost(&g, {5, 0.5}, p);
    const auto u = constant(3, {1.0, 0.0, 0.0});
    const auto traj = rollout({0.5, 0.5, 0}, u, 1.0);  // passes through cell (2,0)
    const double expected = p.w_goal * 1.5 + p.w_obstacle + p.w_effort * 3.0 * 1.0 * p.dt;
    CHECK(cost(traj, u) == doctest::Approx(expected));
}

TEST_CASE("MPPI heads for a goal ahead and is deterministic") {
    MppiParams p;
    const auto cost = waypoint_cost(nullptr, {5, 0}, p);
    const auto a = mppi_step({}, ControlSeq(20), cost, p, 42);
    const auto b = mppi_step({}, ControlSeq(20), cost, p, 42);
    CHECK(a.command.vx > 0.0);
    CHECK(std::abs(a.command.vy) < a.command.vx);
    CHECK(a.nominal == b.nominal);
    CHECK(a.command == b.command);
    CHECK(a.updated_cost == b.updated_cost);
    CHECK(a.min_sample_cost <= a.nominal_cost);
    const auto c = mppi_step({}, ControlSeq(20), cost, p, 43);
    CHECK_FALSE(c.nominal == a.nominal);
}

TEST_CASE("updated cost never exceeds the nominal on free-space instances") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> dist(3.0, 8.0);
    MppiParams p;
    int positive = 0;
    for (int i = 0; i < 50; ++i) {
        const Pose2 start{0, 0, ang(rng)};
        const double b = ang(rng);
        const double d = dist(rng);
        const Vec2 goal{d * std::cos(b), d * std::sin(b)};
        const auto cost = waypoint_cost(nullptr, goal, p);
        const auto r = mppi_step(start, ControlSeq(20), cost, p, 1000 + i);
        CHECK(r.updated_cost <= r.nominal_cost);
        const auto ref = oracle::best_one_step(start, cost, p.dt);
        positive += r.command.vx * ref.vx + r.command.vy * ref.vy > 0.0;
    }
    CHECK(positive >= 48);
}

TEST_CASE("large temperature averages the samples") {
    MppiParams p;
    p.lambda = 1e12;
    p.samples = 2048;
    const ControlSeq nom = constant(p.horizon, {0.5, 0.0, 0.0});
    const auto r = mppi_step({}, nom, waypoint_cost(nullptr, {5, 0}, p), p, 3);
    // Mean of zero-mean perturbations: within 3 sigma / sqrt(K) per channel.
    for (std::size_t t = 0; t < nom.size(); ++t) {
        CHECK(std::abs(r.nominal[t].vx - nom[t].vx) < 3 * p.noise_std[0] / std::sqrt(p.samples - 1.0));
        CHECK(std::abs(r.nominal[t].vy - nom[t].vy) < 3 * p.noise_std[1] / std::sqrt(p.samples - 1.0));
        CHECK(std::abs(r.nominal[t].omega - nom[t].omega) < 3 * p.noise_std[2] / std::sqrt(p.samples - 1.0));
    }
}

TEST_CASE("shift repeats the last control") {
    const ControlSeq s{{1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
    CHECK(shift_nominal(s) == ControlSeq{{2, 0, 0}, {3, 0, 0}, {3, 0, 0}});
    CHECK(shift_nominal({}).empty());
}
