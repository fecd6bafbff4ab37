#include <cmath>
#include <random>

#include "doctest.h"
#include "factoryguard/errors.hpp"
#include "factoryguard/locomotion.hpp"
#include "oracles.hpp"

using namespace fg;
using namespace fg::locomotion;

namespace {

std::vector<double> uniform_vec(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

JointState random_joints(std::mt19937_64& rng) {
    JointState j;
    j.q = uniform_vec(rng, kNumJoints, -1.5, 1.5);
    j.qdot = uniform_vec(rng, kNumJoints, -5, 5);
    j.qddot = uniform_vec(rng, kNumJoints, -50, 50);
    j.q_default = uniform_vec(rng, kNumJoints, -0.5, 0.5);
    return j;
}

GainSet random_gains(std::mt19937_64& rng) {
    GainSet g;
    g.kp = uniform_vec(rng, kNumJoints, 10, 200);
    g.kd = uniform_vec(rng, kNumJoints, 0.5, 10);
    g.action_scale = uniform_vec(rng, 1, 0.1, 0.5)[0];
    return g;
}

}  // namespace

TEST_CASE("observation layout") {
    CHECK(obs_dimension(6) == 238);
    CHECK(obs_dimension(0) == 64);
    CHECK(obs_dimension(1) == 93);

    std::mt19937_64 rng(1);
    JointState j = random_joints(rng);
    const std::vector<double> v{0.5, -0.1, 0.2};
    const std::vector<double> g{0, 0, -1};
    std::vector<std::vector<double>> hist;
    for (int k = 0; k < 6; ++k) hist.push_back(std::vector<double>(kNumJoints, static_cast<double>(k + 1)));
    const auto obs = assemble_obs(v, j, g, hist);
    REQUIRE(obs.size() == 238);
    CHECK(obs[0] == 0.5);
    CHECK(obs[3] == j.q[0]);
    CHECK(obs[3 + 29] == j.qdot[0]);
    CHECK(obs[61] == 0.0);
    CHECK(obs[63] == -1.0);
    for (std::size_t k = 0; k < 6; ++k) {
        for (std::size_t i = 0; i < kNumJoints; ++i) CHECK(obs[64 + 29 * k + i] == static_cast<double>(k + 1));
    }
    CHECK(assemble_obs(v, j, g, {}).size() == 64);

    j.q.pop_back();
    CHECK_THROWS_AS(assemble_obs(v, j, g, hist), ShapeError);
    CHECK_THROWS_AS(assemble_obs(std::vector<double>{1, 2}, random_joints(rng), g, hist), ShapeError);
}

TEST_CASE("PD torque examples") {
    const JointState rest = JointState::zeros();
    const GainSet gains = GainSet::uniform(50.0, 1.0, 0.25);
    const auto zero = pd_torque(std::vector<double>(kNumJoints, 0.0), rest, gains);
    for (double t : zero) CHECK(t == 0.0);
    const auto five = pd_torque(std::vector<double>(kNumJoints, 0.4), rest, gains);
    for (double t : five) CHECK(t == doctest::Approx(5.0).epsilon(1e-12));
    CHECK_THROWS_AS(pd_torque(std::vector<double>(3, 0.0), rest, gains), ShapeError);
}

TEST_CASE("PD torque matches the scalar oracle and is affine in the action") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const auto j = random_joints(rng);
        const auto g = random_gains(rng);
        const auto a = uniform_vec(rng, kNumJoints, -1, 1);
        const auto b = uniform_vec(rng, kNumJoints, -1, 1);
        const auto tau = pd_torque(a, j, g);
        const auto ref = oracle::pd(a, j.q, j.qdot, j.q_default, g.kp, g.kd, g.action_scale);
        const auto tau_b = pd_torque(b, j, g);
        const auto tau0 = pd_torque(std::vector<double>(kNumJoints, 0.0), j, g);
        for (std::size_t i = 0; i < kNumJoints; ++i) {
            CHECK(std::abs(tau[i] - ref[i]) <= 1e-12 * std::max(1.0, std::abs(ref[i])));
            // tau(a) - tau(b) = Kp s (a - b)
            const double lhs = tau[i] - tau_b[i];
            const double rhs = g.kp[i] * g.action_scale * (a[i] - b[i]);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(tau0[i]) + std::abs(rhs)));
        }
    }
}

TEST_CASE("discounted return") {
    CHECK(discounted_return(std::vector<double>{}, 0.99) == 0.0);
    CHECK(std::abs(discounted_return(std::vector<double>{1, 1, 1}, 0.99) - 2.9701) <= 1e-12);
    CHECK(discounted_return(std::vector<double>{3.5}, 0.5) == 3.5);
    CHECK_THROWS_AS(discounted_return(std::vector<double>{1}, 1.0), DomainError);
    CHECK_THROWS_AS(discounted_return(std::vector<double>{1}, 0.0), DomainError);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto r = uniform_vec(rng, 1 + trial % 40, -2, 2);
        const double got = discounted_return(r, 0.99);
        CHECK(std::abs(got - oracle::discounted(r, 0.99)) <= 1e-12 * std::max(1.0, std::abs(got)));
    }
}

TEST_CASE("tracking reward") {
    const RewardWeights w;
    CHECK(reward_track({0.7, -0.2}, {0.7, -0.2}, 0.3, 0.3, w) == 2.0);
    CHECK(reward_track({0.5, 0}, {0, 0}, 0, 0, w) == doctest::Approx(1.0518).epsilon(1e-4));
    CHECK(reward_track({100, 0}, {0, 0}, 100, 0, w) < 1e-12);
}

TEST_CASE("regularisation reward") {
    RewardWeights w;
    const std::vector<double> z(kNumJoints, 0.0);
    CHECK(reward_reg(z, z, std::vector<double>{0, 0}, {false, false}, w) == 0.0);
    CHECK(reward_reg(z, z, std::vector<double>{0.5, 0.5}, {false, false}, w) == 0.0);
    CHECK(reward_reg(z, z, std::vector<double>{0.5, 0}, {true, false}, w) == doctest::Approx(-w.w_slip * 0.25));
    w.w_tau = w.w_qddot = w.w_slip = 1.0;
    std::vector<double> e1(kNumJoints, 0.0);
    e1[0] = 1.0;
    CHECK(reward_reg(e1, z, std::vector<double>{}, {}, w) == -1.0);
    CHECK_THROWS_AS(reward_reg(z, z, std::vector<double>{0.1}, {true, false}, w), ShapeError);
}

TEST_CASE("style and total reward") {
    const RewardWeights w;
    CHECK(reward_style(-1.0, std::vector<double>{w.h_target, w.h_target}, w) == w.w_feet);
    CHECK(reward_style(-1.0, std::vector<double>{0.3, 0.0}, w) < w.w_feet);
    CHECK(total_reward(2.0, 0.0, 0.0) == 2.0);
    CHECK(total_reward(0.0, 0.0, 0.0) == 0.0);
    CHECK(total_reward(1.0, -0.25, 0.5) == 1.25);
}

TEST_CASE("rewards match scalar oracles on random states") {
    std::mt19937_64 rng(4);
    const RewardWeights w;
    std::uniform_real_distribution<double> u(-2, 2);
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
    for (int trial = 0; trial < 100; ++trial) {
        const Vec2 v{u(rng), u(rng)}, c{u(rng), u(rng)};
        const double om = u(rng), oc = u(rng);
        CHECK(close(reward_track(v, c, om, oc, w),
                    oracle::track(v.x, v.y, c.x, c.y, om, oc, w.w_v, w.w_omega, w.sigma_v, w.sigma_omega)));
        const auto tau = uniform_vec(rng, kNumJoints, -80, 80);
        const auto qdd = uniform_vec(rng, kNumJoints, -40, 40);
        const auto feet = uniform_vec(rng, 2, 0, 1);
        const std::vector<bool> contact{static_cast<bool>(trial & 1), static_cast<bool>(trial & 2)};
        CHECK(close(reward_reg(tau, qdd, feet, contact, w),
                    oracle::reg(tau, qdd, feet, contact, w.w_tau, w.w_qddot, w.w_slip)));
        const auto heights = uniform_vec(rng, 2, 0, 0.3);
        const double gz = -1.0 + std::abs(u(rng)) / 4;
        CHECK(close(reward_style(gz, heights, w), oracle::style(gz, heights, w.h_target, w.w_upright, w.w_feet)));
    }
}

TEST_CASE("velocity executor") {
    RobotState r;
    r.pose = {1, 2, 0.4};
    const auto still = execute_velocity(r, {}, 0.05, Gait::Walk);
    CHECK(still.pose == r.pose);
    CHECK(still.odometry == 0.0);
    CHECK_THROWS_AS(execute_velocity(r, {}, 0.0, Gait::Walk), DomainError);

    CHECK(clamp_to_gait({2.5, 0, 0}, Gait::Run).vx == doctest::Approx(2.0));
    CHECK(clamp_to_gait({2.5, 0, 0}, Gait::Auto).vx == doctest::Approx(2.0));
    const auto diag = clamp_to_gait({3, 3, 0.5}, Gait::FastWalk);
    CHECK(diag.speed() == doctest::Approx(1.5));
    CHECK(diag.vx == doctest::Approx(diag.vy));
    CHECK(diag.omega == 0.5);
}

TEST_CASE("sustained command is tracked within 0.08 m/s") {
    RobotState r;
    const double dt = 0.05;
    double se = 0.0;
    int n = 0;
    for (int k = 0; k < 400; ++k) {
        r = execute_velocity(r, {1.0, 0, 0}, dt, Gait::Walk);
        if (k * dt >= 1.0) {
            se += (r.velocity.vx - 1.0) * (r.velocity.vx - 1.0) + r.velocity.vy * r.velocity.vy;
            ++n;
        }
    }
    CHECK(std::sqrt(se / n) <= 0.08);
    CHECK(r.pose.x == doctest::Approx(r.odometry));
    CHECK(r.odometry <= 1.0 * 400 * dt);
}

TEST_CASE("arc length never exceeds the speed bound") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-3, 3);
    RobotState r;
    const double dt = 0.05;
    for (int k = 0; k < 500; ++k) {
        const double before = r.odometry;
        r = execute_velocity(r, {u(rng), u(rng), u(rng)}, dt, Gait::FastWalk);
        CHECK(r.odometry - before <= 1.5 * dt + 1e-12);
        CHECK(r.velocity.speed() <= 1.5 + 1e-12);
    }
}
