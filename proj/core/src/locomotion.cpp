#include "factoryguard/locomotion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fg {

double gait_speed_limit(Gait gait) {
    switch (gait) {
    case Gait::Walk: return 1.0;
    case Gait::FastWalk: return 1.5;
    case Gait::Run: return 2.0;
    case Gait::Auto: return kMaxGaitSpeed;
    }
    return kMaxGaitSpeed;
}

Gait gait_for_speed(double speed) {
    if (speed <= 1.0) return Gait::Walk;
    if (speed <= 1.5) return Gait::FastWalk;
    return Gait::Run;
}

std::string_view gait_name(Gait gait) {
    switch (gait) {
    case Gait::Walk: return "walk";
    case Gait::FastWalk: return "fast_walk";
    case Gait::Run: return "run";
    case Gait::Auto: return "auto";
    }
    return "auto";
}

Gait parse_gait(std::string_view name) {
    if (name == "walk") return Gait::Walk;
    if (name == "fast_walk") return Gait::FastWalk;
    if (name == "run") return Gait::Run;
    if (name == "auto") return Gait::Auto;
    throw InputError("unknown gait '" + std::string(name) + "'");
}

}  // namespace fg

namespace fg::locomotion {

namespace {

void require_len(std::span<const double> v, std::size_t n, const char* what) {
    if (v.size() != n) {
        throw ShapeError(std::string(what) + ": expected " + std::to_string(n) + " entries, got " +
                         std::to_string(v.size()));
    }
}

double squared_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

}  // namespace

JointState JointState::zeros() {
    JointState s;
    s.q.assign(kNumJoints, 0.0);
    s.qdot.assign(kNumJoints, 0.0);
    s.qddot.assign(kNumJoints, 0.0);
    s.q_default.assign(kNumJoints, 0.0);
    return s;
}

void JointState::validate() const {
    require_len(q, kNumJoints, "q");
    require_len(qdot, kNumJoints, "qdot");
    require_len(qddot, kNumJoints, "qddot");
    require_len(q_default, kNumJoints, "q_default");
    for (const auto* arr : {&q, &qdot, &qddot, &q_default}) {
        for (double x : *arr) {
            if (!std::isfinite(x)) throw ShapeError("joint state contains a non-finite entry");
        }
    }
}

GainSet GainSet::uniform(double kp, double kd, double action_scale) {
    GainSet g;
    g.kp.assign(kNumJoints, kp);
    g.kd.assign(kNumJoints, kd);
    g.action_scale = action_scale;
    return g;
}

void GainSet::validate() const {
    require_len(kp, kNumJoints, "Kp");
    require_len(kd, kNumJoints, "Kd");
    for (std::size_t i = 0; i < kNumJoints; ++i) {
        if (kp[i] < 0.0 || kd[i] < 0.0) throw DomainError("gains must be non-negative");
    }
}

void RewardWeights::validate() const {
    if (!(sigma_v > 0.0) || !(sigma_omega > 0.0)) throw DomainError("reward sigmas must be > 0");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("discount factor must lie in (0, 1)");
}

std::size_t obs_dimension(std::size_t history_len) {
    return 3 + kNumJoints + kNumJoints + 3 + kNumJoints * history_len;
}

std::vector<double> assemble_obs(std::span<const double> v_cmd, const JointState& joints,
                                 std::span<const double> gravity,
                                 std::span<const std::vector<double>> action_history) {
    require_len(v_cmd, 3, "v_cmd");
    require_len(gravity, 3, "gravity");
    require_len(joints.q, kNumJoints, "q");
    require_len(joints.qdot, kNumJoints, "qdot");
    for (const auto& a : action_history) require_len(a, kNumJoints, "action history entry");

    std::vector<double> obs;
    obs.reserve(obs_dimension(action_history.size()));
    obs.insert(obs.end(), v_cmd.begin(), v_cmd.end());
    obs.insert(obs.end(), joints.q.begin(), joints.q.end());
    obs.insert(obs.end(), joints.qdot.begin(), joints.qdot.end());
    obs.insert(obs.end(), gravity.begin(), gravity.end());
    for (const auto& a : action_history) obs.insert(obs.end(), a.begin(), a.end());
    return obs;
}

std::vector<double> pd_torque(std::span<const double> action, const JointState& joints, const GainSet& gains) {
    require_len(action, kNumJoints, "action");
    require_len(joints.q, kNumJoints, "q");
    require_len(joints.qdot, kNumJoints, "qdot");
    require_len(joints.q_default, kNumJoints, "q_default");
    require_len(gains.kp, kNumJoints, "Kp");
    require_len(gains.kd, kNumJoints, "Kd");

    std::vector<double> tau(kNumJoints);
    for (std::size_t i = 0; i < kNumJoints; ++i) {
        const double target = action[i] * gains.action_scale + joints.q_default[i];
        tau[i] = gains.kp[i] * (target - joints.q[i]) - gains.kd[i] * joints.qdot[i];
    }
    return tau;
}

double discounted_return(std::span<const double> rewards, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("discount factor must lie in (0, 1)");
    double total = 0.0;
    double discount = 1.0;
    for (double r : rewards) {
        total += discount * r;
        discount *= gamma;
    }
    return total;
}

double reward_track(Vec2 v_xy, Vec2 v_cmd_xy, double omega, double omega_cmd, const RewardWeights& w) {
    if (!(w.sigma_v > 0.0) || !(w.sigma_omega > 0.0)) throw DomainError("reward sigmas must be > 0");
    const Vec2 ev = v_xy - v_cmd_xy;
    const double ew = omega - omega_cmd;
    return w.w_v * std::exp(-(ev.x * ev.x + ev.y * ev.y) / w.sigma_v) +
           w.w_omega * std::exp(-(ew * ew) / w.sigma_omega);
}

double reward_reg(std::span<const double> torque, std::span<const double> qddot,
                  std::span<const double> foot_speeds, const std::vector<bool>& contacts,
                  const RewardWeights& w) {
    require_len(torque, kNumJoints, "torque");
    require_len(qddot, kNumJoints, "qddot");
    if (foot_speeds.size() != contacts.size()) throw ShapeError("foot speeds and contact flags differ in length");
    double slip = 0.0;
    for (std::size_t i = 0; i < foot_speeds.size(); ++i) {
        if (contacts[i]) slip += foot_speeds[i] * foot_speeds[i];
    }
    return -w.w_tau * squared_norm(torque) - w.w_qddot * squared_norm(qddot) - w.w_slip * slip;
}

double reward_style(double gravity_z, std::span<const double> feet_heights, const RewardWeights& w) {
    double err = 0.0;
    for (double h : feet_heights) err += (h - w.h_target) * (h - w.h_target);
    return w.w_upright * (gravity_z + 1.0) + w.w_feet * std::exp(-err);
}

double total_reward(double track, double reg, double style) { return track + reg + style; }

VelocityCommand clamp_to_gait(VelocityCommand cmd, Gait gait) {
    const double limit = std::min(gait_speed_limit(gait), kMaxGaitSpeed);
    const double speed = cmd.speed();
    if (speed > limit) {
        const double s = limit / speed;
        cmd.vx *= s;
        cmd.vy *= s;
    }
    return cmd;
}

RobotState execute_velocity(RobotState robot, VelocityCommand cmd, double dt, Gait gait, double lag) {
    if (!(dt > 0.0)) throw DomainError("execute_velocity: dt must be > 0");
    cmd = clamp_to_gait(cmd, gait);
    robot.command = cmd;

    const double alpha = lag > 0.0 ? 1.0 - std::exp(-dt / lag) : 1.0;
    robot.velocity.vx += (cmd.vx - robot.velocity.vx) * alpha;
    robot.velocity.vy += (cmd.vy - robot.velocity.vy) * alpha;
    robot.velocity.omega += (cmd.omega - robot.velocity.omega) * alpha;

    const double c = std::cos(robot.pose.theta);
    const double s = std::sin(robot.pose.theta);
    const double dx = (robot.velocity.vx * c - robot.velocity.vy * s) * dt;
    const double dy = (robot.velocity.vx * s + robot.velocity.vy * c) * dt;
    robot.pose.x += dx;
    robot.pose.y += dy;
    robot.pose.theta = wrap_angle(robot.pose.theta + robot.velocity.omega * dt);
    robot.odometry += std::hypot(dx, dy);
    return robot;
}

}  // namespace fg::locomotion
