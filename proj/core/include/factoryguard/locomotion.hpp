#pragma once

#include <span>
#include <vector>

#include "factoryguard/geometry.hpp"
#include "factoryguard/kinematics.hpp"

// Locomotion MDP math for the 29-DOF humanoid: observation layout, PD torque
// conversion, reward decomposition, plus the kinematic velocity executor the
// simulator uses in place of a trained policy.
namespace fg::locomotion {

inline constexpr std::size_t kNumJoints = 29;
inline constexpr std::size_t kDefaultHistory = 6;

struct JointState {
    std::vector<double> q;
    std::vector<double> qdot;
    std::vector<double> qddot;
    std::vector<double> q_default;

    static JointState zeros();
    void validate() const;  // ShapeError unless every array has kNumJoints finite entries
};

struct GainSet {
    std::vector<double> kp;
    std::vector<double> kd;
    double action_scale = 0.25;

    static GainSet uniform(double kp, double kd, double action_scale);
    void validate() const;
};

struct RewardWeights {
    double w_v = 1.5;
    double w_omega = 0.5;
    double sigma_v = 0.25;
    double sigma_omega = 0.25;
    double w_tau = 2.5e-5;
    double w_qddot = 2.5e-7;
    double w_slip = 0.25;
    double w_upright = 1.0;
    double w_feet = 0.5;
    double gamma = 0.99;
    double h_target = 0.08;  // m

    void validate() const;  // DomainError on sigma <= 0 or gamma outside (0, 1)
};

// [v_cmd(3), q(29), qdot(29), gravity(3), a_{t-1} .. a_{t-H}(29 each)].
// The documented component list sums to 64 + 29H (238 for H = 6).
std::size_t obs_dimension(std::size_t history_len);
std::vector<double> assemble_obs(std::span<const double> v_cmd, const JointState& joints,
                                 std::span<const double> gravity,
                                 std::span<const std::vector<double>> action_history);

// tau = Kp (a * s + q_default - q) - Kd qdot, elementwise.
std::vector<double> pd_torque(std::span<const double> action, const JointState& joints, const GainSet& gains);

double discounted_return(std::span<const double> rewards, double gamma);

double reward_track(Vec2 v_xy, Vec2 v_cmd_xy, double omega, double omega_cmd, const RewardWeights& w);

// Slip is penalised only for feet flagged in contact.
double reward_reg(std::span<const double> torque, std::span<const double> qddot,
                  std::span<const double> foot_speeds, const std::vector<bool>& contacts,
                  const RewardWeights& w);

// Upright term uses the g_z = -1 convention for an upright base (zero penalty).
double reward_style(double gravity_z, std::span<const double> feet_heights, const RewardWeights& w);

double total_reward(double track, double reg, double style);

struct RewardBreakdown {
    double track = 0.0;
    double reg = 0.0;
    double style = 0.0;
    double total = 0.0;
};

// Integrates the clamped command with a first-order lag on the realised
// velocity (time constant `lag`), then advances the pose with unicycle kinematics.
RobotState execute_velocity(RobotState robot, VelocityCommand cmd, double dt, Gait gait, double lag = 0.15);

// Clamps planar speed to the gait ceiling, preserving direction.
VelocityCommand clamp_to_gait(VelocityCommand cmd, Gait gait);

}  // namespace fg::locomotion
