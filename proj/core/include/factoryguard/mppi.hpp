#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "factoryguard/grid.hpp"
#include "factoryguard/kinematics.hpp"

namespace fg::planning {

using ControlSeq = std::vector<VelocityCommand>;

struct MppiParams {
    int horizon = 20;
    double dt = 0.1;
    int samples = 256;
    std::array<double, 3> noise_std{0.5, 0.25, 0.8};  // vx, vy, omega
    // Share of each sample's perturbation held constant over the horizon; the
    // rest is drawn per step.
    double noise_correlation = 0.8;
    double lambda = 1.0;
    double w_goal = 10.0;
    double w_obstacle = 1e6;  // per colliding step
    double w_effort = 0.05;
    Gait gait = Gait::Auto;
    double max_omega = 1.5;

    void validate() const;
};

// Poses after each control, preceded by the start pose (size controls+1).
std::vector<Pose2> rollout(const Pose2& start, const ControlSeq& controls, double dt);

using CostFn = std::function<double(const std::vector<Pose2>&, const ControlSeq&)>;

// Terminal distance to the waypoint, hard collision penalty per step on the
// (already inflated) grid, and quadratic effort.
CostFn waypoint_cost(const OccupancyGrid* grid, Vec2 waypoint, const MppiParams& params);

VelocityCommand clamp_command(const VelocityCommand& cmd, const MppiParams& params);

struct MppiResult {
    VelocityCommand command;  // first control of the updated sequence
    ControlSeq nominal;       // updated sequence (not shifted)
    double nominal_cost = 0.0;
    double updated_cost = 0.0;
    double min_sample_cost = 0.0;
};

MppiResult mppi_step(const Pose2& state, const ControlSeq& nominal, const CostFn& cost, const MppiParams& params,
                     std::uint64_t seed);

// Receding-horizon shift: drops the first control and repeats the last.
ControlSeq shift_nominal(const ControlSeq& seq);

}  // namespace fg::planning
