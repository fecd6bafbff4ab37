#pragma once

#include <string_view>

#include "factoryguard/geometry.hpp"

namespace fg {

// Planar body-frame velocity command [v_x, v_y, omega].
struct VelocityCommand {
    double vx = 0.0;     // m/s, forward
    double vy = 0.0;     // m/s, left
    double omega = 0.0;  // rad/s

    [[nodiscard]] double speed() const { return std::hypot(vx, vy); }
    friend bool operator==(const VelocityCommand&, const VelocityCommand&) = default;
};

// Upper edge of the humanoid gait envelope (running ceiling).
inline constexpr double kMaxGaitSpeed = 2.0;

enum class Gait { Walk, FastWalk, Run, Auto };

// Speed ceiling of each gait: walk 0-1.0, fast walk 1.0-1.5, run 1.5-2.0 m/s.
// Auto picks the slowest gait that covers the command, capped at the run ceiling.
double gait_speed_limit(Gait gait);
Gait gait_for_speed(double speed);
std::string_view gait_name(Gait gait);
Gait parse_gait(std::string_view name);

struct RobotState {
    Pose2 pose{};
    VelocityCommand velocity{};  // realised body-frame velocity
    VelocityCommand command{};   // last commanded velocity, held between steps
    Gait gait = Gait::Auto;
    double odometry = 0.0;       // accumulated planar arc length, m

    friend bool operator==(const RobotState&, const RobotState&) = default;
};

}  // namespace fg
