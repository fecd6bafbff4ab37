#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "factoryguard/geometry.hpp"
#include "factoryguard/grid.hpp"
#include "factoryguard/kinematics.hpp"
#include "factoryguard/sensor_types.hpp"

namespace fg {

inline constexpr int kEmbeddingDim = 512;

struct Equipment {
    std::string id;
    std::string kind;
    Vec2 position{};
    Vec2 half_extent{0.5, 0.5};  // footprint, blocked on the grid
    std::optional<double> surface_temp;  // rendered in thermal frames when set
    friend bool operator==(const Equipment&, const Equipment&) = default;
};

struct Pipe {
    std::string id;
    std::vector<Vec2> polyline;
    double sample_step = 0.1;          // arclength between temperature samples, m
    std::vector<double> segment_temps;  // floor(length/step)+1 samples, degC
    double baseline_temp = 65.0;
    double limit_temp = 110.0;
    double height = 2.5;  // above floor, m

    [[nodiscard]] double length() const { return polyline_length(polyline); }
    [[nodiscard]] std::size_t expected_samples() const;
    [[nodiscard]] Vec2 point_at(double arclength) const { return polyline_point(polyline, arclength); }
    [[nodiscard]] double temp_at(double arclength) const;  // linear interpolation between samples
    friend bool operator==(const Pipe&, const Pipe&) = default;
};

struct Valve {
    std::string id;
    std::string pipe_id;
    double arclength_pos = 0.0;
    double open_fraction = 1.0;
    double setpoint_fraction = 1.0;
    bool stuck = false;
    friend bool operator==(const Valve&, const Valve&) = default;
};

// Daily access window in seconds since midnight, start < end.
struct TimeWindow {
    double start_s = 0.0;
    double end_s = 0.0;
    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct Zone {
    std::string id;
    std::vector<Vec2> polygon;
    bool restricted = false;
    std::vector<TimeWindow> allowed_windows;
    friend bool operator==(const Zone&, const Zone&) = default;
};

struct TrajectoryPoint {
    double t = 0.0;
    Vec2 p{};
    friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

struct Person {
    std::string id;
    std::vector<TrajectoryPoint> trajectory;  // time-ordered; clamped at both ends
    std::vector<double> true_embedding;       // unit norm, kEmbeddingDim
    bool authorized = false;
    double height = 1.7;

    [[nodiscard]] Vec2 position_at(double t) const;
    friend bool operator==(const Person&, const Person&) = default;
};

struct FireSource {
    std::string id;
    Vec2 position{};
    std::string equipment_id;
    double area_ratio = 0.0;    // frame fraction at ref_distance
    double smoke_ratio = 0.0;
    double growth_rate = 0.0;   // 1/s, exponential, until max_area_ratio
    double max_area_ratio = 0.6;
    double decay_rate = 0.2;    // 1/s after discharge
    double confidence = 0.92;   // scripted detector confidence while burning
    double smoke_confidence = 0.8;
    double ref_distance = 6.0;
    double height = 1.2;        // flame centre above floor, m
    double intensity = 1.0;     // 1 until discharge, then decays with decay_rate
    std::optional<double> suppressed_at;
    std::optional<double> discharge_at;  // armed system countdown target

    [[nodiscard]] double detection_confidence() const { return confidence * intensity; }
    friend bool operator==(const FireSource&, const FireSource&) = default;
};

// Localised overheating on a pipe, shaped as a Gaussian bump in arclength.
// Tied to a valve (active while it is stuck) or free-standing with an end time.
struct ThermalFault {
    std::string id;
    std::string pipe_id;
    std::string valve_id;  // empty for a free-standing spike
    double arclength = 0.0;
    double peak_delta = 0.0;  // degC above baseline at the centre
    double width = 1.5;       // Gaussian sigma, m
    std::optional<double> ends_at;
    friend bool operator==(const ThermalFault&, const ThermalFault&) = default;
};

struct InspectionPoint {
    std::string id;
    Pose2 pose{};
    std::string pipe_id;
    friend bool operator==(const InspectionPoint&, const InspectionPoint&) = default;
};

struct SensorConfig {
    CameraIntrinsics rgb{};
    double rgb_hfov_deg = 87.0;
    double person_range = 6.0;  // m
    double fire_range = 10.0;   // m
    double min_confidence = 0.25;  // detector output floor
    double camera_height = 1.2;
    int thermal_width = 160;
    int thermal_height = 120;
    double thermal_hfov_deg = 56.0;
    double thermal_range = 12.0;
    double thermal_quantum = 0.1;
    double ambient_temp = 25.0;
    friend bool operator==(const SensorConfig&, const SensorConfig&) = default;
};

struct WorldParams {
    double thermal_tau_heat = 60.0;      // s, toward an active fault profile
    double thermal_tau_recovery = 85.0;  // s, back to baseline
    double robot_lag = 0.15;             // s, first-order velocity lag
    double pre_discharge_delay = 15.0;   // s, armed suppression countdown
    double robot_substep = 0.05;         // s, integration step for the robot
    friend bool operator==(const WorldParams&, const WorldParams&) = default;
};

// Ground-truth facility state. The occupancy grid is shared immutably between
// snapshots; replace the pointer to mutate it.
struct FacilityWorld {
    std::shared_ptr<const OccupancyGrid> grid;
    std::vector<Equipment> equipment;
    std::vector<Pipe> pipes;
    std::vector<Valve> valves;
    std::vector<Zone> zones;
    std::vector<Person> persons;
    std::vector<FireSource> fires;
    std::vector<ThermalFault> faults;
    std::vector<InspectionPoint> inspection_points;
    RobotState robot{};
    double clock = 0.0;
    double time_of_day_origin = 0.0;  // seconds since midnight at clock 0
    std::map<std::string, bool> power_zones;
    SensorConfig sensors{};
    WorldParams params{};

    [[nodiscard]] double time_of_day() const;

    [[nodiscard]] const Pipe* find_pipe(const std::string& id) const;
    [[nodiscard]] Pipe* find_pipe(const std::string& id);
    [[nodiscard]] const Valve* find_valve(const std::string& id) const;
    [[nodiscard]] Valve* find_valve(const std::string& id);
    [[nodiscard]] const Zone* find_zone(const std::string& id) const;
    [[nodiscard]] FireSource* find_fire(const std::string& id);
    [[nodiscard]] const FireSource* find_fire(const std::string& id) const;
    [[nodiscard]] const Equipment* find_equipment(const std::string& id) const;
    [[nodiscard]] Vec2 valve_position(const Valve& v) const;

    friend bool operator==(const FacilityWorld& a, const FacilityWorld& b);
};

// Throws InputError describing the first violated invariant.
void validate(const FacilityWorld& world);

// Advances the world by dt seconds. dt == 0 returns the input unchanged.
FacilityWorld step(FacilityWorld world, double dt);

// Per-sample fault target profile for a pipe at the world's current state.
std::vector<double> thermal_target(const FacilityWorld& world, const Pipe& pipe);

struct ValveReset {
    std::string valve_id;
};
struct FireSuppression {
    std::string fire_id;
    bool arm_only = false;  // start the pre-discharge countdown instead of discharging
};
struct PowerIsolation {
    std::string zone_id;
};
struct SetVelocity {
    VelocityCommand cmd;
};
using ActuationCommand = std::variant<ValveReset, FireSuppression, PowerIsolation, SetVelocity>;

class CommandRejected : public Error {
public:
    explicit CommandRejected(std::string id)
        : Error("command rejected: unknown entity '" + id + "'"), id_(std::move(id)) {}
    [[nodiscard]] const std::string& id() const { return id_; }

private:
    std::string id_;
};

FacilityWorld apply_actuation(FacilityWorld world, const ActuationCommand& cmd);

// Random unit vector of kEmbeddingDim components from a seed.
std::vector<double> random_unit_embedding(std::uint64_t seed);

}  // namespace fg
