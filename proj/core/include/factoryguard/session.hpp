#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "factoryguard/event_log.hpp"
#include "factoryguard/memory.hpp"
#include "factoryguard/mppi.hpp"
#include "factoryguard/planning.hpp"
#include "factoryguard/react.hpp"
#include "factoryguard/registry.hpp"
#include "factoryguard/scenario.hpp"
#include "factoryguard/understanding.hpp"

namespace fg::sim {

struct SessionConfig {
    std::uint64_t seed = 0;
    double tick = 0.1;                // s, world/control step during long tool calls
    double docking_tolerance = 0.3;   // m, registered thermal scans
    double robot_radius = 0.3;        // m, obstacle inflation
    double lookahead = 1.0;           // m along the global path
    double arrival_tolerance = 0.2;   // m
    double arrival_speed = 0.3;       // m/s
    double heading_tolerance = 0.1;   // rad
    double nav_timeout = 120.0;       // s per locomotion call
    double reflex_standoff = 4.0;     // m from an armed suppression target
    double episode_margin = 0.0;      // s past the scenario duration before timing out
    planning::MppiParams mppi{};
};

// One locomotion call, for path-efficiency accounting.
struct NavigationRecord {
    double start = 0.0;
    double end = 0.0;
    double shortest = 0.0;   // metric length of the initial D* Lite path
    double traveled = 0.0;   // odometry delta
    bool arrived = false;
    std::string purpose;
};

// Ground-truth facts measured by the simulator (never shown to the policy).
struct SessionRecord {
    std::optional<double> suppression_armed;
    std::optional<double> discharge;
    std::optional<double> valve_reset;
    std::optional<double> pipe_recovered;    // first time max|T - baseline| < 2 after reset
    std::optional<double> operator_decision_time;
    std::vector<NavigationRecord> navigation;
    std::vector<std::string> rejected_actuations;
    std::vector<std::string> wrong_actuations;  // accepted but unjustified (e.g. resetting a healthy valve)
    int reflex_retreats = 0;
};

class SimSession : public orchestra::ToolHost {
public:
    SimSession(const Scenario& scenario, memory::MemoryStores stores, EventLog& log, SessionConfig config = {});

    [[nodiscard]] double now() const override { return world_.clock; }
    orchestra::ToolResult execute(const orchestra::ToolDescriptor& tool, const orchestra::ToolCall& call,
                                  double& latency) override;
    [[nodiscard]] nlohmann::json snapshot() const override;
    [[nodiscard]] bool timed_out() const override;

    [[nodiscard]] const FacilityWorld& world() const { return world_; }
    [[nodiscard]] const SessionRecord& record() const { return record_; }
    [[nodiscard]] const memory::MemoryStores& stores() const { return stores_; }

    // Advances sim time (applying scripted events and reflexes); exposed for tests.
    void advance(double dt);

private:
    struct FireView {
        SensorFrame frame;
        bool valid = false;
    };
    struct SeverityHistory {
        std::optional<double> first_seen;
        std::optional<double> last_t;
        double last_s = 0.0;
        understanding::FireStage peak = understanding::FireStage::Incipient;
    };
    struct ThermalView {
        bool valid = false;
        bool registered = false;
        std::string inspection_point;
        std::string pipe_id;
        double max_delta = 0.0;
        double peak_temp = 0.0;
        double max_temp = 0.0;
        std::size_t regions = 0;
    };

    void apply_due_events(double until);
    void step_world(double dt);
    void check_reflex();
    void track_recovery();
    void replace_grid(std::shared_ptr<const OccupancyGrid> g);
    SensorFrame capture();
    const InspectionPoint* docked() const;

    orchestra::ToolResult do_fire_smoke(double& latency, const orchestra::ToolDescriptor& tool);
    orchestra::ToolResult do_person_detect(double& latency, const orchestra::ToolDescriptor& tool);
    orchestra::ToolResult do_thermal_scan(double& latency, const orchestra::ToolDescriptor& tool);
    orchestra::ToolResult do_depth_localize(const nlohmann::json& args);
    orchestra::ToolResult do_reid(const nlohmann::json& args);
    orchestra::ToolResult do_thermal_mapping(const nlohmann::json& args, double& latency,
                                             const orchestra::ToolDescriptor& tool);
    orchestra::ToolResult do_thermal_trend(const nlohmann::json& args, double& latency,
                                           const orchestra::ToolDescriptor& tool);
    orchestra::ToolResult do_obstacle_scan(double& latency, const orchestra::ToolDescriptor& tool);
    orchestra::ToolResult do_fire_severity(const nlohmann::json& args, double& latency,
                                           const orchestra::ToolDescriptor& tool);
    orchestra::ToolResult do_thermal_hazard(const nlohmann::json& args, double& latency,
                                            const orchestra::ToolDescriptor& tool);
    orchestra::ToolResult do_facility_map(const nlohmann::json& args);
    orchestra::ToolResult do_remote_valve(const nlohmann::json& args, double& latency,
                                          const orchestra::ToolDescriptor& tool);
    orchestra::ToolResult do_fire_suppression(const nlohmann::json& args, double& latency,
                                              const orchestra::ToolDescriptor& tool);
    orchestra::ToolResult do_power_isolation(const nlohmann::json& args, double& latency,
                                             const orchestra::ToolDescriptor& tool);
    orchestra::ToolResult do_locomotion(const nlohmann::json& args, double& latency);

    // Drives the robot to `target` (then turns to `heading` if given).
    nlohmann::json navigate(Vec2 target, std::optional<double> heading, Gait gait, const std::string& purpose);

    FacilityWorld world_;
    EventScript script_;
    std::size_t next_event_ = 0;
    NoiseConfig noise_;
    memory::MemoryStores stores_;
    EventLog& log_;
    SessionConfig cfg_;
    double deadline_ = 0.0;
    std::uint64_t frame_counter_ = 0;
    std::uint64_t nav_counter_ = 0;
    std::optional<std::string> operator_decision_;
    std::shared_ptr<const OccupancyGrid> nav_grid_;  // true grid inflated by the robot radius
    bool navigating_ = false;
    bool reflex_active_ = false;

    FireView fire_view_;
    FireView person_view_;
    SeverityHistory severity_;
    ThermalView thermal_view_;
    std::optional<double> last_trend_rate_;
    SessionRecord record_;
};

}  // namespace fg::sim
