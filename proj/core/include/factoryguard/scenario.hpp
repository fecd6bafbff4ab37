#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "factoryguard/memory.hpp"
#include "factoryguard/sensors.hpp"
#include "factoryguard/world.hpp"

namespace fg {

struct ScriptedEvent {
    double t = 0.0;
    std::string kind;  // fire | valve_stuck | thermal_spike | obstacle | operator_decision
    nlohmann::json payload;
};

// Time-ordered (stable for equal times).
struct EventScript {
    std::vector<ScriptedEvent> events;
};

struct PatrolStop {
    std::string inspection_point;  // empty for a bare waypoint
    Pose2 pose{};
};

struct Scenario {
    std::string id;
    std::string description;
    FacilityWorld world;
    EventScript script;
    NoiseConfig noise;
    std::map<std::string, double> latency_overrides;
    memory::PersonnelDB personnel;
    std::vector<PatrolStop> patrol;
    double duration = 600.0;  // sim seconds before the episode times out
    std::filesystem::path source;
};

Scenario load_scenario(const std::filesystem::path& path);

// `base_dir` resolves a relative "facility" include.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});

// Applies a hazard-injection event to the world. operator_decision events are
// observations for the decision layer and leave the world unchanged.
FacilityWorld apply_event(FacilityWorld world, const ScriptedEvent& event);

// Cells changed by an obstacle event (empty for other kinds).
std::vector<Cell> obstacle_cells(const OccupancyGrid& grid, const ScriptedEvent& event);

}  // namespace fg
