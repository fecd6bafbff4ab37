#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "factoryguard/memory.hpp"
#include "factoryguard/perception.hpp"
#include "factoryguard/trace.hpp"
#include "factoryguard/understanding.hpp"

// Graduated-response plans for the three hazard scenarios. A plan is the
// ordered list of tool calls a policy issues once the hazard is assessed;
// arguments that depend on later observations are filled in by the policy.
namespace fg::orchestra {

inline constexpr double kSuppressionStandoff = 4.0;  // m
inline constexpr double kChallengeStandoff = 2.0;    // m
inline constexpr double kImminentCritical = 300.0;   // s, P1 bound for thermal
inline constexpr double kThermalResolvedDelta = 2.0;  // degC
inline constexpr double kCoolingRate = -0.01;         // degC/s, below this a spike is cooling

struct ProtocolStep {
    std::string tool;
    nlohmann::json args = nlohmann::json::object();
    // Empty: always. Otherwise one of "not_cooling", "stuck_valve",
    // "no_root_cause".
    std::string condition;
};

struct MonitorRule {
    std::string tool;        // perception tool polled each cycle
    double threshold = 0.0;  // value strictly below counts as clear
    int consecutive = 1;     // clear frames needed in a row
};

struct ActionPlan {
    std::string hazard;  // fire | thermal | intruder
    std::optional<Priority> priority;
    std::vector<ProtocolStep> steps;
    // Fire: move out to `standoff` before any discharge.
    bool retreat_before_discharge = false;
    double standoff = 0.0;
    std::optional<MonitorRule> monitor;
    bool await_operator = false;
    std::string rationale;
};

Priority fire_priority(understanding::FireStage stage);
// P1 when criticality is imminent (< 300 s, including already over the limit).
Priority thermal_priority(std::optional<double> t_critical);

ActionPlan fire_protocol(understanding::FireStage stage);

// `pipe_id` is the pipe watched by the inspection point that saw the anomaly.
// DomainError unless anomaly.max_delta > tau_warning; InputError on an unknown pipe.
ActionPlan thermal_protocol(const perception::AnomalyRegion& anomaly, const std::string& pipe_id,
                            const memory::FacilityMapStore& map,
                            double tau_warning = perception::kDefaultWarningDelta);

struct IntruderAssessment {
    bool person_detected = false;
    memory::ZoneStatus zone;
    std::optional<std::string> match_id;
    bool match_authorized = false;
};

// InputError when no person was detected.
ActionPlan intruder_protocol(const IntruderAssessment& a);

// Index of the sample that completes `rule.consecutive` clear readings in a row.
std::optional<std::size_t> monitor_cleared(std::span<const double> readings, const MonitorRule& rule);

nlohmann::json to_json(const ActionPlan& plan);

}  // namespace fg::orchestra
