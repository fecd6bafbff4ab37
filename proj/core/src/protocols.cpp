#include "factoryguard/protocols.hpp"

namespace fg::orchestra {

using nlohmann::json;
using understanding::FireStage;

Priority fire_priority(FireStage stage) {
    switch (stage) {
    case FireStage::FullyDeveloped: return Priority::P1;
    case FireStage::Growth: return Priority::P2;
    case FireStage::Incipient: return Priority::P2;
    case FireStage::Decay: return Priority::P3;
    }
    return Priority::P2;
}

Priority thermal_priority(std::optional<double> t_critical) {
    return t_critical && *t_critical < kImminentCritical ? Priority::P1 : Priority::P3;
}

ActionPlan fire_protocol(FireStage stage) {
    ActionPlan plan;
    plan.hazard = "fire";
    plan.priority = fire_priority(stage);
    plan.retreat_before_discharge = true;
    plan.standoff = kSuppressionStandoff;
    plan.monitor = MonitorRule{"fire_smoke", 0.05, 10};
    const json alert = {{"priority", std::string(to_string(*plan.priority))}, {"hazard", "fire"}};
    switch (stage) {
    case FireStage::Incipient:
    case FireStage::Growth:
        plan.steps = {{"alert_center", alert, ""},
                      {"power_isolation", json::object(), ""},
                      {"fire_suppression", {{"mode", "arm"}}, ""}};
        plan.rationale = "early-stage fire: alert, isolate power, arm suppression";
        break;
    case FireStage::FullyDeveloped:
        plan.steps = {{"fire_suppression", {{"mode", "discharge"}}, ""}, {"alert_center", alert, ""}};
        plan.rationale = "fully developed fire: immediate suppression, emergency notification";
        break;
    case FireStage::Decay:
        plan.steps = {{"alert_center", alert, ""}};
        plan.rationale = "fire already declining: notify and monitor";
        break;
    }
    return plan;
}

ActionPlan thermal_protocol(const perception::AnomalyRegion& anomaly, const std::string& pipe_id,
                            const memory::FacilityMapStore& map, double tau_warning) {
    if (!(anomaly.max_delta > tau_warning)) {
        throw DomainError("thermal_protocol: anomaly does not exceed the warning threshold");
    }
    if (!map.pipes.contains(pipe_id)) throw InputError("thermal_protocol: unknown pipe '" + pipe_id + "'");
    ActionPlan plan;
    plan.hazard = "thermal";
    plan.steps = {{"thermal_mapping", {{"pipe_id", pipe_id}}, ""},
                  {"thermal_trend", {{"pipe_id", pipe_id}, {"window", 60.0}}, ""},
                  {"time_to_critical", json::object(), ""},
                  {"facility_map", {{"radius", 1.0}}, "not_cooling"},
                  {"remote_valve", json::object(), "stuck_valve"},
                  {"alert_center", {{"priority", "P2"}, {"hazard", "thermal"}, {"escalation", true}}, "no_root_cause"}};
    plan.monitor = MonitorRule{"thermal_scan", kThermalResolvedDelta, 1};
    plan.rationale = "profile the pipe, estimate trend, correlate the peak with the facility map";
    return plan;
}

ActionPlan intruder_protocol(const IntruderAssessment& a) {
    if (!a.person_detected) throw InputError("intruder_protocol: no person detection");
    ActionPlan plan;
    plan.hazard = "intruder";
    const bool authorized = a.match_id && a.match_authorized;
    if (authorized) {
        plan.rationale = "authorised personnel: log only";
        return plan;
    }
    if (!intruder_alert(a.zone.restricted, a.zone.within_allowed, false)) {
        plan.rationale = "unidentified person outside restricted hours or zones: log only";
        return plan;
    }
    plan.priority = Priority::P2;
    plan.standoff = kChallengeStandoff;
    plan.steps = {{"alert_center", {{"priority", "P2"}, {"hazard", "intruder"}}, ""},
                  {"locomotion", {{"standoff", kChallengeStandoff}, {"gait", "fast_walk"}}, ""},
                  {"verbal_warning", {{"message", "Restricted area. Identify yourself and leave the zone."}}, ""}};
    plan.monitor = MonitorRule{"person_detect", 0.0, 1};
    plan.await_operator = true;
    plan.rationale = "unknown person in restricted zone out of hours: alert security, approach, challenge";
    return plan;
}

std::optional<std::size_t> monitor_cleared(std::span<const double> readings, const MonitorRule& rule) {
    int run = 0;
    for (std::size_t i = 0; i < readings.size(); ++i) {
        run = readings[i] < rule.threshold ? run + 1 : 0;
        if (run >= rule.consecutive) return i;
    }
    return std::nullopt;
}

json to_json(const ActionPlan& plan) {
    json steps = json::array();
    for (const auto& s : plan.steps) {
        json j = {{"tool", s.tool}, {"args", s.args}};
        if (!s.condition.empty()) j["condition"] = s.condition;
        steps.push_back(std::move(j));
    }
    json out = {{"hazard", plan.hazard}, {"steps", steps}, {"rationale", plan.rationale}};
    out["priority"] = plan.priority ? json(to_string(*plan.priority)) : json(nullptr);
    if (plan.retreat_before_discharge) out["standoff"] = plan.standoff;
    if (plan.monitor) {
        out["monitor"] = {{"tool", plan.monitor->tool},
                          {"threshold", plan.monitor->threshold},
                          {"consecutive", plan.monitor->consecutive}};
    }
    if (plan.await_operator) out["await_operator"] = true;
    return out;
}

}  // namespace fg::orchestra
