#include "factoryguard/registry.hpp"

#include <algorithm>

namespace fg::orchestra {

using nlohmann::json;

std::string_view to_string(ToolCategory c) {
    switch (c) {
    case ToolCategory::Perception: return "perception";
    case ToolCategory::Reasoning: return "reasoning";
    case ToolCategory::Knowledge: return "knowledge";
    case ToolCategory::Actuation: return "actuation";
    }
    return "perception";
}

namespace {

std::string_view latency_model_name(LatencyModel m) {
    switch (m) {
    case LatencyModel::Fixed: return "fixed";
    case LatencyModel::PipeLength: return "pipe_length";
    case LatencyModel::Window: return "window";
    case LatencyModel::Emergent: return "emergent";
    }
    return "fixed";
}

}  // namespace

std::string ToolDescriptor::qualified_name() const { return std::string(to_string(category)) + "_" + name; }

void ToolRegistry::add(ToolDescriptor tool) {
    if (tool.name.empty()) throw InputError("tool name must not be empty");
    if (find(tool.name) || find(tool.qualified_name())) throw InputError("duplicate tool '" + tool.name + "'");
    tools_.push_back(std::move(tool));
}

const ToolDescriptor* ToolRegistry::find(std::string_view name) const {
    for (const auto& t : tools_) {
        if (t.name == name || t.qualified_name() == name) return &t;
    }
    return nullptr;
}

const ToolDescriptor& ToolRegistry::lookup(std::string_view name) const {
    const ToolDescriptor* t = find(name);
    if (!t) throw InputError("unknown tool '" + std::string(name) + "'");
    return *t;
}

std::map<ToolCategory, int> ToolRegistry::category_counts() const {
    std::map<ToolCategory, int> out{{ToolCategory::Perception, 0},
                                    {ToolCategory::Reasoning, 0},
                                    {ToolCategory::Knowledge, 0},
                                    {ToolCategory::Actuation, 0}};
    for (const auto& t : tools_) ++out[t.category];
    return out;
}

void ToolRegistry::set_latency(std::string_view name, double seconds) {
    if (!(seconds >= 0.0)) throw DomainError("tool latency must be >= 0");
    for (auto& t : tools_) {
        if (t.name == name || t.qualified_name() == name) {
            t.latency = seconds;
            return;
        }
    }
    throw InputError("unknown tool '" + std::string(name) + "'");
}

json ToolRegistry::to_json() const {
    json arr = json::array();
    for (const auto& t : tools_) {
        arr.push_back({{"name", t.name},
                       {"qualified_name", t.qualified_name()},
                       {"category", to_string(t.category)},
                       {"latency_model", latency_model_name(t.latency_model)},
                       {"latency", t.latency},
                       {"description", t.description},
                       {"parameters", t.parameters},
                       {"result", t.result}});
    }
    return arr;
}

ToolRegistry build_registry() {
    using C = ToolCategory;
    using L = LatencyModel;
    ToolRegistry r;
    auto add = [&](std::string name, C cat, L model, double latency, std::string desc, json params, json result,
                   double rate = 0.0) {
        r.add({std::move(name), cat, model, latency, rate, std::move(desc), std::move(params), std::move(result)});
    };

    add("fire_smoke", C::Perception, L::Fixed, 0.13, "RGB fire/smoke detector on the current frame", json::object(),
        {{"detections", "array"}, {"frame_area", "number"}});
    add("thermal_scan", C::Perception, L::Fixed, 0.08, "Thermal frame compared with the stored inspection-point baseline",
        json::object(), {{"inspection_point", "string"}, {"max_delta", "number"}, {"regions", "array"}});
    add("depth_localize", C::Perception, L::Fixed, 0.0, "Back-projects a detection to world coordinates",
        {{"detection", "integer"}}, {{"camera", "array"}, {"world", "array"}, {"range", "number"}});
    add("thermal_mapping", C::Perception, L::PipeLength, 0.0, "Temperature profile along a pipe axis",
        {{"pipe_id", "string"}, {"step", "number"}}, {{"positions", "array"}, {"temps", "array"}, {"peak_index", "integer"}},
        0.25);
    add("thermal_trend", C::Perception, L::Window, 60.0, "Peak-temperature trend over a window",
        {{"pipe_id", "string"}, {"window", "number"}}, {{"rate", "number"}, {"t_now", "number"}, {"t_prev", "number"}});
    add("person_detect", C::Perception, L::Fixed, 0.15, "Person detector on the current frame", json::object(),
        {{"detections", "array"}});
    add("reid_embed", C::Perception, L::Fixed, 0.0, "Re-identification embedding of a person detection",
        {{"detection", "integer"}}, {{"embedding", "array"}});
    add("obstacle_scan", C::Perception, L::Fixed, 0.10, "Depth-based free-space check around the robot", json::object(),
        {{"blocked_cells", "integer"}, {"clearance", "number"}});

    add("fire_severity", C::Reasoning, L::Fixed, 0.85, "Severity score and stage from detection metrics",
        {{"detection", "integer"}}, {{"s_fire", "number"}, {"s_smoke", "number"}, {"stage", "string"}});
    add("thermal_hazard", C::Reasoning, L::Fixed, 1.23, "Anomaly assessment against the warning threshold",
        {{"tau_warning", "number"}}, {{"anomaly", "boolean"}, {"max_delta", "number"}, {"t_critical", "number"}});
    add("spill_hazard", C::Reasoning, L::Fixed, 0.85, "Registered stub; no spill model exists", json::object(),
        {{"status", "string"}});
    add("intruder_threat", C::Reasoning, L::Fixed, 0.72, "Zone access rule on a localized, identified person",
        {{"restricted", "boolean"}, {"within_allowed", "boolean"}, {"authorized", "boolean"}}, {{"intruder_alert", "boolean"}});
    add("time_to_critical", C::Reasoning, L::Fixed, 0.0, "Projected time until the pipe limit is reached",
        {{"t_current", "number"}, {"rate", "number"}, {"t_limit", "number"}}, {{"t_critical", "number"}});

    add("facility_map", C::Knowledge, L::Fixed, 0.0, "Equipment and valves near a point; valve telemetry",
        {{"point", "array"}, {"radius", "number"}}, {{"nearby", "array"}});
    add("thermal_baselines", C::Knowledge, L::Fixed, 0.0, "Stored baseline metadata for an inspection point",
        {{"inspection_point", "string"}}, {{"captured_at", "number"}});
    add("personnel_db", C::Knowledge, L::Fixed, 0.0, "Gallery match of an embedding", {{"embedding", "array"}},
        {{"match", "string"}, {"similarity", "number"}, {"authorized", "boolean"}});
    add("zone_schedule", C::Knowledge, L::Fixed, 0.0, "Zone membership and access window at a point",
        {{"point", "array"}}, {{"zone", "string"}, {"restricted", "boolean"}, {"within_allowed", "boolean"}});

    add("remote_valve", C::Actuation, L::Fixed, 3.40, "Drives a valve to its setpoint", {{"valve_id", "string"}},
        {{"open_fraction", "number"}});
    add("fire_suppression", C::Actuation, L::Fixed, 1.50, "Arms or discharges the suppression system",
        {{"fire_id", "string"}, {"mode", "string"}}, {{"discharge_at", "number"}});
    add("locomotion", C::Actuation, L::Emergent, 0.0, "Navigates to a goal with D* Lite and MPPI",
        {{"goal", "array"}, {"standoff", "number"}, {"gait", "string"}}, {{"arrived", "boolean"}, {"distance", "number"}});
    add("alert_center", C::Actuation, L::Fixed, 0.42, "Sends a prioritised alert to the control centre",
        {{"priority", "string"}, {"hazard", "string"}, {"location", "array"}}, {{"delivered", "boolean"}});
    add("verbal_warning", C::Actuation, L::Fixed, 1.80, "Plays a verbal challenge", {{"message", "string"}},
        {{"delivered", "boolean"}});
    add("power_isolation", C::Actuation, L::Fixed, 1.00, "De-energises a power zone", {{"zone_id", "string"}},
        {{"powered", "boolean"}});
    return r;
}

}  // namespace fg::orchestra
