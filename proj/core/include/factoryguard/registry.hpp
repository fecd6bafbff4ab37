#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "factoryguard/errors.hpp"

namespace fg::orchestra {

enum class ToolCategory { Perception, Reasoning, Knowledge, Actuation };

std::string_view to_string(ToolCategory c);

// How a tool's sim-time cost is computed.
enum class LatencyModel {
    Fixed,        // `latency` seconds
    PipeLength,   // pipe arclength / `rate` (m/s)
    Window,       // the call's `window` argument (default `latency`)
    Emergent,     // measured by the simulator (navigation)
};

struct ToolDescriptor {
    std::string name;
    ToolCategory category = ToolCategory::Perception;
    LatencyModel latency_model = LatencyModel::Fixed;
    double latency = 0.0;  // s
    double rate = 0.0;     // m/s, PipeLength only
    std::string description;
    nlohmann::json parameters;  // {name: type}
    nlohmann::json result;      // {name: type}

    // e.g. "perception_fire_smoke".
    [[nodiscard]] std::string qualified_name() const;
};

class ToolRegistry {
public:
    void add(ToolDescriptor tool);  // InputError on duplicate names

    [[nodiscard]] const ToolDescriptor* find(std::string_view name) const;  // short or qualified name
    [[nodiscard]] const ToolDescriptor& lookup(std::string_view name) const;
    [[nodiscard]] const std::vector<ToolDescriptor>& tools() const { return tools_; }
    [[nodiscard]] std::map<ToolCategory, int> category_counts() const;

    void set_latency(std::string_view name, double seconds);
    [[nodiscard]] nlohmann::json to_json() const;

private:
    std::vector<ToolDescriptor> tools_;
};

// The 23-tool registry (8 perception, 5 reasoning, 4 knowledge,
// 6 actuation) with default latencies.
ToolRegistry build_registry();

}  // namespace fg::orchestra
