#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "factoryguard/geometry.hpp"
#include "factoryguard/registry.hpp"

namespace fg::orchestra {

struct ToolCall {
    std::string tool;
    nlohmann::json args = nlohmann::json::object();
};

struct ToolResult {
    bool ok = true;
    nlohmann::json data = nlohmann::json::object();
    std::string error;

    static ToolResult failure(std::string message) { return {false, nlohmann::json::object(), std::move(message)}; }
};

struct ReasoningStep {
    std::string thought;
    ToolCall action;
    ToolResult observation;
    double sim_time = 0.0;  // call start
    double latency = 0.0;
    std::optional<ToolCategory> category;  // none for a protocol error
    bool protocol_error = false;

    [[nodiscard]] double end_time() const { return sim_time + latency; }
};

enum class Priority { P1 = 1, P2 = 2, P3 = 3, P4 = 4 };
std::string_view to_string(Priority p);
Priority parse_priority(std::string_view s);

struct AlertMessage {
    Priority priority = Priority::P3;
    std::string hazard;  // fire | thermal | intruder
    Vec2 location{};
    nlohmann::json payload = nlohmann::json::object();
    double sim_time = 0.0;  // delivery (call completion)
};

enum class Outcome { Success, Partial, Failure };
std::string_view to_string(Outcome o);
int exit_code(Outcome o);

// Protocol log entry, e.g. {kind "trend_negative"} or {kind "fire_cleared"}.
struct TraceNote {
    double t = 0.0;
    std::string kind;
    nlohmann::json detail = nlohmann::json::object();
};

class EpisodeTrace {
public:
    std::vector<ReasoningStep> steps;
    std::vector<AlertMessage> alerts;
    std::vector<TraceNote> notes;

    void set_outcome(Outcome o);  // throws if already assigned
    [[nodiscard]] const std::optional<Outcome>& outcome() const { return outcome_; }

    [[nodiscard]] bool has_call(std::string_view tool) const;
    [[nodiscard]] std::size_t count_calls(std::string_view tool) const;
    [[nodiscard]] const TraceNote* find_note(std::string_view kind) const;
    [[nodiscard]] nlohmann::json to_json() const;

private:
    std::optional<Outcome> outcome_;
};

// Zone access rule: restricted AND NOT within_allowed AND NOT authorized.
bool intruder_alert(bool restricted, bool within_allowed, bool authorized);

// Every actuation step is preceded by at least one perception and one
// reasoning step.
bool actuation_grounded(const EpisodeTrace& trace);

}  // namespace fg::orchestra
