#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "factoryguard/registry.hpp"
#include "factoryguard/trace.hpp"

namespace fg::orchestra {

// Executes tool calls against some world (simulated or scripted). Each call
// consumes its modelled latency in sim time.
class ToolHost {
public:
    virtual ~ToolHost() = default;
    [[nodiscard]] virtual double now() const = 0;
    // Runs the call and advances sim time; `latency` receives the time consumed.
    virtual ToolResult execute(const ToolDescriptor& tool, const ToolCall& call, double& latency) = 0;
    // Compact observation summary handed to the policy each turn.
    [[nodiscard]] virtual nlohmann::json snapshot() const = 0;
    // Sim-time budget exhausted.
    [[nodiscard]] virtual bool timed_out() const = 0;
};

struct PolicyContext {
    double now = 0.0;
    const nlohmann::json& snapshot;
    const EpisodeTrace& trace;
    const ToolRegistry& registry;
};

struct Decision {
    std::string thought;
    std::optional<ToolCall> call;  // none: the episode is complete
    std::vector<TraceNote> notes;

    static Decision act(std::string thought, std::string tool, nlohmann::json args = nlohmann::json::object()) {
        return {std::move(thought), ToolCall{std::move(tool), std::move(args)}, {}};
    }
    static Decision done(std::string thought) { return {std::move(thought), std::nullopt, {}}; }
};

class Policy {
public:
    virtual ~Policy() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    virtual Decision next(const PolicyContext& ctx) = 0;
    [[nodiscard]] virtual bool hazard_detected() const = 0;
};

// completed = the policy finished on its own (as opposed to budget or time
// exhaustion).
using OutcomeJudge = std::function<Outcome(const EpisodeTrace&, bool completed)>;

// Thought -> Action -> Observation until the policy completes, `budget` steps
// are used, or the host times out. Unknown tools are recorded as protocol
// errors and the loop continues.
EpisodeTrace react_loop(ToolHost& host, Policy& policy, const ToolRegistry& registry, int budget,
                        const OutcomeJudge& judge = {});

}  // namespace fg::orchestra
