#include "factoryguard/react.hpp"

namespace fg::orchestra {

using nlohmann::json;

namespace {

void record_alert(EpisodeTrace& trace, const json& a, double t) {
    AlertMessage msg;
    msg.priority = parse_priority(a.at("priority").get<std::string>());
    msg.hazard = a.at("hazard").get<std::string>();
    if (a.contains("location")) msg.location = {a["location"].at(0).get<double>(), a["location"].at(1).get<double>()};
    if (a.contains("payload")) msg.payload = a["payload"];
    msg.sim_time = t;
    trace.alerts.push_back(std::move(msg));
}

}  // namespace

EpisodeTrace react_loop(ToolHost& host, Policy& policy, const ToolRegistry& registry, int budget,
                        const OutcomeJudge& judge) {
    if (budget < 1) throw DomainError("react_loop: budget must be >= 1");
    EpisodeTrace trace;
    bool completed = false;
    for (int used = 0; used < budget && !host.timed_out(); ++used) {
        const json snap = host.snapshot();
        Decision d = policy.next({host.now(), snap, trace, registry});
        for (auto& n : d.notes) trace.notes.push_back(std::move(n));
        if (!d.call) {
            completed = true;
            break;
        }
        ReasoningStep step;
        step.thought = std::move(d.thought);
        step.action = std::move(*d.call);
        step.sim_time = host.now();
        const ToolDescriptor* tool = registry.find(step.action.tool);
        if (!tool) {
            step.protocol_error = true;
            step.observation = ToolResult::failure("protocol error: unknown tool '" + step.action.tool + "'");
            trace.steps.push_back(std::move(step));
            continue;
        }
        step.category = tool->category;
        double latency = 0.0;
        step.observation = host.execute(*tool, step.action, latency);
        step.latency = latency;
        if (step.observation.ok && step.observation.data.contains("alert")) {
            record_alert(trace, step.observation.data["alert"], step.end_time());
        }
        trace.steps.push_back(std::move(step));
    }
    if (judge) {
        trace.set_outcome(judge(trace, completed));
    } else if (completed) {
        trace.set_outcome(Outcome::Success);
    } else {
        trace.set_outcome(policy.hazard_detected() ? Outcome::Partial : Outcome::Failure);
    }
    return trace;
}

}  // namespace fg::orchestra
