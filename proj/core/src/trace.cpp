#include "factoryguard/trace.hpp"

namespace fg::orchestra {

using nlohmann::json;

std::string_view to_string(Priority p) {
    switch (p) {
    case Priority::P1: return "P1";
    case Priority::P2: return "P2";
    case Priority::P3: return "P3";
    case Priority::P4: return "P4";
    }
    return "P4";
}

Priority parse_priority(std::string_view s) {
    if (s == "P1") return Priority::P1;
    if (s == "P2") return Priority::P2;
    if (s == "P3") return Priority::P3;
    if (s == "P4") return Priority::P4;
    throw InputError("unknown alert priority '" + std::string(s) + "'");
}

std::string_view to_string(Outcome o) {
    switch (o) {
    case Outcome::Success: return "success";
    case Outcome::Partial: return "partial";
    case Outcome::Failure: return "failure";
    }
    return "failure";
}

int exit_code(Outcome o) {
    switch (o) {
    case Outcome::Success: return 0;
    case Outcome::Partial: return 1;
    case Outcome::Failure: return 2;
    }
    return 2;
}

void EpisodeTrace::set_outcome(Outcome o) {
    if (outcome_) throw InputError("episode outcome already assigned");
    outcome_ = o;
}

bool EpisodeTrace::has_call(std::string_view tool) const { return count_calls(tool) > 0; }

std::size_t EpisodeTrace::count_calls(std::string_view tool) const {
    std::size_t n = 0;
    for (const auto& s : steps) n += s.action.tool == tool ? 1 : 0;
    return n;
}

const TraceNote* EpisodeTrace::find_note(std::string_view kind) const {
    for (const auto& n : notes) {
        if (n.kind == kind) return &n;
    }
    return nullptr;
}

json EpisodeTrace::to_json() const {
    json steps_j = json::array();
    for (const auto& s : steps) {
        json st = {{"thought", s.thought},
                   {"tool", s.action.tool},
                   {"args", s.action.args},
                   {"ok", s.observation.ok},
                   {"observation", s.observation.data},
                   {"sim_time", s.sim_time},
                   {"latency", s.latency}};
        if (s.category) st["category"] = to_string(*s.category);
        if (!s.observation.error.empty()) st["error"] = s.observation.error;
        if (s.protocol_error) st["protocol_error"] = true;
        steps_j.push_back(std::move(st));
    }
    json alerts_j = json::array();
    for (const auto& a : alerts) {
        alerts_j.push_back({{"priority", to_string(a.priority)},
                            {"hazard", a.hazard},
                            {"location", {a.location.x, a.location.y}},
                            {"payload", a.payload},
                            {"sim_time", a.sim_time}});
    }
    json notes_j = json::array();
    for (const auto& n : notes) notes_j.push_back({{"t", n.t}, {"kind", n.kind}, {"detail", n.detail}});
    json out = {{"steps", steps_j}, {"alerts", alerts_j}, {"notes", notes_j}};
    out["outcome"] = outcome_ ? json(to_string(*outcome_)) : json(nullptr);
    return out;
}

bool intruder_alert(bool restricted, bool within_allowed, bool authorized) {
    return restricted && !within_allowed && !authorized;
}

bool actuation_grounded(const EpisodeTrace& trace) {
    bool perceived = false;
    bool reasoned = false;
    for (const auto& s : trace.steps) {
        if (!s.category) continue;
        switch (*s.category) {
        case ToolCategory::Perception: perceived = true; break;
        case ToolCategory::Reasoning: reasoned = true; break;
        case ToolCategory::Knowledge: break;
        case ToolCategory::Actuation:
            if (!perceived || !reasoned) return false;
            break;
        }
    }
    return true;
}

}  // namespace fg::orchestra
