#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "factoryguard/memory.hpp"
#include "factoryguard/protocols.hpp"
#include "factoryguard/react.hpp"
#include "factoryguard/scenario.hpp"

namespace fg::orchestra {

struct PolicyConfig {
    std::vector<PatrolStop> patrol;
    double patrol_duration = 600.0;  // s; the patrol completes once exceeded
    double tau_warning = perception::kDefaultWarningDelta;
    const memory::FacilityMapStore* map = nullptr;  // robot memory, required
};

// Deterministic finite-state ReAct policy: patrols, and on a hazard cue runs
// the graduated-response protocol for fire, thermal, or intruder hazards.
class ScenarioPolicy : public Policy {
public:
    explicit ScenarioPolicy(PolicyConfig cfg);

    [[nodiscard]] std::string name() const override { return "react"; }
    Decision next(const PolicyContext& ctx) override;
    [[nodiscard]] bool hazard_detected() const override { return hazard_detected_; }

private:
    enum class Mode { Patrol, Fire, Thermal, Intruder, Monitor, Await, Done };

    void observe(const ReasoningStep& step, const PolicyContext& ctx);
    Decision decide(const PolicyContext& ctx);
    Decision patrol(const PolicyContext& ctx);
    void on_patrol_observation(const ReasoningStep& step, const PolicyContext& ctx);
    void on_fire_observation(const ReasoningStep& step, const PolicyContext& ctx);
    void on_thermal_observation(const ReasoningStep& step, const PolicyContext& ctx);
    void on_intruder_observation(const ReasoningStep& step, const PolicyContext& ctx);
    void on_monitor_observation(const ReasoningStep& step, const PolicyContext& ctx);
    void start_fire(std::size_t detection, const PolicyContext& ctx);
    void start_thermal(const nlohmann::json& scan, const PolicyContext& ctx);
    void start_intruder(std::size_t detection, const PolicyContext& ctx);
    void queue_fire_plan(const ActionPlan& plan, const PolicyContext& ctx);
    void enter_monitor(const PolicyContext& ctx);
    void note(double t, std::string kind, nlohmann::json detail = nlohmann::json::object());
    [[nodiscard]] Vec2 robot_position(const PolicyContext& ctx) const;

    PolicyConfig cfg_;
    Mode mode_ = Mode::Patrol;
    bool hazard_detected_ = false;
    std::size_t seen_steps_ = 0;
    std::deque<Decision> queue_;
    std::vector<TraceNote> pending_notes_;

    // Patrol state.
    std::size_t stop_ = 0;
    std::deque<Decision> suspended_;  // rest of the patrol cycle during an assessment
    bool escalated_ = false;

    // Shared hazard context.
    std::string hazard_;
    std::optional<ActionPlan> plan_;
    std::size_t detection_ = 0;
    Vec2 location_{};
    nlohmann::json facts_ = nlohmann::json::object();

    // Fire monitoring.
    std::vector<double> readings_;
    std::vector<double> reading_times_;
    bool discharged_ = false;
    std::string last_stage_;
};

// Ablation baseline: fixed if-then rules, no root-cause analysis, no re-ID,
// no graduated priorities.
class RuleBasedPolicy : public Policy {
public:
    explicit RuleBasedPolicy(PolicyConfig cfg);

    [[nodiscard]] std::string name() const override { return "rule_based"; }
    Decision next(const PolicyContext& ctx) override;
    [[nodiscard]] bool hazard_detected() const override { return hazard_detected_; }

private:
    PolicyConfig cfg_;
    std::deque<Decision> queue_;
    std::size_t seen_steps_ = 0;
    std::size_t stop_ = 0;
    bool hazard_detected_ = false;
    bool finished_ = false;
};

PolicyConfig policy_config(const Scenario& scenario, const memory::FacilityMapStore& map);

}  // namespace fg::orchestra
