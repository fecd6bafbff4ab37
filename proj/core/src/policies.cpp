#include "factoryguard/policies.hpp"

#include <cmath>

namespace fg::orchestra {

using nlohmann::json;
using understanding::FireStage;

namespace {

FireStage parse_stage(const std::string& s) {
    if (s == "fully_developed") return FireStage::FullyDeveloped;
    if (s == "growth") return FireStage::Growth;
    if (s == "decay") return FireStage::Decay;
    return FireStage::Incipient;
}

json point_json(Vec2 p) { return json::array({p.x, p.y}); }

Vec2 point_of(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

// Index of the strongest detection in a list of {index, confidence} records.
std::optional<std::size_t> strongest(const json& dets) {
    std::optional<std::size_t> best;
    double conf = -1.0;
    for (const auto& d : dets) {
        if (d.at("confidence").get<double>() > conf) {
            conf = d["confidence"].get<double>();
            best = d.at("index").get<std::size_t>();
        }
    }
    return best;
}

std::deque<Decision> patrol_cycle(const PolicyConfig& cfg, const PolicyContext& ctx, std::size_t& stop) {
    std::deque<Decision> q;
    const bool docked = !ctx.snapshot.value("docked_at", json()).is_null();
    if (docked) q.push_back(Decision::act("Docked at an inspection point: compare the thermal frame with its baseline.", "thermal_scan"));
    q.push_back(Decision::act("Scan the camera frame for fire or smoke.", "fire_smoke"));
    q.push_back(Decision::act("Check the frame for people.", "person_detect"));
    if (!docked) q.push_back(Decision::act("Thermal frame from the current pose.", "thermal_scan"));
    q.push_back(Decision::act("Assess the latest thermal frame against the warning threshold.", "thermal_hazard",
                              {{"tau_warning", cfg.tau_warning}}));
    if (!cfg.patrol.empty()) {
        const auto& p = ctx.snapshot.at("pose");
        const Vec2 here{p.at(0).get<double>(), p.at(1).get<double>()};
        // Skip a stop the robot is already standing on.
        for (std::size_t tries = 0; tries < cfg.patrol.size(); ++tries) {
            const PatrolStop& s = cfg.patrol[stop % cfg.patrol.size()];
            if (distance(here, s.pose.position()) > 0.25 || cfg.patrol.size() == 1) break;
            ++stop;
        }
        const PatrolStop& s = cfg.patrol[stop % cfg.patrol.size()];
        if (distance(here, s.pose.position()) > 0.25) {
            q.push_back(Decision::act("Area clear; continue to the next patrol stop.", "locomotion",
                                      {{"goal", point_json(s.pose.position())},
                                       {"heading", s.pose.theta},
                                       {"purpose", "patrol"},
                                       {"gait", "walk"}}));
        }
        ++stop;
    }
    return q;
}

}  // namespace

PolicyConfig policy_config(const Scenario& scenario, const memory::FacilityMapStore& map) {
    PolicyConfig cfg;
    cfg.patrol = scenario.patrol;
    cfg.patrol_duration = scenario.duration;
    cfg.map = &map;
    return cfg;
}

// --- ScenarioPolicy ---------------------------------------------------------

ScenarioPolicy::ScenarioPolicy(PolicyConfig cfg) : cfg_(std::move(cfg)) {
    if (!cfg_.map) throw InputError("ScenarioPolicy requires the facility map store");
}

void ScenarioPolicy::note(double t, std::string kind, json detail) {
    pending_notes_.push_back({t, std::move(kind), std::move(detail)});
}

Vec2 ScenarioPolicy::robot_position(const PolicyContext& ctx) const {
    const auto& p = ctx.snapshot.at("pose");
    return {p.at(0).get<double>(), p.at(1).get<double>()};
}

Decision ScenarioPolicy::next(const PolicyContext& ctx) {
    while (seen_steps_ < ctx.trace.steps.size()) observe(ctx.trace.steps[seen_steps_++], ctx);
    Decision d = decide(ctx);
    for (auto& n : pending_notes_) d.notes.push_back(std::move(n));
    pending_notes_.clear();
    return d;
}

void ScenarioPolicy::observe(const ReasoningStep& step, const PolicyContext& ctx) {
    if (step.protocol_error) return;
    if (!step.observation.ok) {
        note(step.end_time(), "step_failed", {{"tool", step.action.tool}, {"error", step.observation.error}});
        if (step.action.tool == "locomotion" && mode_ == Mode::Patrol) return;
    }
    switch (mode_) {
    case Mode::Patrol: on_patrol_observation(step, ctx); break;
    case Mode::Fire: on_fire_observation(step, ctx); break;
    case Mode::Thermal: on_thermal_observation(step, ctx); break;
    case Mode::Intruder: on_intruder_observation(step, ctx); break;
    case Mode::Monitor:
    case Mode::Await: on_monitor_observation(step, ctx); break;
    case Mode::Done: break;
    }
}

Decision ScenarioPolicy::decide(const PolicyContext& ctx) {
    for (;;) {
        if (!queue_.empty()) {
            Decision d = std::move(queue_.front());
            queue_.pop_front();
            return d;
        }
        switch (mode_) {
        case Mode::Patrol: return patrol(ctx);
        case Mode::Fire:
        case Mode::Thermal:
            // Response plan exhausted: the hazard is handed to monitoring.
            enter_monitor(ctx);
            continue;
        case Mode::Intruder:
            note(ctx.now, "response_complete", {{"hazard", "intruder"}});
            mode_ = Mode::Await;
            continue;
        case Mode::Await: {
            const json& dec = ctx.snapshot.value("operator_decision", json());
            if (!dec.is_null()) {
                note(ctx.now, "operator_decision", {{"decision", dec}});
                mode_ = Mode::Done;
                return Decision::done("Operator decision '" + dec.get<std::string>() + "' received; standing down.");
            }
            queue_.push_back(Decision::act("Keep the person in view while awaiting the security decision.",
                                           "person_detect"));
            continue;
        }
        case Mode::Monitor:
            if (hazard_ == "fire") {
                queue_.push_back(Decision::act("Monitor the suppressed fire.", "fire_smoke"));
                queue_.push_back(Decision::act("Re-assess fire severity.", "fire_severity"));
            } else {
                queue_.push_back(Decision::act("Re-scan the pipe at the inspection point.", "thermal_scan"));
                queue_.push_back(Decision::act("Re-assess the thermal deviation.", "thermal_hazard",
                                               {{"tau_warning", cfg_.tau_warning}}));
            }
            continue;
        case Mode::Done: return Decision::done("Protocol complete.");
        }
    }
}

Decision ScenarioPolicy::patrol(const PolicyContext& ctx) {
    if (ctx.now >= cfg_.patrol_duration) {
        mode_ = Mode::Done;
        return Decision::done("Patrol duration reached with no unresolved hazards.");
    }
    queue_ = patrol_cycle(cfg_, ctx, stop_);
    Decision d = std::move(queue_.front());
    queue_.pop_front();
    return d;
}

void ScenarioPolicy::on_patrol_observation(const ReasoningStep& step, const PolicyContext& ctx) {
    const json& o = step.observation.data;
    if (!step.observation.ok) return;
    const std::string& tool = step.action.tool;
    if (tool == "fire_smoke" && o.value("hazard_cue", false)) {
        auto idx = strongest(o.at("fire"));
        if (!idx) idx = strongest(o.at("smoke"));
        note(step.sim_time, "hazard_cue", {{"hazard", "fire"}, {"confidence", o.value("fire_confidence", 0.0)}});
        start_fire(*idx, ctx);
    } else if (tool == "thermal_scan" && o.value("hazard_cue", false)) {
        note(step.sim_time, "hazard_cue", {{"hazard", "thermal"}, {"max_delta", o.at("max_delta")}});
        start_thermal(o, ctx);
    } else if (tool == "person_detect" && o.value("hazard_cue", false)) {
        start_intruder(*strongest(o.at("persons")), ctx);
    }
}

// --- fire -------------------------------------------------------------------

void ScenarioPolicy::start_fire(std::size_t detection, const PolicyContext&) {
    mode_ = Mode::Fire;
    hazard_ = "fire";
    hazard_detected_ = true;
    detection_ = detection;
    queue_.clear();
    queue_.push_back(Decision::act("Fire/smoke detected: localise it in the facility frame.", "depth_localize",
                                   {{"detection", detection}, {"source", "fire"}}));
}

void ScenarioPolicy::on_fire_observation(const ReasoningStep& step, const PolicyContext& ctx) {
    const json& o = step.observation.data;
    const std::string& tool = step.action.tool;
    if (tool == "depth_localize" && step.observation.ok) {
        location_ = point_of(o.at("world"));
        facts_["range"] = o.at("range");
        queue_.push_back(Decision::act("Look up equipment and power zone at the fire location.", "facility_map",
                                       {{"point", point_json(location_)}, {"radius", 2.0}}));
    } else if (tool == "facility_map" && step.observation.ok) {
        facts_["power_zone"] = o.at("power_zone");
        facts_["equipment"] = nullptr;
        for (const auto& e : o.at("nearby")) {
            if (e.value("kind", "") != "valve") {
                facts_["equipment"] = e.at("id");
                break;
            }
        }
        queue_.push_back(Decision::act("Score severity and classify the fire stage.", "fire_severity",
                                       {{"detection", detection_}}));
    } else if (tool == "fire_severity" && step.observation.ok && !plan_) {
        last_stage_ = o.at("stage").get<std::string>();
        facts_["s_fire"] = o.at("s_fire");
        plan_ = fire_protocol(parse_stage(last_stage_));
        note(step.end_time(), "plan", to_json(*plan_));
        queue_fire_plan(*plan_, ctx);
    } else if (tool == "fire_suppression" && step.observation.ok) {
        if (o.value("mode", "") == "discharge") discharged_ = true;
    } else if (!step.observation.ok && queue_.empty() && !plan_) {
        // Localisation or lookup failed: fall back to the fully developed plan at the robot's heading.
        location_ = robot_position(ctx);
        plan_ = fire_protocol(FireStage::FullyDeveloped);
        queue_fire_plan(*plan_, ctx);
    }
}

void ScenarioPolicy::queue_fire_plan(const ActionPlan& plan, const PolicyContext& ctx) {
    for (const auto& s : plan.steps) {
        if (s.tool == "alert_center") {
            json args = s.args;
            args["location"] = point_json(location_);
            args["payload"] = {{"stage", last_stage_}, {"equipment", facts_.value("equipment", json())},
                               {"s_fire", facts_.value("s_fire", json())}};
            queue_.push_back(Decision::act("Notify the control centre with stage-graded priority.", "alert_center", args));
        } else if (s.tool == "power_isolation") {
            const json zone = facts_.value("power_zone", json());
            if (zone.is_null()) {
                note(ctx.now, "power_isolation_skipped", {{"reason", "no power zone at the fire location"}});
                continue;
            }
            queue_.push_back(Decision::act("Isolate power to the affected zone.", "power_isolation", {{"zone_id", zone}}));
        } else if (s.tool == "fire_suppression") {
            if (plan.retreat_before_discharge && distance(robot_position(ctx), location_) < plan.standoff) {
                queue_.push_back(Decision::act("Too close for discharge: retreat to the safe standoff.", "locomotion",
                                               {{"goal", point_json(location_)},
                                                {"standoff", plan.standoff},
                                                {"purpose", "retreat"},
                                                {"face", true}}));
            }
            json args = s.args;
            args["location"] = point_json(location_);
            queue_.push_back(Decision::act(s.args.value("mode", "") == "arm" ? "Arm the suppression system."
                                                                            : "Discharge suppression now.",
                                           "fire_suppression", args));
        } else {
            queue_.push_back(Decision::act("Protocol step.", s.tool, s.args));
        }
    }
}

void ScenarioPolicy::enter_monitor(const PolicyContext& ctx) {
    note(ctx.now, "response_complete", {{"hazard", hazard_}});
    mode_ = Mode::Monitor;
    readings_.clear();
    reading_times_.clear();
}

// --- thermal ----------------------------------------------------------------

void ScenarioPolicy::start_thermal(const json& scan, const PolicyContext&) {
    mode_ = Mode::Thermal;
    hazard_ = "thermal";
    hazard_detected_ = true;
    queue_.clear();
    facts_ = {{"inspection_point", scan.at("inspection_point")},
              {"pipe_id", scan.at("pipe_id")},
              {"max_delta", scan.at("max_delta")},
              {"peak_temp", scan.at("regions").at(0).at("peak_temp")}};
    const InspectionPoint& ip = cfg_.map->inspection_points.at(scan.at("inspection_point").get<std::string>());
    location_ = ip.pose.position();
    queue_.push_back(Decision::act("Thermal deviation at the inspection point: assess it.", "thermal_hazard",
                                   {{"tau_warning", cfg_.tau_warning}}));
}

void ScenarioPolicy::on_thermal_observation(const ReasoningStep& step, const PolicyContext& ctx) {
    const json& o = step.observation.data;
    const std::string& tool = step.action.tool;
    if (!step.observation.ok) {
        if (queue_.empty()) mode_ = Mode::Done;
        return;
    }
    if (tool == "thermal_hazard" && !plan_) {
        if (!o.value("anomaly", false)) {
            mode_ = Mode::Patrol;
            hazard_detected_ = false;
            return;
        }
        const auto tc = o.at("t_critical").is_null() ? std::nullopt : std::optional<double>(o["t_critical"].get<double>());
        perception::AnomalyRegion region;
        region.max_delta = facts_.at("max_delta").get<double>();
        const std::string pipe = facts_.at("pipe_id").get<std::string>();
        plan_ = thermal_protocol(region, pipe, *cfg_.map, cfg_.tau_warning);
        plan_->priority = thermal_priority(tc);
        note(step.end_time(), "plan", to_json(*plan_));
        queue_.push_back(Decision::act("Anomaly above threshold: alert the control centre.", "alert_center",
                                       {{"priority", std::string(to_string(*plan_->priority))},
                                        {"hazard", "thermal"},
                                        {"location", point_json(location_)},
                                        {"payload", {{"pipe_id", pipe},
                                                     {"max_delta", facts_["max_delta"]},
                                                     {"t_current", o.value("t_current", json())},
                                                     {"t_critical", o.at("t_critical")}}}}));
        queue_.push_back(Decision::act("Profile the pipe to localise the peak.", "thermal_mapping", {{"pipe_id", pipe}}));
        queue_.push_back(Decision::act("Estimate the temperature trend.", "thermal_trend", {{"pipe_id", pipe}, {"window", 60.0}}));
    } else if (tool == "thermal_mapping") {
        facts_["peak_world"] = o.at("peak_world");
        facts_["peak_position"] = o.at("peak_position");
        facts_["limit_temp"] = o.at("limit_temp");
        facts_["profile"] = {{"positions", o.at("positions")}, {"temps", o.at("temps")}};
    } else if (tool == "thermal_trend") {
        facts_["rate"] = o.at("rate");
        queue_.push_back(Decision::act("Project time to the pipe limit.", "time_to_critical",
                                       {{"t_current", o.at("t_now")}, {"rate", o.at("rate")}, {"t_limit", facts_.at("limit_temp")}}));
    } else if (tool == "time_to_critical") {
        facts_["t_critical"] = o.at("t_critical");
        const double rate = facts_.at("rate").get<double>();
        if (rate < kCoolingRate) {
            note(step.end_time(), "trend_negative", {{"rate", rate}, {"pipe_id", facts_["pipe_id"]}});
            return;  // no actuation; monitor only
        }
        queue_.push_back(Decision::act("Correlate the profile peak with facility equipment.", "facility_map",
                                       {{"point", facts_.at("peak_world")}, {"radius", 1.0}}));
    } else if (tool == "facility_map") {
        const json& nearby = o.at("nearby");
        if (nearby.empty()) {
            note(step.end_time(), "root_cause", {{"id", nullptr}});
        } else {
            note(step.end_time(), "root_cause", {{"id", nearby[0].at("id")}, {"kind", nearby[0].at("kind")}});
        }
        const bool stuck_valve = !nearby.empty() && nearby[0].value("kind", "") == "valve" &&
                                 nearby[0].contains("telemetry") && nearby[0]["telemetry"].value("stuck", false);
        if (stuck_valve) {
            queue_.push_back(Decision::act("Root cause is a stuck valve: drive it to setpoint.", "remote_valve",
                                           {{"valve_id", nearby[0]["id"]}}));
            return;
        }
        queue_.push_back(Decision::act("No actionable root cause: escalate with the thermal profile.", "alert_center",
                                       {{"priority", "P2"},
                                        {"hazard", "thermal"},
                                        {"location", facts_.at("peak_world")},
                                        {"payload", {{"escalation", true},
                                                     {"pipe_id", facts_["pipe_id"]},
                                                     {"peak_position", facts_["peak_position"]},
                                                     {"profile", facts_["profile"]}}}}));
        escalated_ = true;
    } else if (tool == "alert_center" && escalated_) {
        note(step.end_time(), "escalated", {{"pipe_id", facts_["pipe_id"]}});
        note(step.end_time(), "response_complete", {{"hazard", "thermal"}});
        mode_ = Mode::Done;
        queue_.clear();
    }
    (void)ctx;
}

// --- intruder ---------------------------------------------------------------

void ScenarioPolicy::start_intruder(std::size_t detection, const PolicyContext&) {
    suspended_ = std::move(queue_);
    queue_.clear();
    mode_ = Mode::Intruder;
    hazard_ = "intruder";
    detection_ = detection;
    facts_ = json::object();
    plan_.reset();
    queue_.push_back(Decision::act("Person in view: localise them.", "depth_localize",
                                   {{"detection", detection}, {"source", "person"}}));
    queue_.push_back(Decision::act("Extract a re-identification embedding.", "reid_embed", {{"detection", detection}}));
}

void ScenarioPolicy::on_intruder_observation(const ReasoningStep& step, const PolicyContext& ctx) {
    const json& o = step.observation.data;
    const std::string& tool = step.action.tool;
    auto resume_patrol = [&] {
        mode_ = Mode::Patrol;
        queue_ = std::move(suspended_);
        suspended_.clear();
    };
    if (!step.observation.ok) {
        if (!plan_) resume_patrol();
        return;
    }
    if (tool == "depth_localize") {
        location_ = point_of(o.at("world"));
    } else if (tool == "reid_embed") {
        queue_.push_back(Decision::act("Match against the authorised-personnel gallery.", "personnel_db",
                                       {{"embedding", o.at("embedding")}}));
    } else if (tool == "personnel_db") {
        facts_["match"] = o.at("match");
        facts_["authorized"] = o.at("authorized");
        facts_["similarity"] = o.at("similarity");
        queue_.push_back(Decision::act("Check zone restrictions and access windows.", "zone_schedule",
                                       {{"point", point_json(location_)}}));
    } else if (tool == "zone_schedule") {
        facts_["zone"] = o.at("zone");
        facts_["restricted"] = o.at("restricted");
        facts_["within_allowed"] = o.at("within_allowed");
        queue_.push_back(Decision::act("Apply the zone access rule.", "intruder_threat",
                                       {{"restricted", o.at("restricted")},
                                        {"within_allowed", o.at("within_allowed")},
                                        {"authorized", facts_.at("authorized")}}));
    } else if (tool == "intruder_threat") {
        IntruderAssessment a;
        a.person_detected = true;
        a.zone.zone = facts_["zone"].is_null() ? std::nullopt : std::optional<std::string>(facts_["zone"].get<std::string>());
        a.zone.restricted = facts_["restricted"].get<bool>();
        a.zone.within_allowed = facts_["within_allowed"].get<bool>();
        if (!facts_["match"].is_null()) a.match_id = facts_["match"].get<std::string>();
        a.match_authorized = facts_["authorized"].get<bool>();
        ActionPlan plan = intruder_protocol(a);
        if (plan.steps.empty()) {
            note(step.end_time(), "person_logged", {{"match", facts_["match"]}, {"zone", facts_["zone"]},
                                                    {"reason", plan.rationale}});
            resume_patrol();
            return;
        }
        hazard_detected_ = true;
        suspended_.clear();
        note(step.end_time(), "plan", to_json(plan));
        for (const auto& s : plan.steps) {
            json args = s.args;
            if (s.tool == "alert_center") {
                args["location"] = point_json(location_);
                args["payload"] = {{"zone", facts_["zone"]}, {"similarity", facts_["similarity"]},
                                   {"match", facts_["match"]}};
                queue_.push_back(Decision::act("Unauthorised person in a restricted zone: alert security.", s.tool, args));
            } else if (s.tool == "locomotion") {
                args["goal"] = point_json(location_);
                args["purpose"] = "challenge";
                args["face"] = true;
                queue_.push_back(Decision::act("Approach to challenge distance.", s.tool, args));
            } else {
                queue_.push_back(Decision::act("Issue the verbal challenge.", s.tool, args));
            }
        }
        plan_ = std::move(plan);
    }
    (void)ctx;
}

// --- monitoring -------------------------------------------------------------

void ScenarioPolicy::on_monitor_observation(const ReasoningStep& step, const PolicyContext& ctx) {
    if (!step.observation.ok) return;
    const json& o = step.observation.data;
    const std::string& tool = step.action.tool;
    if (mode_ == Mode::Await) return;
    if (hazard_ == "fire") {
        if (tool == "fire_smoke") {
            readings_.push_back(o.value("fire_confidence", 0.0));
            reading_times_.push_back(step.sim_time);
            const auto cleared = monitor_cleared(readings_, *plan_->monitor);
            if (cleared && *cleared + 1 == readings_.size()) {
                note(step.sim_time, "fire_cleared", {{"confidence", readings_.back()}, {"frames", plan_->monitor->consecutive}});
                mode_ = Mode::Done;
                queue_.clear();
            }
        } else if (tool == "fire_severity" && !discharged_ && o.value("stage", "") == "fully_developed") {
            // Escalation while the countdown runs: discharge immediately.
            queue_.clear();
            last_stage_ = "fully_developed";
            if (distance(robot_position(ctx), location_) < kSuppressionStandoff) {
                queue_.push_back(Decision::act("Retreat before discharge.", "locomotion",
                                               {{"goal", point_json(location_)},
                                                {"standoff", kSuppressionStandoff},
                                                {"purpose", "retreat"},
                                                {"face", true}}));
            }
            queue_.push_back(Decision::act("Fire escalated to fully developed: discharge now.", "fire_suppression",
                                           {{"mode", "discharge"}, {"location", point_json(location_)}}));
            queue_.push_back(Decision::act("Emergency notification.", "alert_center",
                                           {{"priority", "P1"}, {"hazard", "fire"}, {"location", point_json(location_)},
                                            {"payload", {{"stage", "fully_developed"}}}}));
        } else if (tool == "fire_suppression") {
            discharged_ = true;
        }
    } else if (hazard_ == "thermal" && tool == "thermal_scan" && o.value("registered", false)) {
        const double d = o.at("max_delta").get<double>();
        if (d < kThermalResolvedDelta) {
            note(step.sim_time, "thermal_resolved", {{"max_delta", d}});
            mode_ = Mode::Done;
            queue_.clear();
        }
    }
}

// --- RuleBasedPolicy --------------------------------------------------------

RuleBasedPolicy::RuleBasedPolicy(PolicyConfig cfg) : cfg_(std::move(cfg)) {}

Decision RuleBasedPolicy::next(const PolicyContext& ctx) {
    while (seen_steps_ < ctx.trace.steps.size()) {
        const ReasoningStep& s = ctx.trace.steps[seen_steps_++];
        if (!s.observation.ok || s.protocol_error) continue;
        const json& o = s.observation.data;
        const std::string& tool = s.action.tool;
        if (finished_) continue;
        if (tool == "fire_smoke" && !o.at("fire").empty()) {
            hazard_detected_ = true;
            queue_.clear();
            queue_.push_back(Decision::act("Rule: fire seen, localise.", "depth_localize",
                                           {{"detection", *strongest(o["fire"])}, {"source", "fire"}}));
            queue_.push_back(Decision::act("Rule: score severity.", "fire_severity"));
        } else if (tool == "thermal_scan" && o.value("hazard_cue", false)) {
            hazard_detected_ = true;
            queue_.clear();
            queue_.push_back(Decision::act("Rule: thermal deviation, assess.", "thermal_hazard"));
            const std::string ip = o.at("inspection_point").get<std::string>();
            const Vec2 loc = cfg_.map ? cfg_.map->inspection_points.at(ip).pose.position() : Vec2{};
            queue_.push_back(Decision::act("Rule: any thermal anomaly raises P2.", "alert_center",
                                           {{"priority", "P2"}, {"hazard", "thermal"}, {"location", point_json(loc)},
                                            {"payload", {{"max_delta", o.at("max_delta")}}}}));
            finished_ = true;
        } else if (tool == "person_detect" && !o.at("persons").empty()) {
            queue_.push_front(Decision::act("Rule: person seen, localise.", "depth_localize",
                                            {{"detection", *strongest(o["persons"])}, {"source", "person"}}));
        } else if (tool == "depth_localize") {
            const json loc = o.at("world");
            if (s.action.args.value("source", "") == "fire") {
                // Fire rule: fixed P1 and immediate discharge, whatever the stage.
                queue_.push_back(Decision::act("Rule: fire means P1.", "alert_center",
                                               {{"priority", "P1"}, {"hazard", "fire"}, {"location", loc},
                                                {"payload", {{"rule", "fire_detected"}}}}));
                queue_.push_back(Decision::act("Rule: discharge suppression.", "fire_suppression",
                                               {{"mode", "discharge"}, {"location", loc}}));
                finished_ = true;
            } else {
                queue_.push_front(Decision::act("Rule: zone lookup.", "zone_schedule", {{"point", loc}}));
            }
        } else if (tool == "zone_schedule") {
            // No re-identification: everyone counts as unauthorised.
            queue_.push_front(Decision::act("Rule: zone access check.", "intruder_threat",
                                            {{"restricted", o.at("restricted")},
                                             {"within_allowed", o.at("within_allowed")},
                                             {"authorized", false}}));
        } else if (tool == "intruder_threat" && o.value("intruder_alert", false)) {
            hazard_detected_ = true;
            queue_.clear();
            queue_.push_back(Decision::act("Rule: intruder alert.", "alert_center",
                                           {{"priority", "P2"}, {"hazard", "intruder"},
                                            {"location", ctx.trace.steps[seen_steps_ - 3].observation.data.at("world")},
                                            {"payload", {{"rule", "zone_violation"}}}}));
            finished_ = true;
        }
    }
    if (!queue_.empty()) {
        Decision d = std::move(queue_.front());
        queue_.pop_front();
        return d;
    }
    if (finished_) return Decision::done("Rule-based response issued.");
    if (ctx.now >= cfg_.patrol_duration) return Decision::done("Patrol duration reached.");
    queue_ = patrol_cycle(cfg_, ctx, stop_);
    Decision d = std::move(queue_.front());
    queue_.pop_front();
    return d;
}

}  // namespace fg::orchestra
