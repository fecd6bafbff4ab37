#include "factoryguard/session.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "factoryguard/locomotion.hpp"
#include "factoryguard/perception.hpp"
#include "factoryguard/protocols.hpp"
#include "factoryguard/understanding.hpp"
#include "json_util.hpp"

namespace fg::sim {

using nlohmann::json;
using orchestra::ToolCall;
using orchestra::ToolDescriptor;
using orchestra::ToolResult;

namespace {

constexpr std::uint64_t kFrameStream = 0x6672616d65ULL;
constexpr std::uint64_t kNavStream = 0x6e6176ULL;
constexpr double kFrameArea = 1280.0 * 720.0;
constexpr double kTargetMatchRadius = 2.0;  // m, suppression target resolution

std::optional<Cell> nearest_free(const OccupancyGrid& g, Cell c) {
    c.x = std::clamp(c.x, 0, g.width() - 1);
    c.y = std::clamp(c.y, 0, g.height() - 1);
    if (!g.blocked(c)) return c;
    std::vector<std::uint8_t> seen(g.size(), 0);
    std::deque<Cell> q{c};
    seen[g.index(c)] = 1;
    while (!q.empty()) {
        const Cell u = q.front();
        q.pop_front();
        if (!g.blocked(u)) return u;
        for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
            const Cell v{u.x + dx, u.y + dy};
            if (!g.in_bounds(v) || seen[g.index(v)]) continue;
            seen[g.index(v)] = 1;
            q.push_back(v);
        }
    }
    return std::nullopt;
}

json pose_json(const Pose2& p) { return json::array({p.x, p.y, p.theta}); }

double pipe_max_excess(const Pipe& pipe) {
    double m = 0.0;
    for (double t : pipe.segment_temps) m = std::max(m, std::abs(t - pipe.baseline_temp));
    return m;
}

double pipe_peak(const Pipe& pipe) {
    return *std::max_element(pipe.segment_temps.begin(), pipe.segment_temps.end());
}

double round_to(double v, double q) { return std::round(v / q) * q; }

template <typename T>
T arg(const json& args, std::string_view key) {
    return detail::get<T>(args, key, "args");
}

}  // namespace

SimSession::SimSession(const Scenario& scenario, memory::MemoryStores stores, EventLog& log, SessionConfig config)
    : world_(scenario.world),
      script_(scenario.script),
      noise_(scenario.noise),
      stores_(std::move(stores)),
      log_(log),
      cfg_(config) {
    deadline_ = world_.clock + scenario.duration + cfg_.episode_margin;
    nav_grid_ = std::make_shared<const OccupancyGrid>(world_.grid->inflated(cfg_.robot_radius));
    log_.append(world_.clock, "harness", "session_start",
                {{"scenario", scenario.id}, {"seed", cfg_.seed}, {"pose", pose_json(world_.robot.pose)}});
    apply_due_events(world_.clock);
}

// --- time and world ---------------------------------------------------------

void SimSession::replace_grid(std::shared_ptr<const OccupancyGrid> g) {
    world_.grid = std::move(g);
    nav_grid_ = std::make_shared<const OccupancyGrid>(world_.grid->inflated(cfg_.robot_radius));
}

void SimSession::apply_due_events(double until) {
    while (next_event_ < script_.events.size() && script_.events[next_event_].t <= until + 1e-9) {
        const ScriptedEvent& ev = script_.events[next_event_++];
        if (ev.kind == "operator_decision") {
            operator_decision_ = ev.payload.at("decision").get<std::string>();
            record_.operator_decision_time = world_.clock;
        } else {
            const auto grid_before = world_.grid;
            world_ = apply_event(std::move(world_), ev);
            if (world_.grid != grid_before) replace_grid(world_.grid);
        }
        log_.append(world_.clock, "world", "event_" + ev.kind, ev.payload);
    }
}

void SimSession::step_world(double dt) {
    std::vector<bool> suppressed;
    for (const auto& f : world_.fires) suppressed.push_back(f.suppressed_at.has_value());
    world_ = step(std::move(world_), dt);
    for (std::size_t i = 0; i < world_.fires.size() && i < suppressed.size(); ++i) {
        const auto& f = world_.fires[i];
        if (!suppressed[i] && f.suppressed_at) {
            record_.discharge = *f.suppressed_at;
            log_.append(*f.suppressed_at, "world", "suppression_discharge", {{"fire", f.id}});
        }
    }
}

void SimSession::check_reflex() {
    if (navigating_) return;
    const Vec2 pos = world_.robot.pose.position();
    const FireSource* threat = nullptr;
    double nearest = 0.0;
    for (const auto& f : world_.fires) {
        if (!f.discharge_at || f.suppressed_at) continue;
        const double d = distance(pos, f.position);
        if (!threat || d < nearest) {
            threat = &f;
            nearest = d;
        }
    }
    if (!reflex_active_ && threat && nearest < cfg_.reflex_standoff) {
        reflex_active_ = true;
        ++record_.reflex_retreats;
        log_.append(world_.clock, "locomotion", "reflex_retreat", {{"fire", threat->id}, {"distance", nearest}});
    }
    if (!reflex_active_) return;
    if (!threat || nearest >= cfg_.reflex_standoff + 0.3) {
        reflex_active_ = false;
        world_ = apply_actuation(std::move(world_), SetVelocity{{}});
        log_.append(world_.clock, "locomotion", "reflex_clear", {{"pose", pose_json(world_.robot.pose)}});
        return;
    }
    const Vec2 away = (pos - threat->position) * (1.0 / std::max(nearest, 1e-6));
    const Pose2& p = world_.robot.pose;
    const Vec2 left{-std::sin(p.theta), std::cos(p.theta)};
    world_.robot.gait = Gait::Walk;
    world_ = apply_actuation(std::move(world_), SetVelocity{{away.dot(p.forward()), away.dot(left), 0.0}});
}

void SimSession::track_recovery() {
    if (!record_.valve_reset || record_.pipe_recovered) return;
    for (const auto& pipe : world_.pipes) {
        if (pipe_max_excess(pipe) >= orchestra::kThermalResolvedDelta) return;
    }
    record_.pipe_recovered = world_.clock;
    log_.append(world_.clock, "world", "pipes_at_baseline", json::object());
}

void SimSession::advance(double dt) {
    if (!(dt >= 0.0)) throw DomainError("advance: dt must be >= 0");
    const double t_end = world_.clock + dt;
    while (world_.clock < t_end - 1e-9) {
        double h = std::min(cfg_.tick, t_end - world_.clock);
        if (next_event_ < script_.events.size()) {
            const double te = script_.events[next_event_].t;
            if (te > world_.clock && te < world_.clock + h) h = te - world_.clock;
        }
        step_world(h);
        apply_due_events(world_.clock);
        check_reflex();
        track_recovery();
    }
}

bool SimSession::timed_out() const { return world_.clock >= deadline_; }

json SimSession::snapshot() const {
    const InspectionPoint* ip = docked();
    return {{"t", world_.clock},
            {"time_of_day", world_.time_of_day()},
            {"pose", pose_json(world_.robot.pose)},
            {"docked_at", ip ? json(ip->id) : json(nullptr)},
            {"operator_decision", operator_decision_ ? json(*operator_decision_) : json(nullptr)}};
}

const InspectionPoint* SimSession::docked() const {
    const Vec2 pos = world_.robot.pose.position();
    const InspectionPoint* best = nullptr;
    double best_d = cfg_.docking_tolerance;
    for (const auto& [id, ip] : stores_.map.inspection_points) {
        const double d = distance(pos, ip.pose.position());
        if (d <= best_d) {
            best = &ip;
            best_d = d;
        }
    }
    return best;
}

SensorFrame SimSession::capture() {
    return emit_sensor_frame(world_, noise_, mix_seed(mix_seed(cfg_.seed, kFrameStream), frame_counter_++));
}

// --- dispatch ---------------------------------------------------------------

ToolResult SimSession::execute(const ToolDescriptor& tool, const ToolCall& call, double& latency) {
    const double t0 = world_.clock;
    const json& args = call.args.is_object() ? call.args : json::object();
    ToolResult result;
    try {
        const std::string& n = tool.name;
        if (n == "fire_smoke") result = do_fire_smoke(latency, tool);
        else if (n == "person_detect") result = do_person_detect(latency, tool);
        else if (n == "thermal_scan") result = do_thermal_scan(latency, tool);
        else if (n == "depth_localize") result = do_depth_localize(args);
        else if (n == "reid_embed") result = do_reid(args);
        else if (n == "thermal_mapping") result = do_thermal_mapping(args, latency, tool);
        else if (n == "thermal_trend") result = do_thermal_trend(args, latency, tool);
        else if (n == "obstacle_scan") result = do_obstacle_scan(latency, tool);
        else if (n == "fire_severity") result = do_fire_severity(args, latency, tool);
        else if (n == "thermal_hazard") result = do_thermal_hazard(args, latency, tool);
        else if (n == "spill_hazard") {
            advance(tool.latency);
            result.data = {{"status", "no spill model"}};
        } else if (n == "intruder_threat") {
            const bool restricted = arg<bool>(args, "restricted");
            const bool within = arg<bool>(args, "within_allowed");
            const bool authorized = arg<bool>(args, "authorized");
            advance(tool.latency);
            result.data = {{"intruder_alert", orchestra::intruder_alert(restricted, within, authorized)}};
        } else if (n == "time_to_critical") {
            const auto tc = understanding::time_to_critical(arg<double>(args, "t_limit"),
                                                            arg<double>(args, "t_current"),
                                                            arg<double>(args, "rate"));
            advance(tool.latency);
            result.data = {{"t_critical", tc ? json(*tc) : json(nullptr)}};
        } else if (n == "facility_map") result = do_facility_map(args);
        else if (n == "thermal_baselines") {
            const auto id = arg<std::string>(args, "inspection_point");
            const memory::Baseline* b = stores_.baselines.find(id);
            if (!b) return ToolResult::failure("no baseline for inspection point '" + id + "'");
            result.data = {{"inspection_point", id},
                           {"captured_at", b->captured_at},
                           {"width", b->image.width()},
                           {"height", b->image.height()}};
        } else if (n == "personnel_db") {
            const auto emb = arg<std::vector<double>>(args, "embedding");
            const auto m = perception::match_person_detail(emb, stores_.personnel);
            const memory::PersonnelRecord* rec = m.id ? stores_.personnel.find(*m.id) : nullptr;
            result.data = {{"match", m.id ? json(*m.id) : json(nullptr)},
                           {"similarity", m.best_similarity},
                           {"authorized", rec ? rec->authorized : false}};
        } else if (n == "zone_schedule") {
            const Vec2 p = detail::as_vec2(detail::require(args, "point", ""), "point");
            const auto zs = memory::zone_status(stores_.map, p, world_.time_of_day());
            result.data = {{"zone", zs.zone ? json(*zs.zone) : json(nullptr)},
                           {"restricted", zs.restricted},
                           {"within_allowed", zs.within_allowed},
                           {"time_of_day", world_.time_of_day()}};
        } else if (n == "remote_valve") result = do_remote_valve(args, latency, tool);
        else if (n == "fire_suppression") result = do_fire_suppression(args, latency, tool);
        else if (n == "locomotion") result = do_locomotion(args, latency);
        else if (n == "alert_center") {
            const auto pr = orchestra::parse_priority(arg<std::string>(args, "priority"));
            const auto hazard = arg<std::string>(args, "hazard");
            const json loc = args.contains("location") ? args["location"] : json::array({0.0, 0.0});
            advance(tool.latency);
            json alert = {{"priority", std::string(orchestra::to_string(pr))},
                          {"hazard", hazard},
                          {"location", loc},
                          {"payload", args.value("payload", json::object())}};
            log_.append(world_.clock, "orchestra", "alert", alert);
            result.data = {{"delivered", true}, {"alert", std::move(alert)}};
        } else if (n == "verbal_warning") {
            advance(tool.latency);
            result.data = {{"delivered", true}, {"message", args.value("message", std::string("Stop."))}};
        } else if (n == "power_isolation") result = do_power_isolation(args, latency, tool);
        else return ToolResult::failure("tool '" + n + "' has no simulator binding");
    } catch (const CommandRejected& e) {
        record_.rejected_actuations.push_back(tool.name + ":" + e.id());
        result = ToolResult::failure(e.what());
    } catch (const Error& e) {
        result = ToolResult::failure(e.what());
    } catch (const json::exception& e) {
        result = ToolResult::failure(std::string("bad arguments: ") + e.what());
    }
    latency = world_.clock - t0;
    log_.append(t0, "orchestra", "tool_call",
                {{"tool", tool.name}, {"args", call.args}, {"ok", result.ok}, {"latency", latency},
                 {"error", result.error}});
    return result;
}

// --- perception -------------------------------------------------------------

namespace {

json detections_json(const SensorFrame& f, DetectionClass cls) {
    json arr = json::array();
    for (std::size_t i = 0; i < f.detections.size(); ++i) {
        const Detection& d = f.detections[i];
        if (d.cls != cls) continue;
        arr.push_back({{"index", i},
                       {"class", std::string(to_string(d.cls))},
                       {"bbox", {d.bbox.u, d.bbox.v, d.bbox.w, d.bbox.h}},
                       {"confidence", d.confidence}});
    }
    return arr;
}

}  // namespace

ToolResult SimSession::do_fire_smoke(double&, const ToolDescriptor& tool) {
    fire_view_ = {capture(), true};
    json fires = detections_json(fire_view_.frame, DetectionClass::Fire);
    json smoke = detections_json(fire_view_.frame, DetectionClass::Smoke);
    double conf = 0.0;
    for (const auto& d : fires) conf = std::max(conf, d["confidence"].get<double>());
    const bool cue = !fires.empty() || !smoke.empty();
    ToolResult r;
    r.data = {{"fire", fires},
              {"smoke", smoke},
              {"fire_confidence", conf},
              {"frame_area", kFrameArea},
              {"captured_at", fire_view_.frame.timestamp},
              {"hazard_cue", cue}};
    log_.append(world_.clock, "perception", "fire_smoke", {{"fire", fires.size()}, {"smoke", smoke.size()}, {"confidence", conf}});
    advance(tool.latency);
    return r;
}

ToolResult SimSession::do_person_detect(double&, const ToolDescriptor& tool) {
    person_view_ = {capture(), true};
    json persons = detections_json(person_view_.frame, DetectionClass::Person);
    ToolResult r;
    r.data = {{"persons", persons}, {"captured_at", person_view_.frame.timestamp}, {"hazard_cue", !persons.empty()}};
    log_.append(world_.clock, "perception", "person_detect", {{"persons", persons.size()}});
    advance(tool.latency);
    return r;
}

ToolResult SimSession::do_thermal_scan(double&, const ToolDescriptor& tool) {
    ThermalView v;
    v.valid = true;
    const InspectionPoint* ip = docked();
    const memory::Baseline* base = ip ? stores_.baselines.find(ip->id) : nullptr;
    const Pose2 pose = ip ? ip->pose : world_.robot.pose;
    ThermalImage img = render_thermal(world_, pose);
    if (noise_.thermal_noise_std > 0.0) {
        std::mt19937_64 rng(mix_seed(mix_seed(cfg_.seed, kFrameStream), frame_counter_++));
        std::normal_distribution<double> n(0.0, noise_.thermal_noise_std);
        const double q = world_.sensors.thermal_quantum;
        for (double& t : img.temps()) t = round_to(t + n(rng), q);
    }
    v.max_temp = *std::max_element(img.temps().begin(), img.temps().end());
    json regions = json::array();
    if (base) {
        v.registered = true;
        v.inspection_point = ip->id;
        v.pipe_id = ip->pipe_id;
        const ThermalImage delta = perception::thermal_diff(img, base->image);
        for (double d : delta.temps()) v.max_delta = std::max(v.max_delta, std::abs(d));
        const auto found = perception::anomaly_regions(delta, perception::kDefaultWarningDelta);
        v.regions = found.size();
        for (const auto& reg : found) {
            regions.push_back({{"size", reg.pixels.size()},
                               {"centroid", {reg.centroid_x, reg.centroid_y}},
                               {"max_delta", round_to(reg.max_delta, 1e-6)},
                               {"peak_temp", img.at(reg.peak.x, reg.peak.y)}});
        }
        if (!found.empty()) v.peak_temp = img.at(found.front().peak.x, found.front().peak.y);
    }
    thermal_view_ = v;
    ToolResult r;
    r.data = {{"registered", v.registered},
              {"inspection_point", v.registered ? json(v.inspection_point) : json(nullptr)},
              {"pipe_id", v.registered ? json(v.pipe_id) : json(nullptr)},
              {"max_delta", round_to(v.max_delta, 1e-6)},
              {"max_temp", v.max_temp},
              {"regions", regions},
              {"captured_at", world_.clock},
              {"hazard_cue", v.regions > 0}};
    log_.append(world_.clock, "perception", "thermal_scan",
                {{"registered", v.registered}, {"max_delta", round_to(v.max_delta, 1e-6)}, {"regions", v.regions}});
    advance(tool.latency);
    return r;
}

ToolResult SimSession::do_depth_localize(const json& args) {
    const std::string source = args.value("source", std::string("fire"));
    const FireView& view = source == "person" ? person_view_ : fire_view_;
    if (!view.valid) return ToolResult::failure("no frame captured for source '" + source + "'");
    const auto idx = arg<std::size_t>(args, "detection");
    if (idx >= view.frame.detections.size()) return ToolResult::failure("detection index out of range");
    const Detection& d = view.frame.detections[idx];
    const double z = view.frame.depth_of.at(idx);
    const auto p = perception::backproject(d.bbox.center_u(), d.bbox.center_v(), z, world_.sensors.rgb);
    const Vec2 w = camera_to_world(view.frame.pose, p.X, p.Z);
    ToolResult r;
    r.data = {{"camera", {p.X, p.Y, p.Z}}, {"world", {w.x, w.y}}, {"range", std::hypot(p.X, p.Z)}};
    return r;
}

ToolResult SimSession::do_reid(const json& args) {
    if (!person_view_.valid) return ToolResult::failure("no person frame captured");
    const auto idx = arg<std::size_t>(args, "detection");
    const auto it = person_view_.frame.embedding_of.find(idx);
    if (it == person_view_.frame.embedding_of.end()) return ToolResult::failure("detection has no embedding");
    ToolResult r;
    r.data = {{"embedding", it->second}, {"dimension", it->second.size()}};
    return r;
}

ToolResult SimSession::do_thermal_mapping(const json& args, double&, const ToolDescriptor& tool) {
    const auto id = arg<std::string>(args, "pipe_id");
    const Pipe* pipe = world_.find_pipe(id);
    if (!pipe) return ToolResult::failure("unknown pipe '" + id + "'");
    const double step = args.contains("step") ? arg<double>(args, "step") : pipe->sample_step;
    const auto prof = perception::thermal_profile(*pipe, step);
    const Vec2 peak = pipe->point_at(prof.peak_position());
    ToolResult r;
    r.data = {{"pipe_id", id},
              {"positions", prof.positions},
              {"temps", prof.temps},
              {"peak_index", prof.peak_index},
              {"peak_position", prof.peak_position()},
              {"peak_temp", prof.peak_temp()},
              {"peak_world", {peak.x, peak.y}},
              {"limit_temp", pipe->limit_temp},
              {"baseline_temp", pipe->baseline_temp}};
    const double duration = tool.rate > 0.0 ? pipe->length() / tool.rate : tool.latency;
    log_.append(world_.clock, "perception", "thermal_mapping",
                {{"pipe", id}, {"peak_position", prof.peak_position()}, {"peak_temp", prof.peak_temp()}});
    advance(duration);
    return r;
}

ToolResult SimSession::do_thermal_trend(const json& args, double&, const ToolDescriptor& tool) {
    const auto id = arg<std::string>(args, "pipe_id");
    if (!world_.find_pipe(id)) return ToolResult::failure("unknown pipe '" + id + "'");
    const double window = args.contains("window") ? arg<double>(args, "window") : tool.latency;
    if (!(window > 0.0)) return ToolResult::failure("trend window must be > 0");
    const double t_prev = pipe_peak(*world_.find_pipe(id));
    advance(window);
    const double t_now = pipe_peak(*world_.find_pipe(id));
    const auto est = understanding::estimate_trend(t_now, t_prev, window);
    last_trend_rate_ = est.rate;
    ToolResult r;
    r.data = {{"pipe_id", id}, {"rate", est.rate}, {"t_now", t_now}, {"t_prev", t_prev}, {"window", window}};
    return r;
}

ToolResult SimSession::do_obstacle_scan(double&, const ToolDescriptor& tool) {
    const OccupancyGrid& g = *world_.grid;
    const Vec2 pos = world_.robot.pose.position();
    const int r = static_cast<int>(std::ceil(2.0 / g.cell_size()));
    const Cell c = g.to_cell(pos);
    int blocked = 0;
    double clearance = 2.0;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            const Cell n{c.x + dx, c.y + dy};
            if (!g.in_bounds(n) || !g.blocked(n)) continue;
            const double d = distance(g.center(n), pos);
            if (d > 2.0) continue;
            ++blocked;
            clearance = std::min(clearance, d);
        }
    }
    advance(tool.latency);
    ToolResult res;
    res.data = {{"blocked_cells", blocked}, {"clearance", clearance}};
    return res;
}

// --- reasoning --------------------------------------------------------------

ToolResult SimSession::do_fire_severity(const json& args, double&, const ToolDescriptor& tool) {
    if (!fire_view_.valid) return ToolResult::failure("no fire/smoke frame captured");
    const SensorFrame& f = fire_view_.frame;
    double s_fire = 0.0;
    double s_smoke = 0.0;
    double conf = 0.0;
    std::optional<std::size_t> pick;
    if (args.contains("detection") && !args["detection"].is_null()) pick = arg<std::size_t>(args, "detection");
    for (std::size_t i = 0; i < f.detections.size(); ++i) {
        const Detection& d = f.detections[i];
        const double s = perception::fire_severity(std::min(d.bbox.area(), kFrameArea), kFrameArea, d.confidence);
        if (d.cls == DetectionClass::Fire && (!pick || *pick == i) && s >= s_fire) {
            s_fire = s;
            conf = d.confidence;
        }
        if (d.cls == DetectionClass::Smoke) s_smoke = std::max(s_smoke, s);
    }
    const double t = f.timestamp;
    const bool present = s_fire > 0.0 || s_smoke > 0.0;
    if (present && !severity_.first_seen) severity_.first_seen = t;
    double ds_dt = 0.0;
    if (severity_.last_t && t > *severity_.last_t) ds_dt = (s_fire - severity_.last_s) / (t - *severity_.last_t);
    const double duration = severity_.first_seen ? t - *severity_.first_seen : 0.0;
    const auto stage = understanding::fire_stage(s_fire, s_smoke, ds_dt, duration, severity_.peak);
    if (stage != understanding::FireStage::Decay && stage > severity_.peak) severity_.peak = stage;
    severity_.last_t = t;
    severity_.last_s = s_fire;
    advance(tool.latency);
    ToolResult r;
    r.data = {{"s_fire", s_fire},
              {"s_smoke", s_smoke},
              {"ds_dt", ds_dt},
              {"duration", duration},
              {"confidence", conf},
              {"stage", std::string(understanding::to_string(stage))},
              {"peak_stage", std::string(understanding::to_string(severity_.peak))}};
    return r;
}

ToolResult SimSession::do_thermal_hazard(const json& args, double&, const ToolDescriptor& tool) {
    if (!thermal_view_.valid) return ToolResult::failure("no thermal scan available");
    const double tau = args.contains("tau_warning") ? arg<double>(args, "tau_warning")
                                                    : perception::kDefaultWarningDelta;
    const ThermalView& v = thermal_view_;
    const bool anomaly = v.registered && v.max_delta > tau;
    json out = {{"registered", v.registered}, {"anomaly", anomaly}, {"max_delta", round_to(v.max_delta, 1e-6)},
                {"tau_warning", tau}};
    if (v.registered) {
        out["inspection_point"] = v.inspection_point;
        out["pipe_id"] = v.pipe_id;
        const auto it = stores_.map.pipes.find(v.pipe_id);
        if (anomaly && it != stores_.map.pipes.end()) {
            const double limit = it->second.limit_temp;
            const auto tc = understanding::time_to_critical(limit, v.peak_temp, last_trend_rate_.value_or(0.0));
            out["t_current"] = v.peak_temp;
            out["t_limit"] = limit;
            out["t_critical"] = tc ? json(*tc) : json(nullptr);
        }
    }
    advance(tool.latency);
    ToolResult r;
    r.data = std::move(out);
    return r;
}

// --- knowledge --------------------------------------------------------------

ToolResult SimSession::do_facility_map(const json& args) {
    const Vec2 p = detail::as_vec2(detail::require(args, "point", ""), "point");
    const double radius = args.contains("radius") ? arg<double>(args, "radius") : 1.0;
    if (!(radius > 0.0)) return ToolResult::failure("radius must be > 0");
    json nearby = json::array();
    for (const auto& [id, d] : memory::equipment_near(stores_.map, p, radius)) {
        json e = {{"id", id}, {"distance", d}};
        if (const auto it = stores_.map.valves.find(id); it != stores_.map.valves.end()) {
            e["kind"] = "valve";
            e["pipe_id"] = it->second.pipe_id;
            if (const Valve* v = world_.find_valve(id)) {
                e["telemetry"] = {{"open_fraction", v->open_fraction},
                                  {"setpoint_fraction", v->setpoint_fraction},
                                  {"stuck", std::abs(v->open_fraction - v->setpoint_fraction) > 0.1}};
            }
        } else {
            e["kind"] = stores_.map.equipment.at(id).kind;
        }
        nearby.push_back(std::move(e));
    }
    json power_zone = nullptr;
    for (const auto& [id, z] : stores_.map.zones) {
        if (world_.power_zones.contains(id) && point_in_polygon(p, z.polygon)) {
            power_zone = id;
            break;
        }
    }
    ToolResult r;
    r.data = {{"nearby", nearby}, {"power_zone", power_zone}};
    return r;
}

// --- actuation --------------------------------------------------------------

ToolResult SimSession::do_remote_valve(const json& args, double&, const ToolDescriptor& tool) {
    const auto id = arg<std::string>(args, "valve_id");
    const Valve* before = world_.find_valve(id);
    const bool was_stuck = before && before->stuck;
    advance(tool.latency);
    world_ = apply_actuation(std::move(world_), ValveReset{id});
    if (!was_stuck) record_.wrong_actuations.push_back("remote_valve:" + id);
    record_.valve_reset = world_.clock;
    log_.append(world_.clock, "world", "valve_reset", {{"valve", id}, {"was_stuck", was_stuck}});
    ToolResult r;
    r.data = {{"valve_id", id}, {"open_fraction", world_.find_valve(id)->open_fraction}};
    return r;
}

ToolResult SimSession::do_fire_suppression(const json& args, double&, const ToolDescriptor& tool) {
    const std::string mode = args.value("mode", std::string("discharge"));
    if (mode != "arm" && mode != "discharge") return ToolResult::failure("mode must be 'arm' or 'discharge'");
    std::string target;
    if (args.contains("fire_id")) {
        target = arg<std::string>(args, "fire_id");
    } else {
        const Vec2 loc = detail::as_vec2(detail::require(args, "location", ""), "location");
        double best = kTargetMatchRadius;
        for (const auto& f : world_.fires) {
            const double d = distance(loc, f.position);
            if (d <= best) {
                best = d;
                target = f.id;
            }
        }
        if (target.empty()) {
            record_.wrong_actuations.push_back("fire_suppression:no_fire");
            throw CommandRejected("fire@" + args["location"].dump());
        }
    }
    advance(tool.latency);
    world_ = apply_actuation(std::move(world_), FireSuppression{target, mode == "arm"});
    const FireSource* f = world_.find_fire(target);
    ToolResult r;
    r.data = {{"mode", mode}};
    if (mode == "arm") {
        record_.suppression_armed = world_.clock;
        r.data["discharge_at"] = f->discharge_at ? json(*f->discharge_at) : json(f->suppressed_at.value_or(world_.clock));
        log_.append(world_.clock, "world", "suppression_armed", {{"fire", target}, {"discharge_at", r.data["discharge_at"]}});
    } else {
        r.data["discharge_at"] = f->suppressed_at.value_or(world_.clock);
    }
    return r;
}

ToolResult SimSession::do_power_isolation(const json& args, double&, const ToolDescriptor& tool) {
    const auto id = arg<std::string>(args, "zone_id");
    advance(tool.latency);
    world_ = apply_actuation(std::move(world_), PowerIsolation{id});
    log_.append(world_.clock, "world", "power_isolated", {{"zone", id}});
    ToolResult r;
    r.data = {{"zone_id", id}, {"powered", false}};
    return r;
}

ToolResult SimSession::do_locomotion(const json& args, double&) {
    const Vec2 goal = detail::as_vec2(detail::require(args, "goal", ""), "goal");
    const double standoff = args.contains("standoff") ? arg<double>(args, "standoff") : 0.0;
    const std::string purpose = args.value("purpose", std::string("approach"));
    const Gait gait = args.contains("gait") ? parse_gait(arg<std::string>(args, "gait")) : Gait::Auto;
    const Vec2 pos = world_.robot.pose.position();
    const double d = distance(pos, goal);
    Vec2 target = goal;
    std::optional<double> heading;
    if (args.contains("heading")) heading = arg<double>(args, "heading");
    if (standoff > 0.0) {
        // Stop (or back off) on the line through the goal and the robot.
        const Vec2 dir = d > 1e-9 ? (pos - goal) * (1.0 / d) : Vec2{-std::cos(world_.robot.pose.theta), -std::sin(world_.robot.pose.theta)};
        if (purpose == "retreat" && d >= standoff) {
            target = pos;
        } else {
            target = goal + dir * standoff;
        }
        if (args.value("face", false)) heading = std::atan2(-dir.y, -dir.x);
    }
    ToolResult r;
    r.data = navigate(target, heading, gait, purpose);
    if (!r.data.value("arrived", false)) {
        r.ok = false;
        r.error = "navigation did not reach the target: " + r.data.value("reason", std::string("timeout"));
    }
    return r;
}

json SimSession::navigate(Vec2 target, std::optional<double> heading, Gait gait, const std::string& purpose) {
    NavigationRecord rec;
    rec.start = world_.clock;
    rec.purpose = purpose;
    const double odo0 = world_.robot.odometry;
    navigating_ = true;
    reflex_active_ = false;

    auto finish = [&](bool arrived, const std::string& reason) {
        world_ = apply_actuation(std::move(world_), SetVelocity{{}});
        navigating_ = false;
        rec.end = world_.clock;
        rec.traveled = world_.robot.odometry - odo0;
        rec.arrived = arrived;
        record_.navigation.push_back(rec);
        json out = {{"arrived", arrived},
                    {"pose", pose_json(world_.robot.pose)},
                    {"target", {target.x, target.y}},
                    {"distance", rec.traveled},
                    {"shortest", rec.shortest},
                    {"duration", rec.end - rec.start}};
        if (!reason.empty()) out["reason"] = reason;
        log_.append(world_.clock, "locomotion", "navigation_end", out);
        return out;
    };

    auto grid = nav_grid_;
    const auto start = nearest_free(*grid, grid->to_cell(world_.robot.pose.position()));
    const auto goal = nearest_free(*grid, grid->to_cell(target));
    if (!start || !goal) return finish(false, "no free cell");
    planning::GridPlanner planner(*grid, *start, *goal);
    auto plan = planner.plan();
    if (!plan.reachable) return finish(false, "goal unreachable");
    rec.shortest = std::max(planning::path_length(*grid, plan.path), distance(world_.robot.pose.position(), target));
    log_.append(world_.clock, "planning", "plan",
                {{"start", {start->x, start->y}},
                 {"goal", {goal->x, goal->y}},
                 {"cost", plan.cost.value()},
                 {"length", rec.shortest},
                 {"expansions", planner.expansions()}});

    planning::MppiParams params = cfg_.mppi;
    params.gait = gait;
    world_.robot.gait = gait;
    planning::ControlSeq nominal(static_cast<std::size_t>(params.horizon));
    const double t_limit = world_.clock + cfg_.nav_timeout;
    bool arrived = false;
    while (world_.clock < t_limit) {
        const Vec2 pos = world_.robot.pose.position();
        if (distance(pos, target) < cfg_.arrival_tolerance && world_.robot.velocity.speed() < cfg_.arrival_speed) {
            arrived = true;
            break;
        }
        if (nav_grid_ != grid) {
            std::vector<std::pair<Cell, bool>> changes;
            for (std::size_t i = 0; i < grid->size(); ++i) {
                if (grid->cells()[i] != nav_grid_->cells()[i]) {
                    changes.emplace_back(grid->cell_at(i), nav_grid_->cells()[i] != 0);
                }
            }
            grid = nav_grid_;
            plan = planner.update_and_replan(changes);
            log_.append(world_.clock, "planning", "replan",
                        {{"changed_cells", changes.size()}, {"reachable", plan.reachable}, {"cost", plan.cost.value()}});
            if (!plan.reachable) return finish(false, "path blocked");
        }
        const auto here = nearest_free(*grid, grid->to_cell(pos));
        if (here && !(*here == planner.start())) {
            plan = planner.move_start(*here);
            if (!plan.reachable) return finish(false, "path blocked");
        }
        Vec2 wp = target;
        double acc = 0.0;
        for (std::size_t i = 1; i < plan.path.size(); ++i) {
            acc += std::hypot(plan.path[i].x - plan.path[i - 1].x, plan.path[i].y - plan.path[i - 1].y) * grid->cell_size();
            if (acc >= cfg_.lookahead && i + 1 < plan.path.size()) {
                wp = grid->center(plan.path[i]);
                break;
            }
        }
        const auto cost = planning::waypoint_cost(grid.get(), wp, params);
        const auto res = planning::mppi_step(world_.robot.pose, nominal, cost, params,
                                             mix_seed(mix_seed(cfg_.seed, kNavStream), nav_counter_++));
        world_ = apply_actuation(std::move(world_), SetVelocity{res.command});
        advance(cfg_.tick);
        nominal = planning::shift_nominal(res.nominal);
    }
    if (!arrived) return finish(false, "timeout");
    if (heading) {
        world_ = apply_actuation(std::move(world_), SetVelocity{{}});
        while (world_.clock < t_limit) {
            const double err = wrap_angle(*heading - world_.robot.pose.theta);
            if (std::abs(err) < cfg_.heading_tolerance) break;
            world_ = apply_actuation(std::move(world_), SetVelocity{{0.0, 0.0, std::clamp(2.0 * err, -1.0, 1.0)}});
            advance(cfg_.tick);
        }
    }
    return finish(true, "");
}

}  // namespace fg::sim
