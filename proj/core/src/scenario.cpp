#include "factoryguard/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json_util.hpp"

namespace fg {

using nlohmann::json;
using namespace fg::detail;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

const std::set<std::string> kEventKinds = {"fire", "valve_stuck", "thermal_spike", "obstacle", "operator_decision"};

json parse_text(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.byte is the 1-based offset of the offending character.
        const std::size_t pos = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < pos; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) msg = "empty scenario document";
        throw ParseError(line, col, msg);
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// "HH:MM", "HH:MM:SS" or plain seconds since midnight.
double time_of_day(const json& j, const std::string& path) {
    if (j.is_number()) return as<double>(j, path);
    const auto s = as<std::string>(j, path);
    int h = 0, m = 0, sec = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(s);
    ss >> h >> c1 >> m;
    if (!ss || c1 != ':') throw SchemaError(path, "expected HH:MM[:SS], got '" + s + "'");
    if (ss >> c2) {
        if (c2 != ':' || !(ss >> sec)) throw SchemaError(path, "expected HH:MM[:SS], got '" + s + "'");
    }
    if (h < 0 || h > 24 || m < 0 || m > 59 || sec < 0 || sec > 59) throw SchemaError(path, "time out of range");
    return h * 3600.0 + m * 60.0 + sec;
}

Pose2 pose_of(const json& j, const std::string& path) {
    const Vec2 p = as_vec2(require(j, "position", path), join_path(path, "position"));
    return {p.x, p.y, get_or<double>(j, "heading_deg", path, 0.0) * kDeg};
}

void check_fields(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    for (const auto& [k, v] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
            throw SchemaError(join_path(path, k), "unknown field");
        }
    }
}

std::shared_ptr<const OccupancyGrid> build_grid(const json& g, const std::string& path) {
    check_fields(g, path, {"width", "height", "cell_size", "origin", "perimeter", "walls"});
    const double cell = get_or<double>(g, "cell_size", path, 0.1);
    if (!(cell > 0.0)) throw SchemaError(join_path(path, "cell_size"), "must be > 0");
    const double w = get<double>(g, "width", path);
    const double h = get<double>(g, "height", path);
    if (!(w > 0.0) || !(h > 0.0)) throw SchemaError(path, "extent must be positive");
    const Vec2 origin = optional_field(g, "origin", path) ? as_vec2(g["origin"], join_path(path, "origin")) : Vec2{};
    auto grid = std::make_shared<OccupancyGrid>(static_cast<int>(std::lround(w / cell)),
                                                static_cast<int>(std::lround(h / cell)), cell, origin);
    if (get_or<bool>(g, "perimeter", path, true)) {
        for (int x = 0; x < grid->width(); ++x) {
            grid->set_blocked({x, 0}, true);
            grid->set_blocked({x, grid->height() - 1}, true);
        }
        for (int y = 0; y < grid->height(); ++y) {
            grid->set_blocked({0, y}, true);
            grid->set_blocked({grid->width() - 1, y}, true);
        }
    }
    if (const json* walls = optional_field(g, "walls", path)) {
        const std::string wp = join_path(path, "walls");
        if (!walls->is_array()) throw SchemaError(wp, "expected an array");
        for (std::size_t i = 0; i < walls->size(); ++i) {
            const std::string ip = index_path(wp, i);
            const json& r = (*walls)[i];
            grid->fill_rect(as_vec2(require(r, "min", ip), ip + ".min"), as_vec2(require(r, "max", ip), ip + ".max"));
        }
    }
    return grid;
}

void parse_facility(const json& f, const std::string& root, FacilityWorld& w) {
    check_fields(f, root,
                 {"schema", "version", "grid", "equipment", "pipes", "valves", "zones", "power_zones", "inspection_points"});
    if (const json* s = optional_field(f, "schema", root); s && as<std::string>(*s, root + ".schema") != "factoryguard.facility") {
        throw SchemaError(root + ".schema", "expected 'factoryguard.facility'");
    }
    auto grid = std::const_pointer_cast<OccupancyGrid>(build_grid(require(f, "grid", root), join_path(root, "grid")));

    auto each = [&](std::string_view key, auto&& fn) {
        const json* arr = optional_field(f, key, root);
        if (!arr) return;
        const std::string p = join_path(root, key);
        if (!arr->is_array()) throw SchemaError(p, "expected an array");
        for (std::size_t i = 0; i < arr->size(); ++i) fn((*arr)[i], index_path(p, i));
    };

    each("equipment", [&](const json& e, const std::string& p) {
        check_fields(e, p, {"id", "kind", "position", "half_extent", "surface_temp", "blocking"});
        Equipment eq;
        eq.id = get<std::string>(e, "id", p);
        eq.kind = get<std::string>(e, "kind", p);
        eq.position = as_vec2(require(e, "position", p), p + ".position");
        if (optional_field(e, "half_extent", p)) eq.half_extent = as_vec2(e["half_extent"], p + ".half_extent");
        eq.surface_temp = get_opt<double>(e, "surface_temp", p);
        if (get_or<bool>(e, "blocking", p, true)) grid->fill_rect(eq.position - eq.half_extent, eq.position + eq.half_extent);
        w.equipment.push_back(std::move(eq));
    });
    each("pipes", [&](const json& e, const std::string& p) {
        check_fields(e, p, {"id", "polyline", "sample_step", "baseline_temp", "limit_temp", "height"});
        Pipe pipe;
        pipe.id = get<std::string>(e, "id", p);
        pipe.polyline = as_points(require(e, "polyline", p), p + ".polyline");
        if (pipe.polyline.size() < 2) throw SchemaError(p + ".polyline", "needs at least 2 vertices");
        pipe.sample_step = get_or<double>(e, "sample_step", p, 0.1);
        if (!(pipe.sample_step > 0.0)) throw SchemaError(p + ".sample_step", "must be > 0");
        pipe.baseline_temp = get_or<double>(e, "baseline_temp", p, 65.0);
        pipe.limit_temp = get_or<double>(e, "limit_temp", p, 110.0);
        pipe.height = get_or<double>(e, "height", p, 2.5);
        pipe.segment_temps.assign(pipe.expected_samples(), pipe.baseline_temp);
        w.pipes.push_back(std::move(pipe));
    });
    each("valves", [&](const json& e, const std::string& p) {
        check_fields(e, p, {"id", "pipe_id", "arclength", "open_fraction", "setpoint_fraction"});
        Valve v;
        v.id = get<std::string>(e, "id", p);
        v.pipe_id = get<std::string>(e, "pipe_id", p);
        if (!w.find_pipe(v.pipe_id)) throw SemanticError(v.pipe_id, "valve '" + v.id + "' references undefined pipe '" + v.pipe_id + "'");
        v.arclength_pos = get<double>(e, "arclength", p);
        v.setpoint_fraction = get_or<double>(e, "setpoint_fraction", p, 1.0);
        v.open_fraction = get_or<double>(e, "open_fraction", p, v.setpoint_fraction);
        w.valves.push_back(std::move(v));
    });
    each("zones", [&](const json& e, const std::string& p) {
        check_fields(e, p, {"id", "polygon", "restricted", "allowed_windows"});
        Zone z;
        z.id = get<std::string>(e, "id", p);
        z.polygon = as_points(require(e, "polygon", p), p + ".polygon");
        z.restricted = get_or<bool>(e, "restricted", p, false);
        if (const json* ws = optional_field(e, "allowed_windows", p)) {
            if (!ws->is_array()) throw SchemaError(p + ".allowed_windows", "expected an array");
            for (std::size_t i = 0; i < ws->size(); ++i) {
                const std::string wp = index_path(p + ".allowed_windows", i);
                const json& win = (*ws)[i];
                if (!win.is_array() || win.size() != 2) throw SchemaError(wp, "expected [start, end]");
                z.allowed_windows.push_back({time_of_day(win[0], wp + "[0]"), time_of_day(win[1], wp + "[1]")});
            }
        }
        w.zones.push_back(std::move(z));
    });
    each("power_zones", [&](const json& e, const std::string& p) { w.power_zones[as<std::string>(e, p)] = true; });
    each("inspection_points", [&](const json& e, const std::string& p) {
        check_fields(e, p, {"id", "position", "heading_deg", "pipe_id"});
        InspectionPoint ip;
        ip.id = get<std::string>(e, "id", p);
        ip.pose = pose_of(e, p);
        ip.pipe_id = get<std::string>(e, "pipe_id", p);
        if (!w.find_pipe(ip.pipe_id)) {
            throw SemanticError(ip.pipe_id, "inspection point '" + ip.id + "' references undefined pipe '" + ip.pipe_id + "'");
        }
        w.inspection_points.push_back(std::move(ip));
    });
    w.grid = std::move(grid);
}

void parse_noise(const json& n, const std::string& p, NoiseConfig& noise) {
    check_fields(n, p, {"detection_probability", "confidence_jitter", "depth_noise_std", "thermal_noise_std",
                        "embedding_noise_std", "person_confidence"});
    noise.detection_probability = get_or(n, "detection_probability", p, noise.detection_probability);
    noise.confidence_jitter = get_or(n, "confidence_jitter", p, noise.confidence_jitter);
    noise.depth_noise_std = get_or(n, "depth_noise_std", p, noise.depth_noise_std);
    noise.thermal_noise_std = get_or(n, "thermal_noise_std", p, noise.thermal_noise_std);
    noise.embedding_noise_std = get_or(n, "embedding_noise_std", p, noise.embedding_noise_std);
    noise.person_confidence = get_or(n, "person_confidence", p, noise.person_confidence);
}

void parse_sensors(const json& s, const std::string& p, SensorConfig& cfg) {
    check_fields(s, p, {"rgb_hfov_deg", "person_range", "fire_range", "min_confidence", "camera_height", "thermal_width",
                        "thermal_height", "thermal_hfov_deg", "thermal_range", "thermal_quantum", "ambient_temp"});
    cfg.rgb_hfov_deg = get_or(s, "rgb_hfov_deg", p, cfg.rgb_hfov_deg);
    cfg.person_range = get_or(s, "person_range", p, cfg.person_range);
    cfg.fire_range = get_or(s, "fire_range", p, cfg.fire_range);
    cfg.min_confidence = get_or(s, "min_confidence", p, cfg.min_confidence);
    cfg.camera_height = get_or(s, "camera_height", p, cfg.camera_height);
    cfg.thermal_width = get_or(s, "thermal_width", p, cfg.thermal_width);
    cfg.thermal_height = get_or(s, "thermal_height", p, cfg.thermal_height);
    cfg.thermal_hfov_deg = get_or(s, "thermal_hfov_deg", p, cfg.thermal_hfov_deg);
    cfg.thermal_range = get_or(s, "thermal_range", p, cfg.thermal_range);
    cfg.thermal_quantum = get_or(s, "thermal_quantum", p, cfg.thermal_quantum);
    cfg.ambient_temp = get_or(s, "ambient_temp", p, cfg.ambient_temp);
}

void parse_params(const json& s, const std::string& p, WorldParams& wp) {
    check_fields(s, p, {"thermal_tau_heat", "thermal_tau_recovery", "robot_lag", "pre_discharge_delay", "robot_substep"});
    wp.thermal_tau_heat = get_or(s, "thermal_tau_heat", p, wp.thermal_tau_heat);
    wp.thermal_tau_recovery = get_or(s, "thermal_tau_recovery", p, wp.thermal_tau_recovery);
    wp.robot_lag = get_or(s, "robot_lag", p, wp.robot_lag);
    wp.pre_discharge_delay = get_or(s, "pre_discharge_delay", p, wp.pre_discharge_delay);
    wp.robot_substep = get_or(s, "robot_substep", p, wp.robot_substep);
}

void check_event(const ScriptedEvent& ev, const FacilityWorld& w, const std::string& p) {
    const json& pl = ev.payload;
    const std::string pp = p + ".payload";
    if (ev.kind == "fire") {
        check_fields(pl, pp, {"id", "position", "equipment_id", "area_ratio", "smoke_ratio", "growth_rate", "decay_rate",
                              "max_area_ratio", "confidence", "smoke_confidence", "ref_distance", "height"});
        get<std::string>(pl, "id", pp);
        as_vec2(require(pl, "position", pp), pp + ".position");
        if (auto eq = get_opt<std::string>(pl, "equipment_id", pp); eq && !w.find_equipment(*eq)) {
            throw SemanticError(*eq, "fire event references undefined equipment '" + *eq + "'");
        }
    } else if (ev.kind == "valve_stuck") {
        check_fields(pl, pp, {"fault_id", "valve_id", "open_fraction", "peak_delta", "width", "settled"});
        const auto id = get<std::string>(pl, "valve_id", pp);
        if (!w.find_valve(id)) throw SemanticError(id, "valve_stuck event references undefined valve '" + id + "'");
        get<double>(pl, "peak_delta", pp);
    } else if (ev.kind == "thermal_spike") {
        check_fields(pl, pp, {"fault_id", "pipe_id", "arclength", "peak_delta", "width", "duration", "settled"});
        const auto id = get<std::string>(pl, "pipe_id", pp);
        if (!w.find_pipe(id)) throw SemanticError(id, "thermal_spike event references undefined pipe '" + id + "'");
        get<double>(pl, "arclength", pp);
        get<double>(pl, "peak_delta", pp);
    } else if (ev.kind == "obstacle") {
        check_fields(pl, pp, {"min", "max", "blocked"});
        as_vec2(require(pl, "min", pp), pp + ".min");
        as_vec2(require(pl, "max", pp), pp + ".max");
    } else if (ev.kind == "operator_decision") {
        check_fields(pl, pp, {"decision"});
        const auto d = get<std::string>(pl, "decision", pp);
        if (d != "stand_down" && d != "dispatch") throw SchemaError(pp + ".decision", "expected stand_down or dispatch");
    }
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
    const json doc = parse_text(text);
    const std::string root;
    check_fields(doc, "<root>",
                 {"schema", "version", "id", "description", "facility", "time_of_day", "duration", "robot", "noise", "sensors",
                  "params", "latency_overrides", "personnel", "persons", "patrol", "events"});
    if (get<std::string>(doc, "schema", root) != "factoryguard.scenario") {
        throw SchemaError("schema", "expected 'factoryguard.scenario'");
    }
    if (get<int>(doc, "version", root) != 1) throw SchemaError("version", "unsupported version");

    Scenario sc;
    sc.id = get<std::string>(doc, "id", root);
    sc.description = get_or<std::string>(doc, "description", root, "");
    sc.duration = get_or<double>(doc, "duration", root, sc.duration);
    if (!(sc.duration > 0.0)) throw SchemaError("duration", "must be > 0");

    FacilityWorld& w = sc.world;
    const json& fac = require(doc, "facility", root);
    if (fac.is_string()) {
        const std::filesystem::path fp = base_dir / as<std::string>(fac, "facility");
        std::string ftext;
        try {
            ftext = read_file(fp);
        } catch (const InputError&) {
            throw SchemaError("facility", "cannot read facility file '" + fp.string() + "'");
        }
        json fdoc;
        try {
            fdoc = parse_text(ftext);
        } catch (const ParseError& e) {
            throw ParseError(e.line(), e.column(), std::string("in facility file '") + fp.string() + "': " + e.what());
        }
        parse_facility(fdoc, "facility", w);
    } else {
        parse_facility(fac, "facility", w);
    }

    if (const json* t = optional_field(doc, "time_of_day", root)) w.time_of_day_origin = time_of_day(*t, "time_of_day");
    if (const json* n = optional_field(doc, "noise", root)) parse_noise(*n, "noise", sc.noise);
    if (const json* s = optional_field(doc, "sensors", root)) parse_sensors(*s, "sensors", w.sensors);
    if (const json* s = optional_field(doc, "params", root)) parse_params(*s, "params", w.params);

    const json& robot = require(doc, "robot", root);
    check_fields(robot, "robot", {"position", "heading_deg", "gait"});
    w.robot.pose = pose_of(robot, "robot");
    w.robot.gait = parse_gait(get_or<std::string>(robot, "gait", "robot", "auto"));
    if (w.grid->blocked(w.grid->to_cell(w.robot.pose.position()))) {
        throw SchemaError("robot.position", "robot starts inside an obstacle or outside the grid");
    }

    if (const json* lo = optional_field(doc, "latency_overrides", root)) {
        if (!lo->is_object()) throw SchemaError("latency_overrides", "expected an object");
        for (const auto& [k, v] : lo->items()) {
            const double s = as<double>(v, "latency_overrides." + k);
            if (!(s >= 0.0)) throw SchemaError("latency_overrides." + k, "latency must be >= 0");
            sc.latency_overrides[k] = s;
        }
    }

    if (const json* ps = optional_field(doc, "personnel", root)) {
        if (!ps->is_array()) throw SchemaError("personnel", "expected an array");
        for (std::size_t i = 0; i < ps->size(); ++i) {
            const std::string p = index_path("personnel", i);
            const json& e = (*ps)[i];
            check_fields(e, p, {"id", "embedding_seed", "authorized"});
            const auto id = get<std::string>(e, "id", p);
            if (sc.personnel.find(id)) throw SchemaError(p + ".id", "duplicate personnel id '" + id + "'");
            sc.personnel.insert(id, random_unit_embedding(get<std::uint64_t>(e, "embedding_seed", p)),
                                get_or<bool>(e, "authorized", p, true));
        }
    }

    if (const json* ps = optional_field(doc, "persons", root)) {
        if (!ps->is_array()) throw SchemaError("persons", "expected an array");
        for (std::size_t i = 0; i < ps->size(); ++i) {
            const std::string p = index_path("persons", i);
            const json& e = (*ps)[i];
            check_fields(e, p, {"id", "embedding_seed", "personnel_id", "authorized", "height", "trajectory"});
            Person person;
            person.id = get<std::string>(e, "id", p);
            person.height = get_or<double>(e, "height", p, 1.7);
            if (auto pid = get_opt<std::string>(e, "personnel_id", p)) {
                const auto* rec = sc.personnel.find(*pid);
                if (!rec) throw SemanticError(*pid, "person '" + person.id + "' references undefined personnel id '" + *pid + "'");
                person.true_embedding = rec->embedding;
                person.authorized = rec->authorized;
            } else {
                person.true_embedding = random_unit_embedding(get<std::uint64_t>(e, "embedding_seed", p));
                person.authorized = get_or<bool>(e, "authorized", p, false);
            }
            const json& traj = require_array(e, "trajectory", p);
            for (std::size_t k = 0; k < traj.size(); ++k) {
                const std::string tp = index_path(p + ".trajectory", k);
                TrajectoryPoint pt{get<double>(traj[k], "t", tp), as_vec2(require(traj[k], "position", tp), tp + ".position")};
                if (!person.trajectory.empty() && pt.t < person.trajectory.back().t) {
                    throw SchemaError(tp + ".t", "trajectory times must be non-decreasing");
                }
                person.trajectory.push_back(pt);
            }
            if (person.trajectory.empty()) throw SchemaError(p + ".trajectory", "needs at least one point");
            w.persons.push_back(std::move(person));
        }
    }

    if (const json* pa = optional_field(doc, "patrol", root)) {
        if (!pa->is_array()) throw SchemaError("patrol", "expected an array");
        for (std::size_t i = 0; i < pa->size(); ++i) {
            const std::string p = index_path("patrol", i);
            const json& e = (*pa)[i];
            if (e.is_string()) {
                const auto id = e.get<std::string>();
                auto it = std::find_if(w.inspection_points.begin(), w.inspection_points.end(),
                                       [&](const InspectionPoint& ip) { return ip.id == id; });
                if (it == w.inspection_points.end()) throw SemanticError(id, "patrol references undefined inspection point '" + id + "'");
                sc.patrol.push_back({id, it->pose});
            } else {
                check_fields(e, p, {"position", "heading_deg"});
                sc.patrol.push_back({"", pose_of(e, p)});
            }
        }
    }

    if (const json* evs = optional_field(doc, "events", root)) {
        if (!evs->is_array()) throw SchemaError("events", "expected an array");
        for (std::size_t i = 0; i < evs->size(); ++i) {
            const std::string p = index_path("events", i);
            const json& e = (*evs)[i];
            check_fields(e, p, {"t", "kind", "payload"});
            ScriptedEvent ev{get<double>(e, "t", p), get<std::string>(e, "kind", p), require(e, "payload", p)};
            if (!(ev.t >= 0.0)) throw SchemaError(p + ".t", "event time must be >= 0");
            if (!kEventKinds.contains(ev.kind)) throw SchemaError(p + ".kind", "unknown event kind '" + ev.kind + "'");
            check_event(ev, w, p);
            sc.script.events.push_back(std::move(ev));
        }
        std::stable_sort(sc.script.events.begin(), sc.script.events.end(),
                         [](const ScriptedEvent& a, const ScriptedEvent& b) { return a.t < b.t; });
    }

    try {
        validate(w);
    } catch (const InputError& e) {
        throw SchemaError("facility", e.what());
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    Scenario sc = parse_scenario(read_file(path), path.parent_path());
    sc.source = path;
    return sc;
}

std::vector<Cell> obstacle_cells(const OccupancyGrid& grid, const ScriptedEvent& event) {
    if (event.kind != "obstacle") return {};
    const Vec2 lo = as_vec2(event.payload.at("min"), "min");
    const Vec2 hi = as_vec2(event.payload.at("max"), "max");
    OccupancyGrid probe(grid.width(), grid.height(), grid.cell_size(), grid.origin());
    probe.fill_rect(lo, hi);
    std::vector<Cell> out;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        if (probe.cells()[i]) out.push_back(probe.cell_at(i));
    }
    return out;
}

FacilityWorld apply_event(FacilityWorld w, const ScriptedEvent& ev) {
    const json& pl = ev.payload;
    const std::string p = "payload";
    if (ev.kind == "fire") {
        FireSource f;
        f.id = get<std::string>(pl, "id", p);
        if (w.find_fire(f.id)) throw InputError("fire '" + f.id + "' already burning");
        f.position = as_vec2(require(pl, "position", p), "position");
        f.equipment_id = get_or<std::string>(pl, "equipment_id", p, "");
        f.area_ratio = get_or(pl, "area_ratio", p, 0.03);
        f.smoke_ratio = get_or(pl, "smoke_ratio", p, 0.05);
        f.growth_rate = get_or(pl, "growth_rate", p, f.growth_rate);
        f.decay_rate = get_or(pl, "decay_rate", p, f.decay_rate);
        f.max_area_ratio = get_or(pl, "max_area_ratio", p, f.max_area_ratio);
        f.confidence = get_or(pl, "confidence", p, f.confidence);
        f.smoke_confidence = get_or(pl, "smoke_confidence", p, f.smoke_confidence);
        f.ref_distance = get_or(pl, "ref_distance", p, f.ref_distance);
        f.height = get_or(pl, "height", p, f.height);
        w.fires.push_back(std::move(f));
    } else if (ev.kind == "valve_stuck") {
        const auto vid = get<std::string>(pl, "valve_id", p);
        Valve* v = w.find_valve(vid);
        if (!v) throw CommandRejected(vid);
        v->stuck = true;
        v->open_fraction = get_or(pl, "open_fraction", p, v->open_fraction);
        ThermalFault f;
        f.id = get_or<std::string>(pl, "fault_id", p, "fault-" + vid);
        f.pipe_id = v->pipe_id;
        f.valve_id = vid;
        f.arclength = v->arclength_pos;
        f.peak_delta = get<double>(pl, "peak_delta", p);
        f.width = get_or(pl, "width", p, f.width);
        w.faults.push_back(f);
        if (get_or<bool>(pl, "settled", p, false)) {
            Pipe* pipe = w.find_pipe(f.pipe_id);
            pipe->segment_temps = thermal_target(w, *pipe);
        }
    } else if (ev.kind == "thermal_spike") {
        ThermalFault f;
        f.pipe_id = get<std::string>(pl, "pipe_id", p);
        if (!w.find_pipe(f.pipe_id)) throw CommandRejected(f.pipe_id);
        f.id = get_or<std::string>(pl, "fault_id", p, "spike-" + f.pipe_id);
        f.arclength = get<double>(pl, "arclength", p);
        f.peak_delta = get<double>(pl, "peak_delta", p);
        f.width = get_or(pl, "width", p, f.width);
        if (auto d = get_opt<double>(pl, "duration", p)) f.ends_at = w.clock + *d;
        w.faults.push_back(f);
        if (get_or<bool>(pl, "settled", p, false)) {
            Pipe* pipe = w.find_pipe(f.pipe_id);
            pipe->segment_temps = thermal_target(w, *pipe);
        }
    } else if (ev.kind == "obstacle") {
        auto grid = std::make_shared<OccupancyGrid>(*w.grid);
        const bool blocked = get_or<bool>(pl, "blocked", p, true);
        for (const Cell c : obstacle_cells(*grid, ev)) grid->set_blocked(c, blocked);
        w.grid = std::move(grid);
    }
    return w;
}

}  // namespace fg
