#include "factoryguard/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <istream>
#include <sstream>

#include "factoryguard/backend.hpp"
#include "factoryguard/registry.hpp"
#include "json_util.hpp"

namespace fg::harness {

using nlohmann::json;
using orchestra::AlertMessage;
using orchestra::EpisodeTrace;
using orchestra::Outcome;
using orchestra::Priority;
using orchestra::ReasoningStep;
using orchestra::ToolCategory;

namespace {

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError("cannot read '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("cannot write '" + p.string() + "'");
    out << text;
}

// Shortest round-trip formatting, same as the event log.
std::string num(double v) { return json(v == 0.0 ? 0.0 : v).dump(); }

const char* cue_tool(const std::string& hazard) {
    if (hazard == "fire") return "fire_smoke";
    if (hazard == "thermal") return "thermal_scan";
    if (hazard == "intruder") return "person_detect";
    return "";
}

const char* resolution_note(const std::string& hazard) {
    if (hazard == "fire") return "fire_cleared";
    if (hazard == "thermal") return "thermal_resolved";
    return "operator_decision";
}

bool alert_graded_correctly(const AlertMessage& a) {
    if (a.hazard == "fire") {
        const bool developed = a.payload.is_object() && a.payload.value("stage", "") == "fully_developed";
        return (a.priority == Priority::P1) == developed;
    }
    if (a.hazard == "thermal") {
        const json tc = a.payload.is_object() ? a.payload.value("t_critical", json()) : json();
        const bool imminent = tc.is_number() && tc.get<double>() < orchestra::kImminentCritical;
        return (a.priority == Priority::P1) == imminent;
    }
    return a.priority != Priority::P1;
}

json alert_json(const AlertMessage& a) {
    return {{"priority", std::string(orchestra::to_string(a.priority))},
            {"hazard", a.hazard},
            {"location", {a.location.x, a.location.y}},
            {"payload", a.payload},
            {"sim_time", a.sim_time}};
}

std::optional<double> rel(std::optional<double> t, double t0) {
    if (!t) return std::nullopt;
    return *t - t0;
}

json opt_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

}  // namespace

// --- config -----------------------------------------------------------------

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw SchemaError("<root>", "run config must be an object");
    static const std::vector<std::string> keys = {"backend", "endpoint", "budget", "latencies",
                                                  "noise", "params", "memory", "episode_margin"};
    for (const auto& [k, _] : j.items()) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw SchemaError(k, "unknown run config key");
    }
    RunConfig c;
    c.backend = detail::get_or<std::string>(j, "backend", "", c.backend);
    c.endpoint = detail::get_or<std::string>(j, "endpoint", "", c.endpoint);
    c.budget = detail::get_or<int>(j, "budget", "", c.budget);
    if (c.budget < 1) throw SchemaError("budget", "must be >= 1");
    if (j.contains("latencies")) {
        if (!j["latencies"].is_object()) throw SchemaError("latencies", "expected an object");
        for (const auto& [k, v] : j["latencies"].items()) {
            if (!v.is_number() || v.get<double>() < 0.0) throw SchemaError("latencies." + k, "expected a number >= 0");
            c.latencies[k] = v.get<double>();
        }
    }
    for (const char* k : {"noise", "params"}) {
        if (j.contains(k) && !j[k].is_object()) throw SchemaError(k, "expected an object");
    }
    if (j.contains("noise")) c.noise = j["noise"];
    if (j.contains("params")) c.params = j["params"];
    if (auto m = detail::get_opt<std::string>(j, "memory", "")) c.memory = *m;
    c.episode_margin = detail::get_or<double>(j, "episode_margin", "", c.episode_margin);
    if (c.episode_margin < 0.0) throw SchemaError("episode_margin", "must be >= 0");
    return c;
}

json RunConfig::to_json() const {
    json j = {{"backend", backend}, {"budget", budget}, {"latencies", latencies},
              {"noise", noise}, {"params", params}, {"episode_margin", episode_margin}};
    if (!endpoint.empty()) j["endpoint"] = endpoint;
    if (memory) j["memory"] = memory->string();
    return j;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ParseError(0, 0, "run config '" + path.string() + "': " + e.what());
    }
    return RunConfig::from_json(j);
}

Scenario load_scenario(const std::filesystem::path& path, const RunConfig& cfg) {
    if (cfg.noise.empty() && cfg.params.empty()) {
        Scenario sc = ::fg::load_scenario(path);
        for (const auto& [k, v] : cfg.latencies) sc.latency_overrides[k] = v;
        return sc;
    }
    const std::string text = read_text(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error&) {
        return ::fg::load_scenario(path);  // reports the located parse error
    }
    if (!doc.is_object()) throw SchemaError("<root>", "expected an object");
    for (const char* k : {"noise", "params"}) {
        const json& patch = k == std::string("noise") ? cfg.noise : cfg.params;
        if (patch.empty()) continue;
        if (!doc.contains(k)) doc[k] = json::object();
        doc[k].merge_patch(patch);
    }
    Scenario sc = parse_scenario(doc.dump(), path.parent_path());
    sc.source = path;
    for (const auto& [k, v] : cfg.latencies) sc.latency_overrides[k] = v;
    return sc;
}

// --- ground truth -----------------------------------------------------------

GroundTruth ground_truth(const Scenario& sc) {
    GroundTruth g;
    auto consider = [&](std::string hazard, double t) {
        if (!g.injected_at || t < *g.injected_at) {
            g.hazard = std::move(hazard);
            g.injected_at = t;
        }
    };
    for (const auto& ev : sc.script.events) {
        if (ev.kind == "fire") consider("fire", ev.t);
        if (ev.kind == "valve_stuck" || ev.kind == "thermal_spike") consider("thermal", ev.t);
    }
    const auto map = memory::FacilityMapStore::from_world(sc.world);
    for (const auto& p : sc.world.persons) {
        if (p.authorized) continue;
        for (const auto& pt : p.trajectory) {
            const double t = std::max(0.0, pt.t);
            const double tod = std::fmod(sc.world.time_of_day_origin + t, 86400.0);
            const auto z = memory::zone_status(map, pt.p, tod);
            if (orchestra::intruder_alert(z.restricted, z.within_allowed, false)) {
                consider("intruder", t);
                break;
            }
        }
    }
    return g;
}

std::optional<std::size_t> detection_step(const EpisodeTrace& trace, const GroundTruth& truth) {
    if (!truth.injected_at) return std::nullopt;
    const std::string tool = cue_tool(truth.hazard);
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const ReasoningStep& s = trace.steps[i];
        if (s.action.tool != tool || !s.observation.ok) continue;
        if (s.end_time() + 1e-9 < *truth.injected_at) continue;
        if (s.observation.data.value("hazard_cue", false)) return i;
    }
    return std::nullopt;
}

// --- phases -----------------------------------------------------------------

json PhaseBreakdown::to_json() const {
    return {{"detection", detection},       {"reasoning", reasoning},       {"alert_transmission", alert_transmission},
            {"navigation", navigation},     {"intervention", intervention}, {"total", total}};
}

std::optional<PhaseBreakdown> phase_breakdown(const EpisodeTrace& trace, const GroundTruth& truth) {
    const auto det = detection_step(trace, truth);
    const auto* done = trace.find_note("response_complete");
    if (!det || !done) return std::nullopt;
    PhaseBreakdown p;
    p.detection = trace.steps[*det].end_time() - *truth.injected_at;
    for (std::size_t i = *det + 1; i < trace.steps.size(); ++i) {
        const ReasoningStep& s = trace.steps[i];
        if (s.sim_time + 1e-9 >= done->t) break;
        if (!s.category) continue;
        switch (*s.category) {
        case ToolCategory::Perception: p.detection += s.latency; break;
        case ToolCategory::Reasoning:
        case ToolCategory::Knowledge: p.reasoning += s.latency; break;
        case ToolCategory::Actuation:
            if (s.action.tool == "alert_center") {
                p.alert_transmission += s.latency;
            } else if (s.action.tool == "locomotion") {
                p.navigation += s.latency;
            } else {
                p.intervention += s.latency;
            }
            break;
        }
    }
    p.total = p.detection + p.reasoning + p.alert_transmission + p.navigation + p.intervention;
    return p;
}

// --- judge ------------------------------------------------------------------

Outcome judge(const GroundTruth& truth, const EpisodeTrace& trace, const sim::SessionRecord& record, bool completed,
              bool hazard_detected) {
    const bool actuation_error = !record.wrong_actuations.empty() || !record.rejected_actuations.empty();
    if (truth.hazard == "none") return trace.alerts.empty() && !actuation_error ? Outcome::Success : Outcome::Failure;
    if (actuation_error) return Outcome::Failure;

    std::vector<const AlertMessage*> relevant;
    for (const auto& a : trace.alerts) {
        if (a.hazard == truth.hazard) relevant.push_back(&a);
    }
    const auto det = detection_step(trace, truth);
    if (!det || (!hazard_detected && relevant.empty())) return Outcome::Failure;
    if (!completed) return Outcome::Partial;

    const bool resolved = trace.find_note(resolution_note(truth.hazard)) != nullptr;
    const bool graded = !relevant.empty() &&
                        std::all_of(relevant.begin(), relevant.end(), [](const auto* a) { return alert_graded_correctly(*a); });
    const bool timely = !relevant.empty() && relevant.front()->sim_time - trace.steps[*det].end_time() <= kAlertBudget + 1e-9;
    bool paths_ok = true;
    for (const auto& n : record.navigation) {
        if (n.purpose == "patrol" || n.shortest < kMinJudgedPath) continue;
        if (!n.arrived || n.traveled > kPathRatioLimit * n.shortest) paths_ok = false;
    }
    return resolved && graded && timely && paths_ok ? Outcome::Success : Outcome::Partial;
}

// --- milestones and timeline -------------------------------------------------

json milestones(const GroundTruth& truth, const EpisodeTrace& trace, const sim::SessionRecord& record) {
    json m = json::object();
    if (!truth.injected_at) return m;
    const double t0 = *truth.injected_at;
    m["injected_at"] = t0;
    const auto det = detection_step(trace, truth);
    m["detect"] = det ? json(trace.steps[*det].end_time() - t0) : json(nullptr);
    std::optional<double> alert;
    for (const auto& a : trace.alerts) {
        if (a.hazard == truth.hazard) {
            alert = a.sim_time;
            break;
        }
    }
    m["alert"] = opt_json(rel(alert, t0));
    auto note_t = [&](std::string_view kind) -> std::optional<double> {
        const auto* n = trace.find_note(kind);
        return n ? std::optional<double>(n->t) : std::nullopt;
    };
    if (truth.hazard == "fire") {
        m["suppression_armed"] = opt_json(rel(record.suppression_armed, t0));
        m["suppress"] = opt_json(rel(record.discharge, t0));
        m["cleared"] = opt_json(rel(note_t("fire_cleared"), t0));
    } else if (truth.hazard == "thermal") {
        m["delta_at_detection"] = det ? trace.steps[*det].observation.data.at("max_delta") : json(nullptr);
        const auto* rc = trace.find_note("root_cause");
        m["root_cause"] = rc ? rc->detail.value("id", json()) : json(nullptr);
        m["valve_reset"] = opt_json(rel(record.valve_reset, t0));
        m["pipe_recovered"] = opt_json(rel(record.pipe_recovered, t0));
        m["recovery_after_reset"] = record.valve_reset && record.pipe_recovered
                                        ? json(*record.pipe_recovered - *record.valve_reset)
                                        : json(nullptr);
        m["resolved"] = opt_json(rel(note_t("thermal_resolved"), t0));
        m["incident"] = m["resolved"];
        m["trend_negative"] = trace.find_note("trend_negative") != nullptr;
        m["escalated"] = trace.find_note("escalated") != nullptr;
    } else if (truth.hazard == "intruder") {
        std::optional<double> challenge;
        for (const auto& s : trace.steps) {
            if (s.action.tool == "verbal_warning" && s.observation.ok) {
                challenge = s.end_time();
                break;
            }
        }
        m["challenge"] = opt_json(rel(challenge, t0));
        const auto* d = trace.find_note("operator_decision");
        m["operator_decision"] = opt_json(rel(note_t("operator_decision"), t0));
        m["decision"] = d ? d->detail.value("decision", json()) : json(nullptr);
    }
    return m;
}

TimelineSeries timeline_series(const GroundTruth& truth, const EpisodeTrace& trace) {
    TimelineSeries s;
    if (truth.hazard == "fire") {
        s.x_name = "t";
        s.y_name = "fire_confidence";
        const auto det = detection_step(trace, truth);
        if (!det) return s;
        for (std::size_t i = *det; i < trace.steps.size(); ++i) {
            const auto& st = trace.steps[i];
            if (st.action.tool != "fire_smoke" || !st.observation.ok) continue;
            s.points.emplace_back(st.observation.data.value("captured_at", st.sim_time),
                                  st.observation.data.value("fire_confidence", 0.0));
        }
    } else if (truth.hazard == "thermal") {
        s.x_name = "arclength";
        s.y_name = "temperature";
        for (const auto& st : trace.steps) {
            if (st.action.tool != "thermal_mapping" || !st.observation.ok) continue;
            const auto& xs = st.observation.data.at("positions");
            const auto& ys = st.observation.data.at("temps");
            for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) s.points.emplace_back(xs[i].get<double>(), ys[i].get<double>());
            break;
        }
    }
    return s;
}

std::string timeline_csv(const TimelineSeries& s) {
    std::string out = s.x_name + "," + s.y_name + "\n";
    for (const auto& [x, y] : s.points) out += num(x) + "," + num(y) + "\n";
    return out;
}

void emit_timeline(const RunReport& report, const std::filesystem::path& path) {
    write_text(path, timeline_csv(report.timeline));
}

// --- report -----------------------------------------------------------------

json RunReport::to_json() const {
    json alerts_j = json::array();
    for (const auto& a : alerts) alerts_j.push_back(alert_json(a));
    json j = {{"scenario", scenario_id},
              {"seed", seed},
              {"backend", backend},
              {"outcome", std::string(orchestra::to_string(outcome))},
              {"hazard", truth.hazard},
              {"injected_at", opt_json(truth.injected_at)},
              {"completed", completed},
              {"end_time", end_time},
              {"steps", steps},
              {"phases", phases ? phases->to_json() : json(nullptr)},
              {"alerts", alerts_j},
              {"milestones", milestones}};
    if (artifacts) {
        j["artifacts"] = {{"events", artifacts->events.filename().string()},
                          {"metrics", artifacts->metrics.filename().string()},
                          {"report", artifacts->report.filename().string()},
                          {"timeline", artifacts->timeline.filename().string()}};
    }
    return j;
}

std::string metrics_csv(const RunReport& r) {
    std::string out = "metric,value\n";
    auto row = [&](const std::string& k, const std::string& v) { out += k + "," + v + "\n"; };
    row("outcome", std::string(orchestra::to_string(r.outcome)));
    row("hazard", r.truth.hazard);
    row("completed", r.completed ? "true" : "false");
    row("steps", std::to_string(r.steps));
    row("end_time", num(r.end_time));
    row("alerts", std::to_string(r.alerts.size()));
    if (r.phases) {
        const json ph = r.phases->to_json();
        for (const auto& [k, v] : ph.items()) row("phase_" + k, num(v.get<double>()));
    }
    for (const auto& [k, v] : r.milestones.items()) {
        if (v.is_number()) row("milestone_" + k, num(v.get<double>()));
        else if (v.is_string()) row("milestone_" + k, v.get<std::string>());
        else if (v.is_boolean()) row("milestone_" + k, v.get<bool>() ? "true" : "false");
    }
    return out;
}

// --- run --------------------------------------------------------------------

memory::MemoryStores capture_stores(const Scenario& sc) {
    memory::MemoryStores s;
    s.map = memory::FacilityMapStore::from_world(sc.world);
    s.baselines = memory::capture_baselines(sc.world);
    s.personnel = sc.personnel;
    return s;
}

RunResult execute(const Scenario& sc, std::uint64_t seed, const RunConfig& cfg) {
    orchestra::ToolRegistry registry = orchestra::build_registry();
    for (const auto& [k, v] : sc.latency_overrides) registry.set_latency(k, v);
    for (const auto& [k, v] : cfg.latencies) registry.set_latency(k, v);

    RunResult res;
    memory::MemoryStores stores = cfg.memory ? memory::load(*cfg.memory) : capture_stores(sc);
    sim::SessionConfig scfg;
    scfg.seed = seed;
    scfg.episode_margin = cfg.episode_margin;
    sim::SimSession session(sc, std::move(stores), res.log, scfg);

    const auto pcfg = orchestra::policy_config(sc, session.stores().map);
    auto policy = orchestra::make_policy(cfg.backend, pcfg, cfg.endpoint);
    const GroundTruth truth = ground_truth(sc);

    bool completed = false;
    res.trace = orchestra::react_loop(session, *policy, registry, cfg.budget,
                                      [&](const EpisodeTrace& t, bool done) {
                                          completed = done;
                                          return judge(truth, t, session.record(), done, policy->hazard_detected());
                                      });

    for (const auto& n : res.trace.notes) res.log.append(n.t, "orchestra", "note_" + n.kind, n.detail);
    RunReport& r = res.report;
    r.scenario_id = sc.id;
    r.seed = seed;
    r.backend = policy->name();
    r.outcome = *res.trace.outcome();
    r.truth = truth;
    r.completed = completed;
    r.end_time = session.now();
    r.steps = res.trace.steps.size();
    r.phases = phase_breakdown(res.trace, truth);
    r.alerts = res.trace.alerts;
    r.milestones = milestones(truth, res.trace, session.record());
    r.timeline = timeline_series(truth, res.trace);
    res.record = session.record();
    res.log.append(r.end_time, "harness", "outcome",
                   {{"outcome", std::string(orchestra::to_string(r.outcome))}, {"completed", completed},
                    {"steps", r.steps}, {"alerts", r.alerts.size()}});
    return res;
}

RunReport run(const std::filesystem::path& scenario, std::uint64_t seed, const RunConfig& cfg,
              const std::optional<std::filesystem::path>& out_dir) {
    const Scenario sc = load_scenario(scenario, cfg);
    RunResult res = execute(sc, seed, cfg);
    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        Artifacts a{*out_dir / "events.jsonl", *out_dir / "metrics.csv", *out_dir / "report.json", *out_dir / "timeline.csv"};
        res.report.artifacts = a;
        res.log.write(a.events);
        write_text(a.metrics, metrics_csv(res.report));
        write_text(a.report, res.report.to_json().dump(2) + "\n");
        emit_timeline(res.report, a.timeline);
    }
    return res.report;
}

// --- batch ------------------------------------------------------------------

double BatchRow::success_pct() const { return runs ? 100.0 * success / runs : 0.0; }
double BatchRow::partial_pct() const { return runs ? 100.0 * partial / runs : 0.0; }
double BatchRow::failure_pct() const { return runs ? 100.0 * failure / runs : 0.0; }

namespace {

void add_to_row(BatchRow& row, const RunReport& r) {
    ++row.runs;
    switch (r.outcome) {
    case Outcome::Success: ++row.success; break;
    case Outcome::Partial: ++row.partial; break;
    case Outcome::Failure: ++row.failure; break;
    }
    if (!r.phases) return;
    if (!row.mean_phases) row.mean_phases = PhaseBreakdown{};
    PhaseBreakdown& m = *row.mean_phases;
    const double n = ++row.phase_runs;
    // Incremental mean.
    auto upd = [n](double& mean, double x) { mean += (x - mean) / n; };
    upd(m.detection, r.phases->detection);
    upd(m.reasoning, r.phases->reasoning);
    upd(m.alert_transmission, r.phases->alert_transmission);
    upd(m.navigation, r.phases->navigation);
    upd(m.intervention, r.phases->intervention);
    m.total = m.detection + m.reasoning + m.alert_transmission + m.navigation + m.intervention;
}

json row_json(const BatchRow& r) {
    return {{"scenario", r.scenario},
            {"runs", r.runs},
            {"success_pct", r.success_pct()},
            {"partial_pct", r.partial_pct()},
            {"failure_pct", r.failure_pct()},
            {"mean_phases", r.mean_phases ? r.mean_phases->to_json() : json(nullptr)}};
}

}  // namespace

BatchTable aggregate(const std::vector<RunReport>& reports) {
    BatchTable t;
    t.overall.scenario = "overall";
    for (const auto& r : reports) {
        auto it = std::find_if(t.rows.begin(), t.rows.end(), [&](const BatchRow& row) { return row.scenario == r.scenario_id; });
        if (it == t.rows.end()) {
            t.rows.push_back({});
            it = std::prev(t.rows.end());
            it->scenario = r.scenario_id;
        }
        add_to_row(*it, r);
        add_to_row(t.overall, r);
    }
    return t;
}

std::string BatchTable::to_csv() const {
    std::string out = "scenario,runs,success_pct,partial_pct,failure_pct,detection,reasoning,alert_transmission,navigation,intervention,total\n";
    auto line = [&](const BatchRow& r) {
        out += r.scenario + "," + std::to_string(r.runs) + "," + num(r.success_pct()) + "," + num(r.partial_pct()) + "," +
               num(r.failure_pct());
        if (r.mean_phases) {
            const auto& p = *r.mean_phases;
            for (double v : {p.detection, p.reasoning, p.alert_transmission, p.navigation, p.intervention, p.total}) out += "," + num(v);
        } else {
            out += ",,,,,,";
        }
        out += "\n";
    };
    for (const auto& r : rows) line(r);
    line(overall);
    return out;
}

json BatchTable::to_json() const {
    json rows_j = json::array();
    for (const auto& r : rows) rows_j.push_back(row_json(r));
    return {{"rows", rows_j}, {"overall", row_json(overall)}};
}

std::vector<std::filesystem::path> scenario_files(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw InputError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".scn") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

BatchTable batch(const std::vector<std::filesystem::path>& scenarios, int seeds, const RunConfig& cfg,
                 const std::optional<std::filesystem::path>& out_dir, int jobs) {
    if (seeds < 1) throw DomainError("batch needs at least one seed");
    jobs = std::max(1, jobs);
    std::vector<Scenario> loaded;
    for (const auto& p : scenarios) loaded.push_back(load_scenario(p, cfg));

    struct Job {
        std::size_t scenario;
        std::uint64_t seed;
    };
    std::vector<Job> work;
    for (std::size_t s = 0; s < loaded.size(); ++s) {
        for (int k = 0; k < seeds; ++k) work.push_back({s, static_cast<std::uint64_t>(k)});
    }
    std::vector<RunReport> reports(work.size());
    auto one = [&](std::size_t i) {
        const Job& j = work[i];
        RunResult res = execute(loaded[j.scenario], j.seed, cfg);
        if (out_dir) {
            const auto dir = *out_dir / loaded[j.scenario].id / ("seed_" + std::to_string(j.seed));
            std::filesystem::create_directories(dir);
            res.log.write(dir / "events.jsonl");
            write_text(dir / "report.json", res.report.to_json().dump(2) + "\n");
        }
        reports[i] = std::move(res.report);
    };
    for (std::size_t start = 0; start < work.size(); start += static_cast<std::size_t>(jobs)) {
        std::vector<std::future<void>> fs;
        const std::size_t end = std::min(work.size(), start + static_cast<std::size_t>(jobs));
        for (std::size_t i = start; i < end; ++i) fs.push_back(std::async(std::launch::async, one, i));
        for (auto& f : fs) f.get();
    }
    BatchTable table = aggregate(reports);
    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        write_text(*out_dir / "batch.csv", table.to_csv());
        write_text(*out_dir / "batch.json", table.to_json().dump(2) + "\n");
    }
    return table;
}

// --- reward replay ----------------------------------------------------------

std::string replay_rewards(std::istream& in, const locomotion::RewardWeights& w) {
    w.validate();
    std::string out = "step,r_track,r_reg,r_style,r_total,discounted\n";
    std::string line;
    std::size_t line_no = 0;
    std::size_t step = 0;
    double discounted = 0.0;
    double discount = 1.0;
    const std::vector<double> zeros(locomotion::kNumJoints, 0.0);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(line_no, 0, e.what());
        }
        try {
            const std::string p = "line " + std::to_string(line_no);
            const Vec2 v = detail::as_vec2(detail::require(j, "v_xy", p), p + ".v_xy");
            const Vec2 vc = detail::as_vec2(detail::require(j, "v_cmd_xy", p), p + ".v_cmd_xy");
            const double om = detail::get<double>(j, "omega", p);
            const double omc = detail::get<double>(j, "omega_cmd", p);
            const auto torque = j.value("torque", zeros);
            const auto qddot = j.value("qddot", zeros);
            const auto foot = j.value("foot_speeds", std::vector<double>{});
            const auto contacts = j.value("contacts", std::vector<bool>(foot.size(), false));
            const double gz = j.value("gravity_z", -1.0);
            const auto feet = j.value("feet_heights", std::vector<double>{});
            const double rt = locomotion::reward_track(v, vc, om, omc, w);
            const double rr = locomotion::reward_reg(torque, qddot, foot, contacts, w);
            const double rs = locomotion::reward_style(gz, feet, w);
            const double total = locomotion::total_reward(rt, rr, rs);
            discounted += discount * total;
            discount *= w.gamma;
            out += std::to_string(step++) + "," + num(rt) + "," + num(rr) + "," + num(rs) + "," + num(total) + "," +
                   num(discounted) + "\n";
        } catch (const json::exception& e) {
            throw SchemaError("line " + std::to_string(line_no), e.what());
        }
    }
    return out;
}

}  // namespace fg::harness
