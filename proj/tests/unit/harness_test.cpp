#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "factoryguard/errors.hpp"
#include "factoryguard/harness.hpp"
#include "oracles.hpp"

using namespace fg;
using namespace fg::harness;
using nlohmann::json;
using orchestra::AlertMessage;
using orchestra::EpisodeTrace;
using orchestra::Outcome;
using orchestra::Priority;
using orchestra::ReasoningStep;
using orchestra::ToolCategory;

namespace fs = std::filesystem;

namespace {

const std::string kDir = FG_SCENARIO_DIR;

ReasoningStep step(const std::string& tool, ToolCategory cat, double t, double lat, json data = json::object()) {
    ReasoningStep s;
    s.action.tool = tool;
    s.category = cat;
    s.sim_time = t;
    s.latency = lat;
    s.observation.data = std::move(data);
    return s;
}

// Detection at 0.13, graded P2 alert at 1.40, resolved.
EpisodeTrace fire_trace() {
    EpisodeTrace t;
    t.steps.push_back(step("fire_smoke", ToolCategory::Perception, 0.0, 0.13, {{"hazard_cue", true}}));
    t.steps.push_back(step("fire_severity", ToolCategory::Reasoning, 0.13, 0.85));
    t.steps.push_back(step("alert_center", ToolCategory::Actuation, 0.98, 0.42));
    t.steps.push_back(step("locomotion", ToolCategory::Actuation, 1.40, 2.0));
    t.steps.push_back(step("fire_suppression", ToolCategory::Actuation, 3.40, 0.5));
    AlertMessage a;
    a.hazard = "fire";
    a.priority = Priority::P2;
    a.payload = {{"stage", "growth"}};
    a.sim_time = 1.40;
    t.alerts.push_back(a);
    t.notes.push_back({3.9, "response_complete", json::object()});
    t.notes.push_back({48.0, "fire_cleared", json::object()});
    return t;
}

GroundTruth fire_truth() { return {"fire", 0.0}; }

RunReport report(const std::string& id, Outcome o, std::optional<double> total = std::nullopt) {
    RunReport r;
    r.scenario_id = id;
    r.outcome = o;
    if (total) {
        PhaseBreakdown p;
        p.detection = *total;
        p.total = *total;
        r.phases = p;
    }
    return r;
}

}  // namespace

TEST_CASE("judge rules") {
    const sim::SessionRecord clean;
    CHECK(judge(fire_truth(), fire_trace(), clean, true, true) == Outcome::Success);
    CHECK(judge(fire_truth(), fire_trace(), clean, false, true) == Outcome::Partial);

    auto late = fire_trace();
    late.alerts[0].sim_time = 0.13 + kAlertBudget + 0.5;
    CHECK(judge(fire_truth(), late, clean, true, true) == Outcome::Partial);

    auto misgraded = fire_trace();
    misgraded.alerts[0].priority = Priority::P1;
    CHECK(judge(fire_truth(), misgraded, clean, true, true) == Outcome::Partial);

    auto unresolved = fire_trace();
    unresolved.notes.pop_back();
    CHECK(judge(fire_truth(), unresolved, clean, true, true) == Outcome::Partial);

    sim::SessionRecord wrong;
    wrong.wrong_actuations.push_back("remote_valve:PV-X");
    CHECK(judge(fire_truth(), fire_trace(), wrong, true, true) == Outcome::Failure);

    sim::SessionRecord detour;
    detour.navigation.push_back({0, 10, 4.0, 6.5, true, "standoff"});
    CHECK(judge(fire_truth(), fire_trace(), detour, true, true) == Outcome::Partial);
    detour.navigation[0].traveled = 5.9;
    CHECK(judge(fire_truth(), fire_trace(), detour, true, true) == Outcome::Success);

    EpisodeTrace blind;
    blind.steps.push_back(step("fire_smoke", ToolCategory::Perception, 0.0, 0.13, {{"hazard_cue", false}}));
    CHECK(judge(fire_truth(), blind, clean, true, false) == Outcome::Failure);

    const GroundTruth none;
    CHECK(judge(none, EpisodeTrace{}, clean, false, false) == Outcome::Success);
    CHECK(judge(none, fire_trace(), clean, true, false) == Outcome::Failure);
}

TEST_CASE("phase breakdown sums its parts") {
    const auto p = phase_breakdown(fire_trace(), fire_truth());
    REQUIRE(p);
    CHECK(p->detection == doctest::Approx(0.13));
    CHECK(p->reasoning == doctest::Approx(0.85));
    CHECK(p->alert_transmission == doctest::Approx(0.42));
    CHECK(p->navigation == doctest::Approx(2.0));
    CHECK(p->intervention == doctest::Approx(0.5));
    CHECK(p->total == p->detection + p->reasoning + p->alert_transmission + p->navigation + p->intervention);

    auto open = fire_trace();
    open.notes.clear();
    CHECK_FALSE(phase_breakdown(open, fire_truth()));
}

TEST_CASE("aggregate recomputes from the reports") {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> o(0, 2);
    std::uniform_real_distribution<double> t(1.0, 20.0);
    std::vector<RunReport> reports;
    std::map<std::string, std::array<int, 3>> counts;
    std::map<std::string, std::pair<double, int>> totals;
    for (int i = 0; i < 60; ++i) {
        const std::string id = i % 3 == 0 ? "a" : (i % 3 == 1 ? "b" : "c");
        const auto out = static_cast<Outcome>(o(rng));
        std::optional<double> total;
        if (i % 4 != 0) total = t(rng);
        reports.push_back(report(id, out, total));
        ++counts[id][static_cast<int>(out)];
        if (total) {
            totals[id].first += *total;
            ++totals[id].second;
        }
    }
    const auto table = aggregate(reports);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0].scenario == "a");
    CHECK(table.rows[2].scenario == "c");
    int all = 0;
    for (const auto& row : table.rows) {
        const auto& c = counts[row.scenario];
        CHECK(row.runs == c[0] + c[1] + c[2]);
        CHECK(row.success == c[0]);
        CHECK(row.partial == c[1]);
        CHECK(row.failure == c[2]);
        CHECK(row.success_pct() + row.partial_pct() + row.failure_pct() == doctest::Approx(100.0));
        REQUIRE(row.mean_phases);
        CHECK(row.phase_runs == totals[row.scenario].second);
        CHECK(row.mean_phases->total == doctest::Approx(totals[row.scenario].first / totals[row.scenario].second));
        all += row.runs;
    }
    CHECK(table.overall.runs == all);
    CHECK(table.overall.scenario == "overall");

    const auto one = aggregate({report("x", Outcome::Partial)});
    CHECK(one.rows[0].partial_pct() == 100.0);
    CHECK(one.rows[0].success_pct() == 0.0);
    CHECK_FALSE(one.rows[0].mean_phases);
    const auto csv = one.to_csv();
    CHECK(csv.rfind("scenario,runs,", 0) == 0);
    CHECK(csv.find("x,1,0.0,100.0,0.0,,,,,,") != std::string::npos);
    CHECK(aggregate({}).overall.runs == 0);
}

TEST_CASE("timeline CSV") {
    TimelineSeries empty;
    empty.x_name = "t";
    empty.y_name = "fire_confidence";
    CHECK(timeline_csv(empty) == "t,fire_confidence\n");
    TimelineSeries s;
    s.points = {{0.0, 0.92}, {1.5, 0.25}};
    CHECK(timeline_csv(s) == "t,value\n0.0,0.92\n1.5,0.25\n");

    const auto fire = execute(fg::load_scenario(kDir + "/fire_cnc.scn"), 0);
    const auto& pts = fire.report.timeline.points;
    REQUIRE(pts.size() >= 2);
    CHECK(pts.front().second == doctest::Approx(0.92));
    CHECK(pts.back().second < 0.005);
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].first >= pts[i - 1].first);
}

TEST_CASE("runs write their artifacts and are byte-deterministic") {
    const fs::path tmp = fs::path(FG_TEST_TMP) / "harness";
    fs::remove_all(tmp);
    const auto a = run(kDir + "/intruder.scn", 3, {}, tmp / "a");
    const auto b = run(kDir + "/intruder.scn", 3, {}, tmp / "b");
    REQUIRE(a.artifacts);
    for (const char* f : {"events.jsonl", "metrics.csv", "report.json", "timeline.csv"}) CHECK(fs::exists(tmp / "a" / f));
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const auto ea = slurp(tmp / "a" / "events.jsonl");
    CHECK_FALSE(ea.empty());
    CHECK(ea == slurp(tmp / "b" / "events.jsonl"));
    CHECK(slurp(tmp / "a" / "report.json") == slurp(tmp / "b" / "report.json"));
    const auto records = parse_jsonl(ea);
    CHECK(records.back().kind == "outcome");
    for (std::size_t i = 1; i < records.size(); ++i) CHECK(records[i].t >= records[i - 1].t - 1e-9);
    CHECK(to_string(a.outcome) == to_string(b.outcome));
}

TEST_CASE("run config") {
    const auto c = RunConfig::from_json({{"backend", "rule_based"}, {"budget", 50}, {"latencies", {{"alert_center", 0.5}}}});
    CHECK(c.backend == "rule_based");
    CHECK(c.budget == 50);
    CHECK(c.latencies.at("alert_center") == 0.5);
    CHECK(RunConfig::from_json(c.to_json()).to_json() == c.to_json());
    CHECK_THROWS_AS(RunConfig::from_json({{"bugdet", 5}}), SchemaError);
    CHECK_THROWS_AS(RunConfig::from_json({{"budget", 0}}), SchemaError);
    CHECK_THROWS_AS(RunConfig::from_json({{"latencies", {{"x", -1}}}}), SchemaError);
    CHECK_THROWS_AS(RunConfig::from_json(json::array()), SchemaError);

    // Latency overrides reach the run.
    RunConfig slow;
    slow.latencies["alert_center"] = 1.0;
    const auto r = execute(load_scenario(kDir + "/fire_cnc.scn", slow), 0, slow);
    REQUIRE_FALSE(r.trace.alerts.empty());
    CHECK(r.trace.alerts.front().sim_time == doctest::Approx(0.13 + 0.85 + 1.0));
}

TEST_CASE("reward replay") {
    std::istringstream in(
        "{\"v_xy\": [1, 0], \"v_cmd_xy\": [1, 0], \"omega\": 0, \"omega_cmd\": 0}\n"
        "\n"
        "{\"v_xy\": [0.5, 0], \"v_cmd_xy\": [0, 0], \"omega\": 0, \"omega_cmd\": 0, \"feet_heights\": [0.08]}\n");
    const auto csv = replay_rewards(in);
    std::istringstream lines(csv);
    std::string header, l1, l2, extra;
    std::getline(lines, header);
    std::getline(lines, l1);
    std::getline(lines, l2);
    CHECK(header == "step,r_track,r_reg,r_style,r_total,discounted");
    CHECK(l1 == "0,2.0,0.0,0.5,2.5,2.5");  // no feet listed: clearance term at its maximum
    CHECK_FALSE(std::getline(lines, extra));
    const locomotion::RewardWeights w;
    const double r1 = oracle::track(0.5, 0, 0, 0, 0, 0, w.w_v, w.w_omega, w.sigma_v, w.sigma_omega) + w.w_feet;
    CHECK(l2.rfind("1,", 0) == 0);
    const double disc = std::stod(l2.substr(l2.rfind(',') + 1));
    CHECK(disc == doctest::Approx(2.5 + w.gamma * r1).epsilon(1e-12));

    std::istringstream bad("{\"v_xy\": [1, 0]}\n");
    CHECK_THROWS_AS(replay_rewards(bad), SchemaError);
    std::istringstream junk("{oops\n");
    CHECK_THROWS_AS(replay_rewards(junk), ParseError);
}

TEST_CASE("ground truth") {
    CHECK(ground_truth(fg::load_scenario(kDir + "/fire_cnc.scn")).hazard == "fire");
    CHECK(ground_truth(fg::load_scenario(kDir + "/thermal_pv.scn")).hazard == "thermal");
    CHECK(ground_truth(fg::load_scenario(kDir + "/intruder.scn")).hazard == "intruder");
    CHECK(ground_truth(fg::load_scenario(kDir + "/patrol.scn")).hazard == "none");
    CHECK(ground_truth(fg::load_scenario(kDir + "/variants/intruder_authorized.scn")).hazard == "none");
}
