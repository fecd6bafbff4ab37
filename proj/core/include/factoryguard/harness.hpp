#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "factoryguard/event_log.hpp"
#include "factoryguard/locomotion.hpp"
#include "factoryguard/scenario.hpp"
#include "factoryguard/session.hpp"
#include "factoryguard/trace.hpp"

// Scenario runner: executes the stack on a scenario, judges the outcome from
// simulator ground truth, and emits the event log, metrics and report files.
namespace fg::harness {

// Run configuration file ({backend, endpoint, budget, latencies, noise,
// params, memory, episode_margin}). Unknown keys are schema errors.
struct RunConfig {
    std::string backend = "react";
    std::string endpoint;
    int budget = 20000;
    std::map<std::string, double> latencies;  // per-tool overrides, applied after the scenario's
    nlohmann::json noise = nlohmann::json::object();   // merged over the scenario's noise block
    nlohmann::json params = nlohmann::json::object();  // merged over the scenario's params block
    std::optional<std::filesystem::path> memory;        // saved stores; default captures fresh ones
    double episode_margin = 0.0;

    static RunConfig from_json(const nlohmann::json& j);
    [[nodiscard]] nlohmann::json to_json() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

// Reads a scenario and applies the config's noise/params/latency overrides.
Scenario load_scenario(const std::filesystem::path& path, const RunConfig& cfg);

struct PhaseBreakdown {
    double detection = 0.0;
    double reasoning = 0.0;
    double alert_transmission = 0.0;
    double navigation = 0.0;
    double intervention = 0.0;
    double total = 0.0;  // always the sum of the five phases

    [[nodiscard]] nlohmann::json to_json() const;
};

// What actually happened in the scenario, independent of the policy.
struct GroundTruth {
    std::string hazard = "none";  // none | fire | thermal | intruder
    std::optional<double> injected_at;
};

GroundTruth ground_truth(const Scenario& scenario);

// Index of the first step at/after injection whose observation carries a
// hazard cue for the true hazard kind.
std::optional<std::size_t> detection_step(const orchestra::EpisodeTrace& trace, const GroundTruth& truth);

// Phases from injection to the policy's response_complete note. None when the
// hazard was not detected or the response never completed.
std::optional<PhaseBreakdown> phase_breakdown(const orchestra::EpisodeTrace& trace, const GroundTruth& truth);

// Rules, in order:
//   no hazard        Success iff no alerts and no actuation errors, else Failure
//   wrong/rejected actuation, or hazard never detected    Failure
//   episode incomplete                                    Partial
//   resolved, alerts correctly graded, first alert within 3 s of detection,
//   response paths within 1.5x shortest                  Success
//   otherwise                                             Partial
orchestra::Outcome judge(const GroundTruth& truth, const orchestra::EpisodeTrace& trace,
                         const sim::SessionRecord& record, bool completed, bool hazard_detected);

inline constexpr double kAlertBudget = 3.0;       // s from detection to first alert
inline constexpr double kPathRatioLimit = 1.5;
inline constexpr double kMinJudgedPath = 1.0;     // m; shorter trips are not ratio-checked

struct TimelineSeries {
    std::string x_name = "t";
    std::string y_name = "value";
    std::vector<std::pair<double, double>> points;
};

struct Artifacts {
    std::filesystem::path events;
    std::filesystem::path metrics;
    std::filesystem::path report;
    std::filesystem::path timeline;
};

struct RunReport {
    std::string scenario_id;
    std::uint64_t seed = 0;
    std::string backend;
    orchestra::Outcome outcome = orchestra::Outcome::Failure;
    GroundTruth truth;
    bool completed = false;
    double end_time = 0.0;
    std::size_t steps = 0;
    std::optional<PhaseBreakdown> phases;
    std::vector<orchestra::AlertMessage> alerts;
    nlohmann::json milestones = nlohmann::json::object();  // seconds after injection unless noted
    TimelineSeries timeline;
    std::optional<Artifacts> artifacts;

    [[nodiscard]] nlohmann::json to_json() const;
};

// Full in-memory result, for tests and tools that need more than the report.
struct RunResult {
    RunReport report;
    orchestra::EpisodeTrace trace;
    sim::SessionRecord record;
    EventLog log;
};

RunResult execute(const Scenario& scenario, std::uint64_t seed, const RunConfig& cfg = {});

// Loads, executes, and (when `out_dir` is given) writes events.jsonl,
// metrics.csv, report.json and timeline.csv there.
RunReport run(const std::filesystem::path& scenario, std::uint64_t seed, const RunConfig& cfg = {},
              const std::optional<std::filesystem::path>& out_dir = std::nullopt);

nlohmann::json milestones(const GroundTruth& truth, const orchestra::EpisodeTrace& trace,
                          const sim::SessionRecord& record);

// Fire: (t, fire confidence) per fire_smoke frame from detection on.
// Thermal: (arclength, temperature) of the first pipe profile.
TimelineSeries timeline_series(const GroundTruth& truth, const orchestra::EpisodeTrace& trace);

std::string timeline_csv(const TimelineSeries& series);
void emit_timeline(const RunReport& report, const std::filesystem::path& path);

std::string metrics_csv(const RunReport& report);

struct BatchRow {
    std::string scenario;
    int runs = 0;
    int success = 0;
    int partial = 0;
    int failure = 0;
    std::optional<PhaseBreakdown> mean_phases;  // over runs that have a breakdown
    int phase_runs = 0;

    [[nodiscard]] double success_pct() const;
    [[nodiscard]] double partial_pct() const;
    [[nodiscard]] double failure_pct() const;
};

struct BatchTable {
    std::vector<BatchRow> rows;  // one per scenario, in first-seen order
    BatchRow overall;

    [[nodiscard]] std::string to_csv() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

BatchTable aggregate(const std::vector<RunReport>& reports);

// Seeds 0..seeds-1 for every scenario. Runs are independent and may execute
// on up to `jobs` threads; the table does not depend on `jobs`.
BatchTable batch(const std::vector<std::filesystem::path>& scenarios, int seeds, const RunConfig& cfg = {},
                 const std::optional<std::filesystem::path>& out_dir = std::nullopt, int jobs = 1);

// *.scn files in `dir`, sorted by name.
std::vector<std::filesystem::path> scenario_files(const std::filesystem::path& dir);

// Captures memory stores (facility map, baselines, personnel) from a
// hazard-free copy of the scenario world.
memory::MemoryStores capture_stores(const Scenario& scenario);

// JSON-Lines locomotion log -> CSV (step, r_track, r_reg, r_style, r_total,
// discounted). Each line holds v_xy, v_cmd_xy, omega, omega_cmd and optionally
// torque, qddot, foot_speeds, contacts, gravity_z, feet_heights.
// `discounted` is the running discounted return up to that step.
std::string replay_rewards(std::istream& in, const locomotion::RewardWeights& weights = {});

}  // namespace fg::harness
