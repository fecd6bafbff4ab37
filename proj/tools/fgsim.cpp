// fgsim: scenario runner for the FactoryGuard simulation.
//
//   fgsim run <scenario.scn> [--seed N] [--config run.json] [--out DIR] [--backend NAME] [--endpoint URL]
//   fgsim batch --scenarios DIR --seeds N [--config run.json] [--out DIR] [--jobs J]
//   fgsim baseline-capture <scenario.scn> [--out FILE]
//   fgsim replay-rewards <trace.jsonl> [--out FILE]
//
// Exit codes for `run`: 0 success, 1 partial, 2 failure. Any command exits 3
// on invalid input or usage.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "factoryguard/errors.hpp"
#include "factoryguard/harness.hpp"
#include "factoryguard/memory.hpp"

namespace fs = std::filesystem;
using namespace fg;

namespace {

constexpr int kInputError = 3;

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

fs::path default_out() { return fs::path(env("FACTORYGUARD_OUT").value_or("fg_out")); }

std::uint64_t default_seed() {
    const auto s = env("FACTORYGUARD_SEED");
    if (!s) return 0;
    try {
        return std::stoull(*s);
    } catch (const std::exception&) {
        throw InputError("FACTORYGUARD_SEED is not an unsigned integer: " + *s);
    }
}

harness::RunConfig config_from(const std::string& path, const std::string& backend, const std::string& endpoint) {
    harness::RunConfig cfg = path.empty() ? harness::RunConfig{} : harness::load_run_config(path);
    if (!backend.empty()) cfg.backend = backend;
    if (!endpoint.empty()) cfg.endpoint = endpoint;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FactoryGuard facility simulation and hazard-response harness"};
    app.require_subcommand(1);

    std::string scenario, config, out, backend, endpoint, dir, trace;
    std::optional<std::uint64_t> seed;
    int seeds = 20, jobs = 1;

    auto* run = app.add_subcommand("run", "Run one scenario and write events, metrics, report and timeline");
    run->add_option("scenario", scenario, "Scenario file (.scn)")->required();
    run->add_option("--seed", seed, "Seed (default $FACTORYGUARD_SEED or 0)");
    run->add_option("--config", config, "Run config JSON");
    run->add_option("--out", out, "Output directory (default $FACTORYGUARD_OUT/<id>_seed<N>)");
    run->add_option("--backend", backend, "react | rule_based | http");
    run->add_option("--endpoint", endpoint, "Reasoning backend URL for --backend http");

    auto* bat = app.add_subcommand("batch", "Run every scenario in a directory over seeds 0..N-1");
    bat->add_option("--scenarios", dir, "Directory of .scn files")->required();
    bat->add_option("--seeds", seeds, "Seeds per scenario")->check(CLI::PositiveNumber);
    bat->add_option("--config", config, "Run config JSON");
    bat->add_option("--out", out, "Output directory (default $FACTORYGUARD_OUT/batch)");
    bat->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
    bat->add_option("--backend", backend, "react | rule_based | http");

    auto* cap = app.add_subcommand("baseline-capture", "Capture memory stores from a hazard-free copy of a scenario");
    cap->add_option("scenario", scenario, "Scenario file (.scn)")->required();
    cap->add_option("--out", out, "Output file (default $FACTORYGUARD_OUT/<id>.memory.json)");

    auto* rep = app.add_subcommand("replay-rewards", "Per-step reward decomposition of a locomotion log");
    rep->add_option("trace", trace, "JSON-Lines state/action log")->required();
    rep->add_option("--out", out, "CSV output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kInputError;
    }

    try {
        if (*run) {
            const auto cfg = config_from(config, backend, endpoint);
            const std::uint64_t s = seed.value_or(default_seed());
            fs::path out_dir = out;
            if (out.empty()) {
                const Scenario sc = harness::load_scenario(scenario, cfg);
                out_dir = default_out() / (sc.id + "_seed" + std::to_string(s));
            }
            const auto report = harness::run(scenario, s, cfg, out_dir);
            std::cout << report.to_json().dump(2) << "\n";
            return orchestra::exit_code(report.outcome);
        }
        if (*bat) {
            const auto cfg = config_from(config, backend, "");
            const fs::path out_dir = out.empty() ? default_out() / "batch" : fs::path(out);
            const auto table = harness::batch(harness::scenario_files(dir), seeds, cfg, out_dir, jobs);
            std::cout << table.to_csv();
            return 0;
        }
        if (*cap) {
            const Scenario sc = fg::load_scenario(scenario);
            const fs::path file = out.empty() ? default_out() / (sc.id + ".memory.json") : fs::path(out);
            if (file.has_parent_path()) fs::create_directories(file.parent_path());
            memory::save(harness::capture_stores(sc), file);
            std::cout << file.string() << "\n";
            return 0;
        }
        if (*rep) {
            std::ifstream in(trace);
            if (!in) throw InputError("cannot read '" + trace + "'");
            const std::string csv = harness::replay_rewards(in);
            if (out.empty()) {
                std::cout << csv;
            } else {
                std::ofstream f(out, std::ios::binary);
                if (!f) throw InputError("cannot write '" + out + "'");
                f << csv;
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "fgsim: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "fgsim: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
