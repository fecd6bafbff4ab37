#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const std::string kDir = FG_SCENARIO_DIR;
const fs::path kTmp = fs::path(FG_TEST_TMP) / "cli";

int fgsim(const std::string& args) {
    const std::string cmd = std::string(FG_FGSIM) + " " + args + " > " + (kTmp / "stdout.txt").string() + " 2> " +
                            (kTmp / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

struct Setup {
    Setup() {
        fs::remove_all(kTmp);
        fs::create_directories(kTmp);
    }
};
const Setup setup;

}  // namespace

TEST_CASE("run exit codes follow the outcome") {
    CHECK(fgsim("run " + kDir + "/fire_cnc.scn --out " + (kTmp / "fire").string()) == 0);
    CHECK(fs::exists(kTmp / "fire" / "events.jsonl"));
    CHECK(fs::exists(kTmp / "fire" / "timeline.csv"));
    CHECK(fgsim("run " + kDir + "/variants/thermal_noequip.scn --out " + (kTmp / "noequip").string()) == 1);
    write(kTmp / "short.json", R"({"budget": 1})");
    CHECK(fgsim("run " + kDir + "/fire_cnc.scn --config " + (kTmp / "short.json").string() + " --out " +
                (kTmp / "short").string()) == 2);
}

TEST_CASE("input errors exit with 3") {
    CHECK(fgsim("run " + (kTmp / "missing.scn").string()) == 3);
    write(kTmp / "broken.scn", "{\"schema\": ");
    CHECK(fgsim("run " + (kTmp / "broken.scn").string()) == 3);
    write(kTmp / "bad.json", R"({"bugdet": 3})");
    CHECK(fgsim("run " + kDir + "/fire_cnc.scn --config " + (kTmp / "bad.json").string()) == 3);
    CHECK(fgsim("frobnicate") == 3);
    CHECK(fgsim("run " + kDir + "/fire_cnc.scn --backend http") == 3);
}

TEST_CASE("baseline capture, replay and batch") {
    const auto mem = kTmp / "fire.memory.json";
    CHECK(fgsim("baseline-capture " + kDir + "/fire_cnc.scn --out " + mem.string()) == 0);
    CHECK(fs::file_size(mem) > 0);
    write(kTmp / "cfg.json", "{\"memory\": \"" + mem.string() + "\"}");
    CHECK(fgsim("run " + kDir + "/fire_cnc.scn --config " + (kTmp / "cfg.json").string() + " --out " +
                (kTmp / "mem_run").string()) == 0);

    write(kTmp / "loco.jsonl", "{\"v_xy\": [1, 0], \"v_cmd_xy\": [1, 0], \"omega\": 0, \"omega_cmd\": 0}\n");
    CHECK(fgsim("replay-rewards " + (kTmp / "loco.jsonl").string() + " --out " + (kTmp / "rewards.csv").string()) == 0);
    std::ifstream in(kTmp / "rewards.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "step,r_track,r_reg,r_style,r_total,discounted");

    fs::create_directories(kTmp / "scn");
    fs::copy_file(kDir + "/intruder.scn", kTmp / "scn" / "intruder.scn");
    fs::copy_file(kDir + "/facility_c.json", kTmp / "scn" / "facility_c.json");
    CHECK(fgsim("batch --scenarios " + (kTmp / "scn").string() + " --seeds 2 --out " + (kTmp / "batch").string()) == 0);
    CHECK(fs::exists(kTmp / "batch" / "batch.csv"));
    CHECK(fs::exists(kTmp / "batch" / "intruder" / "seed_1" / "events.jsonl"));
}
