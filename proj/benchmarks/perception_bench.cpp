#include <benchmark/benchmark.h>

#include "factoryguard/perception.hpp"
#include "factoryguard/scenario.hpp"
#include "factoryguard/sensors.hpp"

using namespace fg;

namespace {

void BM_RenderThermal(benchmark::State& state) {
    const auto sc = load_scenario(std::string(FG_SCENARIO_DIR) + "/thermal_pv.scn");
    const auto& ip = sc.world.inspection_points.front();
    for (auto _ : state) benchmark::DoNotOptimize(render_thermal(sc.world, ip.pose));
}
BENCHMARK(BM_RenderThermal);

void BM_AnomalyRegions(benchmark::State& state) {
    ThermalImage delta(160, 120, 0.0);
    for (int y = 40; y < 60; ++y)
        for (int x = 70; x < 100; ++x) delta.at(x, y) = 30.0 + x - y;
    for (auto _ : state) benchmark::DoNotOptimize(perception::anomaly_regions(delta, 15.0));
}
BENCHMARK(BM_AnomalyRegions);

}  // namespace
