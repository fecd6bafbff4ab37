#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "factoryguard/scenario.hpp"
#include "factoryguard/sensors.hpp"

using namespace fg;

namespace {

FacilityWorld fire_world() {
    const auto sc = load_scenario(std::string(FG_SCENARIO_DIR) + "/fire_cnc.scn");
    return apply_event(sc.world, sc.script.events.front());
}

NoiseConfig quiet() {
    NoiseConfig n;
    n.embedding_noise_std = 0.0;
    return n;
}

}  // namespace

TEST_CASE("fire 6.2 m ahead yields the scripted confidence and range") {
    const auto w = fire_world();
    const auto frame = emit_sensor_frame(w, quiet(), 1);
    const auto it = std::find_if(frame.detections.begin(), frame.detections.end(),
                                 [](const Detection& d) { return d.cls == DetectionClass::Fire; });
    REQUIRE(it != frame.detections.end());
    const auto idx = static_cast<std::size_t>(it - frame.detections.begin());
    CHECK(it->confidence == doctest::Approx(0.92));
    CHECK(frame.depth_of.at(idx) == doctest::Approx(6.2));
    CHECK(frame.source_of.at(idx) == "F-1");
}

TEST_CASE("a facility with nothing to detect yields no detections") {
    auto w = fire_world();
    w.fires.clear();
    w.persons.clear();
    CHECK(emit_sensor_frame(w, quiet(), 7).detections.empty());
}

TEST_CASE("frames are deterministic in (world, seed)") {
    auto w = load_scenario(std::string(FG_SCENARIO_DIR) + "/intruder.scn").world;
    w = step(w, 0.5);
    NoiseConfig n;
    n.confidence_jitter = 0.05;
    n.depth_noise_std = 0.03;
    n.thermal_noise_std = 0.2;
    const auto a = emit_sensor_frame(w, n, 99);
    const auto b = emit_sensor_frame(w, n, 99);
    CHECK(a.detections == b.detections);
    CHECK(a.depth_of == b.depth_of);
    CHECK(a.embedding_of == b.embedding_of);
    CHECK(a.thermal == b.thermal);
}

TEST_CASE("detections stay inside the frame with confidences in [0, 1]") {
    auto w = fire_world();
    NoiseConfig n;
    n.confidence_jitter = 0.3;
    n.detection_probability = 0.7;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dx(-1.5, 1.5);
    std::uniform_real_distribution<double> dth(-0.6, 0.6);
    for (int i = 0; i < 200; ++i) {
        auto v = w;
        v.robot.pose.x += dx(rng);
        v.robot.pose.theta += dth(rng);
        v.fires.front().area_ratio = std::uniform_real_distribution<double>(0.001, 0.5)(rng);
        const auto frame = emit_sensor_frame(v, n, static_cast<std::uint64_t>(i));
        for (std::size_t k = 0; k < frame.detections.size(); ++k) {
            const auto& d = frame.detections[k];
            CHECK(d.confidence >= 0.0);
            CHECK(d.confidence <= 1.0);
            CHECK(d.bbox.u >= 0.0);
            CHECK(d.bbox.v >= 0.0);
            CHECK(d.bbox.u + d.bbox.w <= v.sensors.rgb.width + 1e-9);
            CHECK(d.bbox.v + d.bbox.h <= v.sensors.rgb.height + 1e-9);
            CHECK(frame.depth_of.at(k) > 0.0);
        }
    }
}

TEST_CASE("walls occlude fire detections") {
    auto w = fire_world();
    auto grid = std::make_shared<OccupancyGrid>(*w.grid);
    grid->fill_rect({7.0, 7.0}, {10.0, 7.3});
    w.grid = grid;
    for (const auto& d : emit_sensor_frame(w, quiet(), 3).detections) CHECK(d.cls != DetectionClass::Fire);
}

TEST_CASE("thermal intrinsics follow the field of view") {
    SensorConfig cfg;
    const auto k = thermal_intrinsics(cfg);
    CHECK(k.cx == 80.0);
    CHECK(k.cy == 60.0);
    CHECK(k.fx == doctest::Approx(80.0 / std::tan(28.0 * std::numbers::pi / 180.0)));
}

TEST_CASE("the stuck-valve hotspot is visible from its inspection point") {
    const auto sc = load_scenario(std::string(FG_SCENARIO_DIR) + "/thermal_pv.scn");
    const auto w = apply_event(sc.world, sc.script.events.front());
    const auto img = render_thermal(w, w.inspection_points.front().pose);
    const double hottest = *std::max_element(img.temps().begin(), img.temps().end());
    CHECK(hottest == doctest::Approx(125.8).epsilon(1e-3));
    for (double t : img.temps()) CHECK(std::abs(t * 10.0 - std::round(t * 10.0)) < 1e-6);

    const auto cold = render_thermal(sc.world, sc.world.inspection_points.front().pose);
    const double base = *std::max_element(cold.temps().begin(), cold.temps().end());
    CHECK(base == doctest::Approx(65.0));
}

TEST_CASE("camera frame transforms invert each other") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 100; ++i) {
        const Pose2 pose{u(rng), u(rng), u(rng)};
        const Vec2 p{u(rng), u(rng)};
        const auto cp = to_camera(pose, 1.2, p, 0.4);
        CHECK(cp.Y == doctest::Approx(0.8));
        const Vec2 back = camera_to_world(pose, cp.X, cp.Z);
        CHECK(back.x == doctest::Approx(p.x).epsilon(1e-9));
        CHECK(back.y == doctest::Approx(p.y).epsilon(1e-9));
    }
}
