#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "factoryguard/sensor_types.hpp"
#include "factoryguard/world.hpp"

namespace fg {

struct NoiseConfig {
    double detection_probability = 1.0;  // per target per frame
    double confidence_jitter = 0.0;      // std of additive confidence noise
    double depth_noise_std = 0.0;        // m
    double thermal_noise_std = 0.0;      // degC per pixel, before quantisation
    double embedding_noise_std = 0.02;   // per component, before renormalisation
    double person_confidence = 0.9;
    friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

// One tick of emulated RGB-D + thermal output. `source_of` names the ground-truth
// entity behind each detection; it is for evaluation and logs, never for tools.
struct SensorFrame {
    double timestamp = 0.0;
    Pose2 pose{};
    std::vector<Detection> detections;
    ThermalImage thermal;
    std::map<std::size_t, double> depth_of;
    std::map<std::size_t, std::vector<double>> embedding_of;
    std::vector<std::string> source_of;
};

SensorFrame emit_sensor_frame(const FacilityWorld& world, const NoiseConfig& noise, std::uint64_t seed);

// Noise-free, quantised thermal frame from an arbitrary pose (baseline capture).
ThermalImage render_thermal(const FacilityWorld& world, const Pose2& pose);

// Thermal camera intrinsics implied by the configured resolution and field of view.
CameraIntrinsics thermal_intrinsics(const SensorConfig& cfg);

// Camera-frame coordinates (X right, Y down, Z forward) of a world point at a
// given height, as seen from a robot pose.
struct CameraPoint {
    double X = 0.0;
    double Y = 0.0;
    double Z = 0.0;
};
CameraPoint to_camera(const Pose2& pose, double camera_height, Vec2 p, double height);
Vec2 camera_to_world(const Pose2& pose, double X, double Z);

}  // namespace fg
