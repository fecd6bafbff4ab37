#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "factoryguard/memory.hpp"
#include "factoryguard/sensor_types.hpp"
#include "factoryguard/world.hpp"

namespace fg::perception {

inline constexpr double kDefaultWarningDelta = 15.0;  // degC
inline constexpr double kDefaultMatchThreshold = 0.7;

// (det_area / frame_area) * confidence.
double fire_severity(double det_area, double frame_area, double confidence);

ThermalImage thermal_diff(const ThermalImage& current, const ThermalImage& baseline);

struct Pixel {
    int x = 0;
    int y = 0;
    friend bool operator==(const Pixel&, const Pixel&) = default;
    friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

struct AnomalyRegion {
    std::vector<Pixel> pixels;  // row-major order
    double centroid_x = 0.0;
    double centroid_y = 0.0;
    double max_delta = 0.0;
    Pixel peak{};
};

// 4-connected components of pixels with delta > tau, hottest first.
std::vector<AnomalyRegion> anomaly_regions(const ThermalImage& delta, double tau_warning);

struct Point3 {
    double X = 0.0;
    double Y = 0.0;
    double Z = 0.0;
};

Point3 backproject(double u, double v, double Z, const CameraIntrinsics& k);

struct PixelCoord {
    double u = 0.0;
    double v = 0.0;
};
PixelCoord project(const Point3& p, const CameraIntrinsics& k);

struct ThermalProfile {
    std::vector<double> positions;  // arclength, m
    std::vector<double> temps;
    std::size_t peak_index = 0;

    [[nodiscard]] double peak_position() const { return positions.at(peak_index); }
    [[nodiscard]] double peak_temp() const { return temps.at(peak_index); }
};

ThermalProfile thermal_profile(const Pipe& pipe, double step);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct MatchResult {
    std::optional<std::string> id;
    double best_similarity = -1.0;
    std::optional<std::string> best_id;  // argmax regardless of threshold
};

MatchResult match_person_detail(std::span<const double> query, const memory::PersonnelDB& db,
                                double threshold = kDefaultMatchThreshold);
std::optional<std::string> match_person(std::span<const double> query, const memory::PersonnelDB& db,
                                        double threshold = kDefaultMatchThreshold);

}  // namespace fg::perception
