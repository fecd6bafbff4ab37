#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace fg {

enum class DetectionClass { Fire, Smoke, Person };

std::string_view to_string(DetectionClass c);
DetectionClass parse_detection_class(std::string_view s);

struct BoundingBox {
    double u = 0.0;  // left, px
    double v = 0.0;  // top, px
    double w = 0.0;
    double h = 0.0;

    [[nodiscard]] double area() const { return w * h; }
    [[nodiscard]] double center_u() const { return u + 0.5 * w; }
    [[nodiscard]] double center_v() const { return v + 0.5 * h; }
    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Detection {
    DetectionClass cls = DetectionClass::Fire;
    BoundingBox bbox{};
    double confidence = 0.0;  // [0, 1]
    friend bool operator==(const Detection&, const Detection&) = default;
};

// Row-major temperature image in degrees Celsius.
class ThermalImage {
public:
    ThermalImage() = default;
    ThermalImage(int width, int height, double fill = 0.0);
    ThermalImage(int width, int height, std::vector<double> temps);

    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] bool empty() const { return temps_.empty(); }

    [[nodiscard]] double at(int x, int y) const { return temps_[offset(x, y)]; }
    double& at(int x, int y) { return temps_[offset(x, y)]; }

    [[nodiscard]] const std::vector<double>& temps() const { return temps_; }
    std::vector<double>& temps() { return temps_; }

    friend bool operator==(const ThermalImage&, const ThermalImage&) = default;

private:
    [[nodiscard]] std::size_t offset(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> temps_;
};

// Pinhole intrinsics K. Defaults match the 1280x720 RGB-D stream.
struct CameraIntrinsics {
    double fx = 640.0;
    double fy = 640.0;
    double cx = 640.0;
    double cy = 360.0;
    int width = 1280;
    int height = 720;
    friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

}  // namespace fg
