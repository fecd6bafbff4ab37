#include "factoryguard/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fg {

std::string_view to_string(DetectionClass c) {
    switch (c) {
    case DetectionClass::Fire: return "fire";
    case DetectionClass::Smoke: return "smoke";
    case DetectionClass::Person: return "person";
    }
    return "fire";
}

DetectionClass parse_detection_class(std::string_view s) {
    if (s == "fire") return DetectionClass::Fire;
    if (s == "smoke") return DetectionClass::Smoke;
    if (s == "person") return DetectionClass::Person;
    throw InputError("unknown detection class '" + std::string(s) + "'");
}

ThermalImage::ThermalImage(int width, int height, double fill) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw ShapeError("thermal image dimensions must be positive");
    temps_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

ThermalImage::ThermalImage(int width, int height, std::vector<double> temps)
    : width_(width), height_(height), temps_(std::move(temps)) {
    if (width <= 0 || height <= 0) throw ShapeError("thermal image dimensions must be positive");
    if (temps_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw ShapeError("thermal image payload does not match its dimensions");
    }
}

CameraPoint to_camera(const Pose2& pose, double camera_height, Vec2 p, double height) {
    const Vec2 rel = p - pose.position();
    const Vec2 fwd = pose.forward();
    const Vec2 right{std::sin(pose.theta), -std::cos(pose.theta)};
    return {rel.dot(right), camera_height - height, rel.dot(fwd)};
}

Vec2 camera_to_world(const Pose2& pose, double X, double Z) {
    const Vec2 fwd = pose.forward();
    const Vec2 right{std::sin(pose.theta), -std::cos(pose.theta)};
    return pose.position() + fwd * Z + right * X;
}

CameraIntrinsics thermal_intrinsics(const SensorConfig& cfg) {
    CameraIntrinsics k;
    k.width = cfg.thermal_width;
    k.height = cfg.thermal_height;
    k.cx = cfg.thermal_width / 2.0;
    k.cy = cfg.thermal_height / 2.0;
    const double half = cfg.thermal_hfov_deg * std::numbers::pi / 360.0;
    k.fx = k.cx / std::tan(half);
    k.fy = k.fx;
    return k;
}

namespace {

struct Canvas {
    ThermalImage& img;
    void put(int x, int y, double t) const {
        if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return;
        double& px = img.at(x, y);
        px = std::max(px, t);
    }
};

// 4-connected raster walk between two projected samples so that a continuous
// pipe yields a 4-connected pixel chain.
void draw_segment(const Canvas& c, double u0, double v0, double t0, double u1, double v1, double t1) {
    int x0 = static_cast<int>(std::floor(u0));
    int y0 = static_cast<int>(std::floor(v0));
    const int x1 = static_cast<int>(std::floor(u1));
    const int y1 = static_cast<int>(std::floor(v1));
    const int dx = std::abs(x1 - x0);
    const int dy = std::abs(y1 - y0);
    const int total = dx + dy;
    if (total > 4 * (c.img.width() + c.img.height())) return;
    const int sx = x1 > x0 ? 1 : -1;
    const int sy = y1 > y0 ? 1 : -1;
    int err = dx - dy;
    for (int i = 0; i <= total; ++i) {
        const double f = total == 0 ? 1.0 : static_cast<double>(i) / total;
        c.put(x0, y0, (1.0 - f) * t0 + f * t1);
        if (i == total) break;
        if (x0 == x1) {
            y0 += sy;
        } else if (y0 == y1) {
            x0 += sx;
        } else if (2 * err > -dy) {
            err -= dy;
            x0 += sx;
        } else {
            err += dx;
            y0 += sy;
        }
    }
}

ThermalImage render_raw(const FacilityWorld& world, const Pose2& pose) {
    const auto& cfg = world.sensors;
    const CameraIntrinsics k = thermal_intrinsics(cfg);
    ThermalImage img(cfg.thermal_width, cfg.thermal_height, cfg.ambient_temp);
    const Canvas canvas{img};

    for (const auto& eq : world.equipment) {
        if (!eq.surface_temp) continue;
        const CameraPoint cp = to_camera(pose, cfg.camera_height, eq.position, 1.0);
        if (cp.Z <= 0.1 || cp.Z > cfg.thermal_range) continue;
        const double uc = k.cx + k.fx * cp.X / cp.Z;
        const double vc = k.cy + k.fy * cp.Y / cp.Z;
        const double half_w = k.fx * std::max(eq.half_extent.x, eq.half_extent.y) / cp.Z;
        const double half_h = k.fy * 0.75 / cp.Z;
        for (int y = static_cast<int>(std::floor(vc - half_h)); y <= static_cast<int>(std::floor(vc + half_h)); ++y) {
            for (int x = static_cast<int>(std::floor(uc - half_w)); x <= static_cast<int>(std::floor(uc + half_w)); ++x) {
                canvas.put(x, y, *eq.surface_temp);
            }
        }
    }

    for (const auto& pipe : world.pipes) {
        bool have_prev = false;
        double pu = 0.0, pv = 0.0, pt = 0.0;
        for (std::size_t i = 0; i < pipe.segment_temps.size(); ++i) {
            const Vec2 p = pipe.point_at(static_cast<double>(i) * pipe.sample_step);
            const CameraPoint cp = to_camera(pose, cfg.camera_height, p, pipe.height);
            const bool visible = cp.Z > 0.1 && std::hypot(cp.X, cp.Z) <= cfg.thermal_range;
            if (!visible) {
                have_prev = false;
                continue;
            }
            const double u = k.cx + k.fx * cp.X / cp.Z;
            const double v = k.cy + k.fy * cp.Y / cp.Z;
            const double t = pipe.segment_temps[i];
            if (have_prev) {
                draw_segment(canvas, pu, pv, pt, u, v, t);
            } else {
                canvas.put(static_cast<int>(std::floor(u)), static_cast<int>(std::floor(v)), t);
            }
            pu = u;
            pv = v;
            pt = t;
            have_prev = true;
        }
    }
    return img;
}

void quantise(ThermalImage& img, double quantum) {
    if (!(quantum > 0.0)) return;
    for (double& t : img.temps()) t = std::round(t / quantum) * quantum;
}

bool in_fov(const CameraPoint& cp, double hfov_deg) {
    if (cp.Z <= 0.0) return false;
    return std::abs(std::atan2(cp.X, cp.Z)) <= hfov_deg * std::numbers::pi / 360.0;
}

BoundingBox clip_box(BoundingBox b, const CameraIntrinsics& k) {
    const double u0 = std::clamp(b.u, 0.0, static_cast<double>(k.width));
    const double v0 = std::clamp(b.v, 0.0, static_cast<double>(k.height));
    const double u1 = std::clamp(b.u + b.w, 0.0, static_cast<double>(k.width));
    const double v1 = std::clamp(b.v + b.h, 0.0, static_cast<double>(k.height));
    return {u0, v0, u1 - u0, v1 - v0};
}

// Box of a given frame-area fraction, 16:9, centred at (uc, vc).
BoundingBox area_box(double area_fraction, double uc, double vc, const CameraIntrinsics& k) {
    const double area = std::clamp(area_fraction, 0.0, 1.0) * k.width * k.height;
    const double w = std::sqrt(area * 16.0 / 9.0);
    const double h = w > 0.0 ? area / w : 0.0;
    return {uc - 0.5 * w, vc - 0.5 * h, w, h};
}

}  // namespace

ThermalImage render_thermal(const FacilityWorld& world, const Pose2& pose) {
    ThermalImage img = render_raw(world, pose);
    quantise(img, world.sensors.thermal_quantum);
    return img;
}

SensorFrame emit_sensor_frame(const FacilityWorld& world, const NoiseConfig& noise, std::uint64_t seed) {
    if (!world.grid || !world.grid->in_bounds(world.grid->to_cell(world.robot.pose.position()))) {
        throw InputError("emit_sensor_frame: robot pose outside the grid");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const auto& cfg = world.sensors;
    const auto& k = cfg.rgb;
    const Pose2 pose = world.robot.pose;

    SensorFrame frame;
    frame.timestamp = world.clock;
    frame.pose = pose;

    auto jitter = [&](double c) {
        const double n = gauss(rng);
        if (noise.confidence_jitter > 0.0) c += noise.confidence_jitter * n;
        return std::clamp(c, 0.0, 1.0);
    };
    auto seen = [&]() { return uni(rng) < noise.detection_probability; };
    auto depth = [&](double z) {
        const double n = gauss(rng);
        return std::max(0.05, z + noise.depth_noise_std * n);
    };
    auto push = [&](Detection d, double z, std::string source) {
        d.bbox = clip_box(d.bbox, k);
        const std::size_t idx = frame.detections.size();
        frame.detections.push_back(d);
        frame.depth_of[idx] = depth(z);
        frame.source_of.push_back(std::move(source));
        return idx;
    };

    for (const auto& fire : world.fires) {
        const CameraPoint cp = to_camera(pose, cfg.camera_height, fire.position, fire.height);
        const bool visible = in_fov(cp, cfg.rgb_hfov_deg) &&
                             distance(pose.position(), fire.position) <= cfg.fire_range &&
                             world.grid->line_of_sight(pose.position(), fire.position, 0.8);
        // Draws are consumed unconditionally so a target's visibility never
        // shifts the random stream of the targets after it.
        const bool fire_seen = seen();
        const bool smoke_seen = seen();
        const double fire_conf = jitter(fire.detection_confidence());
        const double smoke_conf = jitter(fire.smoke_confidence * fire.intensity);
        if (!visible) continue;
        const double scale = (fire.ref_distance / cp.Z) * (fire.ref_distance / cp.Z);
        const double uc = k.cx + k.fx * cp.X / cp.Z;
        const double vc = k.cy + k.fy * cp.Y / cp.Z;
        const BoundingBox fire_box = area_box(fire.area_ratio * scale, uc, vc, k);
        if (fire_seen && fire_conf >= cfg.min_confidence && fire.area_ratio > 0.0) {
            push({DetectionClass::Fire, fire_box, fire_conf}, cp.Z, fire.id);
        }
        if (smoke_seen && smoke_conf >= cfg.min_confidence && fire.smoke_ratio > 0.0) {
            const BoundingBox smoke = area_box(fire.smoke_ratio * scale, uc, vc - fire_box.h, k);
            push({DetectionClass::Smoke, smoke, smoke_conf}, cp.Z, fire.id);
        }
    }

    for (const auto& person : world.persons) {
        const Vec2 p = person.position_at(world.clock);
        const CameraPoint cp = to_camera(pose, cfg.camera_height, p, person.height * 0.5);
        const bool visible = in_fov(cp, cfg.rgb_hfov_deg) && distance(pose.position(), p) <= cfg.person_range &&
                             world.grid->line_of_sight(pose.position(), p, 0.3);
        const bool person_seen = seen();
        const double conf = jitter(noise.person_confidence);
        std::vector<double> emb(person.true_embedding.size());
        double n2 = 0.0;
        for (std::size_t i = 0; i < emb.size(); ++i) {
            emb[i] = person.true_embedding[i] + noise.embedding_noise_std * gauss(rng);
            n2 += emb[i] * emb[i];
        }
        if (!visible || !person_seen || conf < cfg.min_confidence) continue;
        if (n2 > 0.0) {
            const double inv = 1.0 / std::sqrt(n2);
            for (auto& x : emb) x *= inv;
        }
        const double h_px = k.fy * person.height / cp.Z;
        const double w_px = k.fx * 0.45 / cp.Z;
        const double uc = k.cx + k.fx * cp.X / cp.Z;
        const double top = k.cy + k.fy * (cfg.camera_height - person.height) / cp.Z;
        const std::size_t idx = push({DetectionClass::Person, {uc - 0.5 * w_px, top, w_px, h_px}, conf}, cp.Z, person.id);
        frame.embedding_of[idx] = std::move(emb);
    }

    frame.thermal = render_raw(world, pose);
    if (noise.thermal_noise_std > 0.0) {
        for (double& t : frame.thermal.temps()) t += noise.thermal_noise_std * gauss(rng);
    }
    quantise(frame.thermal, cfg.thermal_quantum);
    return frame;
}

}  // namespace fg
