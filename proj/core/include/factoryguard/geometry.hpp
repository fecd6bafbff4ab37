#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "factoryguard/errors.hpp"

namespace fg {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;

    [[nodiscard]] double norm() const { return std::hypot(x, y); }
    [[nodiscard]] double dot(Vec2 o) const { return x * o.x + y * o.y; }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

struct Pose2 {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;  // heading, rad, counter-clockwise from +x

    [[nodiscard]] Vec2 position() const { return {x, y}; }
    [[nodiscard]] Vec2 forward() const { return {std::cos(theta), std::sin(theta)}; }
    friend bool operator==(const Pose2&, const Pose2&) = default;
};

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

// Closed point-in-polygon test: points on an edge or vertex count as inside.
bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon);

// True when no two non-adjacent edges of the closed polygon intersect.
bool polygon_is_simple(std::span<const Vec2> polygon);

// Piecewise-linear polyline helpers (arclength parameterised).
double polyline_length(std::span<const Vec2> polyline);
Vec2 polyline_point(std::span<const Vec2> polyline, double arclength);

// Deterministic 64-bit mixing used to derive per-tick and per-entity seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t hash_string(const std::string& s);

}  // namespace fg
