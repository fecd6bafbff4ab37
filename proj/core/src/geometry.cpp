#include "factoryguard/geometry.hpp"

#include <algorithm>

namespace fg {

double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a <= -std::numbers::pi) a += two_pi;
    if (a > std::numbers::pi) a -= two_pi;
    return a;
}

namespace {

double cross(Vec2 o, Vec2 a, Vec2 b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(Vec2 p, Vec2 a, Vec2 b) {
    constexpr double eps = 1e-12;
    if (std::abs(cross(a, b, p)) > eps * std::max(1.0, distance(a, b))) return false;
    return p.x >= std::min(a.x, b.x) - eps && p.x <= std::max(a.x, b.x) + eps &&
           p.y >= std::min(a.y, b.y) - eps && p.y <= std::max(a.y, b.y) + eps;
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    const double d1 = cross(q1, q2, p1);
    const double d2 = cross(q1, q2, p2);
    const double d3 = cross(p1, p2, q1);
    const double d4 = cross(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    return on_segment(p1, q1, q2) || on_segment(p2, q1, q2) || on_segment(q1, p1, p2) ||
           on_segment(q2, p1, p2);
}

}  // namespace

bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon) {
    const std::size_t n = polygon.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        if (on_segment(p, polygon[i], polygon[(i + 1) % n])) return true;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = polygon[i];
        const Vec2 b = polygon[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

bool polygon_is_simple(std::span<const Vec2> polygon) {
    const std::size_t n = polygon.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(polygon[i], polygon[(i + 1) % n], polygon[j], polygon[(j + 1) % n])) {
                return false;
            }
        }
    }
    return true;
}

double polyline_length(std::span<const Vec2> polyline) {
    double total = 0.0;
    for (std::size_t i = 1; i < polyline.size(); ++i) total += distance(polyline[i - 1], polyline[i]);
    return total;
}

Vec2 polyline_point(std::span<const Vec2> polyline, double arclength) {
    if (polyline.empty()) throw InputError("polyline_point: empty polyline");
    if (arclength <= 0.0) return polyline.front();
    double walked = 0.0;
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        const double seg = distance(polyline[i - 1], polyline[i]);
        if (walked + seg >= arclength && seg > 0.0) {
            const double f = (arclength - walked) / seg;
            return polyline[i - 1] + (polyline[i] - polyline[i - 1]) * f;
        }
        walked += seg;
    }
    return polyline.back();
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finaliser over a combined word
    std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t hash_string(const std::string& s) {
    // FNV-1a, stable across platforms (std::hash is not)
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace fg
