#pragma once

// Schema-checked accessors shared by the scenario and memory readers. Every
// failure names the JSON path of the offending field.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "factoryguard/errors.hpp"
#include "factoryguard/geometry.hpp"

namespace fg::detail {

using nlohmann::json;

inline std::string join_path(const std::string& base, std::string_view key) {
    return base.empty() ? std::string(key) : base + "." + std::string(key);
}

inline std::string index_path(const std::string& base, std::size_t i) {
    return base + "[" + std::to_string(i) + "]";
}

inline const json& require(const json& j, std::string_view key, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(join_path(path, key), "missing required field");
    return *it;
}

inline const json* optional_field(const json& j, std::string_view key, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

template <typename T>
T as(const json& j, const std::string& path) {
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw SchemaError(path, std::string("wrong type: ") + e.what());
    }
}

template <typename T>
T get(const json& j, std::string_view key, const std::string& path) {
    return as<T>(require(j, key, path), join_path(path, key));
}

template <typename T>
T get_or(const json& j, std::string_view key, const std::string& path, T fallback) {
    const json* f = optional_field(j, key, path);
    return f ? as<T>(*f, join_path(path, key)) : fallback;
}

template <typename T>
std::optional<T> get_opt(const json& j, std::string_view key, const std::string& path) {
    const json* f = optional_field(j, key, path);
    if (!f) return std::nullopt;
    return as<T>(*f, join_path(path, key));
}

inline const json& require_array(const json& j, std::string_view key, const std::string& path) {
    const json& a = require(j, key, path);
    if (!a.is_array()) throw SchemaError(join_path(path, key), "expected an array");
    return a;
}

inline Vec2 as_vec2(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) throw SchemaError(path, "expected [x, y]");
    return {as<double>(j[0], index_path(path, 0)), as<double>(j[1], index_path(path, 1))};
}

inline json vec2_json(Vec2 v) { return json::array({v.x, v.y}); }

inline std::vector<Vec2> as_points(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array of points");
    std::vector<Vec2> pts;
    for (std::size_t i = 0; i < j.size(); ++i) pts.push_back(as_vec2(j[i], index_path(path, i)));
    return pts;
}

inline json points_json(const std::vector<Vec2>& pts) {
    json a = json::array();
    for (Vec2 p : pts) a.push_back(vec2_json(p));
    return a;
}

}  // namespace fg::detail
