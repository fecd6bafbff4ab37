#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "factoryguard/grid.hpp"
#include "factoryguard/sensor_types.hpp"
#include "factoryguard/world.hpp"

// Persistent knowledge the robot carries between episodes: facility map,
// thermal baselines per inspection point, and the authorised-personnel gallery.
namespace fg::memory {

inline constexpr int kSchemaVersion = 1;

struct EquipmentRecord {
    std::string id;
    std::string kind;  // "valve" for valve entries
    Vec2 position{};
    friend bool operator==(const EquipmentRecord&, const EquipmentRecord&) = default;
};

struct ValveRecord {
    std::string id;
    std::string pipe_id;
    double arclength = 0.0;
    Vec2 position{};
    friend bool operator==(const ValveRecord&, const ValveRecord&) = default;
};

struct PipeRecord {
    std::string id;
    std::vector<Vec2> polyline;
    double sample_step = 0.1;
    double baseline_temp = 65.0;
    double limit_temp = 110.0;
    friend bool operator==(const PipeRecord&, const PipeRecord&) = default;
};

struct FacilityMapStore {
    OccupancyGrid grid;
    std::map<std::string, EquipmentRecord> equipment;
    std::map<std::string, ValveRecord> valves;
    std::map<std::string, PipeRecord> pipes;
    std::map<std::string, Zone> zones;
    std::map<std::string, InspectionPoint> inspection_points;

    static FacilityMapStore from_world(const FacilityWorld& world);
    void validate() const;
    friend bool operator==(const FacilityMapStore&, const FacilityMapStore&) = default;
};

struct Baseline {
    ThermalImage image;
    double captured_at = 0.0;
    friend bool operator==(const Baseline&, const Baseline&) = default;
};

class BaselineStore {
public:
    BaselineStore() = default;
    BaselineStore(int width, int height) : width_(width), height_(height) {}

    void put(const std::string& inspection_point, Baseline baseline);  // ShapeError on size mismatch
    [[nodiscard]] const Baseline* find(const std::string& inspection_point) const;
    [[nodiscard]] const std::map<std::string, Baseline>& entries() const { return entries_; }
    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }

    friend bool operator==(const BaselineStore&, const BaselineStore&) = default;

private:
    int width_ = 160;
    int height_ = 120;
    std::map<std::string, Baseline> entries_;
};

struct PersonnelRecord {
    std::vector<double> embedding;  // unit norm
    bool authorized = false;
    bool normalized_on_insert = false;
    friend bool operator==(const PersonnelRecord&, const PersonnelRecord&) = default;
};

class PersonnelDB {
public:
    // Normalises non-unit embeddings (flagging the record); rejects duplicate
    // ids, wrong dimension, and zero vectors.
    void insert(const std::string& id, std::vector<double> embedding, bool authorized);
    // Loader path: same checks as insert, but keeps the persisted flag.
    void restore(const std::string& id, std::vector<double> embedding, bool authorized, bool normalized_on_insert);
    [[nodiscard]] const PersonnelRecord* find(const std::string& id) const;
    [[nodiscard]] const std::map<std::string, PersonnelRecord>& entries() const { return entries_; }
    [[nodiscard]] bool empty() const { return entries_.empty(); }

    friend bool operator==(const PersonnelDB&, const PersonnelDB&) = default;

private:
    std::map<std::string, PersonnelRecord> entries_;
};

struct MemoryStores {
    FacilityMapStore map;
    BaselineStore baselines;
    PersonnelDB personnel;
    friend bool operator==(const MemoryStores&, const MemoryStores&) = default;
};

// Equipment and valves within `radius`, nearest first, ties by id.
std::vector<std::pair<std::string, double>> equipment_near(const FacilityMapStore& store, Vec2 point, double radius);

struct ZoneStatus {
    std::optional<std::string> zone;
    bool restricted = false;
    bool within_allowed = true;
    friend bool operator==(const ZoneStatus&, const ZoneStatus&) = default;
};

// Closed polygons. Overlapping zones resolve to the restricted one, then by id.
// Unrestricted zones without windows are always open.
ZoneStatus zone_status(const FacilityMapStore& store, Vec2 point, double time_of_day);

// Captures a noise-free thermal frame at every inspection point of a hazard-free
// copy of `world` (pipes at baseline, no fires, no persons).
BaselineStore capture_baselines(const FacilityWorld& world);

nlohmann::json to_json(const FacilityMapStore& store);
nlohmann::json to_json(const BaselineStore& store);
nlohmann::json to_json(const PersonnelDB& db);
nlohmann::json to_json(const MemoryStores& stores);
FacilityMapStore facility_map_from_json(const nlohmann::json& j);
BaselineStore baselines_from_json(const nlohmann::json& j);
PersonnelDB personnel_from_json(const nlohmann::json& j);
MemoryStores stores_from_json(const nlohmann::json& j);

void save(const MemoryStores& stores, const std::filesystem::path& path);
MemoryStores load(const std::filesystem::path& path);

// Little-endian float64 payload, base64 encoded.
std::string encode_temps(const std::vector<double>& temps);
std::vector<double> decode_temps(const std::string& b64);

}  // namespace fg::memory
