#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "factoryguard/errors.hpp"
#include "factoryguard/memory.hpp"
#include "factoryguard/scenario.hpp"
#include "factoryguard/sensors.hpp"

using namespace fg;
using namespace fg::memory;
namespace fs = std::filesystem;

namespace {

Scenario facility() { return load_scenario(std::string(FG_SCENARIO_DIR) + "/intruder.scn"); }

MemoryStores stores_of(const Scenario& sc) {
    return {FacilityMapStore::from_world(sc.world), capture_baselines(sc.world), sc.personnel};
}

fs::path tmp(const std::string& name) {
    fs::create_directories(FG_TEST_TMP);
    return fs::path(FG_TEST_TMP) / name;
}

double hours(double h) { return h * 3600.0; }

}  // namespace

TEST_CASE("equipment_near") {
    CHECK(equipment_near(FacilityMapStore{}, {0, 0}, 1.0).empty());
    CHECK_THROWS_AS(equipment_near(FacilityMapStore{}, {0, 0}, 0.0), DomainError);

    const auto map = FacilityMapStore::from_world(facility().world);
    const Vec2 valve = map.valves.at("PV-C-15-M").position;
    const auto near = equipment_near(map, {valve.x + 0.2, valve.y}, 0.5);
    REQUIRE_FALSE(near.empty());
    CHECK(near.front().first == "PV-C-15-M");
    CHECK(near.front().second == doctest::Approx(0.2));

    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 30; ++trial) {
        FacilityMapStore s;
        std::vector<std::pair<std::string, Vec2>> items;
        for (int i = 0; i < 20; ++i) {
            const std::string id = "E" + std::to_string(i);
            const Vec2 p{std::round(u(rng)), std::round(u(rng))};
            items.emplace_back(id, p);
            if (i % 3 == 0) {
                s.valves[id] = {id, "P", 0.0, p};
            } else {
                s.equipment[id] = {id, "pump", p};
            }
        }
        const Vec2 q{u(rng), u(rng)};
        const double r = 1.0 + u(rng) / 2.0;
        std::vector<std::pair<std::string, double>> want;
        for (const auto& [id, p] : items) {
            const double d = distance(p, q);
            if (d <= r) want.emplace_back(id, d);
        }
        std::sort(want.begin(), want.end(), [](const auto& a, const auto& b) {
            return a.second < b.second || (a.second == b.second && a.first < b.first);
        });
        CHECK(equipment_near(s, q, r) == want);
    }
}

TEST_CASE("zone status") {
    const auto map = FacilityMapStore::from_world(facility().world);
    CHECK(zone_status(map, {14.0, 15.0}, hours(3)) == ZoneStatus{std::nullopt, false, true});

    const auto night = zone_status(map, {19.0, 5.0}, hours(2.5));
    CHECK(night.zone == "CHEM-A");
    CHECK(night.restricted);
    CHECK_FALSE(night.within_allowed);
    CHECK(zone_status(map, {19.0, 5.0}, hours(10)).within_allowed);
    CHECK_FALSE(zone_status(map, {19.0, 5.0}, hours(22)).within_allowed);
    CHECK(zone_status(map, {19.0, 5.0}, hours(6)).within_allowed);

    // Closed boundary.
    CHECK(zone_status(map, {16.0, 5.0}, hours(2.5)).zone == "CHEM-A");
    CHECK(zone_status(map, {22.0, 8.0}, hours(2.5)).zone == "CHEM-A");

    // Unrestricted zone without windows is always allowed.
    const auto bay = zone_status(map, {5.0, 5.0}, hours(2.5));
    CHECK(bay.zone == "CNC-B");
    CHECK_FALSE(bay.restricted);
    CHECK(bay.within_allowed);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> x(-5.0, 30.0), t(0.0, 86400.0);
    for (int i = 0; i < 500; ++i) {
        const Vec2 p{x(rng), x(rng)};
        const double tod = t(rng);
        CHECK(zone_status(map, p, tod) == zone_status(map, p, tod));
    }
}

TEST_CASE("personnel database normalises and rejects bad input") {
    PersonnelDB db;
    auto e = random_unit_embedding(5);
    db.insert("A", e, true);
    CHECK_FALSE(db.find("A")->normalized_on_insert);
    for (auto& v : e) v *= 3.0;
    db.insert("B", e, false);
    const auto* b = db.find("B");
    CHECK(b->normalized_on_insert);
    double n2 = 0.0;
    for (double v : b->embedding) n2 += v * v;
    CHECK(n2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(db.insert("A", random_unit_embedding(6), true), InputError);
    CHECK_THROWS_AS(db.insert("C", std::vector<double>(10, 1.0), true), ShapeError);
    CHECK_THROWS_AS(db.insert("D", std::vector<double>(kEmbeddingDim, 0.0), true), DomainError);
}

TEST_CASE("baseline store enforces the configured resolution") {
    BaselineStore s(160, 120);
    CHECK_NOTHROW(s.put("IP", {ThermalImage(160, 120, 25.0), 0.0}));
    CHECK_THROWS_AS(s.put("IP2", {ThermalImage(80, 60, 25.0), 0.0}), ShapeError);
    CHECK(s.find("IP") != nullptr);
    CHECK(s.find("nope") == nullptr);
}

TEST_CASE("memory stores round-trip through a file") {
    const auto sc = facility();
    const auto stores = stores_of(sc);
    CHECK(stores.baselines.entries().size() == 2);
    const auto path = tmp("stores.json");
    save(stores, path);
    CHECK(load(path) == stores);
    CHECK(stores_from_json(to_json(stores)) == stores);
    CHECK(facility_map_from_json(to_json(stores.map)) == stores.map);
    CHECK(personnel_from_json(to_json(stores.personnel)) == stores.personnel);
    CHECK(baselines_from_json(to_json(stores.baselines)) == stores.baselines);
}

TEST_CASE("a 160x120 baseline round-trips bit-exact") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-40.0, 400.0);
    std::vector<double> temps(160 * 120);
    for (auto& t : temps) t = u(rng);
    temps[0] = -0.0;
    temps[1] = 1e-300;
    MemoryStores s;
    s.map = stores_of(facility()).map;
    s.baselines.put("IP-X", {ThermalImage(160, 120, temps), 12.5});
    const auto path = tmp("baseline.json");
    save(s, path);
    const auto back = load(path);
    const auto& got = back.baselines.find("IP-X")->image.temps();
    REQUIRE(got.size() == temps.size());
    CHECK(std::memcmp(got.data(), temps.data(), temps.size() * sizeof(double)) == 0);
    CHECK(back.baselines.find("IP-X")->captured_at == 12.5);
}

TEST_CASE("temperature payload encoding") {
    const std::vector<double> t{65.0, 125.8, -3.25};
    CHECK(decode_temps(encode_temps(t)) == t);
    CHECK(decode_temps(encode_temps({})).empty());
    CHECK_THROWS_AS(decode_temps("abc"), SchemaError);
    CHECK_THROWS_AS(decode_temps("AAAA"), SchemaError);  // 3 bytes, not a whole float64
}

TEST_CASE("damaged store files are schema errors") {
    const auto stores = stores_of(facility());
    const auto path = tmp("truncated.json");
    save(stores, path);
    std::string text;
    {
        std::ifstream in(path);
        text.assign(std::istreambuf_iterator<char>(in), {});
    }
    {
        std::ofstream out(path, std::ios::trunc);
        out << text.substr(0, text.size() / 2);
    }
    CHECK_THROWS_AS(load(path), SchemaError);
    CHECK_THROWS_AS(load(tmp("missing.json")), InputError);

    auto j = to_json(stores);
    j["version"] = 99;
    CHECK_THROWS_AS(stores_from_json(j), SchemaError);
    j = to_json(stores);
    j["personnel"]["dimension"] = 3;
    CHECK_THROWS_AS(stores_from_json(j), SchemaError);
    j = to_json(stores);
    j["facility"]["valves"]["PV-C-15-M"]["pipe_id"] = "PP-404";
    try {
        (void)stores_from_json(j);
        FAIL("expected a schema error");
    } catch (const SchemaError& e) {
        CHECK(e.field().find("PV-C-15-M") != std::string::npos);
    }
}
