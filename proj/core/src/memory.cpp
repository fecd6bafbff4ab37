#include "factoryguard/memory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/dataflow_exception.hpp>
#include <boost/archive/iterators/transform_width.hpp>

#include "factoryguard/sensors.hpp"
#include "json_util.hpp"

namespace fg::memory {

using nlohmann::json;
using namespace fg::detail;

namespace {

std::string encode_bytes(const std::vector<unsigned char>& bytes) {
    namespace it = boost::archive::iterators;
    using Enc = it::base64_from_binary<it::transform_width<std::vector<unsigned char>::const_iterator, 6, 8>>;
    std::string out(Enc(bytes.begin()), Enc(bytes.end()));
    out.append((3 - bytes.size() % 3) % 3, '=');
    return out;
}

std::vector<unsigned char> decode_bytes(const std::string& b64, const std::string& field) {
    namespace it = boost::archive::iterators;
    using Dec = it::transform_width<it::binary_from_base64<std::string::const_iterator>, 8, 6>;
    if (b64.size() % 4 != 0) throw SchemaError(field, "base64 payload length is not a multiple of 4");
    std::string body = b64;
    std::size_t pad = 0;
    for (auto it = body.rbegin(); it != body.rend() && *it == '=' && pad < 2; ++it, ++pad) *it = 'A';
    std::vector<unsigned char> out;
    try {
        for (Dec d(body.cbegin()), e(body.cend()); d != e; ++d) out.push_back(static_cast<unsigned char>(*d));
    } catch (const it::dataflow_exception&) {
        throw SchemaError(field, "invalid base64 payload");
    }
    out.resize(out.size() - std::min(pad, out.size()));
    return out;
}

json grid_json(const OccupancyGrid& g) {
    const auto& cells = g.cells();
    return {{"width", g.width()},
            {"height", g.height()},
            {"cell_size", g.cell_size()},
            {"origin", vec2_json(g.origin())},
            {"cells", encode_bytes({cells.begin(), cells.end()})}};
}

OccupancyGrid grid_from(const json& j, const std::string& path) {
    OccupancyGrid g;
    try {
        g = OccupancyGrid(get<int>(j, "width", path), get<int>(j, "height", path), get<double>(j, "cell_size", path),
                          as_vec2(require(j, "origin", path), join_path(path, "origin")));
    } catch (const InputError& e) {
        throw SchemaError(path, e.what());
    }
    const auto bytes = decode_bytes(get<std::string>(j, "cells", path), join_path(path, "cells"));
    if (bytes.size() != g.size()) throw SchemaError(join_path(path, "cells"), "cell count does not match dimensions");
    for (std::size_t i = 0; i < bytes.size(); ++i) g.set_blocked(g.cell_at(i), bytes[i] != 0);
    return g;
}

json zone_json(const Zone& z) {
    json windows = json::array();
    for (const auto& w : z.allowed_windows) windows.push_back({w.start_s, w.end_s});
    return {{"polygon", points_json(z.polygon)}, {"restricted", z.restricted}, {"allowed_windows", windows}};
}

Zone zone_from(const std::string& id, const json& j, const std::string& path) {
    Zone z;
    z.id = id;
    z.polygon = as_points(require(j, "polygon", path), join_path(path, "polygon"));
    z.restricted = get<bool>(j, "restricted", path);
    const json& ws = require_array(j, "allowed_windows", path);
    for (std::size_t i = 0; i < ws.size(); ++i) {
        const Vec2 w = as_vec2(ws[i], index_path(join_path(path, "allowed_windows"), i));
        z.allowed_windows.push_back({w.x, w.y});
    }
    return z;
}

const json& object_at(const json& j, std::string_view key, const std::string& path) {
    const json& o = require(j, key, path);
    if (!o.is_object()) throw SchemaError(join_path(path, key), "expected an object");
    return o;
}

}  // namespace

std::string encode_temps(const std::vector<double>& temps) {
    std::vector<unsigned char> bytes;
    bytes.reserve(temps.size() * 8);
    for (double t : temps) {
        const auto bits = std::bit_cast<std::uint64_t>(t);
        for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<unsigned char>((bits >> (8 * b)) & 0xffu));
    }
    return encode_bytes(bytes);
}

std::vector<double> decode_temps(const std::string& b64) {
    const auto bytes = decode_bytes(b64, "temps");
    if (bytes.size() % 8 != 0) throw SchemaError("temps", "payload is not a whole number of float64 values");
    std::vector<double> out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
        out[i] = std::bit_cast<double>(bits);
    }
    return out;
}

FacilityMapStore FacilityMapStore::from_world(const FacilityWorld& world) {
    FacilityMapStore s;
    if (world.grid) s.grid = *world.grid;
    for (const auto& e : world.equipment) s.equipment[e.id] = {e.id, e.kind, e.position};
    for (const auto& v : world.valves) s.valves[v.id] = {v.id, v.pipe_id, v.arclength_pos, world.valve_position(v)};
    for (const auto& p : world.pipes) {
        s.pipes[p.id] = {p.id, p.polyline, p.sample_step, p.baseline_temp, p.limit_temp};
    }
    for (const auto& z : world.zones) s.zones[z.id] = z;
    for (const auto& ip : world.inspection_points) s.inspection_points[ip.id] = ip;
    return s;
}

void FacilityMapStore::validate() const {
    for (const auto& [id, v] : valves) {
        if (equipment.contains(id)) throw SchemaError("valves." + id, "id collides with an equipment id");
        if (!pipes.contains(v.pipe_id)) throw SchemaError("valves." + id + ".pipe_id", "unknown pipe '" + v.pipe_id + "'");
    }
    for (const auto& [id, ip] : inspection_points) {
        if (!pipes.contains(ip.pipe_id)) {
            throw SchemaError("inspection_points." + id + ".pipe_id", "unknown pipe '" + ip.pipe_id + "'");
        }
    }
    for (const auto& [id, p] : pipes) {
        if (p.polyline.size() < 2) throw SchemaError("pipes." + id + ".polyline", "needs at least 2 vertices");
    }
}

void BaselineStore::put(const std::string& inspection_point, Baseline baseline) {
    if (baseline.image.width() != width_ || baseline.image.height() != height_) {
        throw ShapeError("baseline for '" + inspection_point + "' is " + std::to_string(baseline.image.width()) + "x" +
                         std::to_string(baseline.image.height()) + ", store expects " + std::to_string(width_) + "x" +
                         std::to_string(height_));
    }
    entries_[inspection_point] = std::move(baseline);
}

const Baseline* BaselineStore::find(const std::string& inspection_point) const {
    auto it = entries_.find(inspection_point);
    return it == entries_.end() ? nullptr : &it->second;
}

void PersonnelDB::insert(const std::string& id, std::vector<double> embedding, bool authorized) {
    if (id.empty()) throw InputError("personnel id must not be empty");
    if (entries_.contains(id)) throw InputError("duplicate personnel id '" + id + "'");
    if (embedding.size() != static_cast<std::size_t>(kEmbeddingDim)) {
        throw ShapeError("personnel embedding for '" + id + "' must have dimension 512");
    }
    double n2 = 0.0;
    for (double x : embedding) {
        if (!std::isfinite(x)) throw DomainError("personnel embedding for '" + id + "' is not finite");
        n2 += x * x;
    }
    if (!(n2 > 0.0)) throw DomainError("personnel embedding for '" + id + "' has zero norm");
    PersonnelRecord rec;
    rec.authorized = authorized;
    const double norm = std::sqrt(n2);
    if (std::abs(norm - 1.0) > 1e-9) {
        for (auto& x : embedding) x /= norm;
        rec.normalized_on_insert = true;
    }
    rec.embedding = std::move(embedding);
    entries_.emplace(id, std::move(rec));
}

void PersonnelDB::restore(const std::string& id, std::vector<double> embedding, bool authorized,
                          bool normalized_on_insert) {
    insert(id, std::move(embedding), authorized);
    entries_[id].normalized_on_insert = normalized_on_insert;
}

const PersonnelRecord* PersonnelDB::find(const std::string& id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::pair<std::string, double>> equipment_near(const FacilityMapStore& store, Vec2 point, double radius) {
    if (!(radius > 0.0)) throw DomainError("equipment_near: radius must be positive");
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [id, e] : store.equipment) {
        const double d = distance(point, e.position);
        if (d <= radius) out.emplace_back(id, d);
    }
    for (const auto& [id, v] : store.valves) {
        const double d = distance(point, v.position);
        if (d <= radius) out.emplace_back(id, d);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    return out;
}

ZoneStatus zone_status(const FacilityMapStore& store, Vec2 point, double time_of_day) {
    const Zone* hit = nullptr;
    for (const auto& [id, z] : store.zones) {
        if (!point_in_polygon(point, z.polygon)) continue;
        if (!hit || (z.restricted && !hit->restricted)) hit = &z;
    }
    if (!hit) return {};
    ZoneStatus st;
    st.zone = hit->id;
    st.restricted = hit->restricted;
    if (hit->allowed_windows.empty()) {
        st.within_allowed = !hit->restricted;
    } else {
        st.within_allowed = std::any_of(hit->allowed_windows.begin(), hit->allowed_windows.end(),
                                        [&](const TimeWindow& w) { return time_of_day >= w.start_s && time_of_day < w.end_s; });
    }
    return st;
}

BaselineStore capture_baselines(const FacilityWorld& world) {
    FacilityWorld clean = world;
    clean.fires.clear();
    clean.persons.clear();
    clean.faults.clear();
    for (auto& p : clean.pipes) p.segment_temps.assign(p.expected_samples(), p.baseline_temp);
    BaselineStore store(world.sensors.thermal_width, world.sensors.thermal_height);
    for (const auto& ip : clean.inspection_points) store.put(ip.id, {render_thermal(clean, ip.pose), world.clock});
    return store;
}

json to_json(const FacilityMapStore& s) {
    json eq = json::object();
    for (const auto& [id, e] : s.equipment) eq[id] = {{"kind", e.kind}, {"position", vec2_json(e.position)}};
    json valves = json::object();
    for (const auto& [id, v] : s.valves) {
        valves[id] = {{"pipe_id", v.pipe_id}, {"arclength", v.arclength}, {"position", vec2_json(v.position)}};
    }
    json pipes = json::object();
    for (const auto& [id, p] : s.pipes) {
        pipes[id] = {{"polyline", points_json(p.polyline)},
                     {"sample_step", p.sample_step},
                     {"baseline_temp", p.baseline_temp},
                     {"limit_temp", p.limit_temp}};
    }
    json zones = json::object();
    for (const auto& [id, z] : s.zones) zones[id] = zone_json(z);
    json ips = json::object();
    for (const auto& [id, ip] : s.inspection_points) {
        ips[id] = {{"pose", {ip.pose.x, ip.pose.y, ip.pose.theta}}, {"pipe_id", ip.pipe_id}};
    }
    return {{"grid", grid_json(s.grid)}, {"equipment", eq},     {"valves", valves},
            {"pipes", pipes},            {"zones", zones},       {"inspection_points", ips}};
}

FacilityMapStore facility_map_from_json(const json& j) {
    const std::string root = "facility";
    FacilityMapStore s;
    s.grid = grid_from(object_at(j, "grid", root), "facility.grid");
    for (const auto& [id, e] : object_at(j, "equipment", root).items()) {
        const std::string p = "facility.equipment." + id;
        s.equipment[id] = {id, get<std::string>(e, "kind", p), as_vec2(require(e, "position", p), p + ".position")};
    }
    for (const auto& [id, v] : object_at(j, "valves", root).items()) {
        const std::string p = "facility.valves." + id;
        s.valves[id] = {id, get<std::string>(v, "pipe_id", p), get<double>(v, "arclength", p),
                        as_vec2(require(v, "position", p), p + ".position")};
    }
    for (const auto& [id, v] : object_at(j, "pipes", root).items()) {
        const std::string p = "facility.pipes." + id;
        s.pipes[id] = {id, as_points(require(v, "polyline", p), p + ".polyline"), get<double>(v, "sample_step", p),
                       get<double>(v, "baseline_temp", p), get<double>(v, "limit_temp", p)};
    }
    for (const auto& [id, z] : object_at(j, "zones", root).items()) s.zones[id] = zone_from(id, z, "facility.zones." + id);
    for (const auto& [id, v] : object_at(j, "inspection_points", root).items()) {
        const std::string p = "facility.inspection_points." + id;
        const json& pose = require(v, "pose", p);
        if (!pose.is_array() || pose.size() != 3) throw SchemaError(p + ".pose", "expected [x, y, theta]");
        s.inspection_points[id] = {id,
                                   {as<double>(pose[0], p + ".pose[0]"), as<double>(pose[1], p + ".pose[1]"),
                                    as<double>(pose[2], p + ".pose[2]")},
                                   get<std::string>(v, "pipe_id", p)};
    }
    s.validate();
    return s;
}

json to_json(const BaselineStore& s) {
    json entries = json::object();
    for (const auto& [id, b] : s.entries()) {
        entries[id] = {{"captured_at", b.captured_at}, {"temps", encode_temps(b.image.temps())}};
    }
    return {{"width", s.width()}, {"height", s.height()}, {"encoding", "base64-f64le"}, {"entries", entries}};
}

BaselineStore baselines_from_json(const json& j) {
    const std::string root = "baselines";
    const int w = get<int>(j, "width", root);
    const int h = get<int>(j, "height", root);
    if (w <= 0 || h <= 0) throw SchemaError("baselines.width", "dimensions must be positive");
    if (get<std::string>(j, "encoding", root) != "base64-f64le") {
        throw SchemaError("baselines.encoding", "unsupported encoding");
    }
    BaselineStore s(w, h);
    for (const auto& [id, e] : object_at(j, "entries", root).items()) {
        const std::string p = "baselines.entries." + id;
        std::vector<double> temps;
        try {
            temps = decode_temps(get<std::string>(e, "temps", p));
        } catch (const SchemaError& err) {
            throw SchemaError(p + ".temps", err.what());
        }
        if (temps.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
            throw SchemaError(p + ".temps", "payload size does not match store dimensions");
        }
        s.put(id, {ThermalImage(w, h, std::move(temps)), get<double>(e, "captured_at", p)});
    }
    return s;
}

json to_json(const PersonnelDB& db) {
    json entries = json::object();
    for (const auto& [id, r] : db.entries()) {
        entries[id] = {{"authorized", r.authorized},
                       {"normalized_on_insert", r.normalized_on_insert},
                       {"embedding", encode_temps(r.embedding)}};
    }
    return {{"dimension", kEmbeddingDim}, {"encoding", "base64-f64le"}, {"entries", entries}};
}

PersonnelDB personnel_from_json(const json& j) {
    const std::string root = "personnel";
    if (get<int>(j, "dimension", root) != kEmbeddingDim) throw SchemaError("personnel.dimension", "must be 512");
    if (get<std::string>(j, "encoding", root) != "base64-f64le") {
        throw SchemaError("personnel.encoding", "unsupported encoding");
    }
    PersonnelDB db;
    for (const auto& [id, e] : object_at(j, "entries", root).items()) {
        const std::string p = "personnel.entries." + id;
        std::vector<double> emb;
        try {
            emb = decode_temps(get<std::string>(e, "embedding", p));
        } catch (const SchemaError& err) {
            throw SchemaError(p + ".embedding", err.what());
        }
        const bool authorized = get<bool>(e, "authorized", p);
        const bool flagged = get<bool>(e, "normalized_on_insert", p);
        try {
            db.restore(id, std::move(emb), authorized, flagged);
        } catch (const SchemaError&) {
            throw;
        } catch (const Error& err) {
            throw SchemaError(p + ".embedding", err.what());
        }
    }
    return db;
}

json to_json(const MemoryStores& s) {
    return {{"schema", "factoryguard.memory"},
            {"version", kSchemaVersion},
            {"facility", to_json(s.map)},
            {"baselines", to_json(s.baselines)},
            {"personnel", to_json(s.personnel)}};
}

MemoryStores stores_from_json(const json& j) {
    if (get<std::string>(j, "schema", "") != "factoryguard.memory") throw SchemaError("schema", "not a memory store");
    if (get<int>(j, "version", "") != kSchemaVersion) throw SchemaError("version", "unsupported schema version");
    return {facility_map_from_json(object_at(j, "facility", "")), baselines_from_json(object_at(j, "baselines", "")),
            personnel_from_json(object_at(j, "personnel", ""))};
}

void save(const MemoryStores& stores, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
    out << to_json(stores).dump(1) << '\n';
    if (!out) throw InputError("failed writing '" + path.string() + "'");
}

MemoryStores load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("<document>", std::string("unreadable JSON: ") + e.what());
    }
    return stores_from_json(j);
}

}  // namespace fg::memory
