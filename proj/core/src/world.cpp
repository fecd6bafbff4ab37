#include "factoryguard/world.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "factoryguard/locomotion.hpp"

namespace fg {

std::size_t Pipe::expected_samples() const {
    return static_cast<std::size_t>(std::floor(length() / sample_step + 1e-9)) + 1;
}

double Pipe::temp_at(double arclength) const {
    if (segment_temps.empty()) return baseline_temp;
    const double f = std::clamp(arclength / sample_step, 0.0, static_cast<double>(segment_temps.size() - 1));
    const auto i = static_cast<std::size_t>(std::floor(f));
    if (i + 1 >= segment_temps.size()) return segment_temps.back();
    const double w = f - static_cast<double>(i);
    return segment_temps[i] * (1.0 - w) + segment_temps[i + 1] * w;
}

Vec2 Person::position_at(double t) const {
    if (trajectory.empty()) return {};
    if (t <= trajectory.front().t) return trajectory.front().p;
    for (std::size_t i = 1; i < trajectory.size(); ++i) {
        const auto& a = trajectory[i - 1];
        const auto& b = trajectory[i];
        if (t <= b.t) {
            const double span = b.t - a.t;
            if (span <= 0.0) return b.p;
            return a.p + (b.p - a.p) * ((t - a.t) / span);
        }
    }
    return trajectory.back().p;
}

double FacilityWorld::time_of_day() const {
    constexpr double day = 86400.0;
    double t = std::fmod(time_of_day_origin + clock, day);
    if (t < 0.0) t += day;
    return t;
}

namespace {

template <typename Vec>
auto find_by_id(Vec& items, const std::string& id) -> decltype(&items.front()) {
    for (auto& item : items) {
        if (item.id == id) return &item;
    }
    return nullptr;
}

}  // namespace

const Pipe* FacilityWorld::find_pipe(const std::string& id) const { return find_by_id(pipes, id); }
Pipe* FacilityWorld::find_pipe(const std::string& id) { return find_by_id(pipes, id); }
const Valve* FacilityWorld::find_valve(const std::string& id) const { return find_by_id(valves, id); }
Valve* FacilityWorld::find_valve(const std::string& id) { return find_by_id(valves, id); }
const Zone* FacilityWorld::find_zone(const std::string& id) const { return find_by_id(zones, id); }
FireSource* FacilityWorld::find_fire(const std::string& id) { return find_by_id(fires, id); }
const FireSource* FacilityWorld::find_fire(const std::string& id) const { return find_by_id(fires, id); }
const Equipment* FacilityWorld::find_equipment(const std::string& id) const { return find_by_id(equipment, id); }

Vec2 FacilityWorld::valve_position(const Valve& v) const {
    const Pipe* p = find_pipe(v.pipe_id);
    if (!p) throw InputError("valve '" + v.id + "' references unknown pipe '" + v.pipe_id + "'");
    return p->point_at(v.arclength_pos);
}

bool operator==(const FacilityWorld& a, const FacilityWorld& b) {
    const bool grids_equal = (a.grid == b.grid) || (a.grid && b.grid && *a.grid == *b.grid);
    return grids_equal && a.equipment == b.equipment && a.pipes == b.pipes && a.valves == b.valves &&
           a.zones == b.zones && a.persons == b.persons && a.fires == b.fires && a.faults == b.faults &&
           a.inspection_points == b.inspection_points && a.robot == b.robot && a.clock == b.clock &&
           a.time_of_day_origin == b.time_of_day_origin && a.power_zones == b.power_zones &&
           a.sensors == b.sensors && a.params == b.params;
}

void validate(const FacilityWorld& world) {
    if (!world.grid) throw InputError("world has no occupancy grid");
    if (!(world.grid->cell_size() > 0.0)) throw InputError("grid cell edge must be > 0");
    std::set<std::string> ids;
    auto unique = [&](const std::string& kind, const std::string& id) {
        if (id.empty()) throw InputError(kind + " with empty id");
        if (!ids.insert(kind + ":" + id).second) throw InputError("duplicate " + kind + " id '" + id + "'");
    };
    for (const auto& p : world.pipes) {
        unique("pipe", p.id);
        if (p.polyline.size() < 2) throw InputError("pipe '" + p.id + "' polyline needs at least 2 vertices");
        if (!(p.sample_step > 0.0)) throw InputError("pipe '" + p.id + "' sample step must be > 0");
        if (p.segment_temps.size() != p.expected_samples()) {
            throw InputError("pipe '" + p.id + "' has " + std::to_string(p.segment_temps.size()) +
                             " temperature samples, expected " + std::to_string(p.expected_samples()));
        }
        for (double t : p.segment_temps) {
            if (!std::isfinite(t)) throw InputError("pipe '" + p.id + "' has a non-finite temperature");
        }
    }
    for (const auto& v : world.valves) {
        unique("valve", v.id);
        const Pipe* p = world.find_pipe(v.pipe_id);
        if (!p) throw InputError("valve '" + v.id + "' references unknown pipe '" + v.pipe_id + "'");
        if (v.arclength_pos < 0.0 || v.arclength_pos > p->length() + 1e-9) {
            throw InputError("valve '" + v.id + "' lies outside pipe '" + v.pipe_id + "'");
        }
        if (v.open_fraction < 0.0 || v.open_fraction > 1.0 || v.setpoint_fraction < 0.0 || v.setpoint_fraction > 1.0) {
            throw InputError("valve '" + v.id + "' fractions must lie in [0, 1]");
        }
    }
    for (const auto& z : world.zones) {
        unique("zone", z.id);
        if (!polygon_is_simple(z.polygon)) throw InputError("zone '" + z.id + "' polygon is not simple");
        for (const auto& w : z.allowed_windows) {
            if (!(w.start_s < w.end_s)) throw InputError("zone '" + z.id + "' window start must precede end");
        }
    }
    for (const auto& e : world.equipment) unique("equipment", e.id);
    for (const auto& p : world.persons) {
        unique("person", p.id);
        double n2 = 0.0;
        for (double x : p.true_embedding) n2 += x * x;
        if (p.true_embedding.size() != kEmbeddingDim || std::abs(std::sqrt(n2) - 1.0) > 1e-9) {
            throw InputError("person '" + p.id + "' embedding must be a unit vector of dimension 512");
        }
    }
    for (const auto& f : world.fires) {
        unique("fire", f.id);
        if (f.area_ratio < 0.0 || f.area_ratio > 1.0 || f.smoke_ratio < 0.0 || f.smoke_ratio > 1.0) {
            throw InputError("fire '" + f.id + "' ratios must lie in [0, 1]");
        }
    }
    for (const auto& ip : world.inspection_points) {
        unique("inspection point", ip.id);
        if (!world.find_pipe(ip.pipe_id)) {
            throw InputError("inspection point '" + ip.id + "' references unknown pipe '" + ip.pipe_id + "'");
        }
    }
    for (const auto& f : world.faults) {
        if (!world.find_pipe(f.pipe_id)) {
            throw InputError("thermal fault '" + f.id + "' references unknown pipe '" + f.pipe_id + "'");
        }
        if (!f.valve_id.empty() && !world.find_valve(f.valve_id)) {
            throw InputError("thermal fault '" + f.id + "' references unknown valve '" + f.valve_id + "'");
        }
    }
}

namespace {

bool fault_active(const FacilityWorld& world, const ThermalFault& f) {
    if (!f.valve_id.empty()) {
        const Valve* v = world.find_valve(f.valve_id);
        return v && v->stuck;
    }
    return !f.ends_at || world.clock < *f.ends_at;
}

void advance_fires(FacilityWorld& w, double h) {
    for (auto& f : w.fires) {
        if (f.suppressed_at) {
            const double k = std::exp(-f.decay_rate * h);
            f.area_ratio *= k;
            f.smoke_ratio *= k;
            f.intensity *= k;
        } else if (f.growth_rate != 0.0) {
            const double g = std::exp(f.growth_rate * h);
            f.area_ratio = std::min(f.max_area_ratio, f.area_ratio * g);
            f.smoke_ratio = std::min(1.0, f.smoke_ratio * g);
        }
    }
}

void relax_pipes(FacilityWorld& w, double h) {
    const double heat = std::exp(-h / w.params.thermal_tau_heat);
    const double cool = std::exp(-h / w.params.thermal_tau_recovery);
    for (auto& pipe : w.pipes) {
        const auto target = thermal_target(w, pipe);
        for (std::size_t i = 0; i < pipe.segment_temps.size(); ++i) {
            double& t = pipe.segment_temps[i];
            const double k = target[i] > t ? heat : cool;
            t = target[i] + (t - target[i]) * k;
        }
    }
}

void advance_robot(FacilityWorld& w, double h) {
    const auto& r = w.robot;
    const bool idle = r.command == VelocityCommand{} && r.velocity == VelocityCommand{};
    if (idle) return;
    const int n = std::max(1, static_cast<int>(std::ceil(h / w.params.robot_substep - 1e-9)));
    const double sub = h / n;
    for (int i = 0; i < n; ++i) {
        w.robot = locomotion::execute_velocity(w.robot, w.robot.command, sub, w.robot.gait, w.params.robot_lag);
    }
}

void fire_discharges(FacilityWorld& w) {
    for (auto& f : w.fires) {
        if (f.discharge_at && !f.suppressed_at && w.clock >= *f.discharge_at - 1e-12) {
            f.suppressed_at = *f.discharge_at;
            f.discharge_at.reset();
        }
    }
}

}  // namespace

std::vector<double> thermal_target(const FacilityWorld& world, const Pipe& pipe) {
    std::vector<double> target(pipe.segment_temps.size(), pipe.baseline_temp);
    for (const auto& f : world.faults) {
        if (f.pipe_id != pipe.id || !fault_active(world, f)) continue;
        const double two_s2 = 2.0 * f.width * f.width;
        for (std::size_t i = 0; i < target.size(); ++i) {
            const double d = static_cast<double>(i) * pipe.sample_step - f.arclength;
            target[i] += f.peak_delta * std::exp(-(d * d) / two_s2);
        }
    }
    return target;
}

FacilityWorld step(FacilityWorld world, double dt) {
    if (dt < 0.0 || !std::isfinite(dt)) throw DomainError("step: dt must be finite and >= 0");
    if (dt == 0.0) return world;

    const double t_end = world.clock + dt;
    std::vector<double> breaks;
    for (const auto& f : world.fires) {
        if (f.discharge_at && !f.suppressed_at && *f.discharge_at > world.clock && *f.discharge_at < t_end) {
            breaks.push_back(*f.discharge_at);
        }
    }
    for (const auto& f : world.faults) {
        if (f.ends_at && *f.ends_at > world.clock && *f.ends_at < t_end) breaks.push_back(*f.ends_at);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.push_back(t_end);

    fire_discharges(world);
    for (double next : breaks) {
        const double h = next - world.clock;
        if (h <= 0.0) continue;
        advance_fires(world, h);
        relax_pipes(world, h);
        advance_robot(world, h);
        world.clock = next;
        fire_discharges(world);
    }
    return world;
}

FacilityWorld apply_actuation(FacilityWorld world, const ActuationCommand& cmd) {
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ValveReset>) {
                Valve* v = world.find_valve(c.valve_id);
                if (!v) throw CommandRejected(c.valve_id);
                v->open_fraction = v->setpoint_fraction;
                v->stuck = false;
            } else if constexpr (std::is_same_v<T, FireSuppression>) {
                FireSource* f = world.find_fire(c.fire_id);
                if (!f) throw CommandRejected(c.fire_id);
                if (f->suppressed_at) return;
                if (c.arm_only) {
                    if (!f->discharge_at) f->discharge_at = world.clock + world.params.pre_discharge_delay;
                    fire_discharges(world);
                } else {
                    f->suppressed_at = world.clock;
                    f->discharge_at.reset();
                }
            } else if constexpr (std::is_same_v<T, PowerIsolation>) {
                const bool known = world.find_zone(c.zone_id) || world.power_zones.contains(c.zone_id);
                if (!known) throw CommandRejected(c.zone_id);
                world.power_zones[c.zone_id] = false;
            } else if constexpr (std::is_same_v<T, SetVelocity>) {
                world.robot.command = c.cmd;
            }
        },
        cmd);
    return world;
}

std::vector<double> random_unit_embedding(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> e(kEmbeddingDim);
    double n2 = 0.0;
    for (auto& x : e) {
        x = n(rng);
        n2 += x * x;
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& x : e) x *= inv;
    return e;
}

}  // namespace fg
