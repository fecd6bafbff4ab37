#include "factoryguard/understanding.hpp"

#include <cmath>

namespace fg::understanding {

std::string_view to_string(FireStage s) {
    switch (s) {
    case FireStage::Incipient: return "incipient";
    case FireStage::Growth: return "growth";
    case FireStage::FullyDeveloped: return "fully_developed";
    case FireStage::Decay: return "decay";
    }
    return "incipient";
}

double temp_rate(double t_now, double t_prev, double delta) {
    if (!(delta > 0.0)) throw DomainError("temp_rate: window must be positive");
    return (t_now - t_prev) / delta;
}

double project_temp(double t, double rate, double horizon) {
    if (horizon < 0.0) throw DomainError("project_temp: horizon must be non-negative");
    return t + rate * horizon;
}

std::optional<double> time_to_critical(double t_limit, double t_current, double rate) {
    if (t_current >= t_limit) return 0.0;
    if (!(rate > 0.0)) return std::nullopt;
    return (t_limit - t_current) / rate;
}

FireStage fire_stage(double s_fire, double s_smoke, double ds_dt, double duration, FireStage peak_stage,
                     const StageThresholds& th) {
    if (!(s_fire >= 0.0 && s_fire <= 1.0) || !(s_smoke >= 0.0 && s_smoke <= 1.0)) {
        throw DomainError("fire_stage: scores must lie in [0, 1]");
    }
    if (ds_dt < th.decay_rate && duration > 0.0 && peak_stage >= FireStage::Growth) return FireStage::Decay;
    if (s_fire >= th.fully_developed) return FireStage::FullyDeveloped;
    if (s_fire >= th.growth) return FireStage::Growth;
    return FireStage::Incipient;
}

TrendEstimate estimate_trend(double t_now, double t_prev, double window) {
    return {temp_rate(t_now, t_prev, window), window, t_now, t_prev};
}

std::optional<std::string> root_cause(const perception::ThermalProfile& profile, const Pipe& pipe,
                                      const memory::FacilityMapStore& map, double radius) {
    if (!(radius > 0.0)) throw DomainError("root_cause: radius must be positive");
    if (profile.temps.empty()) return std::nullopt;
    const Vec2 peak = pipe.point_at(profile.peak_position());
    const auto near = memory::equipment_near(map, peak, radius);
    if (near.empty()) return std::nullopt;
    return near.front().first;
}

}  // namespace fg::understanding
