#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "factoryguard/memory.hpp"
#include "factoryguard/perception.hpp"
#include "factoryguard/world.hpp"

namespace fg::understanding {

enum class FireStage { Incipient = 1, Growth = 2, FullyDeveloped = 3, Decay = 4 };

std::string_view to_string(FireStage s);

struct StageThresholds {
    double growth = 0.02;
    double fully_developed = 0.10;
    double decay_rate = -0.001;  // dS/dt below this counts as declining
};

double temp_rate(double t_now, double t_prev, double delta);
double project_temp(double t, double rate, double horizon);

// Totalised: 0 once at/over the limit, none when not heating.
std::optional<double> time_to_critical(double t_limit, double t_current, double rate);

// `peak_stage` is the highest stage seen so far in the episode; Decay requires
// a decline after at least Growth.
FireStage fire_stage(double s_fire, double s_smoke, double ds_dt, double duration,
                     FireStage peak_stage = FireStage::Incipient, const StageThresholds& th = {});

struct TrendEstimate {
    double rate = 0.0;
    double window = 0.0;
    double t_now = 0.0;
    double t_prev = 0.0;
};

TrendEstimate estimate_trend(double t_now, double t_prev, double window);

// Nearest equipment or valve to the profile peak, within radius, ties by id.
std::optional<std::string> root_cause(const perception::ThermalProfile& profile, const Pipe& pipe,
                                      const memory::FacilityMapStore& map, double radius);

}  // namespace fg::understanding
