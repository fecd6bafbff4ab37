#include "factoryguard/mppi.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fg::planning {

void MppiParams::validate() const {
    if (horizon < 1 || samples < 1) throw DomainError("MPPI horizon and sample count must be >= 1");
    if (!(dt > 0.0)) throw DomainError("MPPI dt must be > 0");
    if (!(lambda > 0.0)) throw DomainError("MPPI temperature must be > 0");
    for (double s : noise_std) {
        if (!(s >= 0.0)) throw DomainError("MPPI noise std must be >= 0");
    }
    if (!(noise_correlation >= 0.0 && noise_correlation <= 1.0)) throw DomainError("MPPI noise correlation outside [0, 1]");
}

std::vector<Pose2> rollout(const Pose2& start, const ControlSeq& controls, double dt) {
    if (!(dt > 0.0)) throw DomainError("rollout: dt must be > 0");
    std::vector<Pose2> traj;
    traj.reserve(controls.size() + 1);
    traj.push_back(start);
    Pose2 p = start;
    for (const auto& u : controls) {
        const double c = std::cos(p.theta);
        const double s = std::sin(p.theta);
        p.x += (u.vx * c - u.vy * s) * dt;
        p.y += (u.vx * s + u.vy * c) * dt;
        p.theta += u.omega * dt;
        traj.push_back(p);
    }
    return traj;
}

VelocityCommand clamp_command(const VelocityCommand& cmd, const MppiParams& params) {
    VelocityCommand out = cmd;
    const double limit = gait_speed_limit(params.gait);
    const double speed = cmd.speed();
    if (speed > limit) {
        out.vx = cmd.vx * (limit / speed);
        out.vy = cmd.vy * (limit / speed);
    }
    out.omega = std::clamp(cmd.omega, -params.max_omega, params.max_omega);
    return out;
}

CostFn waypoint_cost(const OccupancyGrid* grid, Vec2 waypoint, const MppiParams& params) {
    return [grid, waypoint, w_goal = params.w_goal, w_obs = params.w_obstacle, w_eff = params.w_effort,
            dt = params.dt](const std::vector<Pose2>& traj, const ControlSeq& u) {
        double cost = w_goal * distance(traj.back().position(), waypoint);
        if (grid) {
            for (std::size_t i = 1; i < traj.size(); ++i) {
                if (grid->blocked(grid->to_cell(traj[i].position()))) cost += w_obs;
            }
        }
        for (const auto& c : u) cost += w_eff * (c.vx * c.vx + c.vy * c.vy + c.omega * c.omega) * dt;
        return cost;
    };
}

MppiResult mppi_step(const Pose2& state, const ControlSeq& nominal, const CostFn& cost, const MppiParams& params,
                     std::uint64_t seed) {
    params.validate();
    const auto H = static_cast<std::size_t>(params.horizon);
    const auto K = static_cast<std::size_t>(params.samples);

    ControlSeq nom(H);
    for (std::size_t t = 0; t < H && t < nominal.size(); ++t) nom[t] = nominal[t];

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double beta = params.noise_correlation;
    const double alpha = std::sqrt(1.0 - beta * beta);

    // Sample 0 is the unperturbed nominal.
    std::vector<ControlSeq> eps(K, ControlSeq(H));
    std::vector<double> costs(K);
    ControlSeq u(H);
    for (std::size_t k = 0; k < K; ++k) {
        std::array<double, 3> common{};
        if (k > 0) {
            for (auto& c : common) c = gauss(rng);
        }
        for (std::size_t t = 0; t < H; ++t) {
            VelocityCommand e;
            if (k > 0) {
                const double n0 = gauss(rng), n1 = gauss(rng), n2 = gauss(rng);
                e.vx = params.noise_std[0] * (beta * common[0] + alpha * n0);
                e.vy = params.noise_std[1] * (beta * common[1] + alpha * n1);
                e.omega = params.noise_std[2] * (beta * common[2] + alpha * n2);
            }
            const VelocityCommand raw{nom[t].vx + e.vx, nom[t].vy + e.vy, nom[t].omega + e.omega};
            u[t] = k > 0 ? clamp_command(raw, params) : nom[t];
            eps[k][t] = {u[t].vx - nom[t].vx, u[t].vy - nom[t].vy, u[t].omega - nom[t].omega};
        }
        costs[k] = cost(rollout(state, u, params.dt), u);
    }

    const double min_cost = *std::min_element(costs.begin(), costs.end());
    std::vector<double> w(K);
    double wsum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        w[k] = std::exp(-(costs[k] - min_cost) / params.lambda);
        wsum += w[k];
    }

    MppiResult res;
    res.nominal_cost = costs[0];
    res.min_sample_cost = min_cost;
    res.nominal.resize(H);
    for (std::size_t t = 0; t < H; ++t) {
        double dx = 0.0, dy = 0.0, dw = 0.0;
        for (std::size_t k = 1; k < K; ++k) {
            dx += w[k] * eps[k][t].vx;
            dy += w[k] * eps[k][t].vy;
            dw += w[k] * eps[k][t].omega;
        }
        const VelocityCommand upd{nom[t].vx + dx / wsum, nom[t].vy + dy / wsum, nom[t].omega + dw / wsum};
        res.nominal[t] = upd == nom[t] ? nom[t] : clamp_command(upd, params);
    }
    res.updated_cost = cost(rollout(state, res.nominal, params.dt), res.nominal);
    res.command = clamp_command(res.nominal.front(), params);
    return res;
}

ControlSeq shift_nominal(const ControlSeq& seq) {
    if (seq.empty()) return seq;
    ControlSeq out(seq.begin() + 1, seq.end());
    out.push_back(seq.back());
    return out;
}

}  // namespace fg::planning
