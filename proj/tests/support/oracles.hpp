#pragma once

// Independent reference implementations used by unit and acceptance tests.
// Written from the formulas directly, sharing no code with the library.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "factoryguard/grid.hpp"
#include "factoryguard/kinematics.hpp"
#include "factoryguard/mppi.hpp"

namespace fg::oracle {

// Dijkstra over the 8-connected grid. Diagonal moves need both adjacent
// axis cells free (no corner cutting). Returns (axis steps, diagonal steps)
// of a cheapest path, compared exactly via a + b*sqrt(2) with integer parts.
struct GridCost {
    long axis = 0;
    long diag = 0;
};

inline std::optional<GridCost> dijkstra(const OccupancyGrid& g, Cell s, Cell t) {
    if (g.blocked(s) || g.blocked(t)) return std::nullopt;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(g.size(), inf);
    std::vector<GridCost> parts(g.size());
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> q;
    dist[g.index(s)] = 0.0;
    q.push({0.0, g.index(s)});
    while (!q.empty()) {
        auto [d, u] = q.top();
        q.pop();
        if (d > dist[u]) continue;
        const Cell c = g.cell_at(u);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const Cell n{c.x + dx, c.y + dy};
                if (!g.in_bounds(n) || g.blocked(n)) continue;
                const bool diagonal = dx != 0 && dy != 0;
                if (diagonal && (g.blocked({c.x + dx, c.y}) || g.blocked({c.x, c.y + dy}))) continue;
                const double w = diagonal ? std::sqrt(2.0) : 1.0;
                const std::size_t ni = g.index(n);
                if (d + w < dist[ni] - 1e-9) {
                    dist[ni] = d + w;
                    parts[ni] = parts[u];
                    (diagonal ? parts[ni].diag : parts[ni].axis) += 1;
                    q.push({dist[ni], ni});
                }
            }
        }
    }
    if (dist[g.index(t)] == inf) return std::nullopt;
    return parts[g.index(t)];
}

// Row-major 4-connected flood fill of {mask}; returns components as sorted
// linear indices.
inline std::vector<std::set<int>> flood_fill(const std::vector<bool>& mask, int w, int h) {
    std::vector<bool> seen(mask.size(), false);
    std::vector<std::set<int>> out;
    for (int i = 0; i < w * h; ++i) {
        if (!mask[i] || seen[i]) continue;
        std::set<int> comp;
        std::vector<int> stack{i};
        seen[i] = true;
        while (!stack.empty()) {
            const int k = stack.back();
            stack.pop_back();
            comp.insert(k);
            const int x = k % w;
            const int y = k / w;
            const int nb[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
            for (const auto& p : nb) {
                if (p[0] < 0 || p[1] < 0 || p[0] >= w || p[1] >= h) continue;
                const int j = p[1] * w + p[0];
                if (mask[j] && !seen[j]) {
                    seen[j] = true;
                    stack.push_back(j);
                }
            }
        }
        out.push_back(std::move(comp));
    }
    return out;
}

// Scalar-loop reward and PD references.
inline double track(double vx, double vy, double cx, double cy, double w, double wc, double w_v, double w_w,
                    double sv, double sw) {
    const double ex = vx - cx;
    const double ey = vy - cy;
    const double ew = w - wc;
    return w_v * std::exp(-(ex * ex + ey * ey) / sv) + w_w * std::exp(-(ew * ew) / sw);
}

inline double reg(const std::vector<double>& tau, const std::vector<double>& qdd, const std::vector<double>& feet,
                  const std::vector<bool>& contact, double w_tau, double w_qdd, double w_slip) {
    double a = 0.0;
    for (double x : tau) a += x * x;
    double b = 0.0;
    for (double x : qdd) b += x * x;
    double c = 0.0;
    for (std::size_t i = 0; i < feet.size(); ++i) c += contact[i] ? feet[i] * feet[i] : 0.0;
    return -w_tau * a - w_qdd * b - w_slip * c;
}

inline double style(double gz, const std::vector<double>& heights, double h_target, double w_up, double w_feet) {
    double e = 0.0;
    for (double h : heights) e += (h - h_target) * (h - h_target);
    return w_up * (gz + 1.0) + w_feet * std::exp(-e);
}

inline std::vector<double> pd(const std::vector<double>& a, const std::vector<double>& q,
                              const std::vector<double>& qd, const std::vector<double>& q0,
                              const std::vector<double>& kp, const std::vector<double>& kd, double scale) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = kp[i] * (a[i] * scale + q0[i] - q[i]) - kd[i] * qd[i];
    return out;
}

inline double discounted(const std::vector<double>& r, double gamma) {
    double s = 0.0;
    for (std::size_t t = 0; t < r.size(); ++t) s += std::pow(gamma, static_cast<double>(t)) * r[t];
    return s;
}

// Exhaustive one-step search over a discretised (vx, vy) lattice within the
// gait envelope, minimising the supplied cost of a single-step rollout.
inline VelocityCommand best_one_step(const Pose2& start, const planning::CostFn& cost, double dt,
                                     double max_speed = kMaxGaitSpeed, double step = 0.1) {
    double best = std::numeric_limits<double>::infinity();
    VelocityCommand out{};
    const int n = static_cast<int>(std::round(max_speed / step));
    for (int i = -n; i <= n; ++i) {
        for (int j = -n; j <= n; ++j) {
            const VelocityCommand c{i * step, j * step, 0.0};
            if (c.speed() > max_speed + 1e-9) continue;
            const planning::ControlSeq u(1, c);
            const double v = cost(planning::rollout(start, u, dt), u);
            if (v < best) {
                best = v;
                out = c;
            }
        }
    }
    return out;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    long double d = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += static_cast<long double>(a[i]) * b[i];
        na += static_cast<long double>(a[i]) * a[i];
        nb += static_cast<long double>(b[i]) * b[i];
    }
    return static_cast<double>(d / (std::sqrt(na) * std::sqrt(nb)));
}

// Random free-space grid with a fraction of blocked cells.
inline OccupancyGrid random_grid(std::mt19937_64& rng, int max_side, int blocked_pct) {
    std::uniform_int_distribution<int> side(2, max_side);
    const int w = side(rng);
    const int h = side(rng);
    OccupancyGrid g(w, h, 1.0);
    std::uniform_int_distribution<int> pct(0, 99);
    for (int i = 0; i < w * h; ++i) {
        if (pct(rng) < blocked_pct) g.set_blocked(g.cell_at(static_cast<std::size_t>(i)), true);
    }
    return g;
}

inline Cell random_cell(std::mt19937_64& rng, const OccupancyGrid& g) {
    std::uniform_int_distribution<int> x(0, g.width() - 1);
    std::uniform_int_distribution<int> y(0, g.height() - 1);
    return {x(rng), y(rng)};
}

}  // namespace fg::oracle
