#include "factoryguard/planning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace fg::planning {

double PathCost::value() const {
    if (infinite) return INFINITY;
    return static_cast<double>(axis) + static_cast<double>(diag) * std::numbers::sqrt2;
}

PathCost operator+(PathCost a, PathCost b) {
    if (a.infinite || b.infinite) return PathCost::infinity();
    return {a.axis + b.axis, a.diag + b.diag, false};
}

bool operator==(const PathCost& a, const PathCost& b) {
    if (a.infinite || b.infinite) return a.infinite == b.infinite;
    return a.axis == b.axis && a.diag == b.diag;
}

// a1 + b1*r2 < a2 + b2*r2  <=>  x < y*r2 with x = a1 - a2, y = b2 - b1.
bool operator<(const PathCost& a, const PathCost& b) {
    if (a.infinite) return false;
    if (b.infinite) return true;
    const std::int64_t x = a.axis - b.axis;
    const std::int64_t y = b.diag - a.diag;
    if (y >= 0) return x < 0 || x * x < 2 * y * y;
    return x < 0 && x * x > 2 * y * y;
}

PathCost octile(Cell a, Cell b) {
    const std::int64_t dx = std::abs(a.x - b.x);
    const std::int64_t dy = std::abs(a.y - b.y);
    const std::int64_t d = std::min(dx, dy);
    return {std::max(dx, dy) - d, d, false};
}

PathCost edge_cost(const OccupancyGrid& grid, Cell a, Cell b) {
    const int dx = b.x - a.x;
    const int dy = b.y - a.y;
    if (std::abs(dx) > 1 || std::abs(dy) > 1 || (dx == 0 && dy == 0)) return PathCost::infinity();
    if (grid.blocked(a) || grid.blocked(b)) return PathCost::infinity();
    if (dx != 0 && dy != 0) {
        if (grid.blocked({a.x + dx, a.y}) || grid.blocked({a.x, a.y + dy})) return PathCost::infinity();
        return {0, 1, false};
    }
    return {1, 0, false};
}

GridPlanner::GridPlanner(OccupancyGrid grid, Cell start, Cell goal)
    : grid_(std::move(grid)), start_(start), goal_(goal), last_start_(start) {
    if (!grid_.in_bounds(start) || grid_.blocked(start)) throw InputError("planner start cell is blocked or out of bounds");
    if (!grid_.in_bounds(goal) || grid_.blocked(goal)) throw InputError("planner goal cell is blocked or out of bounds");
    g_.assign(grid_.size(), PathCost::infinity());
    rhs_.assign(grid_.size(), PathCost::infinity());
    queued_.assign(grid_.size(), std::nullopt);
    const std::size_t gi = grid_.index(goal_);
    rhs_[gi] = {};
    enqueue(gi, calculate_key(gi));
}

template <typename F>
void GridPlanner::for_each_neighbour(std::size_t s, F&& f) const {
    const Cell c = grid_.cell_at(s);
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const Cell n{c.x + dx, c.y + dy};
            if (grid_.in_bounds(n)) f(grid_.index(n), edge_cost(grid_, c, n));
        }
    }
}

GridPlanner::Key GridPlanner::calculate_key(std::size_t s) const {
    const PathCost m = std::min(g_[s], rhs_[s]);
    return {m + octile(start_, grid_.cell_at(s)) + km_, m};
}

void GridPlanner::enqueue(std::size_t s, Key k) {
    open_.insert({k, s});
    queued_[s] = k;
}

void GridPlanner::dequeue(std::size_t s) {
    if (!queued_[s]) return;
    open_.erase({*queued_[s], s});
    queued_[s].reset();
}

void GridPlanner::update_vertex(std::size_t u) {
    if (u != grid_.index(goal_)) {
        PathCost best = PathCost::infinity();
        for_each_neighbour(u, [&](std::size_t n, PathCost c) {
            const PathCost v = c + g_[n];
            if (v < best) best = v;
        });
        rhs_[u] = best;
    }
    dequeue(u);
    if (!(g_[u] == rhs_[u])) enqueue(u, calculate_key(u));
}

void GridPlanner::compute_shortest_path() {
    const std::size_t si = grid_.index(start_);
    while (!open_.empty()) {
        const QueueEntry top = *open_.begin();
        const Key start_key = calculate_key(si);
        const bool behind = top.key.first < start_key.first ||
                            (top.key.first == start_key.first && top.key.second < start_key.second);
        if (!behind && g_[si] == rhs_[si]) break;
        ++expansions_;
        const std::size_t u = top.index;
        const Key k_new = calculate_key(u);
        if (QueueEntry{top.key, u} < QueueEntry{k_new, u}) {
            dequeue(u);
            enqueue(u, k_new);
        } else if (rhs_[u] < g_[u]) {
            g_[u] = rhs_[u];
            dequeue(u);
            for_each_neighbour(u, [&](std::size_t n, PathCost) { update_vertex(n); });
        } else {
            g_[u] = PathCost::infinity();
            update_vertex(u);
            for_each_neighbour(u, [&](std::size_t n, PathCost) { update_vertex(n); });
        }
    }
    planned_ = true;
}

PlanResult GridPlanner::extract() const {
    PlanResult r;
    const std::size_t si = grid_.index(start_);
    if (rhs_[si].infinite) return r;
    r.reachable = true;
    r.cost = rhs_[si];
    const std::size_t gi = grid_.index(goal_);
    std::size_t cur = si;
    r.path.push_back(start_);
    for (std::size_t guard = 0; cur != gi && guard < grid_.size(); ++guard) {
        std::size_t best = cur;
        PathCost best_cost = PathCost::infinity();
        for_each_neighbour(cur, [&](std::size_t n, PathCost c) {
            const PathCost v = c + g_[n];
            if (v < best_cost || (v == best_cost && !v.infinite && n < best)) {
                best_cost = v;
                best = n;
            }
        });
        if (best == cur) break;
        cur = best;
        r.path.push_back(grid_.cell_at(cur));
    }
    if (cur != gi) {
        r = PlanResult{};
    }
    return r;
}

PlanResult GridPlanner::plan() {
    compute_shortest_path();
    return extract();
}

PlanResult GridPlanner::update_and_replan(const std::vector<std::pair<Cell, bool>>& changes) {
    if (!planned_) throw InputError("update_and_replan: no prior plan");
    std::vector<std::size_t> touched;
    for (const auto& [c, blocked] : changes) {
        if (!grid_.in_bounds(c) || grid_.blocked(c) == blocked) continue;
        grid_.set_blocked(c, blocked);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const Cell n{c.x + dx, c.y + dy};
                if (grid_.in_bounds(n)) touched.push_back(grid_.index(n));
            }
        }
    }
    if (grid_.blocked(start_) || grid_.blocked(goal_)) return {};
    if (touched.empty()) return extract();
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    km_ = km_ + octile(last_start_, start_);
    last_start_ = start_;
    for (std::size_t u : touched) update_vertex(u);
    return plan();
}

PlanResult GridPlanner::move_start(Cell start) {
    if (!grid_.in_bounds(start) || grid_.blocked(start)) throw InputError("planner start cell is blocked or out of bounds");
    start_ = start;
    km_ = km_ + octile(last_start_, start_);
    last_start_ = start_;
    return plan();
}

bool GridPlanner::locally_consistent() const {
    for (std::size_t i = 0; i < g_.size(); ++i) {
        if (!queued_[i] && !(g_[i] == rhs_[i])) return false;
    }
    return true;
}

PlanResult plan(const OccupancyGrid& grid, Cell start, Cell goal) {
    GridPlanner p(grid, start, goal);
    return p.plan();
}

double path_length(const OccupancyGrid& grid, const std::vector<Cell>& path) {
    double len = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        len += std::hypot(path[i].x - path[i - 1].x, path[i].y - path[i - 1].y);
    }
    return len * grid.cell_size();
}

}  // namespace fg::planning
