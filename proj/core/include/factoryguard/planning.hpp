#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "factoryguard/grid.hpp"

namespace fg::planning {

// Exact 8-connected path cost axis + diag*sqrt(2). Ordering is exact (integer
// arithmetic), so optimality checks never depend on floating-point rounding.
struct PathCost {
    std::int64_t axis = 0;
    std::int64_t diag = 0;
    bool infinite = false;

    static PathCost infinity() { return {0, 0, true}; }
    [[nodiscard]] double value() const;

    friend PathCost operator+(PathCost a, PathCost b);
    friend bool operator<(const PathCost& a, const PathCost& b);
    friend bool operator==(const PathCost& a, const PathCost& b);
    friend bool operator<=(const PathCost& a, const PathCost& b) { return !(b < a); }
    friend bool operator>(const PathCost& a, const PathCost& b) { return b < a; }
};

// Octile distance; admissible and consistent for 8-connectivity.
PathCost octile(Cell a, Cell b);

// Edge cost between 8-neighbours: infinite when either end is blocked or a
// diagonal would cut a blocked corner.
PathCost edge_cost(const OccupancyGrid& grid, Cell a, Cell b);

struct PlanResult {
    bool reachable = false;
    std::vector<Cell> path;  // start..goal inclusive
    PathCost cost = PathCost::infinity();
};

// D* Lite (Koenig & Likhachev) searching from goal to start so that start moves
// and cell changes are repaired incrementally.
class GridPlanner {
public:
    GridPlanner(OccupancyGrid grid, Cell start, Cell goal);

    PlanResult plan();

    // Applies (cell, blocked) changes and repairs the existing search.
    PlanResult update_and_replan(const std::vector<std::pair<Cell, bool>>& changes);

    // Re-roots the search at a new start cell (robot moved along the path).
    PlanResult move_start(Cell start);

    [[nodiscard]] const OccupancyGrid& grid() const { return grid_; }
    [[nodiscard]] Cell start() const { return start_; }
    [[nodiscard]] Cell goal() const { return goal_; }
    [[nodiscard]] std::size_t expansions() const { return expansions_; }
    [[nodiscard]] bool planned() const { return planned_; }

    // Local consistency g == rhs on every cell that is not queued.
    [[nodiscard]] bool locally_consistent() const;

private:
    using Key = std::pair<PathCost, PathCost>;
    struct QueueEntry {
        Key key;
        std::size_t index;
        friend bool operator<(const QueueEntry& a, const QueueEntry& b) {
            if (a.key.first < b.key.first) return true;
            if (b.key.first < a.key.first) return false;
            if (a.key.second < b.key.second) return true;
            if (b.key.second < a.key.second) return false;
            return a.index < b.index;
        }
    };

    Key calculate_key(std::size_t s) const;
    void update_vertex(std::size_t u);
    void compute_shortest_path();
    PlanResult extract() const;
    void enqueue(std::size_t s, Key k);
    void dequeue(std::size_t s);
    template <typename F>
    void for_each_neighbour(std::size_t s, F&& f) const;

    OccupancyGrid grid_;
    Cell start_;
    Cell goal_;
    Cell last_start_;
    PathCost km_{};
    std::vector<PathCost> g_;
    std::vector<PathCost> rhs_;
    std::vector<std::optional<Key>> queued_;
    std::set<QueueEntry> open_;
    std::size_t expansions_ = 0;
    bool planned_ = false;
};

// One-shot convenience wrapper.
PlanResult plan(const OccupancyGrid& grid, Cell start, Cell goal);

// Metric length of a cell path (cell_size scaled).
double path_length(const OccupancyGrid& grid, const std::vector<Cell>& path);

}  // namespace fg::planning
