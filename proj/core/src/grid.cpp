#include "factoryguard/grid.hpp"

#include <algorithm>
#include <cmath>

namespace fg {

OccupancyGrid::OccupancyGrid(int width, int height, double cell_size, Vec2 origin)
    : width_(width), height_(height), cell_size_(cell_size), origin_(origin) {
    if (width <= 0 || height <= 0) throw InputError("occupancy grid dimensions must be positive");
    if (!(cell_size > 0.0)) throw InputError("occupancy grid cell edge must be > 0");
    cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

bool OccupancyGrid::blocked(Cell c) const {
    if (!in_bounds(c)) return true;
    return cells_[index(c)] != 0;
}

void OccupancyGrid::set_blocked(Cell c, bool blocked) {
    if (!in_bounds(c)) throw InputError("set_blocked: cell out of bounds");
    cells_[index(c)] = blocked ? 1 : 0;
}

Cell OccupancyGrid::to_cell(Vec2 p) const {
    return {static_cast<int>(std::floor((p.x - origin_.x) / cell_size_)),
            static_cast<int>(std::floor((p.y - origin_.y) / cell_size_))};
}

Vec2 OccupancyGrid::center(Cell c) const {
    return {origin_.x + (c.x + 0.5) * cell_size_, origin_.y + (c.y + 0.5) * cell_size_};
}

void OccupancyGrid::fill_rect(Vec2 min, Vec2 max, bool blocked) {
    const Cell lo = to_cell(min);
    const Cell hi = to_cell(max);
    for (int y = std::max(0, lo.y); y <= std::min(height_ - 1, hi.y); ++y) {
        for (int x = std::max(0, lo.x); x <= std::min(width_ - 1, hi.x); ++x) {
            const Vec2 c = center({x, y});
            if (c.x >= min.x && c.x <= max.x && c.y >= min.y && c.y <= max.y) {
                cells_[index({x, y})] = blocked ? 1 : 0;
            }
        }
    }
}

OccupancyGrid OccupancyGrid::inflated(double radius) const {
    OccupancyGrid out = *this;
    const int r = static_cast<int>(std::ceil(radius / cell_size_));
    if (r <= 0) return out;
    const double r2 = (radius / cell_size_) * (radius / cell_size_);
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            if (!cells_[index({x, y})]) continue;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    if (dx * dx + dy * dy > r2) continue;
                    const Cell n{x + dx, y + dy};
                    if (in_bounds(n)) out.cells_[index(n)] = 1;
                }
            }
        }
    }
    return out;
}

bool OccupancyGrid::line_of_sight(Vec2 from, Vec2 to, double skip_end) const {
    const double len = distance(from, to) - skip_end;
    if (len <= 0.0) return true;
    const Vec2 dir = (to - from) * (1.0 / distance(from, to));
    const double step = cell_size_ * 0.5;
    const Cell start = to_cell(from);
    for (double s = 0.0; s <= len; s += step) {
        const Cell c = to_cell(from + dir * s);
        if (c == start) continue;
        if (blocked(c)) return false;
    }
    return true;
}

}  // namespace fg
