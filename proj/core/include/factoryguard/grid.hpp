#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "factoryguard/geometry.hpp"

namespace fg {

struct Cell {
    int x = 0;
    int y = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

// Axis-aligned occupancy lattice. Cell (0,0) covers [origin, origin + cell_size)
// on both axes; cells are stored row-major (y outer).
class OccupancyGrid {
public:
    OccupancyGrid() = default;
    OccupancyGrid(int width, int height, double cell_size, Vec2 origin = {});

    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] double cell_size() const { return cell_size_; }
    [[nodiscard]] Vec2 origin() const { return origin_; }

    [[nodiscard]] bool in_bounds(Cell c) const {
        return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
    }
    [[nodiscard]] bool blocked(Cell c) const;  // out-of-bounds counts as blocked
    void set_blocked(Cell c, bool blocked);

    [[nodiscard]] std::size_t index(Cell c) const {
        return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(c.x);
    }
    [[nodiscard]] Cell cell_at(std::size_t index) const {
        return {static_cast<int>(index % static_cast<std::size_t>(width_)),
                static_cast<int>(index / static_cast<std::size_t>(width_))};
    }
    [[nodiscard]] std::size_t size() const { return cells_.size(); }

    [[nodiscard]] Cell to_cell(Vec2 p) const;
    [[nodiscard]] Vec2 center(Cell c) const;

    // Marks every cell whose centre lies inside the rectangle.
    void fill_rect(Vec2 min, Vec2 max, bool blocked = true);

    // Copy with obstacles dilated by `radius` metres (square structuring element
    // clipped to a disc).
    [[nodiscard]] OccupancyGrid inflated(double radius) const;

    // Samples the straight segment at half-cell spacing; ignores `skip_end`
    // metres at the target end (the target's own footprint).
    [[nodiscard]] bool line_of_sight(Vec2 from, Vec2 to, double skip_end = 0.0) const;

    [[nodiscard]] const std::vector<std::uint8_t>& cells() const { return cells_; }

    friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    double cell_size_ = 0.1;
    Vec2 origin_{};
    std::vector<std::uint8_t> cells_;
};

}  // namespace fg
