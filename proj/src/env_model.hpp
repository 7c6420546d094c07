#pragma once

// Floor-plan model: rectangular cell grid, rectangular obstacles, and door
// openings ("accesses") addressed by a single continuous coordinate that runs
// around the outer wall.

#include <cstdint>
#include <vector>

#include <json.hpp>

namespace evac {

struct Cell {
    int row = 0;
    int col = 0;

    friend bool operator==(const Cell& a, const Cell& b) {
        return a.row == b.row && a.col == b.col;
    }
    friend bool operator<(const Cell& a, const Cell& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    }
};

// Axis-aligned rectangle of blocked cells; (row, col) is its lowest corner.
struct Obstacle {
    int row = 0;
    int col = 0;
    int height_cells = 1;
    int width_cells = 1;
};

// An opening in the outer wall: interval [position, position + width) in
// perimeter coordinates (meters).
struct Access {
    double position = 0.0;
    double width = 0.0;
};

struct Environment {
    int rows = 0;
    int cols = 0;
    double cell_size = 0.5;
    std::vector<Obstacle> obstacles;
    std::vector<Access> accesses;

    double width_m() const { return cols * cell_size; }
    double height_m() const { return rows * cell_size; }
    double perimeter() const { return 2.0 * (width_m() + height_m()); }

    // Throws Error(invalid_argument) unless rows/cols >= 3, cell_size > 0,
    // every obstacle is a nonempty rectangle fully inside the grid, and every
    // access has width in (0, perimeter].
    void validate() const;
};

// Candidate exit placement: positions in perimeter meters, one shared width.
struct ExitSet {
    std::vector<double> positions;
    double width = 2.0;
};

// Normalizes p into [0, length).
double wrap_perimeter(double p, double length);

// Boundary cells whose perimeter interval intersects [position, position +
// width), wrapping around. The walk is counterclockwise from the bottom-left
// corner: bottom edge (+x), right edge (+y), top edge (-x), left edge (-y);
// each corner cell owns one interval on each of its two edges. Result is
// sorted and duplicate-free.
std::vector<Cell> boundary_cells_for_interval(const Environment& env,
                                              double position, double width);

// Copy of env with one extra access per exit position. Requires a non-empty
// exit set.
Environment apply_exits(const Environment& env, const ExitSet& exits);

// Discretized floor plan the simulator runs on. Exit flags are only ever set
// on the outermost cell ring, never on obstacle cells.
struct Grid {
    int rows = 0;
    int cols = 0;
    double cell_size = 0.5;
    std::vector<std::uint8_t> obstacle;
    std::vector<std::uint8_t> exit;

    int idx(int r, int c) const { return r * cols + c; }
    bool in_bounds(int r, int c) const {
        return r >= 0 && r < rows && c >= 0 && c < cols;
    }
    bool is_obstacle(int r, int c) const { return obstacle[idx(r, c)] != 0; }
    bool is_exit(int r, int c) const { return exit[idx(r, c)] != 0; }

    std::vector<Cell> exit_cells() const;
    int traversable_count() const;
};

Grid build_grid(const Environment& env);

void to_json(nlohmann::json& j, const Environment& env);
void from_json(const nlohmann::json& j, Environment& env);

} // namespace evac
