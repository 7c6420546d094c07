#pragma once

// Cellular-automaton pedestrian model: a distance-derived guidance field plus
// a synchronous per-step update with crowd repulsion and collision claims.

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "env_model.hpp"
#include "rng.hpp"

namespace evac {

// Guidance field. path_len is the shortest walking distance (meters) to any
// exit cell over the 8-connected grid: orthogonal steps cost cell_size,
// diagonal steps cell_size*sqrt(2), obstacle cells cannot be entered.
// closeness = 1 - path_len / max finite path_len, so exits sit at 1 and the
// farthest reachable cell at exactly 0. Unreachable and obstacle cells carry
// path_len = +inf and closeness = 0.
struct StaticField {
    std::vector<double> path_len;
    std::vector<double> closeness;
    double max_path_len = 0.0;
    // Set when not a single non-exit traversable cell can reach an exit.
    bool all_unreachable = false;
};

// Throws Error(no_exit) when the grid has no exit cells.
StaticField compute_static_field(const Grid& grid);

struct Pedestrian {
    int id = 0;
    double velocity_percent = 1.0; // probability of attempting a move per step
    double field_bias = 1.5;       // weight on closeness
    double repulsion_bias = 0.25;  // weight on crowding
};

// One evacuation scenario: start cells plus per-pedestrian parameters,
// index-aligned.
struct ScenarioConfig {
    std::vector<Cell> positions;
    std::vector<double> velocity_percent;
    std::vector<double> field_bias;
    std::vector<double> repulsion_bias;

    std::size_t size() const { return positions.size(); }
};

struct SimParams {
    double reference_speed = 1.3; // m/s, fastest pedestrian
    double time_limit = 60.0;     // seconds of simulated time
    double epsilon = 1e-5;        // keeps every move probability positive

    double dt(double cell_size) const { return cell_size / reference_speed; }
    // ceil with a small guard so exact multiples do not gain a step from
    // floating-point noise (0.5 m / 1.3 m/s and 60 s give exactly 156).
    int steps_limit(double cell_size) const;
};

struct SimOutcome {
    struct PerPedestrian {
        bool evacuated = false;
        double time = 0.0;     // seconds, set when evacuated
        double distance = 0.0; // meters to nearest exit cell center, otherwise
    };
    std::vector<PerPedestrian> pedestrians;
    int steps_taken = 0;

    int evacuated_count() const;
};

// step, id, row, col, status ("moved" | "stayed" | "evacuated").
using TraceFn = std::function<void(int, int, int, int, const char*)>;

// Lattice state advanced one synchronous step at a time. Copyable; the grid
// and field are borrowed and must outlive the state.
class CAState {
public:
    CAState(const Grid& grid, const StaticField& field, const ScenarioConfig& config,
            const SimParams& params);

    // One update: (1) start from an empty next lattice, (2) obstacles carry
    // over, (3) pedestrians standing on exit cells leave (time = step * dt),
    // (4) the remaining occupied cells, in uniformly shuffled order, either
    // stay (prob 1 - velocity_percent) or sample a reachable neighbor from
    // the desirability distribution and move iff that cell is still
    // unclaimed in the next lattice.
    void step(Rng& rng, const TraceFn& trace = nullptr);

    bool all_evacuated() const { return alive_ == 0; }
    int steps_taken() const { return step_no_; }
    int occupied_count() const { return alive_; }

    bool is_occupied(int r, int c) const { return occupant_[grid_->idx(r, c)] >= 0; }
    bool pedestrian_evacuated(int i) const { return evacuated_[i] != 0; }
    double evacuation_time(int i) const { return evac_time_[i]; }
    Cell pedestrian_cell(int i) const { return {ped_row_[i], ped_col_[i]}; }

    const Grid& grid() const { return *grid_; }
    const StaticField& field() const { return *field_; }
    double dt() const { return dt_; }

    SimOutcome outcome() const;

private:
    friend double repulsion(const CAState&, int, int);
    friend std::vector<std::pair<Cell, double>> move_distribution(const CAState&, int);

    int reachable_neighbor_count(int r, int c) const;
    bool cell_reachable(int r, int c) const;

    const Grid* grid_;
    const StaticField* field_;
    SimParams params_;
    double dt_;

    std::vector<Pedestrian> peds_;
    std::vector<int> ped_row_, ped_col_;
    std::vector<std::uint8_t> evacuated_;
    std::vector<double> evac_time_;
    std::vector<int> occupant_; // cell -> pedestrian index, -1 when empty
    int alive_ = 0;
    int step_no_ = 0;

    // scratch, reused across steps
    std::vector<int> next_occupant_;
    std::vector<std::pair<int, int>> order_;
};

// Crowding term for a cell: 1 / (1 + number of reachable neighbors), where a
// neighbor is reachable when inside the grid, not an obstacle, and not
// occupied in the current state. Valid for occupied cells and for empty move
// candidates alike (the cell's own occupancy does not enter).
double repulsion(const CAState& state, int row, int col);

// exp(field_bias * closeness - repulsion_bias * repulsion); pure form.
double attraction(double closeness, double repulsion_value, double field_bias,
                  double repulsion_bias);

// Attraction of one cell for a given pedestrian parameterization, evaluated
// on the current state.
double attraction(const CAState& state, int row, int col, double field_bias,
                  double repulsion_bias);

// Move probabilities over the reachable neighbors of pedestrian i's cell:
// desirability epsilon + A - Amin, normalized. Empty when the pedestrian is
// walled in; probabilities are strictly positive and sum to 1 otherwise.
std::vector<std::pair<Cell, double>> move_distribution(const CAState& state,
                                                       int ped_index);

// Shortest Euclidean distance (meters) from a cell's center to any exit cell
// center. Throws Error(no_exit) when exits is empty.
double nearest_exit_distance(Cell cell, const std::vector<Cell>& exits,
                             double cell_size);

// Throws Error(invalid_config) when positions fall on obstacles or outside
// the grid, when two pedestrians share a cell, or when parameter arrays are
// not index-aligned with positions.
void validate_config(const ScenarioConfig& config, const Grid& grid);

// Runs the automaton for at most params.steps_limit(grid.cell_size) steps,
// stopping early once everyone is out. Deterministic in (grid, field, config,
// params, seed).
SimOutcome simulate(const Grid& grid, const StaticField& field,
                    const ScenarioConfig& config, const SimParams& params,
                    std::uint64_t seed, const TraceFn& trace = nullptr);

} // namespace evac
