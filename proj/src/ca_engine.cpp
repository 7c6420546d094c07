#include "ca_engine.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "errors.hpp"

namespace evac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Row-major neighbor offsets; every neighborhood scan and every cumulative
// probability walk uses this one order, which pins down RNG consumption.
constexpr int kOffsets[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                {0, 1},   {1, -1}, {1, 0},  {1, 1}};

} // namespace

int SimParams::steps_limit(double cell_size) const {
    return static_cast<int>(std::ceil(time_limit / dt(cell_size) - 1e-9));
}

int SimOutcome::evacuated_count() const {
    int n = 0;
    for (const auto& p : pedestrians)
        if (p.evacuated) ++n;
    return n;
}

StaticField compute_static_field(const Grid& grid) {
    const int n = grid.rows * grid.cols;
    // Distances are carried as (orthogonal, diagonal) step-count pairs and
    // realized through one formula, so the result does not depend on the
    // order tied paths were relaxed in.
    std::vector<int> orth(n, -1), diag(n, -1);
    const double sq2 = std::sqrt(2.0);
    const auto value = [&](int o, int d) { return (o + d * sq2) * grid.cell_size; };

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    std::vector<std::uint8_t> settled(n, 0);

    bool any_exit = false;
    for (int i = 0; i < n; ++i)
        if (grid.exit[i]) {
            orth[i] = diag[i] = 0;
            heap.push({0.0, i});
            any_exit = true;
        }
    require(any_exit, ErrorCode::no_exit, "environment has no exit cells");

    while (!heap.empty()) {
        const auto [v, u] = heap.top();
        heap.pop();
        if (settled[u]) continue;
        settled[u] = 1;
        const int r = u / grid.cols, c = u % grid.cols;
        for (const auto& off : kOffsets) {
            const int nr = r + off[0], nc = c + off[1];
            if (!grid.in_bounds(nr, nc) || grid.is_obstacle(nr, nc)) continue;
            const int t = grid.idx(nr, nc);
            const bool diagonal = off[0] != 0 && off[1] != 0;
            const int no_ = orth[u] + (diagonal ? 0 : 1);
            const int nd = diag[u] + (diagonal ? 1 : 0);
            const double nv = value(no_, nd);
            if (orth[t] < 0 || nv < value(orth[t], diag[t])) {
                orth[t] = no_;
                diag[t] = nd;
                heap.push({nv, t});
            }
        }
    }

    StaticField f;
    f.path_len.assign(n, kInf);
    f.closeness.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
        if (orth[i] >= 0) f.path_len[i] = value(orth[i], diag[i]);

    f.max_path_len = 0.0;
    for (int i = 0; i < n; ++i)
        if (!std::isinf(f.path_len[i]))
            f.max_path_len = std::max(f.max_path_len, f.path_len[i]);

    for (int i = 0; i < n; ++i) {
        if (std::isinf(f.path_len[i])) continue;
        f.closeness[i] =
            f.max_path_len > 0.0 ? 1.0 - f.path_len[i] / f.max_path_len : 1.0;
    }

    f.all_unreachable = true;
    for (int i = 0; i < n; ++i)
        if (!grid.obstacle[i] && !grid.exit[i] && !std::isinf(f.path_len[i])) {
            f.all_unreachable = false;
            break;
        }
    return f;
}

void validate_config(const ScenarioConfig& config, const Grid& grid) {
    const std::size_t n = config.positions.size();
    require(config.velocity_percent.size() == n && config.field_bias.size() == n &&
                config.repulsion_bias.size() == n,
            ErrorCode::invalid_config,
            "pedestrian parameter arrays must align with positions");
    std::vector<std::uint8_t> taken(static_cast<std::size_t>(grid.rows) * grid.cols, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& cell = config.positions[i];
        require(grid.in_bounds(cell.row, cell.col), ErrorCode::invalid_config,
                "pedestrian " + std::to_string(i) + " starts outside the grid");
        require(!grid.is_obstacle(cell.row, cell.col), ErrorCode::invalid_config,
                "pedestrian " + std::to_string(i) + " starts on an obstacle");
        auto& slot = taken[grid.idx(cell.row, cell.col)];
        require(!slot, ErrorCode::invalid_config,
                "two pedestrians share cell (" + std::to_string(cell.row) + "," +
                    std::to_string(cell.col) + ")");
        slot = 1;
        const double vp = config.velocity_percent[i];
        require(vp >= 0.0 && vp <= 1.0, ErrorCode::invalid_config,
                "velocity_percent must lie in [0, 1]");
    }
}

CAState::CAState(const Grid& grid, const StaticField& field,
                 const ScenarioConfig& config, const SimParams& params)
    : grid_(&grid), field_(&field), params_(params) {
    validate_config(config, grid);
    dt_ = params.dt(grid.cell_size);
    const int n = static_cast<int>(config.size());
    peds_.resize(n);
    ped_row_.resize(n);
    ped_col_.resize(n);
    evacuated_.assign(n, 0);
    evac_time_.assign(n, 0.0);
    occupant_.assign(static_cast<std::size_t>(grid.rows) * grid.cols, -1);
    for (int i = 0; i < n; ++i) {
        peds_[i] = {i, config.velocity_percent[i], config.field_bias[i],
                    config.repulsion_bias[i]};
        ped_row_[i] = config.positions[i].row;
        ped_col_[i] = config.positions[i].col;
        occupant_[grid.idx(ped_row_[i], ped_col_[i])] = i;
    }
    alive_ = n;
}

bool CAState::cell_reachable(int r, int c) const {
    return grid_->in_bounds(r, c) && !grid_->is_obstacle(r, c) &&
           occupant_[grid_->idx(r, c)] < 0;
}

int CAState::reachable_neighbor_count(int r, int c) const {
    int count = 0;
    for (const auto& off : kOffsets)
        if (cell_reachable(r + off[0], c + off[1])) ++count;
    return count;
}

double repulsion(const CAState& state, int row, int col) {
    return 1.0 / (1.0 + state.reachable_neighbor_count(row, col));
}

double attraction(double closeness, double repulsion_value, double field_bias,
                  double repulsion_bias) {
    return std::exp(field_bias * closeness - repulsion_bias * repulsion_value);
}

double attraction(const CAState& state, int row, int col, double field_bias,
                  double repulsion_bias) {
    return attraction(state.field().closeness[state.grid().idx(row, col)],
                      repulsion(state, row, col), field_bias, repulsion_bias);
}

std::vector<std::pair<Cell, double>> move_distribution(const CAState& state,
                                                       int ped_index) {
    const auto& grid = *state.grid_;
    const auto& ped = state.peds_[ped_index];
    const int r = state.ped_row_[ped_index], c = state.ped_col_[ped_index];

    Cell cells[8];
    double attr[8];
    int count = 0;
    for (const auto& off : kOffsets) {
        const int nr = r + off[0], nc = c + off[1];
        if (!state.cell_reachable(nr, nc)) continue;
        cells[count] = {nr, nc};
        attr[count] = attraction(state.field_->closeness[grid.idx(nr, nc)],
                                 1.0 / (1.0 + state.reachable_neighbor_count(nr, nc)),
                                 ped.field_bias, ped.repulsion_bias);
        ++count;
    }
    std::vector<std::pair<Cell, double>> out;
    if (count == 0) return out;

    double a_min = attr[0];
    for (int i = 1; i < count; ++i) a_min = std::min(a_min, attr[i]);
    double total = 0.0;
    for (int i = 0; i < count; ++i) {
        attr[i] = state.params_.epsilon + attr[i] - a_min; // desirability
        total += attr[i];
    }
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.emplace_back(cells[i], attr[i] / total);
    return out;
}

void CAState::step(Rng& rng, const TraceFn& trace) {
    ++step_no_;
    next_occupant_.assign(occupant_.size(), -1);

    // Evacuate everyone standing on an exit; their cells free up immediately,
    // so exit cells are always enterable during the movement phase.
    for (std::size_t i = 0; i < peds_.size(); ++i) {
        if (evacuated_[i]) continue;
        const int r = ped_row_[i], c = ped_col_[i];
        if (grid_->is_exit(r, c)) {
            evacuated_[i] = 1;
            evac_time_[i] = step_no_ * dt_;
            occupant_[grid_->idx(r, c)] = -1;
            --alive_;
            if (trace) trace(step_no_, peds_[i].id, r, c, "evacuated");
        }
    }

    // Remaining occupied cells in row-major order, then uniformly shuffled.
    order_.clear();
    for (std::size_t i = 0; i < peds_.size(); ++i)
        if (!evacuated_[i])
            order_.emplace_back(grid_->idx(ped_row_[i], ped_col_[i]),
                                static_cast<int>(i));
    std::sort(order_.begin(), order_.end());
    rng.shuffle(order_);

    for (const auto& [cell, i] : order_) {
        const auto& ped = peds_[i];
        bool moved = false;
        int target = -1;
        // One gate draw per pedestrian, then at most one neighbor draw.
        if (rng.uniform01() < ped.velocity_percent) {
            const int r = ped_row_[i], c = ped_col_[i];
            int cand[8];
            double desir[8];
            double attr[8];
            int count = 0;
            for (const auto& off : kOffsets) {
                const int nr = r + off[0], nc = c + off[1];
                if (!cell_reachable(nr, nc)) continue;
                const int t = grid_->idx(nr, nc);
                attr[count] = attraction(
                    field_->closeness[t],
                    1.0 / (1.0 + reachable_neighbor_count(nr, nc)),
                    ped.field_bias, ped.repulsion_bias);
                cand[count] = t;
                ++count;
            }
            if (count > 0) {
                double a_min = attr[0];
                for (int k = 1; k < count; ++k) a_min = std::min(a_min, attr[k]);
                double total = 0.0;
                for (int k = 0; k < count; ++k) {
                    desir[k] = params_.epsilon + attr[k] - a_min;
                    total += desir[k];
                }
                const double pick = rng.uniform01() * total;
                int chosen = count - 1; // fp tail guard
                double acc = 0.0;
                for (int k = 0; k < count; ++k) {
                    acc += desir[k];
                    if (pick < acc) {
                        chosen = k;
                        break;
                    }
                }
                if (next_occupant_[cand[chosen]] < 0) {
                    target = cand[chosen];
                    moved = true;
                }
            }
        }
        if (moved) {
            next_occupant_[target] = i;
            ped_row_[i] = target / grid_->cols;
            ped_col_[i] = target % grid_->cols;
            if (trace) trace(step_no_, ped.id, ped_row_[i], ped_col_[i], "moved");
        } else {
            next_occupant_[cell] = i;
            if (trace) trace(step_no_, ped.id, ped_row_[i], ped_col_[i], "stayed");
        }
    }
    std::swap(occupant_, next_occupant_);
}

SimOutcome CAState::outcome() const {
    SimOutcome out;
    out.steps_taken = step_no_;
    out.pedestrians.resize(peds_.size());
    const auto exits = grid_->exit_cells();
    for (std::size_t i = 0; i < peds_.size(); ++i) {
        auto& p = out.pedestrians[i];
        p.evacuated = evacuated_[i] != 0;
        if (p.evacuated)
            p.time = evac_time_[i];
        else
            p.distance = nearest_exit_distance({ped_row_[i], ped_col_[i]}, exits,
                                               grid_->cell_size);
    }
    return out;
}

double nearest_exit_distance(Cell cell, const std::vector<Cell>& exits,
                             double cell_size) {
    require(!exits.empty(), ErrorCode::no_exit,
            "distance to exits undefined without exit cells");
    double best = kInf;
    for (const auto& e : exits) {
        const double d = std::hypot(static_cast<double>(cell.row - e.row),
                                    static_cast<double>(cell.col - e.col)) *
                         cell_size;
        best = std::min(best, d);
    }
    return best;
}

SimOutcome simulate(const Grid& grid, const StaticField& field,
                    const ScenarioConfig& config, const SimParams& params,
                    std::uint64_t seed, const TraceFn& trace) {
    CAState state(grid, field, config, params);
    Rng rng(seed);
    const int limit = params.steps_limit(grid.cell_size);
    while (!state.all_evacuated() && state.steps_taken() < limit)
        state.step(rng, trace);
    return state.outcome();
}

} // namespace evac
