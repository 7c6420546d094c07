#include "env_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "errors.hpp"

namespace evac {

void Environment::validate() const {
    require(rows >= 3 && cols >= 3, ErrorCode::invalid_argument,
            "environment needs at least 3x3 cells, got " + std::to_string(rows) +
                "x" + std::to_string(cols));
    require(cell_size > 0.0, ErrorCode::invalid_argument, "cell_size must be > 0");
    for (const auto& o : obstacles) {
        const bool ok = o.height_cells >= 1 && o.width_cells >= 1 && o.row >= 0 &&
                        o.col >= 0 && o.row + o.height_cells <= rows &&
                        o.col + o.width_cells <= cols;
        require(ok, ErrorCode::invalid_argument,
                "obstacle at (" + std::to_string(o.row) + "," + std::to_string(o.col) +
                    ") size " + std::to_string(o.height_cells) + "x" +
                    std::to_string(o.width_cells) + " not inside grid");
    }
    for (const auto& a : accesses)
        require(a.width > 0.0 && a.width <= perimeter(), ErrorCode::invalid_argument,
                "access width must be in (0, perimeter]");
}

double wrap_perimeter(double p, double length) {
    double r = std::fmod(p, length);
    if (r < 0.0) r += length;
    // adding length to a tiny negative remainder can round up to length
    // itself; the wrapped coordinate must stay strictly below it
    if (r >= length) r = 0.0;
    return r;
}

namespace {

// The perimeter splits into 2*(rows+cols) intervals of width cell_size, in
// walk order. Interval index -> owning boundary cell.
Cell interval_owner(const Environment& env, int t) {
    const int rows = env.rows, cols = env.cols;
    if (t < cols) return {0, t};                                   // bottom, +x
    t -= cols;
    if (t < rows) return {t, cols - 1};                            // right, +y
    t -= rows;
    if (t < cols) return {rows - 1, cols - 1 - t};                 // top, -x
    t -= cols;
    return {rows - 1 - t, 0};                                      // left, -y
}

// Appends owners of all intervals intersecting [a, b), 0 <= a < b <= L.
void collect_span(const Environment& env, double a, double b, std::vector<Cell>& out) {
    const double cl = env.cell_size;
    const int n_intervals = 2 * (env.rows + env.cols);
    int first = static_cast<int>(std::floor(a / cl));
    int last = static_cast<int>(std::ceil(b / cl)) - 1;
    first = std::max(first, 0);
    last = std::min(last, n_intervals - 1);
    for (int t = first; t <= last; ++t) out.push_back(interval_owner(env, t));
}

} // namespace

std::vector<Cell> boundary_cells_for_interval(const Environment& env,
                                              double position, double width) {
    const double L = env.perimeter();
    require(width > 0.0 && width <= L, ErrorCode::invalid_argument,
            "interval width must be in (0, perimeter]");
    const double p = wrap_perimeter(position, L);

    std::vector<Cell> cells;
    if (p + width <= L) {
        collect_span(env, p, p + width, cells);
    } else {
        collect_span(env, p, L, cells);
        collect_span(env, 0.0, p + width - L, cells);
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

Environment apply_exits(const Environment& env, const ExitSet& exits) {
    require(!exits.positions.empty(), ErrorCode::invalid_argument,
            "exit set must contain at least one position");
    require(exits.width > 0.0, ErrorCode::invalid_argument,
            "exit width must be > 0");
    Environment out = env;
    const double L = env.perimeter();
    for (double p : exits.positions)
        out.accesses.push_back({wrap_perimeter(p, L), exits.width});
    return out;
}

std::vector<Cell> Grid::exit_cells() const {
    std::vector<Cell> out;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (exit[idx(r, c)]) out.push_back({r, c});
    return out;
}

int Grid::traversable_count() const {
    int n = 0;
    for (auto v : obstacle)
        if (!v) ++n;
    return n;
}

Grid build_grid(const Environment& env) {
    env.validate();
    Grid g;
    g.rows = env.rows;
    g.cols = env.cols;
    g.cell_size = env.cell_size;
    g.obstacle.assign(static_cast<std::size_t>(g.rows) * g.cols, 0);
    g.exit.assign(static_cast<std::size_t>(g.rows) * g.cols, 0);

    for (const auto& o : env.obstacles)
        for (int r = o.row; r < o.row + o.height_cells; ++r)
            for (int c = o.col; c < o.col + o.width_cells; ++c)
                g.obstacle[g.idx(r, c)] = 1;

    // Openings blocked by an obstacle stay obstacles.
    for (const auto& a : env.accesses)
        for (const auto& cell : boundary_cells_for_interval(env, a.position, a.width))
            if (!g.obstacle[g.idx(cell.row, cell.col)])
                g.exit[g.idx(cell.row, cell.col)] = 1;

    return g;
}

void to_json(nlohmann::json& j, const Environment& env) {
    j = nlohmann::json{{"cellSize", env.cell_size},
                       {"rows", env.rows},
                       {"cols", env.cols}};
    j["obstacles"] = nlohmann::json::array();
    for (const auto& o : env.obstacles)
        j["obstacles"].push_back({{"row", o.row},
                                  {"col", o.col},
                                  {"heightCells", o.height_cells},
                                  {"widthCells", o.width_cells}});
    j["accesses"] = nlohmann::json::array();
    for (const auto& a : env.accesses)
        j["accesses"].push_back({{"position", a.position}, {"width", a.width}});
}

void from_json(const nlohmann::json& j, Environment& env) {
    env = Environment{};
    env.cell_size = j.at("cellSize").get<double>();
    env.rows = j.at("rows").get<int>();
    env.cols = j.at("cols").get<int>();
    if (j.contains("obstacles"))
        for (const auto& jo : j.at("obstacles"))
            env.obstacles.push_back({jo.at("row").get<int>(), jo.at("col").get<int>(),
                                     jo.at("heightCells").get<int>(),
                                     jo.at("widthCells").get<int>()});
    if (j.contains("accesses"))
        for (const auto& ja : j.at("accesses"))
            env.accesses.push_back(
                {ja.at("position").get<double>(), ja.at("width").get<double>()});
}

} // namespace evac
