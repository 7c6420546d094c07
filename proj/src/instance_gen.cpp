#include "instance_gen.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "errors.hpp"

namespace evac {

const char* density_name(DensityClass c) {
    switch (c) {
        case DensityClass::low: return "low";
        case DensityClass::mid: return "mid";
        case DensityClass::high: return "high";
    }
    fail(ErrorCode::invalid_argument, "unknown density class");
}

DensityClass density_from_name(const std::string& name) {
    if (name == "low") return DensityClass::low;
    if (name == "mid") return DensityClass::mid;
    if (name == "high") return DensityClass::high;
    fail(ErrorCode::invalid_argument, "unknown density class '" + name + "'");
}

std::pair<int, int> obstacle_count_range(DensityClass c) {
    switch (c) {
        case DensityClass::low: return {20, 30};
        case DensityClass::mid: return {50, 75};
        case DensityClass::high: return {100, 150};
    }
    fail(ErrorCode::invalid_argument, "unknown density class");
}

namespace {

// min Chebyshev distance between the cell sets of two rectangles
int rect_gap(const Obstacle& a, const Obstacle& b) {
    const int dr = std::max({0, b.row - (a.row + a.height_cells - 1),
                             a.row - (b.row + b.height_cells - 1)});
    const int dc = std::max({0, b.col - (a.col + a.width_cells - 1),
                             a.col - (b.col + b.width_cells - 1)});
    return std::max(dr, dc);
}

bool inside_candidate(const Obstacle& o, int r, int c) {
    return r >= o.row && r < o.row + o.height_cells && c >= o.col &&
           c < o.col + o.width_cells;
}

// flood from the corner (always free, obstacles keep off the boundary) and
// see whether every free cell outside the candidate is still reachable
bool connected_with(const std::vector<char>& blocked, int rows, int cols,
                    int blocked_count, const Obstacle& cand) {
    const auto idx = [cols](int r, int c) {
        return static_cast<std::size_t>(r) * cols + c;
    };
    const int free_total =
        rows * cols - blocked_count - cand.height_cells * cand.width_cells;

    std::vector<char> seen(static_cast<std::size_t>(rows) * cols, 0);
    std::vector<std::pair<int, int>> stack = {{0, 0}};
    seen[idx(0, 0)] = 1;
    int reached = 0;
    while (!stack.empty()) {
        const auto [r, c] = stack.back();
        stack.pop_back();
        ++reached;
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                const int nr = r + dr, nc = c + dc;
                if ((dr == 0 && dc == 0) || nr < 0 || nr >= rows || nc < 0 ||
                    nc >= cols)
                    continue;
                if (seen[idx(nr, nc)] || blocked[idx(nr, nc)] ||
                    inside_candidate(cand, nr, nc))
                    continue;
                seen[idx(nr, nc)] = 1;
                stack.push_back({nr, nc});
            }
    }
    return reached == free_total;
}

} // namespace

GeneratedEnvironment generate_environment(const GeneratorParams& params, Rng& rng) {
    require(params.cols_min >= 4 && params.cols_min <= params.cols_max,
            ErrorCode::invalid_argument, "bad column range");
    require(params.rows_min >= 4 && params.rows_min <= params.rows_max,
            ErrorCode::invalid_argument, "bad row range");
    require(params.cell_size > 0.0, ErrorCode::invalid_argument,
            "cell size must be positive");

    GeneratedEnvironment out;
    Environment& env = out.env;
    env.cell_size = params.cell_size;
    env.cols = params.cols_min +
               static_cast<int>(rng.below(params.cols_max - params.cols_min + 1));
    env.rows = params.rows_min +
               static_cast<int>(rng.below(params.rows_max - params.rows_min + 1));

    const auto [lo, hi] = obstacle_count_range(params.density);
    out.target_obstacles = lo + static_cast<int>(rng.below(hi - lo + 1));

    std::vector<char> blocked(static_cast<std::size_t>(env.rows) * env.cols, 0);
    int blocked_count = 0;
    const int half = env.rows / 2;
    int rejections = 0;
    constexpr int kRetryBudget = 10000;

    while (static_cast<int>(env.obstacles.size()) < out.target_obstacles) {
        if (rejections >= kRetryBudget) {
            out.placement_exhausted = true;
            break;
        }
        // each attempt re-rolls the obstacle completely
        const bool vertical = rng.below(2) == 0;
        const int width =
            vertical ? 1 + static_cast<int>(rng.below(2))
                     : 1 + static_cast<int>(rng.below(25));
        const int height = std::clamp((half + width - 1) / width, 1, half);
        const int row_span = env.rows - height - 1;
        const int col_span = env.cols - width - 1;
        if (row_span < 1 || col_span < 1) {
            ++rejections;
            continue;
        }
        const Obstacle cand{1 + static_cast<int>(rng.below(row_span)),
                            1 + static_cast<int>(rng.below(col_span)), height,
                            width};
        bool ok = true;
        for (const auto& o : env.obstacles)
            if (rect_gap(o, cand) < 2) {
                ok = false;
                break;
            }
        if (ok && !connected_with(blocked, env.rows, env.cols, blocked_count, cand))
            ok = false;
        if (!ok) {
            ++rejections;
            continue;
        }
        env.obstacles.push_back(cand);
        for (int r = cand.row; r < cand.row + cand.height_cells; ++r)
            for (int c = cand.col; c < cand.col + cand.width_cells; ++c)
                blocked[static_cast<std::size_t>(r) * env.cols + c] = 1;
        blocked_count += cand.height_cells * cand.width_cells;
    }
    env.validate();
    return out;
}

std::vector<ScenarioConfig> generate_configs(const Environment& env, int n,
                                             int count, Rng& rng) {
    require(n >= 1, ErrorCode::invalid_argument, "need at least one pedestrian");
    require(count >= 1, ErrorCode::invalid_argument, "need at least one config");

    const auto grid = build_grid(env);
    std::vector<Cell> cells;
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c)
            if (!grid.is_obstacle(r, c)) cells.push_back({r, c});
    require(static_cast<int>(cells.size()) >= n, ErrorCode::too_crowded,
            "more pedestrians than traversable cells");

    std::vector<ScenarioConfig> configs;
    configs.reserve(count);
    for (int i = 0; i < count; ++i) {
        auto pool = cells;
        rng.shuffle(pool);
        ScenarioConfig cfg;
        cfg.positions.assign(pool.begin(), pool.begin() + n);
        cfg.velocity_percent.reserve(n);
        cfg.field_bias.reserve(n);
        cfg.repulsion_bias.reserve(n);
        for (int p = 0; p < n; ++p) {
            cfg.velocity_percent.push_back(rng.uniform(0.5, 1.0));
            cfg.field_bias.push_back(rng.uniform(1.5, 2.0));
            cfg.repulsion_bias.push_back(rng.uniform(0.25, 0.5));
        }
        configs.push_back(std::move(cfg));
    }
    return configs;
}

TrainTestSplit split_train_test(const std::vector<ScenarioConfig>& configs,
                                int train_size) {
    require(train_size >= 1, ErrorCode::invalid_argument,
            "training size must be positive");
    require(static_cast<int>(configs.size()) >= train_size,
            ErrorCode::invalid_argument, "fewer configs than the training size");
    TrainTestSplit s;
    s.train.assign(configs.begin(), configs.begin() + train_size);
    s.test.assign(configs.begin() + train_size, configs.end());
    s.empty_test_warning = s.test.empty();
    return s;
}

std::string instance_filename(DensityClass c, int index) {
    return std::string(density_name(c)) + "-" + std::to_string(index) + ".json";
}

nlohmann::json instance_to_json(const Instance& inst) {
    nlohmann::json j = inst.env;
    auto configs = nlohmann::json::array();
    for (const auto& cfg : inst.configs) {
        auto positions = nlohmann::json::array();
        for (const auto& cell : cfg.positions)
            positions.push_back({cell.row, cell.col});
        configs.push_back({{"positions", std::move(positions)},
                           {"vp", cfg.velocity_percent},
                           {"phi", cfg.field_bias},
                           {"zeta", cfg.repulsion_bias}});
    }
    j["configs"] = std::move(configs);
    j["trainCount"] = inst.train_count;
    return j;
}

Instance instance_from_json(const nlohmann::json& j, std::string id) {
    Instance inst;
    inst.id = std::move(id);
    inst.env = j.get<Environment>();
    inst.train_count = j.at("trainCount").get<int>();
    for (const auto& jc : j.at("configs")) {
        ScenarioConfig cfg;
        for (const auto& jp : jc.at("positions")) {
            require(jp.is_array() && jp.size() == 2, ErrorCode::invalid_config,
                    "positions must be [row, col] pairs");
            cfg.positions.push_back({jp[0].get<int>(), jp[1].get<int>()});
        }
        cfg.velocity_percent = jc.at("vp").get<std::vector<double>>();
        cfg.field_bias = jc.at("phi").get<std::vector<double>>();
        cfg.repulsion_bias = jc.at("zeta").get<std::vector<double>>();
        require(cfg.velocity_percent.size() == cfg.positions.size() &&
                    cfg.field_bias.size() == cfg.positions.size() &&
                    cfg.repulsion_bias.size() == cfg.positions.size(),
                ErrorCode::invalid_config,
                "per-pedestrian arrays must match the position count");
        inst.configs.push_back(std::move(cfg));
    }
    return inst;
}

void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::io, "cannot open '" + path + "' for writing");
    out << instance_to_json(inst).dump(2) << '\n';
    require(out.good(), ErrorCode::io, "write to '" + path + "' failed");
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::io, "cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::io, "cannot parse '" + path + "': " + e.what());
    }
    return instance_from_json(j, std::filesystem::path(path).stem().string());
}

} // namespace evac
