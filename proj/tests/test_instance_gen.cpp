#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "env_model.hpp"
#include "errors.hpp"
#include "instance_gen.hpp"
#include "rng.hpp"

using namespace evac;

namespace {

// min Chebyshev distance between any two cells of the rectangles
int rect_gap(const Obstacle& a, const Obstacle& b) {
    const int dr = std::max({0, b.row - (a.row + a.height_cells - 1),
                             a.row - (b.row + b.height_cells - 1)});
    const int dc = std::max({0, b.col - (a.col + a.width_cells - 1),
                             a.col - (b.col + b.width_cells - 1)});
    return std::max(dr, dc);
}

int expected_height(int width, int rows) {
    const int half = rows / 2;
    const int h = (half + width - 1) / width;
    return std::clamp(h, 1, half);
}

// every non-obstacle cell reachable from the corner, moving 8-connected
bool fully_connected(const Environment& env) {
    const auto grid = build_grid(env);
    std::vector<char> seen(static_cast<std::size_t>(grid.rows) * grid.cols, 0);
    std::vector<Cell> stack = {{0, 0}};
    REQUIRE(!grid.is_obstacle(0, 0));
    seen[grid.idx(0, 0)] = 1;
    while (!stack.empty()) {
        const auto [r, c] = stack.back();
        stack.pop_back();
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                const int nr = r + dr, nc = c + dc;
                if ((dr == 0 && dc == 0) || !grid.in_bounds(nr, nc)) continue;
                if (grid.is_obstacle(nr, nc) || seen[grid.idx(nr, nc)]) continue;
                seen[grid.idx(nr, nc)] = 1;
                stack.push_back({nr, nc});
            }
    }
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c)
            if (!grid.is_obstacle(r, c) && !seen[grid.idx(r, c)]) return false;
    return true;
}

void check_environment_invariants(const GeneratedEnvironment& g,
                                  const GeneratorParams& params) {
    const auto& env = g.env;
    CHECK(env.rows >= params.rows_min);
    CHECK(env.rows <= params.rows_max);
    CHECK(env.cols >= params.cols_min);
    CHECK(env.cols <= params.cols_max);
    CHECK(env.cell_size == params.cell_size);
    CHECK(env.accesses.empty());

    const auto [lo, hi] = obstacle_count_range(params.density);
    CHECK(g.target_obstacles >= lo);
    CHECK(g.target_obstacles <= hi);
    if (!g.placement_exhausted)
        CHECK(static_cast<int>(env.obstacles.size()) == g.target_obstacles);
    else
        CHECK(static_cast<int>(env.obstacles.size()) < g.target_obstacles);

    for (const auto& o : env.obstacles) {
        CHECK(o.row >= 1);
        CHECK(o.col >= 1);
        CHECK(o.row + o.height_cells <= env.rows - 1);
        CHECK(o.col + o.width_cells <= env.cols - 1);
        CHECK(o.width_cells >= 1);
        CHECK(o.width_cells <= 25);
        CHECK(o.height_cells == expected_height(o.width_cells, env.rows));
        CHECK(o.height_cells <= env.rows / 2);
    }
    for (std::size_t i = 0; i < env.obstacles.size(); ++i)
        for (std::size_t j = i + 1; j < env.obstacles.size(); ++j)
            CHECK(rect_gap(env.obstacles[i], env.obstacles[j]) >= 2);

    CHECK(fully_connected(env));
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("density classes and their obstacle budgets") {
    CHECK(obstacle_count_range(DensityClass::low) == std::pair{20, 30});
    CHECK(obstacle_count_range(DensityClass::mid) == std::pair{50, 75});
    CHECK(obstacle_count_range(DensityClass::high) == std::pair{100, 150});

    CHECK(density_name(DensityClass::low) == std::string("low"));
    CHECK(density_from_name("mid") == DensityClass::mid);
    CHECK(density_from_name("high") == DensityClass::high);
    CHECK_THROWS_AS(density_from_name("extreme"), Error);

    CHECK(instance_filename(DensityClass::low, 1) == "low-1.json");
    CHECK(instance_filename(DensityClass::high, 12) == "high-12.json");
}

TEST_CASE("generated environments satisfy every placement rule") {
    for (auto density : {DensityClass::low, DensityClass::mid, DensityClass::high}) {
        GeneratorParams params;
        params.density = density;
        for (std::uint64_t seed = 0; seed < 12; ++seed) {
            Rng rng(derive_seed(404, static_cast<std::uint64_t>(density), seed));
            const auto g = generate_environment(params, rng);
            check_environment_invariants(g, params);
        }
    }
}

TEST_CASE("dimension draws cover their whole ranges") {
    GeneratorParams params;
    params.density = DensityClass::low;
    std::set<int> rows_seen, cols_seen;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(derive_seed(7, seed));
        const auto g = generate_environment(params, rng);
        rows_seen.insert(g.env.rows);
        cols_seen.insert(g.env.cols);
    }
    CHECK(static_cast<int>(rows_seen.size()) ==
          params.rows_max - params.rows_min + 1);
    CHECK(static_cast<int>(cols_seen.size()) ==
          params.cols_max - params.cols_min + 1);
}

TEST_CASE("environment generation is deterministic in the seed") {
    GeneratorParams params;
    params.density = DensityClass::mid;
    Rng a(909), b(909);
    const auto ga = generate_environment(params, a);
    const auto gb = generate_environment(params, b);
    CHECK(nlohmann::json(ga.env).dump() == nlohmann::json(gb.env).dump());

    Rng c(910);
    const auto gc = generate_environment(params, c);
    CHECK(nlohmann::json(ga.env).dump() != nlohmann::json(gc.env).dump());
}

TEST_CASE("impossible obstacle budgets exhaust gracefully") {
    GeneratorParams params;
    params.cols_min = params.cols_max = 40;
    params.rows_min = params.rows_max = 20;
    params.density = DensityClass::high; // 100+ obstacles cannot fit in 40x20
    Rng rng(31337);
    const auto g = generate_environment(params, rng);
    CHECK(g.placement_exhausted);
    CHECK(static_cast<int>(g.env.obstacles.size()) < g.target_obstacles);
    check_environment_invariants(g, params);
}

TEST_CASE("pedestrian configurations sample distinct traversable cells") {
    GeneratorParams params;
    params.density = DensityClass::mid;
    Rng rng(555);
    const auto g = generate_environment(params, rng);
    const auto grid = build_grid(g.env);

    const auto configs = generate_configs(g.env, 100, 25, rng);
    REQUIRE(configs.size() == 25);
    for (const auto& cfg : configs) {
        REQUIRE(cfg.positions.size() == 100);
        REQUIRE(cfg.velocity_percent.size() == 100);
        REQUIRE(cfg.field_bias.size() == 100);
        REQUIRE(cfg.repulsion_bias.size() == 100);
        std::set<Cell> distinct(cfg.positions.begin(), cfg.positions.end());
        CHECK(distinct.size() == cfg.positions.size());
        for (const auto& cell : cfg.positions) {
            CHECK(grid.in_bounds(cell.row, cell.col));
            CHECK(!grid.is_obstacle(cell.row, cell.col));
        }
        for (double v : cfg.velocity_percent) {
            CHECK(v >= 0.5);
            CHECK(v <= 1.0);
        }
        for (double v : cfg.field_bias) {
            CHECK(v >= 1.5);
            CHECK(v <= 2.0);
        }
        for (double v : cfg.repulsion_bias) {
            CHECK(v >= 0.25);
            CHECK(v <= 0.5);
        }
    }

    // two configs from one stream should differ
    CHECK(configs[0].positions != configs[1].positions);
}

TEST_CASE("saturated placement uses every traversable cell") {
    Environment env;
    env.rows = 5;
    env.cols = 5;
    env.obstacles = {{2, 2, 1, 1}};
    const auto grid = build_grid(env);
    const int free_cells = grid.traversable_count();
    REQUIRE(free_cells == 24);

    Rng rng(1);
    const auto configs = generate_configs(env, free_cells, 2, rng);
    for (const auto& cfg : configs) {
        std::set<Cell> got(cfg.positions.begin(), cfg.positions.end());
        CHECK(static_cast<int>(got.size()) == free_cells);
    }

    Rng rng2(2);
    CHECK_THROWS_AS(generate_configs(env, free_cells + 1, 1, rng2), Error);
}

TEST_CASE("config generation is deterministic in the seed") {
    Environment env;
    env.rows = 8;
    env.cols = 9;
    Rng a(77), b(77);
    const auto ca = generate_configs(env, 10, 4, a);
    const auto cb = generate_configs(env, 10, 4, b);
    REQUIRE(ca.size() == cb.size());
    for (std::size_t i = 0; i < ca.size(); ++i) {
        CHECK(ca[i].positions == cb[i].positions);
        CHECK(ca[i].velocity_percent == cb[i].velocity_percent);
        CHECK(ca[i].field_bias == cb[i].field_bias);
        CHECK(ca[i].repulsion_bias == cb[i].repulsion_bias);
    }
}

TEST_CASE("train and test split by index") {
    std::vector<ScenarioConfig> configs(1000);
    for (int i = 0; i < 1000; ++i) configs[i].positions = {{i, i}};

    SUBCASE("standard split") {
        const auto s = split_train_test(configs, 20);
        CHECK(s.train.size() == 20);
        CHECK(s.test.size() == 980);
        CHECK(s.train[0].positions[0].row == 0);
        CHECK(s.train[19].positions[0].row == 19);
        CHECK(s.test[0].positions[0].row == 20);
        CHECK(!s.empty_test_warning);
    }
    SUBCASE("one spare config") {
        const auto s = split_train_test({configs.begin(), configs.begin() + 21}, 20);
        CHECK(s.train.size() == 20);
        CHECK(s.test.size() == 1);
        CHECK(!s.empty_test_warning);
    }
    SUBCASE("nothing left for testing") {
        const auto s = split_train_test({configs.begin(), configs.begin() + 20}, 20);
        CHECK(s.train.size() == 20);
        CHECK(s.test.empty());
        CHECK(s.empty_test_warning);
    }
    SUBCASE("too few configs") {
        CHECK_THROWS_AS(
            split_train_test({configs.begin(), configs.begin() + 19}, 20), Error);
    }
}

TEST_CASE("instance files round trip exactly") {
    GeneratorParams params;
    params.density = DensityClass::low;
    Rng rng(2211);
    auto g = generate_environment(params, rng);

    Instance inst;
    inst.id = "low-3";
    inst.env = g.env;
    inst.configs = generate_configs(g.env, 12, 5, rng);
    inst.train_count = 3;

    const std::string path = "/tmp/evac_instance_roundtrip.json";
    save_instance(inst, path);
    const auto loaded = load_instance(path);

    CHECK(loaded.id == "evac_instance_roundtrip");
    CHECK(loaded.train_count == 3);
    CHECK(nlohmann::json(loaded.env).dump() == nlohmann::json(inst.env).dump());
    REQUIRE(loaded.configs.size() == inst.configs.size());
    for (std::size_t i = 0; i < inst.configs.size(); ++i) {
        CHECK(loaded.configs[i].positions == inst.configs[i].positions);
        CHECK(loaded.configs[i].velocity_percent == inst.configs[i].velocity_percent);
        CHECK(loaded.configs[i].field_bias == inst.configs[i].field_bias);
        CHECK(loaded.configs[i].repulsion_bias == inst.configs[i].repulsion_bias);
    }

    // field names are part of the interface
    const auto j = instance_to_json(inst);
    REQUIRE(j.contains("configs"));
    REQUIRE(j.contains("trainCount"));
    REQUIRE(j.contains("rows"));
    REQUIRE(j.contains("cellSize"));
    const auto& c0 = j["configs"][0];
    REQUIRE(c0.contains("positions"));
    REQUIRE(c0.contains("vp"));
    REQUIRE(c0.contains("phi"));
    REQUIRE(c0.contains("zeta"));
    CHECK(c0["positions"][0].is_array());
    CHECK(c0["positions"][0].size() == 2);

    // same instance written twice gives identical bytes
    const std::string path2 = "/tmp/evac_instance_roundtrip2.json";
    save_instance(inst, path2);
    CHECK(slurp(path) == slurp(path2));
}
