#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ca_engine.hpp"
#include "env_model.hpp"
#include "rng.hpp"

namespace evac {

enum class DensityClass { low, mid, high };

const char* density_name(DensityClass c);
DensityClass density_from_name(const std::string& name);

// inclusive bounds on the obstacle count drawn for each class
std::pair<int, int> obstacle_count_range(DensityClass c);

struct GeneratorParams {
    int cols_min = 40;
    int cols_max = 50;
    int rows_min = 20;
    int rows_max = 30;
    DensityClass density = DensityClass::low;
    double cell_size = 0.5;
};

struct GeneratedEnvironment {
    Environment env;
    int target_obstacles = 0;
    // set when the retry budget ran out and the environment holds fewer
    // obstacles than targeted
    bool placement_exhausted = false;
};

// Rejection sampling: each obstacle draws orientation, size and position
// afresh until it fits (inside the walls with one cell of clearance, two
// cells of Chebyshev separation from every other obstacle, floor still fully
// walkable). A shared budget of 10,000 rejected attempts bounds the loop.
GeneratedEnvironment generate_environment(const GeneratorParams& params, Rng& rng);

// count configurations of n distinct pedestrians on traversable cells,
// per-pedestrian parameters uniform in their ranges
std::vector<ScenarioConfig> generate_configs(const Environment& env, int n,
                                             int count, Rng& rng);

struct TrainTestSplit {
    std::vector<ScenarioConfig> train;
    std::vector<ScenarioConfig> test;
    bool empty_test_warning = false;
};

TrainTestSplit split_train_test(const std::vector<ScenarioConfig>& configs,
                                int train_size = 20);

struct Instance {
    std::string id; // file stem, e.g. "low-1"
    Environment env;
    std::vector<ScenarioConfig> configs;
    int train_count = 20;
};

std::string instance_filename(DensityClass c, int index);

nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j, std::string id);

void save_instance(const Instance& inst, const std::string& path);
Instance load_instance(const std::string& path);

} // namespace evac
