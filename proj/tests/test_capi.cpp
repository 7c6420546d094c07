#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <evacopt/evacopt.h>

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("evacopt-capi-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string take(char* s) {
    REQUIRE(s != nullptr);
    std::string copy(s);
    evac_string_free(s);
    return copy;
}

// one small low-density instance under dir, returns its path
std::string gen_small(const fs::path& dir) {
    evac_gen_options g;
    evac_gen_options_init(&g);
    const std::string out_dir = dir.string();
    g.classes = "low";
    g.per_class = 1;
    g.seed = 9;
    g.out_dir = out_dir.c_str();
    g.pedestrians = 8;
    g.config_count = 10;
    g.train_size = 3;
    char* report = nullptr;
    REQUIRE(evac_generate(&g, &report) == EVAC_OK);
    CHECK(take(report).find("low-1.json") != std::string::npos);
    return (dir / "low-1.json").string();
}

} // namespace

TEST_CASE("failures set a status and a message") {
    evac_instance* inst = reinterpret_cast<evac_instance*>(1);
    CHECK(evac_instance_load("definitely-missing.json", &inst) == EVAC_ERR_IO);
    CHECK(inst == nullptr);
    CHECK(!std::string(evac_last_error()).empty());

    CHECK(evac_instance_load(nullptr, &inst) == EVAC_ERR_INVALID_ARGUMENT);
    CHECK(evac_generate(nullptr, nullptr) == EVAC_ERR_INVALID_ARGUMENT);
    CHECK(evac_optimize(nullptr, nullptr) == EVAC_ERR_INVALID_ARGUMENT);
    CHECK(evac_simulate(nullptr, nullptr) == EVAC_ERR_INVALID_ARGUMENT);
    CHECK(evac_report(nullptr, nullptr, nullptr, nullptr) ==
          EVAC_ERR_INVALID_ARGUMENT);

    evac_string_free(nullptr); // tolerated
    CHECK(!std::string(evac_version()).empty());
}

TEST_CASE("option initializers fill in the documented defaults") {
    evac_gen_options g;
    evac_gen_options_init(&g);
    CHECK(std::string(g.classes) == "low,mid,high");
    CHECK(g.per_class == 5);
    CHECK(g.pedestrians == 100);
    CHECK(g.config_count == 1000);
    CHECK(g.train_size == 20);

    evac_optimize_options o;
    evac_optimize_options_init(&o);
    CHECK(o.exits == 3);
    CHECK(o.exit_width == 2.0);
    CHECK(o.runs == 20);
    CHECK(o.budget == 20000);
    CHECK(o.sims_per_config == 1);
    CHECK(o.population == 100);
    CHECK(o.crossover_prob == 0.9);
    CHECK(o.mutation_amplitude == 0.05);
    CHECK(o.mutation_rate < 0.0);
    CHECK(o.elitism == 1);
    CHECK(o.islands == 4);
    CHECK(o.island_size == 25);
    CHECK(o.migration_interval == 10);
    CHECK(o.time_limit == 60.0);
    CHECK(o.reference_speed == 1.3);
    CHECK(o.has_eval_seed == 0);

    evac_simulate_options s;
    evac_simulate_options_init(&s);
    CHECK(s.exit_width == 2.0);
    CHECK(s.config_index == 0);
    CHECK(s.time_limit == 60.0);
}

TEST_CASE("instances expose their layout and score exit sets") {
    const fs::path dir = fresh_dir("inspect");
    const std::string path = gen_small(dir);

    evac_instance* inst = nullptr;
    REQUIRE(evac_instance_load(path.c_str(), &inst) == EVAC_OK);
    REQUIRE(inst != nullptr);

    CHECK(std::string(evac_instance_id(inst)) == "low-1");
    CHECK(evac_instance_rows(inst) >= 20);
    CHECK(evac_instance_rows(inst) <= 30);
    CHECK(evac_instance_cols(inst) >= 40);
    CHECK(evac_instance_cols(inst) <= 50);
    CHECK(evac_instance_cell_size(inst) == 0.5);
    CHECK(evac_instance_perimeter(inst) ==
          (evac_instance_rows(inst) + evac_instance_cols(inst)) * 1.0);
    CHECK(evac_instance_config_count(inst) == 10);
    CHECK(evac_instance_train_count(inst) == 3);
    CHECK(evac_instance_pedestrian_count(inst) == 8);

    const double exits[2] = {1.0, 0.5 * evac_instance_perimeter(inst)};
    double a = 0.0, b = 0.0, all = 0.0;
    REQUIRE(evac_psi(inst, exits, 2, 2.0, 77, 1, 0, &a) == EVAC_OK);
    REQUIRE(evac_psi(inst, exits, 2, 2.0, 77, 1, 0, &b) == EVAC_OK);
    CHECK(a == b);
    CHECK(a > 0.0);
    REQUIRE(evac_psi(inst, exits, 2, 2.0, 77, 1, 1, &all) == EVAC_OK);
    CHECK(all > 0.0);

    CHECK(evac_psi(inst, exits, 0, 2.0, 77, 1, 0, &a) ==
          EVAC_ERR_INVALID_ARGUMENT);
    evac_instance_free(inst);
    evac_instance_free(nullptr); // tolerated

    evac_gen_options bad;
    evac_gen_options_init(&bad);
    bad.classes = "dense";
    CHECK(evac_generate(&bad, nullptr) == EVAC_ERR_INVALID_ARGUMENT);
}

TEST_CASE("commands cover the whole optimize, test, report, simulate flow") {
    const fs::path dir = fresh_dir("flow");
    const std::string path = gen_small(dir);
    const std::string rec_dir = (dir / "rec").string();

    evac_instance* inst = nullptr;
    REQUIRE(evac_instance_load(path.c_str(), &inst) == EVAC_OK);
    const long long budget =
        2 * static_cast<long long>(std::ceil(evac_instance_perimeter(inst) / 2.0));
    evac_instance_free(inst);

    evac_optimize_options o;
    evac_optimize_options_init(&o);
    o.instance_path = path.c_str();
    o.algorithm = "greedy";
    o.exits = 2;
    o.runs = 2;
    o.budget = budget;
    o.seed = 5;
    o.threads = 2;
    o.out_dir = rec_dir.c_str();
    char* summary = nullptr;
    REQUIRE(evac_optimize(&o, &summary) == EVAC_OK);
    const std::string summary_text = take(summary);
    CHECK(summary_text.find("best run") != std::string::npos);
    CHECK(summary_text.find("records written to") != std::string::npos);
    REQUIRE(fs::exists(fs::path(rec_dir) / "low-1-greedy-k2-run0.json"));

    SUBCASE("a second invocation reproduces the records byte for byte") {
        const fs::path rec2 = fresh_dir("flow-again");
        const std::string rec2_str = rec2.string();
        evac_optimize_options o2 = o;
        o2.out_dir = rec2_str.c_str();
        REQUIRE(evac_optimize(&o2, nullptr) == EVAC_OK);
        CHECK(slurp(rec2 / "low-1-greedy-k2-run0.json") ==
              slurp(fs::path(rec_dir) / "low-1-greedy-k2-run0.json"));
        CHECK(slurp(rec2 / "low-1-greedy-k2-run1.json") ==
              slurp(fs::path(rec_dir) / "low-1-greedy-k2-run1.json"));
    }

    SUBCASE("status codes pass through from the core") {
        evac_optimize_options bad = o;
        bad.algorithm = "magic";
        CHECK(evac_optimize(&bad, nullptr) == EVAC_ERR_INVALID_ARGUMENT);

        bad = o;
        bad.algorithm = "ea";
        bad.population = 50;
        bad.budget = 10; // cannot even initialize the population
        CHECK(evac_optimize(&bad, nullptr) == EVAC_ERR_BUDGET_EXHAUSTED);
    }

    SUBCASE("test and report read the records back") {
        evac_optimize_options e = o;
        e.algorithm = "ea";
        e.population = 6;
        e.runs = 1;
        e.budget = 30;
        REQUIRE(evac_optimize(&e, nullptr) == EVAC_OK);

        char* csv = nullptr;
        char* text = nullptr;
        REQUIRE(evac_test(rec_dir.c_str(), path.c_str(), 1, &csv, &text) ==
                EVAC_OK);
        const std::string csv_text = take(csv);
        CHECK(csv_text.rfind("algo,k,run,tests,", 0) == 0);
        CHECK(csv_text.find("greedy") != std::string::npos);
        CHECK(csv_text.find("ea") != std::string::npos);
        CHECK(take(text).find("greedy") != std::string::npos);

        char* sum = nullptr;
        char* ranks = nullptr;
        char* rtext = nullptr;
        REQUIRE(evac_report(rec_dir.c_str(), &sum, &ranks, &rtext) == EVAC_OK);
        CHECK(take(sum).rfind("instance,k,algo,runs,", 0) == 0);
        CHECK(take(ranks).find("mean,,") != std::string::npos);
        CHECK(!take(rtext).empty());

        const fs::path empty = fresh_dir("flow-empty");
        CHECK(evac_report(empty.string().c_str(), &sum, nullptr, nullptr) ==
              EVAC_ERR_IO);
    }

    SUBCASE("simulate traces and reproduces") {
        const fs::path trace = dir / "trace.csv";
        const std::string trace_str = trace.string();
        const double exits[2] = {1.5, 20.0};
        evac_simulate_options so;
        evac_simulate_options_init(&so);
        so.instance_path = path.c_str();
        so.exits = exits;
        so.n_exits = 2;
        so.seed = 3;
        so.trace_path = trace_str.c_str();
        char* text = nullptr;
        REQUIRE(evac_simulate(&so, &text) == EVAC_OK);
        const std::string first = take(text);
        CHECK(first.find("pedestrians: 8") != std::string::npos);
        CHECK(slurp(trace).rfind("step,id,row,col,status\n", 0) == 0);

        so.trace_path = nullptr;
        REQUIRE(evac_simulate(&so, &text) == EVAC_OK);
        CHECK(take(text) == first);

        so.n_exits = 0;
        CHECK(evac_simulate(&so, nullptr) == EVAC_ERR_INVALID_ARGUMENT);
    }
}
