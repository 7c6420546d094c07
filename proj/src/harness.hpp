#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "instance_gen.hpp"
#include "optimizers.hpp"
#include "report.hpp"

namespace evac {

// FNV-1a over the instance id; used when no explicit evaluation seed is given
// so records stay reproducible from the instance file alone.
std::uint64_t default_eval_seed(const std::string& instance_id);

struct GenOptions {
    std::vector<DensityClass> classes = {DensityClass::low, DensityClass::mid,
                                         DensityClass::high};
    int per_class = 5;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    int pedestrians = 100;
    int config_count = 1000;
    int train_size = 20;
    GeneratorParams base; // density is overwritten per class
};

struct GenResult {
    std::vector<std::string> files;
    std::vector<std::string> warnings;
};

// Writes <class>-<i>.json for every requested class. Instance seeds derive
// from (seed, class, index), so generating a subset yields the same files as
// generating everything.
GenResult cmd_generate(const GenOptions& opts);

struct OptimizeOptions {
    std::string instance_path;
    std::string algorithm = "iea"; // greedy | ea | iea
    int exits = 3;
    double exit_width = 2.0;
    int runs = 20;
    long long budget = 20000;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> eval_seed; // default: hash of the instance id
    int sims_per_config = 1;
    double greedy_step = -1.0; // non-positive: use exit_width
    EAConfig ea;
    IslandConfig island;
    SimParams sim;
    std::string out_dir; // empty: records are returned but not written
    int threads = 0;     // 0: one per run up to the hardware limit
};

// Runs `runs` independent optimizations (run r is seeded with
// derive_seed(seed, r)) and returns one record per run, in run order.
// With an out_dir, also writes each record plus a combined runlog csv.
std::vector<RunRecord> cmd_optimize(const OptimizeOptions& opts);

struct TestOptions {
    int sims_per_config = 1;
    SimParams sim;
};

// Per (k, algorithm): the record with the best training psi, re-scored on
// every held-out config individually.
struct TestRow {
    std::string algorithm;
    int k = 0;
    int source_run = 0;
    std::vector<double> genome;
    SummaryRow stats; // distribution of per-test-config fitness
};

std::vector<TestRow> cmd_test(const std::vector<RunRecord>& records,
                              const Instance& instance,
                              const TestOptions& opts = {});

std::string render_test_csv(const std::vector<TestRow>& rows);
std::string render_test_text(const std::vector<TestRow>& rows);

struct ReportBundle {
    std::string summary_csv;
    std::string rank_csv;
    std::string text;
};

ReportBundle cmd_report(const std::vector<RunRecord>& records);

// Loads every *.json run record in the directory (non-record json is an
// error). Sorted by filename, so downstream output is directory-order free.
std::vector<RunRecord> load_records_dir(const std::string& dir);

struct SimulateOptions {
    std::string instance_path;
    std::vector<double> exits;
    double exit_width = 2.0;
    int config_index = 0;
    std::uint64_t seed = 1;
    std::string trace_path; // empty: no trace written
    SimParams sim;
};

struct SimulateResult {
    SimOutcome outcome;
    FitnessBreakdown fitness;
    int pedestrians = 0;
};

SimulateResult cmd_simulate(const SimulateOptions& opts);

std::string render_simulate_text(const SimulateResult& r);

} // namespace evac
