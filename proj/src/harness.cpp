#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "errors.hpp"

namespace fs = std::filesystem;

namespace evac {

std::uint64_t default_eval_seed(const std::string& instance_id) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : instance_id) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::io, "cannot create directory '" + dir + "': " + ec.message());
    if (!fs::is_directory(dir))
        fail(ErrorCode::io, "'" + dir + "' is not a directory");
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::io, "cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    require(out.good(), ErrorCode::io, "write to '" + path + "' failed");
}

} // namespace

GenResult cmd_generate(const GenOptions& opts) {
    require(!opts.classes.empty(), ErrorCode::invalid_argument, "no density classes requested");
    require(opts.per_class >= 1, ErrorCode::invalid_argument, "count must be at least 1");
    require(opts.pedestrians >= 1, ErrorCode::invalid_argument, "pedestrian count must be at least 1");
    require(opts.config_count >= 1, ErrorCode::invalid_argument, "configuration count must be at least 1");
    require(opts.train_size >= 1 && opts.train_size <= opts.config_count,
            ErrorCode::invalid_argument, "training size must be in [1, configuration count]");
    ensure_dir(opts.out_dir);

    GenResult out;
    for (DensityClass cls : opts.classes) {
        for (int i = 1; i <= opts.per_class; ++i) {
            GeneratorParams params = opts.base;
            params.density = cls;
            // seeded per (class, index): generating a subset of classes or a
            // smaller count reproduces a prefix of the full corpus
            Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(cls),
                                static_cast<std::uint64_t>(i)));
            GeneratedEnvironment gen = generate_environment(params, rng);

            Instance inst;
            const std::string name = instance_filename(cls, i);
            inst.id = fs::path(name).stem().string();
            inst.env = gen.env;
            inst.configs = generate_configs(gen.env, opts.pedestrians,
                                            opts.config_count, rng);
            inst.train_count = opts.train_size;

            const std::string path = (fs::path(opts.out_dir) / name).string();
            save_instance(inst, path);
            out.files.push_back(path);
            if (gen.placement_exhausted)
                out.warnings.push_back(
                    inst.id + ": obstacle placement budget exhausted, kept " +
                    std::to_string(inst.env.obstacles.size()) + " of " +
                    std::to_string(gen.target_obstacles));
        }
    }
    return out;
}

std::vector<RunRecord> cmd_optimize(const OptimizeOptions& opts) {
    require(opts.runs >= 1, ErrorCode::invalid_argument, "runs must be at least 1");
    require(opts.exits >= 1, ErrorCode::invalid_argument, "exits must be at least 1");
    require(opts.budget >= 1, ErrorCode::invalid_argument, "budget must be at least 1");
    require(opts.sims_per_config >= 1, ErrorCode::invalid_argument,
            "simulations per configuration must be at least 1");
    require(opts.exit_width > 0.0, ErrorCode::invalid_argument, "exit width must be positive");
    const bool greedy = opts.algorithm == "greedy";
    if (!greedy && opts.algorithm != "ea" && opts.algorithm != "iea")
        fail(ErrorCode::invalid_argument, "unknown algorithm '" + opts.algorithm + "'");

    const Instance inst = load_instance(opts.instance_path);
    const TrainTestSplit split = split_train_test(inst.configs, inst.train_count);
    const std::uint64_t eval_seed =
        opts.eval_seed ? *opts.eval_seed : default_eval_seed(inst.id);
    const EvaluationPlan plan{split.train, eval_seed, opts.sims_per_config};
    const double step = opts.greedy_step > 0.0 ? opts.greedy_step : opts.exit_width;

    std::vector<RunRecord> records(opts.runs);
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&]() {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= opts.runs) return;
            try {
                Evaluator eval(inst.env, plan, opts.sim, opts.exit_width, opts.budget);
                const std::uint64_t run_seed = derive_seed(opts.seed, r);
                RunResult res;
                if (greedy) {
                    Rng rng(run_seed);
                    res = iterated_greedy(eval, opts.exits, step, rng);
                } else if (opts.algorithm == "ea") {
                    res = ea_run(eval, opts.exits, opts.ea, run_seed);
                } else {
                    res = iea_run(eval, opts.exits, opts.ea, opts.island, run_seed);
                }
                RunRecord rec;
                rec.instance_id = inst.id;
                rec.algorithm = opts.algorithm;
                rec.run_index = r;
                rec.seed = run_seed;
                rec.eval_seed = eval_seed;
                rec.exit_width = opts.exit_width;
                rec.budget = opts.budget;
                rec.evals_used = res.evals_used;
                rec.genome = res.best.genome;
                rec.training_psi = res.best.fitness;
                rec.history = std::move(res.history);
                records[r] = std::move(rec);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    int workers = opts.threads > 0
                      ? opts.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, opts.runs));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    if (!opts.out_dir.empty()) {
        ensure_dir(opts.out_dir);
        for (const RunRecord& rec : records)
            save_record(rec, (fs::path(opts.out_dir) / record_filename(rec)).string());
        const std::string log_name = inst.id + "-" + opts.algorithm + "-k" +
                                     std::to_string(opts.exits) + "-runlog.csv";
        write_text_file((fs::path(opts.out_dir) / log_name).string(),
                        runlog_csv(records));
    }
    return records;
}

std::vector<TestRow> cmd_test(const std::vector<RunRecord>& records,
                              const Instance& instance, const TestOptions& opts) {
    require(opts.sims_per_config >= 1, ErrorCode::invalid_argument,
            "simulations per configuration must be at least 1");
    std::vector<const RunRecord*> mine;
    for (const RunRecord& r : records)
        if (r.instance_id == instance.id) mine.push_back(&r);
    require(!mine.empty(), ErrorCode::invalid_argument,
            "no records for instance '" + instance.id + "'");

    const TrainTestSplit split =
        split_train_test(instance.configs, instance.train_count);
    require(!split.test.empty(), ErrorCode::invalid_config,
            "instance has no held-out configurations");

    // per (k, algorithm) the best-training record, ties to the lowest run
    std::map<std::pair<int, std::string>, const RunRecord*> chosen;
    for (const RunRecord* r : mine) {
        const auto key = std::make_pair(static_cast<int>(r->genome.size()),
                                        r->algorithm);
        auto it = chosen.find(key);
        if (it == chosen.end() || r->training_psi < it->second->training_psi ||
            (r->training_psi == it->second->training_psi &&
             r->run_index < it->second->run_index))
            chosen[key] = r;
    }

    std::vector<TestRow> rows;
    for (const auto& [key, rec] : chosen) {
        const EvaluationPlan plan{split.test, rec->eval_seed, opts.sims_per_config};
        const std::vector<double> values = per_config_fitness(
            instance.env, rec->genome, rec->exit_width, plan, opts.sim);
        TestRow row;
        row.algorithm = rec->algorithm;
        row.k = key.first;
        row.source_run = rec->run_index;
        row.genome = rec->genome;
        row.stats = summarize(values);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string render_test_csv(const std::vector<TestRow>& rows) {
    std::ostringstream out;
    out << "algo,k,run,tests,best,median,mean,stderr\n";
    for (const TestRow& r : rows)
        out << r.algorithm << ',' << r.k << ',' << r.source_run << ','
            << r.stats.runs << ',' << format_double(r.stats.best) << ','
            << format_double(r.stats.median) << ','
            << format_double(r.stats.mean) << ','
            << format_double(r.stats.std_error) << '\n';
    return out.str();
}

std::string render_test_text(const std::vector<TestRow>& rows) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-8s %3s %4s %6s %12s %12s %12s %12s  %s\n",
                  "algo", "k", "run", "tests", "best", "median", "mean",
                  "stderr", "exits");
    out << buf;
    for (const TestRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%-8s %3d %4d %6d %12s %12s %12s %12s  ",
                      r.algorithm.c_str(), r.k, r.source_run, r.stats.runs,
                      format_double(r.stats.best).c_str(),
                      format_double(r.stats.median).c_str(),
                      format_double(r.stats.mean).c_str(),
                      format_double(r.stats.std_error).c_str());
        out << buf;
        for (std::size_t i = 0; i < r.genome.size(); ++i)
            out << (i ? " " : "") << format_double(r.genome[i]);
        out << '\n';
    }
    return out.str();
}

ReportBundle cmd_report(const std::vector<RunRecord>& records) {
    ReportBundle bundle;
    bundle.summary_csv = render_summary_csv(records);
    bundle.rank_csv = render_rank_csv(records);
    bundle.text = render_report_text(records);
    return bundle;
}

std::vector<RunRecord> load_records_dir(const std::string& dir) {
    require(fs::is_directory(dir), ErrorCode::io,
            "'" + dir + "' is not a directory");
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    std::vector<RunRecord> records;
    records.reserve(paths.size());
    for (const std::string& p : paths) records.push_back(load_record(p));
    require(!records.empty(), ErrorCode::io, "no run records in '" + dir + "'");
    return records;
}

SimulateResult cmd_simulate(const SimulateOptions& opts) {
    require(!opts.exits.empty(), ErrorCode::invalid_argument,
            "at least one exit position is required");
    require(opts.exit_width > 0.0, ErrorCode::invalid_argument,
            "exit width must be positive");
    const Instance inst = load_instance(opts.instance_path);
    require(opts.config_index >= 0 &&
                opts.config_index < static_cast<int>(inst.configs.size()),
            ErrorCode::invalid_argument, "configuration index out of range");

    const Environment env =
        apply_exits(inst.env, ExitSet{opts.exits, opts.exit_width});
    const Grid grid = build_grid(env);
    const StaticField field = compute_static_field(grid);
    const ScenarioConfig& config = inst.configs[opts.config_index];

    SimulateResult result;
    result.pedestrians = static_cast<int>(config.size());
    if (opts.trace_path.empty()) {
        result.outcome = simulate(grid, field, config, opts.sim, opts.seed);
    } else {
        std::ofstream trace(opts.trace_path, std::ios::binary | std::ios::trunc);
        require(trace.good(), ErrorCode::io,
                "cannot open '" + opts.trace_path + "' for writing");
        trace << "step,id,row,col,status\n";
        result.outcome = simulate(
            grid, field, config, opts.sim, opts.seed,
            [&trace](int step, int id, int row, int col, const char* status) {
                trace << step << ',' << id << ',' << row << ',' << col << ','
                      << status << '\n';
            });
        trace.flush();
        require(trace.good(), ErrorCode::io,
                "write to '" + opts.trace_path + "' failed");
    }
    result.fitness = fitness(result.outcome, opts.sim,
                             std::hypot(env.width_m(), env.height_m()));
    return result;
}

std::string render_simulate_text(const SimulateResult& r) {
    std::ostringstream out;
    const int n = r.pedestrians;
    const int evac = r.outcome.evacuated_count();
    out << "pedestrians: " << n << '\n';
    out << "evacuated:   " << evac << " of " << n << '\n';
    out << "steps:       " << r.outcome.steps_taken << '\n';
    if (evac > 0)
        out << "last exit:   " << format_double(r.fitness.last_evac_time)
            << " s\n";
    if (evac < n)
        out << "left inside: " << r.fitness.non_evacuee_count
            << " (nearest exit " << format_double(r.fitness.min_exit_distance)
            << " m)\n";
    out << "fitness:     " << format_double(r.fitness.total) << '\n';
    return out.str();
}

} // namespace evac
