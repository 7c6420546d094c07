#include "evacopt/evacopt.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "harness.hpp"

namespace {

thread_local std::string g_last_error = "no error";

char* dup_string(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

// every fallible entry point funnels through here so the status/message
// contract is uniform
template <typename Fn>
evac_status guarded(Fn&& fn) noexcept {
    try {
        fn();
        return EVAC_OK;
    } catch (const evac::Error& e) {
        g_last_error = e.what();
        return static_cast<evac_status>(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return EVAC_ERR_RUNTIME;
    } catch (...) {
        g_last_error = "unknown error";
        return EVAC_ERR_RUNTIME;
    }
}

evac_status arg_error(const char* what) noexcept {
    g_last_error = what;
    return EVAC_ERR_INVALID_ARGUMENT;
}

std::vector<evac::DensityClass> parse_classes(const char* spec) {
    std::vector<evac::DensityClass> classes;
    std::stringstream in(spec);
    std::string token;
    while (std::getline(in, token, ','))
        if (!token.empty()) classes.push_back(evac::density_from_name(token));
    evac::require(!classes.empty(), evac::ErrorCode::invalid_argument,
                  "no density classes requested");
    return classes;
}

} // namespace

struct evac_instance {
    evac::Instance inst;
};

extern "C" {

const char* evac_version(void) { return "1.0.0"; }

const char* evac_last_error(void) { return g_last_error.c_str(); }

void evac_string_free(char* s) { std::free(s); }

evac_status evac_instance_load(const char* path, evac_instance** out) {
    if (!path || !out) return arg_error("path and out must not be NULL");
    *out = nullptr;
    return guarded([&] {
        auto handle = new evac_instance{evac::load_instance(path)};
        *out = handle;
    });
}

void evac_instance_free(evac_instance* inst) { delete inst; }

const char* evac_instance_id(const evac_instance* inst) {
    return inst ? inst->inst.id.c_str() : nullptr;
}

int evac_instance_rows(const evac_instance* inst) {
    return inst ? inst->inst.env.rows : 0;
}

int evac_instance_cols(const evac_instance* inst) {
    return inst ? inst->inst.env.cols : 0;
}

double evac_instance_cell_size(const evac_instance* inst) {
    return inst ? inst->inst.env.cell_size : 0.0;
}

double evac_instance_perimeter(const evac_instance* inst) {
    return inst ? inst->inst.env.perimeter() : 0.0;
}

int evac_instance_config_count(const evac_instance* inst) {
    return inst ? static_cast<int>(inst->inst.configs.size()) : 0;
}

int evac_instance_train_count(const evac_instance* inst) {
    return inst ? inst->inst.train_count : 0;
}

int evac_instance_pedestrian_count(const evac_instance* inst) {
    if (!inst || inst->inst.configs.empty()) return 0;
    return static_cast<int>(inst->inst.configs.front().size());
}

evac_status evac_psi(const evac_instance* inst, const double* exits,
                     int n_exits, double exit_width, uint64_t master_seed,
                     int sims_per_config, int use_all_configs, double* out) {
    if (!inst || !exits || !out) return arg_error("instance, exits and out must not be NULL");
    if (n_exits < 1) return arg_error("at least one exit position is required");
    return guarded([&] {
        evac::EvaluationPlan plan;
        if (use_all_configs) {
            plan.configs = inst->inst.configs;
        } else {
            plan.configs =
                evac::split_train_test(inst->inst.configs, inst->inst.train_count)
                    .train;
        }
        plan.master_seed = master_seed;
        plan.sims_per_config = sims_per_config;
        const std::vector<double> positions(exits, exits + n_exits);
        *out = evac::mean_in_index_order(evac::per_config_fitness(
            inst->inst.env, positions, exit_width, plan, evac::SimParams{}));
    });
}

void evac_gen_options_init(evac_gen_options* opts) {
    if (!opts) return;
    opts->classes = "low,mid,high";
    opts->per_class = 5;
    opts->seed = 1;
    opts->out_dir = ".";
    opts->pedestrians = 100;
    opts->config_count = 1000;
    opts->train_size = 20;
}

evac_status evac_generate(const evac_gen_options* opts, char** report_out) {
    if (!opts) return arg_error("options must not be NULL");
    if (!opts->classes || !opts->out_dir)
        return arg_error("classes and out_dir must not be NULL");
    if (report_out) *report_out = nullptr;
    return guarded([&] {
        evac::GenOptions g;
        g.classes = parse_classes(opts->classes);
        g.per_class = opts->per_class;
        g.seed = opts->seed;
        g.out_dir = opts->out_dir;
        g.pedestrians = opts->pedestrians;
        g.config_count = opts->config_count;
        g.train_size = opts->train_size;
        const evac::GenResult result = evac::cmd_generate(g);
        if (report_out) {
            std::ostringstream text;
            for (const auto& f : result.files) text << f << '\n';
            for (const auto& w : result.warnings) text << "warning: " << w << '\n';
            *report_out = dup_string(text.str());
        }
    });
}

void evac_optimize_options_init(evac_optimize_options* opts) {
    if (!opts) return;
    const evac::OptimizeOptions d;
    opts->instance_path = nullptr;
    opts->algorithm = nullptr;
    opts->exits = d.exits;
    opts->exit_width = d.exit_width;
    opts->runs = d.runs;
    opts->budget = d.budget;
    opts->seed = d.seed;
    opts->has_eval_seed = 0;
    opts->eval_seed = 0;
    opts->sims_per_config = d.sims_per_config;
    opts->greedy_step = d.greedy_step;
    opts->population = d.ea.population;
    opts->crossover_prob = d.ea.crossover_prob;
    opts->mutation_amplitude = d.ea.mutation_amplitude;
    opts->mutation_rate = d.ea.mutation_rate;
    opts->elitism = d.ea.elitism;
    opts->islands = d.island.islands;
    opts->island_size = d.island.island_size;
    opts->migration_interval = d.island.migration_interval;
    opts->time_limit = d.sim.time_limit;
    opts->reference_speed = d.sim.reference_speed;
    opts->out_dir = nullptr;
    opts->threads = 0;
}

evac_status evac_optimize(const evac_optimize_options* opts, char** summary_out) {
    if (!opts) return arg_error("options must not be NULL");
    if (!opts->instance_path || !opts->algorithm)
        return arg_error("instance_path and algorithm must not be NULL");
    if (summary_out) *summary_out = nullptr;
    return guarded([&] {
        evac::OptimizeOptions o;
        o.instance_path = opts->instance_path;
        o.algorithm = opts->algorithm;
        o.exits = opts->exits;
        o.exit_width = opts->exit_width;
        o.runs = opts->runs;
        o.budget = opts->budget;
        o.seed = opts->seed;
        if (opts->has_eval_seed) o.eval_seed = opts->eval_seed;
        o.sims_per_config = opts->sims_per_config;
        o.greedy_step = opts->greedy_step;
        o.ea.population = opts->population;
        o.ea.crossover_prob = opts->crossover_prob;
        o.ea.mutation_amplitude = opts->mutation_amplitude;
        o.ea.mutation_rate = opts->mutation_rate;
        o.ea.elitism = opts->elitism;
        o.island.islands = opts->islands;
        o.island.island_size = opts->island_size;
        o.island.migration_interval = opts->migration_interval;
        o.sim.time_limit = opts->time_limit;
        o.sim.reference_speed = opts->reference_speed;
        if (opts->out_dir) o.out_dir = opts->out_dir;
        o.threads = opts->threads;

        const std::vector<evac::RunRecord> records = evac::cmd_optimize(o);
        if (!summary_out) return;

        std::size_t best = 0;
        for (std::size_t i = 1; i < records.size(); ++i)
            if (records[i].training_psi < records[best].training_psi) best = i;
        std::ostringstream text;
        for (const auto& rec : records)
            text << "run " << rec.run_index << "  seed " << rec.seed
                 << "  evals " << rec.evals_used << "  psi "
                 << evac::format_double(rec.training_psi) << '\n';
        text << "best run " << records[best].run_index << "  psi "
             << evac::format_double(records[best].training_psi) << "  exits";
        for (double g : records[best].genome)
            text << ' ' << evac::format_double(g);
        text << '\n';
        if (!o.out_dir.empty())
            text << "records written to " << o.out_dir << '\n';
        *summary_out = dup_string(text.str());
    });
}

evac_status evac_test(const char* records_dir, const char* instance_path,
                      int sims_per_config, char** csv_out, char** text_out) {
    if (!records_dir || !instance_path)
        return arg_error("records_dir and instance_path must not be NULL");
    if (csv_out) *csv_out = nullptr;
    if (text_out) *text_out = nullptr;
    return guarded([&] {
        const std::vector<evac::RunRecord> records =
            evac::load_records_dir(records_dir);
        const evac::Instance inst = evac::load_instance(instance_path);
        evac::TestOptions topts;
        topts.sims_per_config = sims_per_config;
        const std::vector<evac::TestRow> rows =
            evac::cmd_test(records, inst, topts);
        if (csv_out) *csv_out = dup_string(evac::render_test_csv(rows));
        if (text_out) *text_out = dup_string(evac::render_test_text(rows));
    });
}

evac_status evac_report(const char* records_dir, char** summary_csv_out,
                        char** rank_csv_out, char** text_out) {
    if (!records_dir) return arg_error("records_dir must not be NULL");
    if (summary_csv_out) *summary_csv_out = nullptr;
    if (rank_csv_out) *rank_csv_out = nullptr;
    if (text_out) *text_out = nullptr;
    return guarded([&] {
        const evac::ReportBundle bundle =
            evac::cmd_report(evac::load_records_dir(records_dir));
        if (summary_csv_out) *summary_csv_out = dup_string(bundle.summary_csv);
        if (rank_csv_out) *rank_csv_out = dup_string(bundle.rank_csv);
        if (text_out) *text_out = dup_string(bundle.text);
    });
}

void evac_simulate_options_init(evac_simulate_options* opts) {
    if (!opts) return;
    const evac::SimulateOptions d;
    opts->instance_path = nullptr;
    opts->exits = nullptr;
    opts->n_exits = 0;
    opts->exit_width = d.exit_width;
    opts->config_index = d.config_index;
    opts->seed = d.seed;
    opts->trace_path = nullptr;
    opts->time_limit = d.sim.time_limit;
    opts->reference_speed = d.sim.reference_speed;
}

evac_status evac_simulate(const evac_simulate_options* opts, char** text_out) {
    if (!opts) return arg_error("options must not be NULL");
    if (!opts->instance_path) return arg_error("instance_path must not be NULL");
    if (!opts->exits || opts->n_exits < 1)
        return arg_error("at least one exit position is required");
    if (text_out) *text_out = nullptr;
    return guarded([&] {
        evac::SimulateOptions o;
        o.instance_path = opts->instance_path;
        o.exits.assign(opts->exits, opts->exits + opts->n_exits);
        o.exit_width = opts->exit_width;
        o.config_index = opts->config_index;
        o.seed = opts->seed;
        if (opts->trace_path) o.trace_path = opts->trace_path;
        o.sim.time_limit = opts->time_limit;
        o.sim.reference_speed = opts->reference_speed;
        const evac::SimulateResult result = evac::cmd_simulate(o);
        if (text_out) *text_out = dup_string(evac::render_simulate_text(result));
    });
}

} // extern "C"
