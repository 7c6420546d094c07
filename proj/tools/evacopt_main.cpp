// evacopt: generate evacuation benchmark instances, optimize exit
// placements, and report results. Thin shell over the C API.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <evacopt/evacopt.h>

namespace {

// 0 success, 1 usage problem, 2 runtime failure
int status_to_exit(evac_status s) {
    if (s == EVAC_OK) return 0;
    return s == EVAC_ERR_INVALID_ARGUMENT ? 1 : 2;
}

int fail_with(evac_status s) {
    std::fprintf(stderr, "evacopt: %s\n", evac_last_error());
    return status_to_exit(s);
}

void print_and_free(char* text) {
    if (!text) return;
    std::fputs(text, stdout);
    evac_string_free(text);
}

bool write_file(const std::string& path, const char* text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.good()) return false;
    out << (text ? text : "");
    out.flush();
    return out.good();
}

bool parse_positions(const std::string& spec, std::vector<double>& out) {
    std::string token;
    std::stringstream in(spec);
    while (std::getline(in, token, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(token, &used);
            while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used])))
                ++used;
            if (used != token.size()) return false;
            out.push_back(v);
        } catch (const std::exception&) {
            return false;
        }
    }
    return !out.empty();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"evacuation exit placement toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", evac_version());

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate benchmark instances");
    std::string gen_classes = "low,mid,high";
    std::string gen_out = ".";
    int gen_count = 5, gen_peds = 100, gen_configs = 1000, gen_train = 20;
    std::uint64_t gen_seed = 1;
    gen->add_option("--classes", gen_classes,
                    "comma-separated density classes (low,mid,high)");
    gen->add_option("--count", gen_count, "instances per class");
    gen->add_option("--seed", gen_seed, "master seed");
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--peds", gen_peds, "pedestrians per configuration");
    gen->add_option("--configs", gen_configs, "configurations per instance");
    gen->add_option("--train", gen_train, "training configurations");

    // ---- optimize ----
    auto* opt = app.add_subcommand("optimize", "search exit placements");
    std::string opt_instance, opt_algo, opt_out;
    int opt_exits = 3, opt_runs = 20, opt_sims = 1, opt_threads = 0;
    int opt_population = 100, opt_elitism = 1;
    int opt_islands = 4, opt_island_size = 25, opt_interval = 10;
    long long opt_budget = 20000;
    std::uint64_t opt_seed = 1, opt_eval_seed = 0;
    double opt_width = 2.0, opt_step = -1.0;
    double opt_crossover = 0.9, opt_amplitude = 0.05, opt_rate = -1.0;
    double opt_time_limit = 60.0, opt_speed = 1.3;
    opt->add_option("--instance", opt_instance, "instance file")->required();
    opt->add_option("--algo", opt_algo, "greedy, ea or iea")->required();
    opt->add_option("--exits", opt_exits, "number of exits to place");
    opt->add_option("--exit-width", opt_width, "exit width in meters");
    opt->add_option("--runs", opt_runs, "independent runs");
    opt->add_option("--budget", opt_budget, "fitness evaluations per run");
    opt->add_option("--seed", opt_seed, "master seed");
    auto* eval_seed_opt =
        opt->add_option("--eval-seed", opt_eval_seed,
                        "evaluation seed (default: derived from instance id)");
    opt->add_option("--sims", opt_sims, "simulations per configuration");
    opt->add_option("--step", opt_step,
                    "greedy candidate spacing in meters (default: exit width)");
    opt->add_option("--population", opt_population, "EA population size");
    opt->add_option("--crossover", opt_crossover, "recombination probability");
    opt->add_option("--amplitude", opt_amplitude, "mutation amplitude");
    opt->add_option("--rate", opt_rate, "mutation rate (default: 1/exits)");
    opt->add_option("--elitism", opt_elitism, "preserved parents, 0 or 1");
    opt->add_option("--islands", opt_islands, "island count (iea)");
    opt->add_option("--island-size", opt_island_size, "population per island (iea)");
    opt->add_option("--interval", opt_interval, "generations between migrations (iea)");
    opt->add_option("--time-limit", opt_time_limit, "simulated seconds per run");
    opt->add_option("--speed", opt_speed, "reference walking speed in m/s");
    opt->add_option("--out", opt_out, "directory for run records");
    opt->add_option("--threads", opt_threads, "parallel runs (0: auto)");

    // ---- test ----
    auto* tst = app.add_subcommand("test", "score best solutions on held-out configurations");
    std::string tst_records, tst_instance;
    int tst_sims = 1;
    bool tst_csv = false;
    tst->add_option("--records", tst_records, "run record directory")->required();
    tst->add_option("--instance", tst_instance, "instance file")->required();
    tst->add_option("--sims", tst_sims, "simulations per configuration");
    tst->add_flag("--csv", tst_csv, "print csv instead of a table");

    // ---- report ----
    auto* rep = app.add_subcommand("report", "summarize run records");
    std::string rep_records, rep_out;
    rep->add_option("--records", rep_records, "run record directory")->required();
    rep->add_option("--out", rep_out, "also write summary.csv and ranks.csv here");

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "run one evacuation simulation");
    std::string sim_instance, sim_exits, sim_trace;
    int sim_config = 0;
    std::uint64_t sim_seed = 1;
    double sim_width = 2.0, sim_time_limit = 60.0, sim_speed = 1.3;
    sim->add_option("--instance", sim_instance, "instance file")->required();
    sim->add_option("--exits", sim_exits,
                    "comma-separated exit positions in perimeter meters")
        ->required();
    sim->add_option("--exit-width", sim_width, "exit width in meters");
    sim->add_option("--config", sim_config, "configuration index");
    sim->add_option("--seed", sim_seed, "simulation seed");
    sim->add_option("--trace", sim_trace, "write a per-step csv trace here");
    sim->add_option("--time-limit", sim_time_limit, "simulated seconds");
    sim->add_option("--speed", sim_speed, "reference walking speed in m/s");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*gen) {
        evac_gen_options o;
        evac_gen_options_init(&o);
        o.classes = gen_classes.c_str();
        o.per_class = gen_count;
        o.seed = gen_seed;
        o.out_dir = gen_out.c_str();
        o.pedestrians = gen_peds;
        o.config_count = gen_configs;
        o.train_size = gen_train;
        char* report = nullptr;
        const evac_status s = evac_generate(&o, &report);
        if (s != EVAC_OK) return fail_with(s);
        print_and_free(report);
        return 0;
    }

    if (*opt) {
        evac_optimize_options o;
        evac_optimize_options_init(&o);
        o.instance_path = opt_instance.c_str();
        o.algorithm = opt_algo.c_str();
        o.exits = opt_exits;
        o.exit_width = opt_width;
        o.runs = opt_runs;
        o.budget = opt_budget;
        o.seed = opt_seed;
        o.has_eval_seed = eval_seed_opt->count() > 0 ? 1 : 0;
        o.eval_seed = opt_eval_seed;
        o.sims_per_config = opt_sims;
        o.greedy_step = opt_step;
        o.population = opt_population;
        o.crossover_prob = opt_crossover;
        o.mutation_amplitude = opt_amplitude;
        o.mutation_rate = opt_rate;
        o.elitism = opt_elitism;
        o.islands = opt_islands;
        o.island_size = opt_island_size;
        o.migration_interval = opt_interval;
        o.time_limit = opt_time_limit;
        o.reference_speed = opt_speed;
        o.out_dir = opt_out.empty() ? nullptr : opt_out.c_str();
        o.threads = opt_threads;
        char* summary = nullptr;
        const evac_status s = evac_optimize(&o, &summary);
        if (s != EVAC_OK) return fail_with(s);
        print_and_free(summary);
        return 0;
    }

    if (*tst) {
        char* csv = nullptr;
        char* text = nullptr;
        const evac_status s = evac_test(tst_records.c_str(), tst_instance.c_str(),
                                        tst_sims, tst_csv ? &csv : nullptr,
                                        tst_csv ? nullptr : &text);
        if (s != EVAC_OK) return fail_with(s);
        print_and_free(tst_csv ? csv : text);
        return 0;
    }

    if (*rep) {
        char* summary_csv = nullptr;
        char* rank_csv = nullptr;
        char* text = nullptr;
        const evac_status s =
            evac_report(rep_records.c_str(), &summary_csv, &rank_csv, &text);
        if (s != EVAC_OK) return fail_with(s);
        int rc = 0;
        if (!rep_out.empty()) {
            const std::string base = rep_out + "/";
            if (!write_file(base + "summary.csv", summary_csv) ||
                !write_file(base + "ranks.csv", rank_csv)) {
                std::fprintf(stderr, "evacopt: cannot write csv files to %s\n",
                             rep_out.c_str());
                rc = 2;
            }
        }
        evac_string_free(summary_csv);
        evac_string_free(rank_csv);
        if (rc == 0) print_and_free(text);
        else evac_string_free(text);
        return rc;
    }

    if (*sim) {
        std::vector<double> positions;
        if (!parse_positions(sim_exits, positions)) {
            std::fprintf(stderr, "evacopt: cannot parse exit positions '%s'\n",
                         sim_exits.c_str());
            return 1;
        }
        evac_simulate_options o;
        evac_simulate_options_init(&o);
        o.instance_path = sim_instance.c_str();
        o.exits = positions.data();
        o.n_exits = static_cast<int>(positions.size());
        o.exit_width = sim_width;
        o.config_index = sim_config;
        o.seed = sim_seed;
        o.trace_path = sim_trace.empty() ? nullptr : sim_trace.c_str();
        o.time_limit = sim_time_limit;
        o.reference_speed = sim_speed;
        char* text = nullptr;
        const evac_status s = evac_simulate(&o, &text);
        if (s != EVAC_OK) return fail_with(s);
        print_and_free(text);
        return 0;
    }

    return 1;
}
