/* C interface to the evacuation exit placement toolkit.
 *
 * Every function that can fail returns an evac_status; EVAC_OK is zero.
 * On failure evac_last_error() holds a message for the calling thread.
 * Strings handed out through char** parameters are heap copies; release
 * them with evac_string_free(). Output parameters documented as optional
 * accept NULL.
 */
#ifndef EVACOPT_H
#define EVACOPT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum evac_status {
    EVAC_OK = 0,
    EVAC_ERR_INVALID_ARGUMENT = 1,
    EVAC_ERR_IO = 2,
    EVAC_ERR_NO_EXIT = 3,
    EVAC_ERR_INVALID_CONFIG = 4,
    EVAC_ERR_TOO_CROWDED = 5,
    EVAC_ERR_BUDGET_EXHAUSTED = 6,
    EVAC_ERR_RUNTIME = 7
} evac_status;

/* Library version, e.g. "1.0.0". Static storage, do not free. */
const char* evac_version(void);

/* Message from the most recent failing call on this thread. Never NULL.
 * Valid until the next failing call on the same thread. */
const char* evac_last_error(void);

/* Releases a string returned through a char** parameter. NULL is a no-op. */
void evac_string_free(char* s);

/* ---------- instances ---------- */

/* A benchmark instance: floor plan plus initial crowd configurations. */
typedef struct evac_instance evac_instance;

evac_status evac_instance_load(const char* path, evac_instance** out);
void evac_instance_free(evac_instance* inst);

/* Borrowed pointer, valid until evac_instance_free. */
const char* evac_instance_id(const evac_instance* inst);
int evac_instance_rows(const evac_instance* inst);
int evac_instance_cols(const evac_instance* inst);
double evac_instance_cell_size(const evac_instance* inst);
double evac_instance_perimeter(const evac_instance* inst);
int evac_instance_config_count(const evac_instance* inst);
int evac_instance_train_count(const evac_instance* inst);
/* Pedestrians per configuration (0 when the instance has none). */
int evac_instance_pedestrian_count(const evac_instance* inst);

/* Mean fitness of an exit layout over the instance's training
 * configurations, or over every configuration when use_all_configs is
 * nonzero. Exit positions are perimeter offsets in meters. Runs with the
 * default simulation parameters (60 s limit, 1.3 m/s reference speed). */
evac_status evac_psi(const evac_instance* inst, const double* exits,
                     int n_exits, double exit_width, uint64_t master_seed,
                     int sims_per_config, int use_all_configs, double* out);

/* ---------- commands ---------- */

typedef struct evac_gen_options {
    const char* classes; /* comma-separated subset of "low", "mid", "high" */
    int per_class;       /* instances per class */
    uint64_t seed;
    const char* out_dir;
    int pedestrians;  /* per configuration */
    int config_count; /* configurations per instance */
    int train_size;   /* leading configurations used for training */
} evac_gen_options;

void evac_gen_options_init(evac_gen_options* opts);

/* Writes <class>-<i>.json files. report_out (optional): one line per file
 * written, then one "warning: ..." line per irregularity. */
evac_status evac_generate(const evac_gen_options* opts, char** report_out);

typedef struct evac_optimize_options {
    const char* instance_path;
    const char* algorithm; /* "greedy" | "ea" | "iea" */
    int exits;
    double exit_width;
    int runs;
    long long budget; /* fitness evaluations per run */
    uint64_t seed;
    int has_eval_seed; /* 0: derive the evaluation seed from the instance id */
    uint64_t eval_seed;
    int sims_per_config;
    double greedy_step; /* candidate spacing in meters; <= 0: exit_width */
    /* evolutionary parameters */
    int population;
    double crossover_prob;
    double mutation_amplitude;
    double mutation_rate; /* < 0: 1 / exits */
    int elitism;          /* 0 or 1 */
    /* island parameters (algorithm "iea" only) */
    int islands;
    int island_size;
    int migration_interval;
    /* simulation parameters */
    double time_limit;      /* seconds */
    double reference_speed; /* m/s */
    const char* out_dir;    /* NULL or empty: nothing is written */
    int threads;            /* parallel runs; 0: hardware default */
} evac_optimize_options;

void evac_optimize_options_init(evac_optimize_options* opts);

/* Runs the requested optimizer `runs` times. summary_out (optional): one
 * line per run plus a closing line for the best run. */
evac_status evac_optimize(const evac_optimize_options* opts, char** summary_out);

/* Picks each algorithm's best-training record from records_dir and scores
 * its exit layout on every held-out configuration of the instance.
 * csv_out and text_out are both optional. */
evac_status evac_test(const char* records_dir, const char* instance_path,
                      int sims_per_config, char** csv_out, char** text_out);

/* Summary table, rank table and an aligned text report over all run
 * records in records_dir. All three outputs are optional. */
evac_status evac_report(const char* records_dir, char** summary_csv_out,
                        char** rank_csv_out, char** text_out);

typedef struct evac_simulate_options {
    const char* instance_path;
    const double* exits; /* perimeter offsets in meters */
    int n_exits;
    double exit_width;
    int config_index; /* which stored configuration to simulate */
    uint64_t seed;
    const char* trace_path; /* NULL or empty: no per-step trace */
    double time_limit;
    double reference_speed;
} evac_simulate_options;

void evac_simulate_options_init(evac_simulate_options* opts);

/* One simulation of one stored configuration. text_out (optional) carries
 * a short human-readable outcome summary. */
evac_status evac_simulate(const evac_simulate_options* opts, char** text_out);

#ifdef __cplusplus
}
#endif

#endif /* EVACOPT_H */
