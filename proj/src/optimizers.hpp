#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "objective.hpp"
#include "rng.hpp"

namespace evac {

struct Individual {
    std::vector<double> genome; // perimeter positions in [0, L)
    double fitness = std::numeric_limits<double>::quiet_NaN();

    bool evaluated() const { return !std::isnan(fitness); }
};

struct HistoryPoint {
    long long evals;
    double best_psi;
};

// History holds a point for every best-so-far improvement and one at the end
// of every generation (or greedy construction), so convergence curves can be
// replotted from records alone.
struct RunResult {
    Individual best;
    std::vector<HistoryPoint> history;
    long long evals_used = 0;
};

// e' = wrap(e * (1 + amplitude * z)) with z a standard normal draw
double mutate_gene(double gene, double amplitude, double wrap_len, double z);

// mutates each gene independently with the given probability
void mutate(Individual& ind, double amplitude, double rate, double wrap_len,
            Rng& rng);

// k picks without replacement from the set of values present in either
// parent; every child gene exists in a parent, and two identical parents
// reproduce themselves
Individual recombine(const Individual& a, const Individual& b, Rng& rng);

// two uniform samples with replacement, index of the better one (first on ties)
int tournament_pick(const std::vector<Individual>& pop, Rng& rng);

struct EAConfig {
    int population = 100;
    double crossover_prob = 0.9;
    double mutation_amplitude = 0.05;
    double mutation_rate = -1.0; // negative means 1 over the genome length
    int elitism = 1;             // 0 or 1
};

struct IslandConfig {
    int islands = 4;
    int island_size = 25;
    int migration_interval = 10; // generations between exchanges
};

struct MigrationEvent {
    int generation = 0;
    std::vector<std::vector<Individual>> before; // per-island populations
    std::vector<std::vector<Individual>> after;
};
using MigrationHook = std::function<void(const MigrationEvent&)>;

// One constructive pass: a single random anchor, then for each of the k exits
// a scan over the ceil(L/step) anchored candidates, keeping the first strict
// improvement. Consumes exactly ceil(L/step)*k evaluations.
Individual greedy_construct(Evaluator& eval, int k, double candidate_step,
                            Rng& rng);

// Repeats constructions while a whole one still fits into the budget.
RunResult iterated_greedy(Evaluator& eval, int k, double candidate_step, Rng& rng);

RunResult ea_run(Evaluator& eval, int k, const EAConfig& cfg, std::uint64_t seed);

// Ring of demes evolving round-robin on one shared budget; every
// migration_interval generations each island sends its best to both ring
// neighbors and unconditionally overwrites its worst members with what
// arrives. One island degenerates to ea_run with that island's size.
RunResult iea_run(Evaluator& eval, int k, const EAConfig& cfg,
                  const IslandConfig& island_cfg, std::uint64_t seed,
                  MigrationHook hook = {});

} // namespace evac
