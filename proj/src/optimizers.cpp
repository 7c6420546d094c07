#include "optimizers.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "env_model.hpp"
#include "errors.hpp"

namespace evac {

double mutate_gene(double gene, double amplitude, double wrap_len, double z) {
    return wrap_perimeter(gene * (1.0 + amplitude * z), wrap_len);
}

void mutate(Individual& ind, double amplitude, double rate, double wrap_len,
            Rng& rng) {
    for (auto& gene : ind.genome)
        if (rng.uniform01() < rate)
            gene = mutate_gene(gene, amplitude, wrap_len, rng.normal());
}

Individual recombine(const Individual& a, const Individual& b, Rng& rng) {
    require(a.genome.size() == b.genome.size(), ErrorCode::invalid_argument,
            "parents must have equal genome length");
    // the candidate pool is a set: a position both parents carry enters once,
    // which makes two identical parents reproduce themselves exactly
    std::vector<double> pool = a.genome;
    pool.insert(pool.end(), b.genome.begin(), b.genome.end());
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

    const std::size_t k = a.genome.size();
    Individual child;
    child.genome.reserve(k);
    std::size_t avail = pool.size();
    for (std::size_t i = 0; i < k; ++i) {
        if (avail == 0) {
            // fewer distinct positions than genes: reuse the pool
            child.genome.push_back(pool[rng.below(pool.size())]);
            continue;
        }
        const std::size_t j = rng.below(avail);
        child.genome.push_back(pool[j]);
        std::swap(pool[j], pool[avail - 1]);
        --avail;
    }
    return child;
}

int tournament_pick(const std::vector<Individual>& pop, Rng& rng) {
    const int i = static_cast<int>(rng.below(pop.size()));
    const int j = static_cast<int>(rng.below(pop.size()));
    return pop[i].fitness <= pop[j].fitness ? i : j;
}

namespace {

long long construction_cost(const Evaluator& eval, int k, double step) {
    const double L = eval.environment().perimeter();
    return static_cast<long long>(std::ceil(L / step)) * k;
}

std::size_t best_index(const std::vector<Individual>& pop) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i)
        if (pop[i].fitness < pop[best].fitness) best = i;
    return best;
}

std::size_t worst_index(const std::vector<Individual>& pop) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < pop.size(); ++i)
        if (pop[i].fitness > pop[worst].fitness) worst = i;
    return worst;
}

struct EngineSetup {
    int k;
    int islands;
    int island_size;
    double crossover_prob;
    double amplitude;
    double rate;
    int elitism;
    int migration_interval; // 0 disables exchanges
};

RunResult island_engine(Evaluator& eval, const EngineSetup& s, std::uint64_t seed,
                        const MigrationHook& hook) {
    require(s.k >= 1, ErrorCode::invalid_argument, "need at least one exit");
    require(s.islands >= 1, ErrorCode::invalid_argument, "need at least one island");
    require(s.island_size >= 2, ErrorCode::invalid_argument,
            "population must hold at least two individuals");
    require(s.crossover_prob >= 0.0 && s.crossover_prob <= 1.0,
            ErrorCode::invalid_argument, "crossover probability outside [0,1]");
    require(s.elitism == 0 || s.elitism == 1, ErrorCode::invalid_argument,
            "elitism count must be 0 or 1");
    require(eval.budget() >= 0, ErrorCode::invalid_argument,
            "evolution needs a finite budget");
    const long long init_cost =
        static_cast<long long>(s.islands) * s.island_size;
    require(eval.remaining() >= init_cost, ErrorCode::budget_exhausted,
            "budget below one full population");

    const double L = eval.environment().perimeter();
    const long long start = eval.evaluations();
    RunResult res;
    const auto note = [&](const Individual& ind) {
        if (!res.best.evaluated() || ind.fitness < res.best.fitness) {
            res.best = ind;
            res.history.push_back({eval.evaluations() - start, res.best.fitness});
        }
    };

    std::vector<Rng> streams;
    streams.reserve(s.islands);
    for (int i = 0; i < s.islands; ++i) streams.emplace_back(derive_seed(seed, i));

    std::vector<std::vector<Individual>> pops(s.islands);
    for (int i = 0; i < s.islands; ++i) {
        pops[i].reserve(s.island_size);
        for (int j = 0; j < s.island_size; ++j) {
            Individual ind;
            ind.genome.reserve(s.k);
            for (int g = 0; g < s.k; ++g)
                ind.genome.push_back(streams[i].uniform(0.0, L));
            ind.fitness = eval.psi(ind.genome);
            note(ind);
            pops[i].push_back(std::move(ind));
        }
    }

    int generation = 0;
    while (eval.remaining() != 0) {
        ++generation;
        for (int i = 0; i < s.islands; ++i) {
            const long long rem = eval.remaining();
            if (rem == 0) break;
            auto& pop = pops[i];
            auto& rng = streams[i];
            const int lambda =
                static_cast<int>(std::min<long long>(s.island_size, rem));
            std::vector<Individual> offspring;
            offspring.reserve(lambda);
            for (int j = 0; j < lambda; ++j) {
                const Individual& p1 = pop[static_cast<std::size_t>(
                    tournament_pick(pop, rng))];
                const Individual& p2 = pop[static_cast<std::size_t>(
                    tournament_pick(pop, rng))];
                Individual child;
                if (rng.uniform01() < s.crossover_prob)
                    child = recombine(p1, p2, rng);
                else
                    child.genome = p1.genome;
                mutate(child, s.amplitude, s.rate, L, rng);
                child.fitness = eval.psi(child.genome);
                note(child);
                offspring.push_back(std::move(child));
            }
            if (s.elitism == 1) {
                const auto& champion = pop[best_index(pop)];
                if (champion.fitness < offspring[best_index(offspring)].fitness)
                    offspring[worst_index(offspring)] = champion;
            }
            pop = std::move(offspring);
            res.history.push_back({eval.evaluations() - start, res.best.fitness});
        }

        if (s.migration_interval > 0 && s.islands >= 2 &&
            generation % s.migration_interval == 0) {
            MigrationEvent ev;
            ev.generation = generation;
            if (hook) ev.before = pops;
            std::vector<Individual> bests;
            bests.reserve(s.islands);
            for (const auto& pop : pops) bests.push_back(pop[best_index(pop)]);
            for (int i = 0; i < s.islands; ++i) {
                auto& pop = pops[i];
                const int left = (i + s.islands - 1) % s.islands;
                const int right = (i + 1) % s.islands;
                std::vector<int> incoming = {left};
                if (right != left) incoming.push_back(right);
                // pick the victim slots before overwriting any of them, so
                // one bad migrant cannot shield the other worst member
                std::vector<std::size_t> slots(pop.size());
                std::iota(slots.begin(), slots.end(), 0u);
                const std::size_t m =
                    std::min(incoming.size(), slots.size());
                std::partial_sort(slots.begin(), slots.begin() + m, slots.end(),
                                  [&pop](std::size_t a, std::size_t b) {
                                      return pop[a].fitness > pop[b].fitness;
                                  });
                for (std::size_t t = 0; t < m; ++t)
                    pop[slots[t]] = bests[static_cast<std::size_t>(incoming[t])];
            }
            if (hook) {
                ev.after = pops;
                hook(ev);
            }
        }
    }
    res.evals_used = eval.evaluations() - start;
    return res;
}

double resolve_rate(const EAConfig& cfg, int k) {
    return cfg.mutation_rate < 0.0 ? 1.0 / k : cfg.mutation_rate;
}

} // namespace

Individual greedy_construct(Evaluator& eval, int k, double candidate_step,
                            Rng& rng) {
    require(k >= 1, ErrorCode::invalid_argument, "need at least one exit");
    require(candidate_step > 0.0, ErrorCode::invalid_argument,
            "candidate step must be positive");
    const double L = eval.environment().perimeter();
    const long long eta = static_cast<long long>(std::ceil(L / candidate_step));
    require(eval.remaining() < 0 || eval.remaining() >= eta * k,
            ErrorCode::budget_exhausted,
            "construction needs ceil(L/step)*k evaluations");

    const double anchor = rng.uniform(0.0, L);
    Individual out;
    out.genome.reserve(k);
    double round_best = std::numeric_limits<double>::infinity();
    for (int e = 0; e < k; ++e) {
        round_best = std::numeric_limits<double>::infinity();
        double best_pos = anchor;
        for (long long c = 0; c < eta; ++c) {
            const double cand = wrap_perimeter(anchor + c * candidate_step, L);
            auto trial = out.genome;
            trial.push_back(cand);
            const double v = eval.psi(trial);
            if (v < round_best) {
                round_best = v;
                best_pos = cand;
            }
        }
        out.genome.push_back(best_pos);
    }
    out.fitness = round_best;
    return out;
}

RunResult iterated_greedy(Evaluator& eval, int k, double candidate_step,
                          Rng& rng) {
    require(eval.budget() >= 0, ErrorCode::invalid_argument,
            "iterated greedy needs a finite budget");
    const long long cost = construction_cost(eval, k, candidate_step);
    require(eval.remaining() >= cost, ErrorCode::budget_exhausted,
            "budget below one full construction");

    const long long start = eval.evaluations();
    RunResult res;
    while (eval.remaining() >= cost) {
        const auto ind = greedy_construct(eval, k, candidate_step, rng);
        if (!res.best.evaluated() || ind.fitness < res.best.fitness)
            res.best = ind;
        res.history.push_back({eval.evaluations() - start, res.best.fitness});
    }
    res.evals_used = eval.evaluations() - start;
    return res;
}

RunResult ea_run(Evaluator& eval, int k, const EAConfig& cfg, std::uint64_t seed) {
    const EngineSetup s{k,
                        1,
                        cfg.population,
                        cfg.crossover_prob,
                        cfg.mutation_amplitude,
                        resolve_rate(cfg, k),
                        cfg.elitism,
                        0};
    return island_engine(eval, s, seed, {});
}

RunResult iea_run(Evaluator& eval, int k, const EAConfig& cfg,
                  const IslandConfig& island_cfg, std::uint64_t seed,
                  MigrationHook hook) {
    require(island_cfg.migration_interval >= 1, ErrorCode::invalid_argument,
            "migration interval must be at least one generation");
    const EngineSetup s{k,
                        island_cfg.islands,
                        island_cfg.island_size,
                        cfg.crossover_prob,
                        cfg.mutation_amplitude,
                        resolve_rate(cfg, k),
                        cfg.elitism,
                        island_cfg.migration_interval};
    return island_engine(eval, s, seed, hook);
}

} // namespace evac
