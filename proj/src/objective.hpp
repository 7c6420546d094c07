#pragma once

#include <cstdint>
#include <vector>

#include "ca_engine.hpp"
#include "env_model.hpp"

namespace evac {

// Scalar quality of one finished simulation, lower is better. The integer
// part counts pedestrians left inside, so any run that strands someone is
// worse than every run that empties the floor.
struct FitnessBreakdown {
    int non_evacuee_count = 0;
    double last_evac_time = 0.0;   // seconds, 0 when nobody made it out
    double mean_evac_time = 0.0;   // over all n pedestrians, non-evacuees count as 0
    double min_exit_distance = 0.0; // metres, over non-evacuees only
    double mean_exit_distance = 0.0;
    double total = 0.0;
};

// diagonal_m normalises the distance terms; it must be the floor diagonal so
// the fractional part stays below 1.
FitnessBreakdown fitness(const SimOutcome& outcome, const SimParams& params,
                         double diagonal_m);

// A fixed set of crowd configurations an exit layout is scored against.
// Simulation seeds derive from (master_seed, config index, repeat index), so
// the plan itself pins down every random draw.
struct EvaluationPlan {
    std::vector<ScenarioConfig> configs;
    std::uint64_t master_seed = 0;
    int sims_per_config = 1;
};

std::vector<double> per_config_fitness(const Environment& env,
                                       const std::vector<double>& exit_positions,
                                       double exit_width,
                                       const EvaluationPlan& plan,
                                       const SimParams& params);

// Sums left to right in index order. Callers that compute entries out of
// order must still store them by index before averaging, which keeps results
// bit-identical regardless of execution order.
double mean_in_index_order(const std::vector<double>& values);

// Scores exit layouts against a plan and meters the evaluation budget.
// One psi() call costs one unit no matter how many simulations it runs.
class Evaluator {
  public:
    Evaluator(Environment env, EvaluationPlan plan, SimParams params,
              double exit_width, long long max_evals = -1);

    double psi(const std::vector<double>& exit_positions);

    long long evaluations() const { return used_; }
    long long remaining() const; // -1 when unlimited
    long long budget() const { return max_evals_; }
    const Environment& environment() const { return env_; }
    const EvaluationPlan& plan() const { return plan_; }
    const SimParams& params() const { return params_; }
    double exit_width() const { return exit_width_; }

  private:
    Environment env_;
    EvaluationPlan plan_;
    SimParams params_;
    double exit_width_;
    long long max_evals_;
    long long used_ = 0;
};

} // namespace evac
