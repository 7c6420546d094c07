#include "objective.hpp"

#include <cmath>

#include "errors.hpp"
#include "rng.hpp"

namespace evac {

FitnessBreakdown fitness(const SimOutcome& outcome, const SimParams& params,
                         double diagonal_m) {
    const auto n = outcome.pedestrians.size();
    require(n > 0, ErrorCode::invalid_argument, "fitness needs at least one pedestrian");
    require(diagonal_m > 0.0, ErrorCode::invalid_argument, "diagonal must be positive");
    require(params.time_limit > 0.0, ErrorCode::invalid_argument,
            "time limit must be positive");

    FitnessBreakdown b;
    double time_sum = 0.0;
    double dist_sum = 0.0;
    bool any_left = false;
    for (const auto& p : outcome.pedestrians) {
        if (p.evacuated) {
            time_sum += p.time;
            if (p.time > b.last_evac_time) b.last_evac_time = p.time;
        } else {
            ++b.non_evacuee_count;
            dist_sum += p.distance;
            if (!any_left || p.distance < b.min_exit_distance)
                b.min_exit_distance = p.distance;
            any_left = true;
        }
    }
    b.mean_evac_time = time_sum / static_cast<double>(n);
    b.mean_exit_distance = dist_sum / static_cast<double>(n);

    const double T = params.time_limit;
    if (any_left) {
        b.total = b.non_evacuee_count + b.min_exit_distance / diagonal_m +
                  dist_sum / (static_cast<double>(n) * diagonal_m * diagonal_m);
    } else {
        b.total = b.last_evac_time / T + time_sum / (static_cast<double>(n) * T * T);
    }
    return b;
}

std::vector<double> per_config_fitness(const Environment& env,
                                       const std::vector<double>& exit_positions,
                                       double exit_width,
                                       const EvaluationPlan& plan,
                                       const SimParams& params) {
    require(!plan.configs.empty(), ErrorCode::invalid_argument,
            "evaluation plan has no configurations");
    require(plan.sims_per_config >= 1, ErrorCode::invalid_argument,
            "sims per config must be at least 1");

    const auto placed = apply_exits(env, {exit_positions, exit_width});
    const auto grid = build_grid(placed);
    const auto field = compute_static_field(grid);
    const double diag = std::hypot(env.width_m(), env.height_m());

    std::vector<double> values;
    values.reserve(plan.configs.size());
    for (std::size_t i = 0; i < plan.configs.size(); ++i) {
        std::vector<double> reps;
        reps.reserve(plan.sims_per_config);
        for (int r = 0; r < plan.sims_per_config; ++r) {
            const auto seed = derive_seed(plan.master_seed, i, r);
            const auto out = simulate(grid, field, plan.configs[i], params, seed);
            reps.push_back(fitness(out, params, diag).total);
        }
        values.push_back(mean_in_index_order(reps));
    }
    return values;
}

double mean_in_index_order(const std::vector<double>& values) {
    require(!values.empty(), ErrorCode::invalid_argument, "mean of nothing");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

Evaluator::Evaluator(Environment env, EvaluationPlan plan, SimParams params,
                     double exit_width, long long max_evals)
    : env_(std::move(env)),
      plan_(std::move(plan)),
      params_(params),
      exit_width_(exit_width),
      max_evals_(max_evals) {
    require(!plan_.configs.empty(), ErrorCode::invalid_argument,
            "evaluation plan has no configurations");
    require(exit_width_ > 0.0, ErrorCode::invalid_argument,
            "exit width must be positive");
}

long long Evaluator::remaining() const {
    return max_evals_ < 0 ? -1 : max_evals_ - used_;
}

double Evaluator::psi(const std::vector<double>& exit_positions) {
    require(max_evals_ < 0 || used_ < max_evals_, ErrorCode::budget_exhausted,
            "evaluation budget exhausted");
    ++used_;
    const auto values =
        per_config_fitness(env_, exit_positions, exit_width_, plan_, params_);
    return mean_in_index_order(values);
}

} // namespace evac
