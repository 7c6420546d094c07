#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "optimizers.hpp"

namespace evac {

// One optimization run, everything needed to replay or re-score it.
struct RunRecord {
    std::string instance_id;
    std::string algorithm; // greedy | ea | iea
    int run_index = 0;
    std::uint64_t seed = 0;      // the run's own random stream
    std::uint64_t eval_seed = 0; // master seed of the evaluation plan
    double exit_width = 2.0;
    long long budget = 0;
    long long evals_used = 0;
    std::vector<double> genome;
    double training_psi = 0.0;
    std::vector<HistoryPoint> history;
};

nlohmann::json record_to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);
void save_record(const RunRecord& r, const std::string& path);
RunRecord load_record(const std::string& path);

// "<instance>-<algo>-k<exits>-run<index>.json"
std::string record_filename(const RunRecord& r);

struct SummaryRow {
    int runs = 0;
    double best = 0.0;
    double median = 0.0;
    double mean = 0.0;
    double std_error = 0.0; // sample stddev over sqrt(runs)
};

SummaryRow summarize(std::vector<double> values);

// 1-based ranks by ascending value; tied values share the average of their
// positions, so ranks always sum to a(a+1)/2.
std::vector<double> rank_by_mean(const std::vector<double>& means);

// fixed six-decimal form used by every csv and table, so re-rendering the
// same records is byte-identical
std::string format_double(double v);
// ranks drop trailing zeros but always keep one decimal ("3.0", "1.75")
std::string format_rank(double v);

// "evals,best_psi,algo,seed,instance" rows for every history point
std::string runlog_csv(const std::vector<RunRecord>& records);

// grouped by (instance, exits, algorithm), sorted; independent of input order
std::string render_summary_csv(const std::vector<RunRecord>& records);
std::string render_rank_csv(const std::vector<RunRecord>& records);
std::string render_report_text(const std::vector<RunRecord>& records);

} // namespace evac
