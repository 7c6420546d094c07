#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace evac {

nlohmann::json record_to_json(const RunRecord& r) {
    auto history = nlohmann::json::array();
    for (const auto& h : r.history)
        history.push_back({{"evals", h.evals}, {"psi", h.best_psi}});
    return {{"instance", r.instance_id},
            {"algo", r.algorithm},
            {"run", r.run_index},
            {"seed", r.seed},
            {"evalSeed", r.eval_seed},
            {"exitWidth", r.exit_width},
            {"budget", r.budget},
            {"evalsUsed", r.evals_used},
            {"genome", r.genome},
            {"trainingPsi", r.training_psi},
            {"history", std::move(history)}};
}

RunRecord record_from_json(const nlohmann::json& j) {
    RunRecord r;
    r.instance_id = j.at("instance").get<std::string>();
    r.algorithm = j.at("algo").get<std::string>();
    r.run_index = j.at("run").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.eval_seed = j.at("evalSeed").get<std::uint64_t>();
    r.exit_width = j.at("exitWidth").get<double>();
    r.budget = j.at("budget").get<long long>();
    r.evals_used = j.at("evalsUsed").get<long long>();
    r.genome = j.at("genome").get<std::vector<double>>();
    r.training_psi = j.at("trainingPsi").get<double>();
    for (const auto& h : j.at("history"))
        r.history.push_back(
            {h.at("evals").get<long long>(), h.at("psi").get<double>()});
    return r;
}

void save_record(const RunRecord& r, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::io, "cannot open '" + path + "' for writing");
    out << record_to_json(r).dump(2) << '\n';
    require(out.good(), ErrorCode::io, "write to '" + path + "' failed");
}

RunRecord load_record(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::io, "cannot open '" + path + "'");
    try {
        nlohmann::json j;
        in >> j;
        return record_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::io, "'" + path + "' is not a run record: " + e.what());
    }
}

std::string record_filename(const RunRecord& r) {
    return r.instance_id + "-" + r.algorithm + "-k" +
           std::to_string(r.genome.size()) + "-run" +
           std::to_string(r.run_index) + ".json";
}

SummaryRow summarize(std::vector<double> values) {
    require(!values.empty(), ErrorCode::invalid_argument, "no runs to summarize");
    SummaryRow row;
    row.runs = static_cast<int>(values.size());

    double sum = 0.0;
    for (double v : values) sum += v;
    row.mean = sum / row.runs;

    std::sort(values.begin(), values.end());
    row.best = values.front();
    const std::size_t mid = values.size() / 2;
    row.median = values.size() % 2 == 1
                     ? values[mid]
                     : (values[mid - 1] + values[mid]) / 2.0;

    if (row.runs >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - row.mean) * (v - row.mean);
        row.std_error = std::sqrt(ss / (row.runs - 1)) / std::sqrt(row.runs);
    }
    return row;
}

std::vector<double> rank_by_mean(const std::vector<double>& means) {
    const std::size_t n = means.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return means[a] < means[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && means[order[j + 1]] == means[order[i]]) ++j;
        // positions i..j are one tie group; everyone gets the average rank
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string format_rank(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s = buf;
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (s.back() == '.') s.push_back('0');
    return s;
}

std::string runlog_csv(const std::vector<RunRecord>& records) {
    std::ostringstream out;
    out << "evals,best_psi,algo,seed,instance\n";
    for (const auto& r : records)
        for (const auto& h : r.history)
            out << h.evals << ',' << format_double(h.best_psi) << ','
                << r.algorithm << ',' << r.seed << ',' << r.instance_id << '\n';
    return out.str();
}

namespace {

struct GroupKey {
    std::string instance;
    int k;
    std::string algo;

    bool operator<(const GroupKey& o) const {
        if (instance != o.instance) return instance < o.instance;
        if (k != o.k) return k < o.k;
        return algo < o.algo;
    }
};

std::map<GroupKey, std::vector<double>> group_training_psi(
    const std::vector<RunRecord>& records) {
    require(!records.empty(), ErrorCode::invalid_argument, "no records");
    std::map<GroupKey, std::vector<double>> groups;
    for (const auto& r : records) {
        const GroupKey key{r.instance_id, static_cast<int>(r.genome.size()),
                           r.algorithm};
        groups[key].push_back(r.training_psi);
    }
    // runs within a group are unordered input; make the stats input canonical
    for (auto& [key, values] : groups) {
        (void)key;
        std::sort(values.begin(), values.end());
    }
    return groups;
}

// per (instance, k): algorithm -> rank; plus the algorithm list
struct RankTables {
    std::vector<std::string> algos; // sorted
    std::map<std::pair<std::string, int>, std::map<std::string, double>> per_instance;
    std::map<std::string, double> mean_rank;
};

RankTables compute_ranks(const std::map<GroupKey, std::vector<double>>& groups) {
    std::set<std::string> algo_set;
    std::map<std::pair<std::string, int>, std::map<std::string, double>> means;
    for (const auto& [key, values] : groups) {
        algo_set.insert(key.algo);
        means[{key.instance, key.k}][key.algo] = summarize(values).mean;
    }
    require(algo_set.size() >= 2, ErrorCode::invalid_argument,
            "ranking needs at least two algorithms");

    RankTables t;
    t.algos.assign(algo_set.begin(), algo_set.end());
    std::map<std::string, double> rank_sum;
    std::map<std::string, int> rank_count;
    for (const auto& [inst_k, by_algo] : means) {
        std::vector<std::string> present;
        std::vector<double> m;
        for (const auto& [algo, mean] : by_algo) {
            present.push_back(algo);
            m.push_back(mean);
        }
        const auto ranks = rank_by_mean(m);
        for (std::size_t i = 0; i < present.size(); ++i) {
            t.per_instance[inst_k][present[i]] = ranks[i];
            rank_sum[present[i]] += ranks[i];
            ++rank_count[present[i]];
        }
    }
    for (const auto& [algo, sum] : rank_sum)
        t.mean_rank[algo] = sum / rank_count[algo];
    return t;
}

} // namespace

std::string render_summary_csv(const std::vector<RunRecord>& records) {
    const auto groups = group_training_psi(records);
    std::ostringstream out;
    out << "instance,k,algo,runs,best,median,mean,stderr\n";
    for (const auto& [key, values] : groups) {
        const auto s = summarize(values);
        out << key.instance << ',' << key.k << ',' << key.algo << ',' << s.runs
            << ',' << format_double(s.best) << ',' << format_double(s.median)
            << ',' << format_double(s.mean) << ',' << format_double(s.std_error)
            << '\n';
    }
    return out.str();
}

std::string render_rank_csv(const std::vector<RunRecord>& records) {
    const auto t = compute_ranks(group_training_psi(records));
    std::ostringstream out;
    out << "instance,k,algo,rank\n";
    for (const auto& [inst_k, by_algo] : t.per_instance)
        for (const auto& [algo, rank] : by_algo)
            out << inst_k.first << ',' << inst_k.second << ',' << algo << ','
                << format_rank(rank) << '\n';
    for (const auto& [algo, rank] : t.mean_rank)
        out << "mean,," << algo << ',' << format_rank(rank) << '\n';
    return out.str();
}

std::string render_report_text(const std::vector<RunRecord>& records) {
    const auto groups = group_training_psi(records);
    std::size_t name_w = 8;
    for (const auto& [key, values] : groups) {
        (void)values;
        name_w = std::max(name_w, key.instance.size() + 1);
    }

    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s %3s %-8s %4s %12s %12s %12s %12s\n",
                  static_cast<int>(name_w), "instance", "k", "algo", "runs",
                  "best", "median", "mean", "stderr");
    out << buf;
    for (const auto& [key, values] : groups) {
        const auto s = summarize(values);
        std::snprintf(buf, sizeof buf, "%-*s %3d %-8s %4d %12s %12s %12s %12s\n",
                      static_cast<int>(name_w), key.instance.c_str(), key.k,
                      key.algo.c_str(), s.runs, format_double(s.best).c_str(),
                      format_double(s.median).c_str(),
                      format_double(s.mean).c_str(),
                      format_double(s.std_error).c_str());
        out << buf;
    }

    const auto t = compute_ranks(groups);
    out << "\nranks by mean training psi (1 = best)\n";
    std::snprintf(buf, sizeof buf, "%-*s %3s", static_cast<int>(name_w),
                  "instance", "k");
    out << buf;
    for (const auto& algo : t.algos) {
        std::snprintf(buf, sizeof buf, " %8s", algo.c_str());
        out << buf;
    }
    out << '\n';
    for (const auto& [inst_k, by_algo] : t.per_instance) {
        std::snprintf(buf, sizeof buf, "%-*s %3d", static_cast<int>(name_w),
                      inst_k.first.c_str(), inst_k.second);
        out << buf;
        for (const auto& algo : t.algos) {
            const auto it = by_algo.find(algo);
            std::snprintf(buf, sizeof buf, " %8s",
                          it == by_algo.end() ? "-"
                                              : format_rank(it->second).c_str());
            out << buf;
        }
        out << '\n';
    }
    std::snprintf(buf, sizeof buf, "%-*s %3s", static_cast<int>(name_w), "mean",
                  "");
    out << buf;
    for (const auto& algo : t.algos) {
        std::snprintf(buf, sizeof buf, " %8s",
                      format_rank(t.mean_rank.at(algo)).c_str());
        out << buf;
    }
    out << '\n';
    return out.str();
}

} // namespace evac
