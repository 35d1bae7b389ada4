#include "provsim/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace provsim {

namespace fs = std::filesystem;

std::uint64_t cell_seed(std::uint64_t base_seed, int sweep_index, int policy_index,
                        int replication) {
    std::uint64_t cell = mix_seed(static_cast<std::uint64_t>(sweep_index) * 1000003ULL +
                                      static_cast<std::uint64_t>(policy_index),
                                  static_cast<std::uint64_t>(replication));
    return base_seed ^ cell;
}

int expected_runs(const ExperimentConfig& cfg) {
    int sweeps = cfg.sweep.active() ? static_cast<int>(cfg.sweep.values.size()) : 1;
    return sweeps * static_cast<int>(cfg.policies.size()) * cfg.replications;
}

namespace {

void run_one(const ExperimentConfig& cfg, ResultRow& row) {
    SimConfig sim_cfg = cfg.base;
    if (cfg.sweep.active()) apply_sweep_value(sim_cfg, cfg.sweep.variable, row.sweep_value);

    auto policy = make_policy(row.policy, cfg.threshold_search);
    RevenueLedger ledger = run(sim_cfg, *policy, row.seed);

    const int m = static_cast<int>(sim_cfg.classes.size());
    row.revenue_per_sec = revenue_rate(ledger, sim_cfg.horizon);

    std::vector<double> bucket_rates;
    for (double b : ledger.bucket_revenue()) bucket_rates.push_back(b / ledger.bucket_width());
    ConfidenceInterval ci = confidence_interval(bucket_rates);
    row.ci_half_width = ci.defined ? ci.half_width : 0.0;

    for (int i = 0; i < m; ++i) {
        const auto& c = ledger.counters(i);
        row.accepted.push_back(c.accepted);
        row.rejected.push_back(c.rejected);
        row.violated.push_back(c.violated);
        auto met = sla_met_fraction(ledger, i);
        row.sla_met.push_back(met ? *met : std::nan(""));
        row.final_waits.push_back(ledger.final_mean_waits(i));
    }
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

} // namespace

std::string results_csv_header(int m) {
    std::ostringstream os;
    os << "policy,sweep_var,sweep_value,seed,revenue_per_sec,ci_half_width";
    for (int i = 1; i <= m; ++i) os << ",accepted_" << i;
    for (int i = 1; i <= m; ++i) os << ",rejected_" << i;
    for (int i = 1; i <= m; ++i) os << ",violated_" << i;
    for (int i = 1; i <= m; ++i) os << ",sla_met_frac_" << i;
    return os.str();
}

std::string result_row_csv(const ResultRow& row, int m) {
    std::ostringstream os;
    os << row.policy << ',' << row.sweep_var << ',' << format_double(row.sweep_value) << ','
       << row.seed << ',' << format_double(row.revenue_per_sec) << ','
       << format_double(row.ci_half_width);
    for (int i = 0; i < m; ++i) os << ',' << row.accepted[i];
    for (int i = 0; i < m; ++i) os << ',' << row.rejected[i];
    for (int i = 0; i < m; ++i) os << ',' << row.violated[i];
    for (int i = 0; i < m; ++i) os << ',' << format_double(row.sla_met[i]);
    return os.str();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                int parallelism, std::ostream* log) {
    cfg.validate();
    fs::create_directories(out_dir);

    std::vector<double> sweep_values =
        cfg.sweep.active() ? cfg.sweep.values : std::vector<double>{0.0};

    ExperimentResult result;
    result.num_classes = static_cast<int>(cfg.base.classes.size());
    for (int s = 0; s < static_cast<int>(sweep_values.size()); ++s) {
        for (int p = 0; p < static_cast<int>(cfg.policies.size()); ++p) {
            for (int r = 0; r < cfg.replications; ++r) {
                ResultRow row;
                row.sweep_index = s;
                row.policy_index = p;
                row.replication = r;
                row.policy = cfg.policies[p];
                row.sweep_var = cfg.sweep.active() ? cfg.sweep.variable : "";
                row.sweep_value = sweep_values[s];
                row.seed = cell_seed(cfg.base_seed, s, p, r);
                result.rows.push_back(std::move(row));
            }
        }
    }

    std::ofstream partial(fs::path(out_dir) / "results_partial.csv");
    partial << results_csv_header(result.num_classes) << '\n';
    std::mutex io_mutex;

    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            int idx = next.fetch_add(1);
            if (idx >= static_cast<int>(result.rows.size())) return;
            ResultRow& row = result.rows[idx];
            try {
                run_one(cfg, row);
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
            }
            std::lock_guard<std::mutex> lk(io_mutex);
            if (!row.failed) {
                partial << result_row_csv(row, result.num_classes) << '\n';
                partial.flush();
            }
            if (log) {
                *log << "[" << row.policy << " " << row.sweep_var << "=" << row.sweep_value
                     << " rep=" << row.replication << "] "
                     << (row.failed ? ("FAILED: " + row.error)
                                    : ("revenue/s=" + format_double(row.revenue_per_sec)))
                     << '\n';
            }
        }
    };

    int threads = std::max(1, parallelism);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const auto& row : result.rows)
        if (row.failed) result.failed_runs++;
    return result;
}

void write_results_csv(const ExperimentResult& result, const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "results.csv");
    out << results_csv_header(result.num_classes) << '\n';
    for (const auto& row : result.rows)
        if (!row.failed) out << result_row_csv(row, result.num_classes) << '\n';
}

void emit_plot_data(const ExperimentResult& result, const std::string& out_dir) {
    fs::create_directories(out_dir);
    // policy -> sweep index -> revenue samples
    std::map<std::string, std::map<int, std::pair<double, std::vector<double>>>> series;
    for (const auto& row : result.rows) {
        if (row.failed) continue;
        auto& cell = series[row.policy][row.sweep_index];
        cell.first = row.sweep_value;
        cell.second.push_back(row.revenue_per_sec);
    }
    for (const auto& [policy, cells] : series) {
        std::ofstream out(fs::path(out_dir) / ("series_" + policy + ".csv"));
        out << "sweep_value,mean_revenue_per_sec,ci_half_width\n";
        for (const auto& [idx, cell] : cells) {
            ConfidenceInterval ci = confidence_interval(cell.second);
            double mean = ci.defined ? ci.mean : (cell.second.empty() ? 0.0 : cell.second[0]);
            out << format_double(cell.first) << ',' << format_double(mean) << ','
                << format_double(ci.half_width) << '\n';
        }
    }
}

void write_wait_pdfs(const ExperimentResult& result, const std::string& out_dir,
                     double bin_width) {
    fs::create_directories(out_dir);
    // (policy, sweep index, class) -> histogram over all replications
    std::map<std::tuple<std::string, int, int>, WaitPdf> pdfs;
    std::map<std::tuple<std::string, int, int>, double> sweep_value;
    for (const auto& row : result.rows) {
        if (row.failed) continue;
        for (int i = 0; i < result.num_classes; ++i) {
            auto key = std::make_tuple(row.policy, row.sweep_index, i);
            auto [it, inserted] = pdfs.try_emplace(key, bin_width);
            it->second.add_all(row.final_waits[i]);
            sweep_value[key] = row.sweep_value;
        }
    }
    for (const auto& [key, pdf] : pdfs) {
        const auto& [policy, sweep_idx, cls] = key;
        std::ostringstream name;
        name << "pdf_" << policy << "_sw" << sweep_idx << "_class" << (cls + 1) << ".csv";
        std::ofstream out(fs::path(out_dir) / name.str());
        out << "# sweep_value=" << format_double(sweep_value.at(key)) << '\n';
        out << "bin_start,count,density\n";
        double total = static_cast<double>(pdf.total());
        for (std::size_t b = 0; b < pdf.counts().size(); ++b) {
            double density = total > 0 ? pdf.counts()[b] / (total * bin_width) : 0.0;
            out << format_double(b * bin_width) << ',' << pdf.counts()[b] << ','
                << format_double(density) << '\n';
        }
    }
}

} // namespace provsim
