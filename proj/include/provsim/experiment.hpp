#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "provsim/config.hpp"
#include "provsim/metrics.hpp"

namespace provsim {

// One simulation run (sweep value x policy x replication).
struct ResultRow {
    int sweep_index = 0;
    int policy_index = 0;
    int replication = 0;
    std::string policy;
    std::string sweep_var;
    double sweep_value = 0.0;
    std::uint64_t seed = 0;
    double revenue_per_sec = 0.0;
    double ci_half_width = 0.0; // within-run CI from bucket samples
    std::vector<std::int64_t> accepted, rejected, violated;
    std::vector<double> sla_met; // NaN when undefined
    std::vector<std::vector<double>> final_waits; // per class, for PDFs
    bool failed = false;
    std::string error;
};

struct ExperimentResult {
    std::vector<ResultRow> rows; // deterministic order: sweep x policy x replication
    int num_classes = 0;
    int failed_runs = 0;
};

std::uint64_t cell_seed(std::uint64_t base_seed, int sweep_index, int policy_index,
                        int replication);

// Runs every cell (optionally in parallel), flushing one line per completed
// run to <out_dir>/results_partial.csv.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                int parallelism = 1, std::ostream* log = nullptr);

// <out_dir>/results.csv with the normative columns.
void write_results_csv(const ExperimentResult& result, const std::string& out_dir);

// One series file per policy: sweep value, across-replication mean revenue,
// CI half-width.
void emit_plot_data(const ExperimentResult& result, const std::string& out_dir);

// Per-class mean-wait histograms per (policy, sweep value) cell.
void write_wait_pdfs(const ExperimentResult& result, const std::string& out_dir,
                     double bin_width);

// Expected number of runs for a config.
int expected_runs(const ExperimentConfig& cfg);

std::string result_row_csv(const ResultRow& row, int num_classes);
std::string results_csv_header(int num_classes);

} // namespace provsim
