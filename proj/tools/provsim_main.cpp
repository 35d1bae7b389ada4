#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "provsim/experiment.hpp"

namespace fs = std::filesystem;

namespace {

int count_partial_rows(const fs::path& partial) {
    std::ifstream in(partial);
    if (!in) return 0;
    std::string line;
    int rows = 0;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (!line.empty()) rows++;
    }
    return rows;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SLA-driven cluster provisioning simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    int parallelism = 1;
    bool verbose = false;

    auto* run_cmd = app.add_subcommand("run", "Run every cell of an experiment config");
    run_cmd->add_option("config", config_path, "Experiment config (JSON)")->required();
    run_cmd->add_option("-o,--output", out_dir, "Output directory");
    run_cmd->add_option("-j,--parallel", parallelism, "Worker threads across cells");
    run_cmd->add_flag("-v,--verbose", verbose, "Log each completed run");

    auto* validate_cmd = app.add_subcommand("validate", "Check a config without running it");
    validate_cmd->add_option("config", config_path, "Experiment config (JSON)")->required();

    auto* status_cmd = app.add_subcommand("sweep-status", "Report completed vs expected runs");
    status_cmd->add_option("config", config_path, "Experiment config (JSON)")->required();
    status_cmd->add_option("-o,--output", out_dir, "Output directory of the sweep");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate_cmd->parsed()) {
            provsim::load_config(config_path);
            std::cout << "config ok: " << config_path << '\n';
            return 0;
        }
        if (status_cmd->parsed()) {
            auto cfg = provsim::load_config(config_path);
            int expected = provsim::expected_runs(cfg);
            int done = count_partial_rows(fs::path(out_dir) / "results_partial.csv");
            std::cout << "completed " << done << " / " << expected << " runs in " << out_dir
                      << '\n';
            return done == expected ? 0 : 1;
        }

        auto cfg = provsim::load_config(config_path);
        auto result = provsim::run_experiment(cfg, out_dir, parallelism,
                                              verbose ? &std::cout : nullptr);
        provsim::write_results_csv(result, out_dir);
        provsim::emit_plot_data(result, out_dir);
        provsim::write_wait_pdfs(result, out_dir, cfg.pdf_bin_width);
        std::cout << "wrote " << (result.rows.size() - result.failed_runs) << " result rows to "
                  << out_dir << '\n';
        if (result.failed_runs > 0) {
            std::cerr << result.failed_runs << " run(s) failed\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
