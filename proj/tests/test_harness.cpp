#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "provsim/config.hpp"
#include "provsim/experiment.hpp"

using namespace provsim;
namespace fs = std::filesystem;

namespace {

const char* kTinyConfig = R"json({
  "cluster": { "servers": 4 },
  "horizon": 400,
  "bucket_width": 100,
  "estimation": { "window": 10, "smoothing": 0.3 },
  "classes": [
    { "charge": 10, "penalty": 10, "obligation": 1.0, "jobs_per_session": 10,
      "job_rate": 2.0, "session_rate": 0.05,
      "service_time": { "kind": "exponential", "mean": 1.0 } },
    { "charge": 5, "penalty": 5, "obligation": 2.0, "jobs_per_session": 5,
      "job_rate": 1.0, "session_rate": 0.05,
      "service_time": { "kind": "exponential", "mean": 0.5 } }
  ],
  "policies": ["admit_all", "threshold"],
  "sweep": { "variable": "class2.session_rate", "values": [0.05, 0.1] },
  "replications": 2,
  "base_seed": 99
})json";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string config_path(const char* name) {
    return std::string(PROVSIM_CONFIG_DIR) + "/" + name;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char* tag) {
        path = fs::temp_directory_path() / (std::string("provsim_test_") + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("config parsing round-trips the fields") {
    ExperimentConfig cfg = parse_config(kTinyConfig);
    CHECK(cfg.base.total_servers == 4);
    CHECK(cfg.base.horizon == doctest::Approx(400.0));
    CHECK(cfg.base.classes.size() == 2);
    CHECK(cfg.base.classes[1].charge == doctest::Approx(5.0));
    CHECK(cfg.base.classes[1].service_time.mean() == doctest::Approx(0.5));
    CHECK(cfg.policies == std::vector<std::string>{"admit_all", "threshold"});
    CHECK(cfg.sweep.variable == "class2.session_rate");
    CHECK(cfg.sweep.values == std::vector<double>{0.05, 0.1});
    CHECK(cfg.replications == 2);
    CHECK(cfg.base_seed == 99);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("sweep values apply to the addressed class field") {
    ExperimentConfig cfg = parse_config(kTinyConfig);
    SimConfig sim = cfg.base;
    apply_sweep_value(sim, "class2.session_rate", 0.125);
    CHECK(sim.classes[1].session_rate == doctest::Approx(0.125));
    CHECK(sim.classes[0].session_rate == doctest::Approx(0.05)); // untouched

    apply_sweep_value(sim, "class1.obligation", 3.0);
    CHECK(sim.classes[0].obligation == doctest::Approx(3.0));

    CHECK_THROWS(apply_sweep_value(sim, "class9.session_rate", 1.0));
    CHECK_THROWS(apply_sweep_value(sim, "class1.bogus", 1.0));
    CHECK_THROWS(apply_sweep_value(sim, "garbage", 1.0));
}

TEST_CASE("run counting") {
    ExperimentConfig cfg = parse_config(kTinyConfig);
    // 2 sweep values x 2 policies x 2 replications.
    CHECK(expected_runs(cfg) == 8);
}

TEST_CASE("cell seeds are deterministic and distinct") {
    CHECK(cell_seed(1, 0, 0, 0) == cell_seed(1, 0, 0, 0));
    CHECK(cell_seed(1, 0, 0, 0) != cell_seed(2, 0, 0, 0));
    CHECK(cell_seed(1, 1, 0, 0) != cell_seed(1, 0, 0, 0));
    CHECK(cell_seed(1, 0, 1, 0) != cell_seed(1, 0, 0, 0));
    CHECK(cell_seed(1, 0, 0, 1) != cell_seed(1, 0, 0, 0));
}

TEST_CASE("experiments rerun byte-identically and emit the expected files") {
    ExperimentConfig cfg = parse_config(kTinyConfig);
    TempDir a("a"), b("b");

    ExperimentResult r1 = run_experiment(cfg, a.path.string());
    ExperimentResult r2 = run_experiment(cfg, b.path.string());
    CHECK(r1.failed_runs == 0);
    CHECK(static_cast<int>(r1.rows.size()) == expected_runs(cfg));

    write_results_csv(r1, a.path.string());
    write_results_csv(r2, b.path.string());
    emit_plot_data(r1, a.path.string());
    emit_plot_data(r2, b.path.string());
    write_wait_pdfs(r1, a.path.string(), cfg.pdf_bin_width);

    CHECK(slurp(a.path / "results.csv") == slurp(b.path / "results.csv"));
    CHECK(fs::exists(a.path / "results_partial.csv"));

    // One series file per policy, identical across reruns.
    for (const auto& policy : cfg.policies) {
        fs::path series = a.path / ("series_" + policy + ".csv");
        REQUIRE(fs::exists(series));
        CHECK(slurp(series) == slurp(b.path / ("series_" + policy + ".csv")));
    }

    // Deterministic row order: sweep x policy x replication.
    int idx = 0;
    for (int s = 0; s < 2; ++s)
        for (int p = 0; p < 2; ++p)
            for (int rep = 0; rep < 2; ++rep, ++idx) {
                const ResultRow& row = r1.rows[idx];
                CHECK(row.sweep_index == s);
                CHECK(row.policy_index == p);
                CHECK(row.replication == rep);
                CHECK(row.policy == cfg.policies[p]);
                CHECK(row.sweep_value == doctest::Approx(cfg.sweep.values[s]));
                CHECK(row.ci_half_width >= 0.0);
                CHECK(row.seed == cell_seed(cfg.base_seed, s, p, rep));
            }
}

TEST_CASE("series files carry nonnegative confidence columns") {
    ExperimentConfig cfg = parse_config(kTinyConfig);
    TempDir dir("ci");
    ExperimentResult r = run_experiment(cfg, dir.path.string());
    emit_plot_data(r, dir.path.string());
    for (const auto& policy : cfg.policies) {
        std::ifstream in(dir.path / ("series_" + policy + ".csv"));
        std::string line;
        std::getline(in, line); // header
        int rows = 0;
        while (std::getline(in, line)) {
            auto last_comma = line.rfind(',');
            REQUIRE(last_comma != std::string::npos);
            CHECK(std::stod(line.substr(last_comma + 1)) >= 0.0);
            ++rows;
        }
        CHECK(rows == 2);
    }
}

TEST_CASE("bundled experiment configs load and differ as documented") {
    ExperimentConfig e1 = load_config(config_path("experiment1.json"));
    CHECK_NOTHROW(e1.validate());
    CHECK(e1.base.classes.size() == 4);
    CHECK(e1.policies.size() == 4);
    CHECK(e1.sweep.values.size() == 10);
    CHECK(e1.replications == 5);
    // 40 runs per replication: 10 sweep points x 4 policies.
    CHECK(expected_runs(e1) / e1.replications == 40);
    for (const auto& c : e1.base.classes) {
        CHECK(c.charge == doctest::Approx(10.0));
        CHECK(c.penalty == doctest::Approx(10.0));
        CHECK(c.service_time.scv() == doctest::Approx(1.0));
    }

    ExperimentConfig e2 = load_config(config_path("experiment2.json"));
    CHECK_NOTHROW(e2.validate());
    CHECK(e2.base.classes[0].charge == doctest::Approx(10.0));
    CHECK(e2.base.classes[1].charge == doctest::Approx(20.0));
    CHECK(e2.base.classes[2].charge == doctest::Approx(30.0));
    CHECK(e2.base.classes[3].charge == doctest::Approx(40.0));
    for (const auto& c : e2.base.classes) CHECK(c.penalty == doctest::Approx(c.charge));

    ExperimentConfig e3 = load_config(config_path("experiment3.json"));
    CHECK_NOTHROW(e3.validate());
    for (const auto& c : e3.base.classes) {
        CHECK(c.penalty == doctest::Approx(2.0 * c.charge));
        CHECK(c.service_time.mean() == doctest::Approx(1.0));
        CHECK(c.service_time.scv() == doctest::Approx(6.12).epsilon(0.01));
    }
}

TEST_CASE("invalid configs are rejected") {
    CHECK_THROWS(parse_config("{}"));
    CHECK_THROWS(parse_config("not json"));

    std::string no_policy = kTinyConfig;
    auto pos = no_policy.find("\"admit_all\", \"threshold\"");
    no_policy.replace(pos, std::string("\"admit_all\", \"threshold\"").size(), "");
    CHECK_THROWS(parse_config(no_policy));
}
