#pragma once

#include <string>
#include <vector>

#include "provsim/engine.hpp"
#include "provsim/queueing.hpp"

namespace provsim {

struct SweepSpec {
    std::string variable; // e.g. "class4.session_rate" (1-based class index)
    std::vector<double> values;

    bool active() const { return !variable.empty(); }
};

struct ExperimentConfig {
    SimConfig base;
    std::vector<std::string> policies;
    queueing::ThresholdSearch threshold_search;
    SweepSpec sweep;
    int replications = 5;
    std::uint64_t base_seed = 1;
    double pdf_bin_width = 0.05;

    void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Applies one sweep value to a copy of the base config. Supported variables:
// class<i>.{session_rate,job_rate,charge,penalty,obligation,weight},
// 1-based class index.
void apply_sweep_value(SimConfig& config, const std::string& variable, double value);

} // namespace provsim
