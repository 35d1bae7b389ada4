#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "provsim/domain.hpp"
#include "provsim/rng.hpp"

namespace provsim {

// Interrupted-Poisson (on-off) session arrival parameters. During ON periods
// sessions arrive at rate_on; OFF periods are silent. The paper's bursty
// experiments give no parameters, so these come from config.
struct OnOffParams {
    double rate_on = 0.0;
    double mean_on = 1.0;
    double mean_off = 1.0;
};

struct SessionArrival {
    int class_id;
    double time;
};

// Merged per-class session arrival processes: Poisson with rate delta_i by
// default, optionally on-off. Each class owns an independent RNG substream,
// so the merged sequence is reproducible under a fixed seed.
class SessionArrivalStream {
public:
    SessionArrivalStream(const std::vector<ServiceClass>& classes,
                         const std::vector<std::optional<OnOffParams>>& bursts,
                         std::uint64_t seed);

    // Earliest next arrival strictly after the previously returned one.
    // Returns nullopt when no class ever generates arrivals.
    std::optional<SessionArrival> next();

private:
    static constexpr double kNever = std::numeric_limits<double>::infinity();

    struct ClassStream {
        double rate = 0.0;
        std::optional<OnOffParams> burst;
        std::mt19937_64 rng;
        std::mt19937_64 phase_rng;
        double next_time = kNever;
        bool on = true;
        double phase_end = 0.0;

        void advance();
    };

    std::vector<ClassStream> streams_;
};

// Exponential within-session job interarrival with mean 1/gamma
// (deterministic spacing when deterministic = true).
double job_interarrival(const ServiceClass& cls, std::mt19937_64& rng, bool deterministic = false);

// Positive sample from the class's service time distribution.
double job_service_time(const ServiceClass& cls, std::mt19937_64& rng);

} // namespace provsim
