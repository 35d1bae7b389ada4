#pragma once

#include <optional>
#include <vector>

#include "provsim/domain.hpp"

namespace provsim {

// Observation-window traffic statistics. Samples accumulate between window
// boundaries (policy invocations and a periodic timer); publish() turns the
// current window into fresh moment estimates and blends them with the
// previous published estimates via exponential smoothing.
class WindowAccumulator {
public:
    WindowAccumulator() = default;
    WindowAccumulator(std::vector<TrafficEstimate> initial, double smoothing,
                      double start_time = 0.0);

    void record_job_arrival(int class_id, double time);
    void record_service(int class_id, double duration);

    // Publishes estimates for the window ending at `now` and starts a new
    // window. Classes with fewer than 2 samples on a side keep the previous
    // estimate for that side.
    const std::vector<TrafficEstimate>& publish(double now);

    const std::vector<TrafficEstimate>& current() const { return published_; }

    // Oracle mode: pin the published mean service time (and cs^2) per class.
    void pin_service_moments(int class_id, double mean, double scv);

private:
    struct Window {
        std::optional<double> last_arrival;
        std::int64_t ia_count = 0;
        double ia_sum = 0.0, ia_sumsq = 0.0;
        std::int64_t sv_count = 0;
        double sv_sum = 0.0, sv_sumsq = 0.0;

        void reset() { *this = Window{}; }
    };

    struct Pin {
        double mean;
        double scv;
    };

    double smoothing_ = 0.3;
    double window_start_ = 0.0;
    std::vector<Window> windows_;
    std::vector<TrafficEstimate> published_;
    std::vector<std::optional<Pin>> pins_;
};

} // namespace provsim
