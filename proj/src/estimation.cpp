#include "provsim/estimation.hpp"

#include <algorithm>
#include <cmath>

namespace provsim {

namespace {

// Sample variance / mean^2, clamped to be finite and nonnegative.
double sample_scv(std::int64_t n, double sum, double sumsq) {
    if (n < 2) return 0.0;
    double mean = sum / n;
    if (mean <= 0) return 0.0;
    double var = (sumsq - sum * mean) / (n - 1);
    if (var < 0 || !std::isfinite(var)) var = 0.0;
    return var / (mean * mean);
}

double blend(double w, double fresh, double old) { return w * fresh + (1.0 - w) * old; }

} // namespace

WindowAccumulator::WindowAccumulator(std::vector<TrafficEstimate> initial, double smoothing,
                                     double start_time)
    : smoothing_(smoothing),
      window_start_(start_time),
      windows_(initial.size()),
      published_(std::move(initial)),
      pins_(published_.size()) {}

void WindowAccumulator::record_job_arrival(int class_id, double time) {
    auto& w = windows_.at(class_id);
    if (w.last_arrival) {
        double ia = time - *w.last_arrival;
        if (ia >= 0) {
            w.ia_count++;
            w.ia_sum += ia;
            w.ia_sumsq += ia * ia;
        }
    }
    w.last_arrival = time;
}

void WindowAccumulator::record_service(int class_id, double duration) {
    auto& w = windows_.at(class_id);
    w.sv_count++;
    w.sv_sum += duration;
    w.sv_sumsq += duration * duration;
}

void WindowAccumulator::pin_service_moments(int class_id, double mean, double scv) {
    pins_.at(class_id) = Pin{mean, scv};
    published_.at(class_id).mean_service = mean;
    published_.at(class_id).service_scv = scv;
}

const std::vector<TrafficEstimate>& WindowAccumulator::publish(double now) {
    double span = now - window_start_;
    for (std::size_t i = 0; i < windows_.size(); ++i) {
        auto& w = windows_[i];
        auto& est = published_[i];
        // A window is informative when it holds enough samples, or when the
        // previous estimate predicted several arrivals that never came (a
        // stale-rate signal: without it, a system that stops admitting
        // traffic would keep its last busy-period estimate forever).
        bool stale_signal = est.arrival_rate * span >= 4.0;
        if ((w.ia_count >= 2 || stale_signal) && span > 0) {
            double fresh_lambda = static_cast<double>(w.ia_count) / span;
            est.arrival_rate = std::max(0.0, blend(smoothing_, fresh_lambda, est.arrival_rate));
            if (w.ia_count >= 2) {
                double fresh_ca2 = sample_scv(w.ia_count, w.ia_sum, w.ia_sumsq);
                est.interarrival_scv =
                    std::max(0.0, blend(smoothing_, fresh_ca2, est.interarrival_scv));
            }
            est.arrival_samples += w.ia_count;
            est.valid = true;
        }
        if (w.sv_count >= 2 && !pins_[i]) {
            double fresh_b = w.sv_sum / w.sv_count;
            double fresh_cs2 = sample_scv(w.sv_count, w.sv_sum, w.sv_sumsq);
            if (fresh_b > 0) {
                est.mean_service = std::max(1e-12, blend(smoothing_, fresh_b, est.mean_service));
                est.service_scv = std::max(0.0, blend(smoothing_, fresh_cs2, est.service_scv));
            }
            est.service_samples += w.sv_count;
        }
        w.reset();
    }
    window_start_ = now;
    return published_;
}

} // namespace provsim
