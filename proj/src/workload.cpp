#include "provsim/workload.hpp"

#include <cmath>

namespace provsim {

namespace {

double exp_sample(std::mt19937_64& rng, double rate) {
    return std::exponential_distribution<double>(rate)(rng);
}

} // namespace

void SessionArrivalStream::ClassStream::advance() {
    if (!burst) {
        if (rate <= 0) {
            next_time = kNever;
            return;
        }
        next_time += exp_sample(rng, rate);
        return;
    }
    // On-off: walk ON/OFF phases until an arrival lands inside an ON phase.
    const auto& p = *burst;
    if (p.rate_on <= 0 || p.mean_on <= 0) {
        next_time = kNever;
        return;
    }
    double t = next_time;
    if (!std::isfinite(t)) return;
    for (;;) {
        if (on) {
            double candidate = t + exp_sample(rng, p.rate_on);
            if (candidate <= phase_end) {
                next_time = candidate;
                return;
            }
            t = phase_end;
            on = false;
            phase_end = t + exp_sample(phase_rng, 1.0 / p.mean_off);
        } else {
            t = phase_end;
            on = true;
            phase_end = t + exp_sample(phase_rng, 1.0 / p.mean_on);
        }
    }
}

SessionArrivalStream::SessionArrivalStream(const std::vector<ServiceClass>& classes,
                                           const std::vector<std::optional<OnOffParams>>& bursts,
                                           std::uint64_t seed) {
    streams_.resize(classes.size());
    for (std::size_t i = 0; i < classes.size(); ++i) {
        auto& s = streams_[i];
        s.rate = classes[i].session_rate;
        if (i < bursts.size()) s.burst = bursts[i];
        s.rng = make_stream(seed, classes[i].id, StreamPurpose::SessionArrival);
        s.phase_rng = make_stream(seed, classes[i].id, StreamPurpose::BurstPhase);
        s.next_time = 0.0;
        if (s.burst) {
            s.on = true;
            s.phase_end = exp_sample(s.phase_rng, 1.0 / s.burst->mean_on);
        }
        s.advance();
    }
}

std::optional<SessionArrival> SessionArrivalStream::next() {
    int best = -1;
    for (std::size_t i = 0; i < streams_.size(); ++i) {
        if (!std::isfinite(streams_[i].next_time)) continue;
        if (best < 0 || streams_[i].next_time < streams_[best].next_time)
            best = static_cast<int>(i);
    }
    if (best < 0) return std::nullopt;
    SessionArrival out{best, streams_[best].next_time};
    streams_[best].advance();
    return out;
}

double job_interarrival(const ServiceClass& cls, std::mt19937_64& rng, bool deterministic) {
    if (deterministic) return 1.0 / cls.job_rate;
    return exp_sample(rng, cls.job_rate);
}

double job_service_time(const ServiceClass& cls, std::mt19937_64& rng) {
    return cls.service_time.sample(rng);
}

} // namespace provsim
