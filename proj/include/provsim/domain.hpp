#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "provsim/distribution.hpp"

namespace provsim {

using SessionId = std::int64_t;
inline constexpr SessionId kRejectedCookie = -1;

// Static SLA and traffic contract for one of the m service types.
struct ServiceClass {
    int id = 0;                    // class index, 0-based
    double charge = 0.0;           // money earned per accepted session
    double penalty = 0.0;          // money paid per violated session
    double obligation = 1.0;       // max allowed session-average wait, seconds
    int jobs_per_session = 1;      // jobs per session
    double job_rate = 1.0;         // jobs/second within a session
    double session_rate = 0.0;     // sessions/second offered
    double weight = 1.0;           // economic-importance coefficient
    Distribution service_time;     // job service time distribution

    void validate() const {
        if (jobs_per_session < 1) throw std::invalid_argument("jobs_per_session must be >= 1");
        if (job_rate <= 0) throw std::invalid_argument("job_rate must be > 0");
        if (obligation <= 0) throw std::invalid_argument("obligation must be > 0");
        if (charge < 0 || penalty < 0) throw std::invalid_argument("charge/penalty must be >= 0");
        if (session_rate < 0) throw std::invalid_argument("session_rate must be >= 0");
        if (weight <= 0) throw std::invalid_argument("weight must be > 0");
        if (service_time.mean() <= 0) throw std::invalid_argument("service mean must be > 0");
    }
};

// A live accepted session. jobs_completed counts jobs whose waiting time is
// determined, i.e. jobs that have started service.
struct SessionState {
    SessionId session_id = kRejectedCookie;
    int class_id = 0;
    int jobs_completed = 0;  // l
    int jobs_arrived = 0;
    double wait_sum = 0.0;   // sum of waits over completed jobs
    double arrival_time = 0.0;

    double mean_wait() const { return jobs_completed > 0 ? wait_sum / jobs_completed : 0.0; }
};

inline double session_mean_wait(const SessionState& s) { return s.mean_wait(); }

// SLA test: strict inequality, W > q. Requires a complete session.
inline bool session_sla_violated(const SessionState& s, const ServiceClass& cls) {
    if (s.jobs_completed != cls.jobs_per_session)
        throw std::logic_error("session_sla_violated: session is incomplete");
    return s.mean_wait() > cls.obligation;
}

// Per-class windowed traffic estimates feeding the policies.
struct TrafficEstimate {
    double arrival_rate = 0.0;     // lambda, jobs/s
    double mean_service = 1.0;     // b, seconds
    double interarrival_scv = 1.0; // ca^2
    double service_scv = 1.0;      // cs^2
    std::int64_t arrival_samples = 0;
    std::int64_t service_samples = 0;
    bool valid = false;            // false until >= 2 samples seen
};

struct ClassCounters {
    std::int64_t accepted = 0;
    std::int64_t rejected = 0;
    std::int64_t completed = 0;  // sessions whose SLA outcome is booked
    std::int64_t violated = 0;

    std::int64_t sla_met() const { return completed - violated; }
};

// Charges, penalties, per-class counters and time-bucketed revenue samples.
// A session's charge is booked at acceptance, its penalty (if any) at
// completion. Sessions still open at the horizon are excluded from revenue
// by finalize() and reported separately.
class RevenueLedger {
public:
    RevenueLedger() = default;
    RevenueLedger(int num_classes, double bucket_width)
        : bucket_width_(bucket_width), counters_(num_classes), final_mean_waits_(num_classes) {}

    void on_session_accepted(SessionId sid, int class_id, double charge, double now);
    void on_session_rejected(int class_id);
    void on_session_completed(SessionId sid, int class_id, double mean_wait, bool violated,
                              double penalty, double now);

    // Reverses the charges of sessions still open; call once at the horizon.
    void finalize();

    double charges() const { return charges_; }
    double penalties() const { return penalties_; }
    double revenue() const { return charges_ - penalties_; }
    double in_flight_charges() const { return in_flight_charges_; }
    std::int64_t in_flight_sessions() const { return in_flight_sessions_; }
    bool finalized() const { return finalized_; }

    double bucket_width() const { return bucket_width_; }
    const std::vector<double>& bucket_revenue() const { return buckets_; }

    const std::vector<ClassCounters>& counters() const { return counters_; }
    const ClassCounters& counters(int class_id) const { return counters_.at(class_id); }
    int num_classes() const { return static_cast<int>(counters_.size()); }

    // Final mean waits of completed sessions, per class (for PDFs).
    const std::vector<double>& final_mean_waits(int class_id) const {
        return final_mean_waits_.at(class_id);
    }

private:
    int bucket_index(double t);

    double bucket_width_ = 600.0;
    double charges_ = 0.0;
    double penalties_ = 0.0;
    double in_flight_charges_ = 0.0;
    std::int64_t in_flight_sessions_ = 0;
    bool finalized_ = false;
    std::vector<double> buckets_;
    std::vector<ClassCounters> counters_;
    std::vector<std::vector<double>> final_mean_waits_;

    struct OpenCharge {
        int bucket;
        double amount;
    };
    std::unordered_map<SessionId, OpenCharge> open_;
};

} // namespace provsim
