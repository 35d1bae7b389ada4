#pragma once

#include <deque>
#include <functional>
#include <iosfwd>
#include <map>
#include <queue>
#include <unordered_map>
#include <vector>

#include "provsim/domain.hpp"
#include "provsim/estimation.hpp"
#include "provsim/policies.hpp"
#include "provsim/workload.hpp"

namespace provsim {

enum class EventKind { SessionArrival, JobArrival, ServiceCompletion, WindowBoundary };

struct Event {
    double time = 0.0;
    std::uint64_t seq = 0; // deterministic tie-break for equal times
    EventKind kind = EventKind::WindowBoundary;
    int class_id = -1;
    SessionId session = kRejectedCookie;
    int server = -1;
};

struct SimConfig {
    int total_servers = 1;
    std::vector<ServiceClass> classes;
    double horizon = 7200.0;
    double bucket_width = 600.0;
    double estimation_window = 10.0; // periodic refresh timer, seconds
    double smoothing = 0.3;          // estimate blending factor w
    bool deterministic_job_spacing = false;
    bool pin_service_means = false;  // oracle mode: estimates use analytic b, cs^2
    bool drain_at_horizon = false;   // keep serving accepted work past the horizon (tests)
    std::vector<std::optional<OnOffParams>> burst_arrivals; // per class, empty = all Poisson
    std::optional<std::vector<int>> initial_allocation;     // default: uniform split

    void validate() const;
};

struct Job {
    SessionId session = kRejectedCookie;
    int class_id = -1;
    double arrival_time = 0.0;
    std::uint64_t seq = 0; // FIFO tie-break
};

struct Server {
    int assigned_class = 0;   // accounting class; counts toward allocation
    int serving_class = -1;   // -1 when idle
    SessionId job_session = kRejectedCookie;
    double service_start = 0.0;
    double service_end = 0.0;

    bool busy() const { return serving_class >= 0; }
    bool draining() const { return busy() && serving_class != assigned_class; }
};

// Allocation vector, per-class FIFO queues and per-server status.
struct ClusterState {
    int total_servers = 0;
    std::vector<Server> servers;
    std::vector<std::deque<Job>> queues;
    std::vector<int> allocation; // n_i, equals count of servers assigned to i

    std::int64_t queued_jobs(int class_id) const {
        return static_cast<std::int64_t>(queues.at(class_id).size());
    }
};

struct RunStats {
    std::int64_t events_processed = 0;
    std::int64_t jobs_served = 0;
    double total_wait = 0.0;
    double total_response = 0.0; // wait + service, extra metric
};

class Simulation;

// Test hook invoked after every processed event.
using EventObserver = std::function<void(const Simulation&, const Event&)>;

class Simulation {
public:
    Simulation(SimConfig config, AdmissionPolicy& policy, std::uint64_t seed);

    // Processes one event; false when the horizon is reached or no events remain.
    bool step();
    void run();

    double now() const { return now_; }
    const SimConfig& config() const { return config_; }
    const ClusterState& cluster() const { return cluster_; }
    const RevenueLedger& ledger() const { return ledger_; }
    RevenueLedger& mutable_ledger() { return ledger_; }
    const WindowAccumulator& estimates() const { return estimator_; }
    const RunStats& stats() const { return stats_; }

    std::int64_t active_session_count() const { return static_cast<std::int64_t>(active_.size()); }
    const std::map<SessionId, SessionState>& active_sessions() const { return active_; }
    // ServiceCompletion count per session, kept for session-integrity checks.
    const std::unordered_map<SessionId, int>& jobs_served_per_session() const {
        return served_per_session_;
    }

    void set_observer(EventObserver obs) { observer_ = std::move(obs); }
    void set_trace(std::ostream* trace) { trace_ = trace; }

private:
    struct EventOrder {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    void schedule(double time, EventKind kind, int class_id = -1,
                  SessionId session = kRejectedCookie, int server = -1);
    void handle(const Event& ev);
    void handle_session_arrival(const Event& ev);
    void handle_job_arrival(const Event& ev);
    void handle_service_completion(const Event& ev);
    void handle_window_boundary(const Event& ev);

    SystemSnapshot snapshot();
    void apply_allocation(const std::vector<int>& target);
    void dispatch(int class_id);
    void drain_dispatch();
    void start_service(int server_idx, const Job& job);
    void process_pending_completions();
    void trace_line(const Event& ev) const;

    SimConfig config_;
    AdmissionPolicy& policy_;
    double now_ = 0.0;
    std::uint64_t next_event_seq_ = 0;
    std::uint64_t next_job_seq_ = 0;
    SessionId next_session_id_ = 0;
    std::priority_queue<Event, std::vector<Event>, EventOrder> events_;

    ClusterState cluster_;
    RevenueLedger ledger_;
    WindowAccumulator estimator_;
    SessionArrivalStream arrivals_;
    std::vector<std::mt19937_64> job_rng_;     // per class
    std::vector<std::mt19937_64> service_rng_; // per class

    std::map<SessionId, SessionState> active_; // accepted, wait not yet fully determined
    std::vector<std::vector<SessionId>> active_by_class_;
    std::unordered_map<SessionId, int> served_per_session_;
    std::vector<SessionId> pending_completions_;
    // Rebuilt per policy invocation; referenced by SystemSnapshot.
    std::vector<std::vector<const SessionState*>> snapshot_sessions_;

    RunStats stats_;
    EventObserver observer_;
    std::ostream* trace_ = nullptr;
    bool finished_ = false;
};

// Convenience wrapper: run a full simulation and return the finalized ledger.
RevenueLedger run(const SimConfig& config, AdmissionPolicy& policy, std::uint64_t seed,
                  RunStats* stats_out = nullptr);

} // namespace provsim
