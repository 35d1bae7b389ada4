#include "provsim/engine.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace provsim {

void SimConfig::validate() const {
    if (total_servers < 1) throw std::invalid_argument("total_servers must be >= 1");
    if (classes.empty()) throw std::invalid_argument("at least one service class is required");
    if (horizon <= 0) throw std::invalid_argument("horizon must be > 0");
    if (bucket_width <= 0 || bucket_width > horizon)
        throw std::invalid_argument("bucket_width must be in (0, horizon]");
    if (estimation_window <= 0) throw std::invalid_argument("estimation_window must be > 0");
    if (smoothing <= 0 || smoothing > 1) throw std::invalid_argument("smoothing must be in (0,1]");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (classes[i].id != static_cast<int>(i))
            throw std::invalid_argument("class ids must be consecutive from 0");
        classes[i].validate();
    }
    if (initial_allocation) {
        if (initial_allocation->size() != classes.size())
            throw std::invalid_argument("initial_allocation size mismatch");
        int sum = 0;
        for (int n : *initial_allocation) {
            if (n < 0) throw std::invalid_argument("initial_allocation entries must be >= 0");
            sum += n;
        }
        if (sum != total_servers)
            throw std::invalid_argument("initial_allocation must sum to total_servers");
    }
}

namespace {

std::vector<TrafficEstimate> initial_estimates(const std::vector<ServiceClass>& classes) {
    std::vector<TrafficEstimate> out(classes.size());
    for (std::size_t i = 0; i < classes.size(); ++i) {
        // Prior: the contract's nominal long-run job rate (sessions at
        // delta_i, each emitting k_i jobs), refined by observation.
        out[i].arrival_rate = classes[i].session_rate * classes[i].jobs_per_session;
        out[i].mean_service = classes[i].service_time.mean();
        out[i].interarrival_scv = 1.0;
        out[i].service_scv = classes[i].service_time.scv();
        out[i].valid = false;
    }
    return out;
}

const char* kind_name(EventKind k) {
    switch (k) {
        case EventKind::SessionArrival: return "session_arrival";
        case EventKind::JobArrival: return "job_arrival";
        case EventKind::ServiceCompletion: return "service_completion";
        case EventKind::WindowBoundary: return "window_boundary";
    }
    return "?";
}

} // namespace

Simulation::Simulation(SimConfig config, AdmissionPolicy& policy, std::uint64_t seed)
    : config_(std::move(config)),
      policy_(policy),
      ledger_(static_cast<int>(config_.classes.size()), config_.bucket_width),
      estimator_(initial_estimates(config_.classes), config_.smoothing),
      arrivals_(config_.classes, config_.burst_arrivals, seed),
      active_by_class_(config_.classes.size()),
      snapshot_sessions_(config_.classes.size()) {
    config_.validate();

    const int m = static_cast<int>(config_.classes.size());
    cluster_.total_servers = config_.total_servers;
    cluster_.queues.resize(m);
    std::vector<int> init;
    if (config_.initial_allocation) {
        init = *config_.initial_allocation;
    } else {
        init = allocate_proportional(std::vector<double>(m, 1.0), config_.total_servers).target;
    }
    cluster_.allocation = init;
    for (int i = 0; i < m; ++i)
        for (int s = 0; s < init[i]; ++s) cluster_.servers.push_back(Server{i});

    if (config_.pin_service_means) {
        for (int i = 0; i < m; ++i)
            estimator_.pin_service_moments(i, config_.classes[i].service_time.mean(),
                                           config_.classes[i].service_time.scv());
    }

    job_rng_.reserve(m);
    service_rng_.reserve(m);
    for (int i = 0; i < m; ++i) {
        job_rng_.push_back(make_stream(seed, i, StreamPurpose::JobArrival));
        service_rng_.push_back(make_stream(seed, i, StreamPurpose::ServiceTime));
    }

    if (auto first = arrivals_.next())
        schedule(first->time, EventKind::SessionArrival, first->class_id);
    schedule(config_.estimation_window, EventKind::WindowBoundary);

    policy_.on_state_refreshed(snapshot());
}

void Simulation::schedule(double time, EventKind kind, int class_id, SessionId session,
                          int server) {
    Event ev;
    ev.time = time;
    ev.seq = next_event_seq_++;
    ev.kind = kind;
    ev.class_id = class_id;
    ev.session = session;
    ev.server = server;
    events_.push(ev);
}

bool Simulation::step() {
    while (!finished_) {
        if (events_.empty()) {
            finished_ = true;
            break;
        }
        Event ev = events_.top();
        if (ev.time > config_.horizon) {
            if (!config_.drain_at_horizon) {
                finished_ = true;
                break;
            }
            // Drain mode: serve accepted work to completion, but stop the
            // arrival and timer streams at the horizon.
            if (ev.kind == EventKind::SessionArrival || ev.kind == EventKind::WindowBoundary) {
                events_.pop();
                continue;
            }
        }
        events_.pop();
        now_ = std::max(now_, ev.time);
        handle(ev);
        stats_.events_processed++;
        if (trace_) trace_line(ev);
        if (observer_) observer_(*this, ev);
        return true;
    }
    return false;
}

void Simulation::run() {
    while (step()) {
    }
    ledger_.finalize();
}

void Simulation::handle(const Event& ev) {
    switch (ev.kind) {
        case EventKind::SessionArrival: handle_session_arrival(ev); break;
        case EventKind::JobArrival: handle_job_arrival(ev); break;
        case EventKind::ServiceCompletion: handle_service_completion(ev); break;
        case EventKind::WindowBoundary: handle_window_boundary(ev); break;
    }
}

SystemSnapshot Simulation::snapshot() {
    for (std::size_t i = 0; i < active_by_class_.size(); ++i) {
        snapshot_sessions_[i].clear();
        for (SessionId sid : active_by_class_[i]) snapshot_sessions_[i].push_back(&active_.at(sid));
    }
    return SystemSnapshot{config_.classes, estimator_.current(), cluster_.allocation,
                          cluster_.total_servers, snapshot_sessions_};
}

void Simulation::handle_session_arrival(const Event& ev) {
    const int cls = ev.class_id;
    estimator_.publish(now_);
    AdmissionDecision decision = policy_.on_session_arrival(cls, snapshot());

    if (decision.accept) {
        SessionId sid = next_session_id_++;
        SessionState s;
        s.session_id = sid;
        s.class_id = cls;
        s.arrival_time = now_;
        active_.emplace(sid, s);
        active_by_class_[cls].push_back(sid);
        ledger_.on_session_accepted(sid, cls, config_.classes[cls].charge, now_);
        double first_job = now_ + job_interarrival(config_.classes[cls], job_rng_[cls],
                                                   config_.deterministic_job_spacing);
        schedule(first_job, EventKind::JobArrival, cls, sid);
        if (decision.allocation) {
            apply_allocation(decision.allocation->target);
            policy_.on_state_refreshed(snapshot());
        }
    } else {
        ledger_.on_session_rejected(cls);
    }

    if (auto next = arrivals_.next())
        schedule(next->time, EventKind::SessionArrival, next->class_id);
    process_pending_completions();
}

void Simulation::handle_job_arrival(const Event& ev) {
    SessionState& s = active_.at(ev.session);
    const int cls = s.class_id;
    estimator_.record_job_arrival(cls, now_);
    s.jobs_arrived++;
    if (s.jobs_arrived < config_.classes[cls].jobs_per_session) {
        double next = now_ + job_interarrival(config_.classes[cls], job_rng_[cls],
                                              config_.deterministic_job_spacing);
        schedule(next, EventKind::JobArrival, cls, ev.session);
    }
    cluster_.queues[cls].push_back(Job{ev.session, cls, now_, next_job_seq_++});
    dispatch(cls);
    if (config_.drain_at_horizon && now_ > config_.horizon) drain_dispatch();
    process_pending_completions();
}

void Simulation::dispatch(int class_id) {
    auto& queue = cluster_.queues[class_id];
    while (!queue.empty()) {
        int idle = -1;
        for (std::size_t i = 0; i < cluster_.servers.size(); ++i) {
            const Server& sv = cluster_.servers[i];
            if (!sv.busy() && sv.assigned_class == class_id) {
                idle = static_cast<int>(i);
                break;
            }
        }
        if (idle < 0) break;
        Job job = queue.front();
        queue.pop_front();
        start_service(idle, job);
    }
}

// After the horizon no reallocation happens anymore, so a class left with
// zero servers could never finish its accepted sessions. While draining,
// idle servers therefore serve any class's queued work, oldest job first.
void Simulation::drain_dispatch() {
    for (;;) {
        int idle = -1;
        for (std::size_t i = 0; i < cluster_.servers.size(); ++i) {
            if (!cluster_.servers[i].busy()) {
                idle = static_cast<int>(i);
                break;
            }
        }
        if (idle < 0) return;
        int best = -1;
        for (std::size_t c = 0; c < cluster_.queues.size(); ++c) {
            if (cluster_.queues[c].empty()) continue;
            if (best < 0 || cluster_.queues[c].front().seq < cluster_.queues[best].front().seq)
                best = static_cast<int>(c);
        }
        if (best < 0) return;
        Job job = cluster_.queues[best].front();
        cluster_.queues[best].pop_front();
        start_service(idle, job);
    }
}

void Simulation::start_service(int server_idx, const Job& job) {
    SessionState& s = active_.at(job.session);
    const ServiceClass& cls = config_.classes[job.class_id];
    double wait = now_ - job.arrival_time;
    s.wait_sum += wait;
    s.jobs_completed++;
    stats_.total_wait += wait;

    double duration = job_service_time(cls, service_rng_[job.class_id]);
    Server& sv = cluster_.servers[server_idx];
    sv.serving_class = job.class_id;
    sv.job_session = job.session;
    sv.service_start = now_;
    sv.service_end = now_ + duration;
    stats_.total_response += wait + duration;
    schedule(sv.service_end, EventKind::ServiceCompletion, job.class_id, job.session, server_idx);

    // Waiting time of the whole session is now determined: completion instant.
    if (s.jobs_completed == cls.jobs_per_session) pending_completions_.push_back(job.session);
}

void Simulation::process_pending_completions() {
    while (!pending_completions_.empty()) {
        SessionId sid = pending_completions_.front();
        pending_completions_.erase(pending_completions_.begin());
        SessionState s = active_.at(sid);
        const ServiceClass& cls = config_.classes[s.class_id];
        bool violated = session_sla_violated(s, cls);
        ledger_.on_session_completed(sid, s.class_id, s.mean_wait(), violated, cls.penalty, now_);
        active_.erase(sid);
        std::erase(active_by_class_[s.class_id], sid);

        estimator_.publish(now_);
        if (auto alloc = policy_.on_session_completion(snapshot())) {
            apply_allocation(alloc->target);
            policy_.on_state_refreshed(snapshot());
        }
    }
}

void Simulation::handle_service_completion(const Event& ev) {
    Server& sv = cluster_.servers[ev.server];
    estimator_.record_service(sv.serving_class, sv.service_end - sv.service_start);
    served_per_session_[sv.job_session]++;
    stats_.jobs_served++;
    sv.serving_class = -1;
    sv.job_session = kRejectedCookie;
    dispatch(sv.assigned_class);
    if (config_.drain_at_horizon && now_ > config_.horizon) drain_dispatch();
    process_pending_completions();
}

void Simulation::handle_window_boundary(const Event&) {
    estimator_.publish(now_);
    policy_.on_state_refreshed(snapshot());
    schedule(now_ + config_.estimation_window, EventKind::WindowBoundary);
}

void Simulation::apply_allocation(const std::vector<int>& target) {
    const int m = static_cast<int>(config_.classes.size());
    if (static_cast<int>(target.size()) != m)
        throw std::invalid_argument("allocation target size mismatch");
    int sum = 0;
    for (int n : target) {
        if (n < 0) throw std::invalid_argument("allocation target must be >= 0");
        sum += n;
    }
    if (sum != cluster_.total_servers)
        throw std::invalid_argument("allocation target must sum to total_servers");

    std::vector<int> delta(m);
    for (int i = 0; i < m; ++i) delta[i] = target[i] - cluster_.allocation[i];

    // Donors: surplus classes give up idle servers first, then busy ones
    // (those drain: they finish their current job before switching).
    std::vector<int> donors;
    for (int pass = 0; pass < 2; ++pass) {
        bool want_idle = (pass == 0);
        for (std::size_t i = 0; i < cluster_.servers.size(); ++i) {
            const Server& sv = cluster_.servers[i];
            if (delta[sv.assigned_class] >= 0) continue;
            if (sv.busy() == want_idle) continue;
            donors.push_back(static_cast<int>(i));
            delta[sv.assigned_class]++;
        }
    }

    std::size_t d = 0;
    for (int i = 0; i < m && d < donors.size(); ++i) {
        while (delta[i] > 0 && d < donors.size()) {
            cluster_.servers[donors[d]].assigned_class = i;
            delta[i]--;
            d++;
        }
    }
    cluster_.allocation = target;

    for (int i = 0; i < m; ++i) dispatch(i);
}

void Simulation::trace_line(const Event& ev) const {
    *trace_ << "t=" << ev.time << " kind=" << kind_name(ev.kind) << " class=" << ev.class_id
            << " session=" << ev.session << " server=" << ev.server << '\n';
}

RevenueLedger run(const SimConfig& config, AdmissionPolicy& policy, std::uint64_t seed,
                  RunStats* stats_out) {
    Simulation sim(config, policy, seed);
    sim.run();
    if (stats_out) *stats_out = sim.stats();
    return sim.ledger();
}

} // namespace provsim
