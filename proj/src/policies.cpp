#include "provsim/policies.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace provsim {

using queueing::g;
using queueing::kUnboundedThreshold;

AllocationDecision allocate_proportional(const std::vector<double>& weights, int total_servers) {
    const int m = static_cast<int>(weights.size());
    if (m == 0 || total_servers < 1)
        throw std::invalid_argument("allocate_proportional: need classes and servers");

    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> shares(m);
    if (total > 0) {
        for (int i = 0; i < m; ++i) shares[i] = total_servers * weights[i] / total;
    } else {
        for (int i = 0; i < m; ++i) shares[i] = static_cast<double>(total_servers) / m;
    }

    AllocationDecision d;
    d.raw_shares = shares;
    d.target.resize(m);
    int sum = 0;
    for (int i = 0; i < m; ++i) {
        d.target[i] = static_cast<int>(std::floor(shares[i] + 0.5)); // round half-up
        sum += d.target[i];
    }

    // Repair to sum N: remainders in (-0.5, 0.5], deficit to the largest,
    // surplus from the smallest; ties to the lowest class index.
    while (sum != total_servers) {
        int pick = -1;
        for (int i = 0; i < m; ++i) {
            if (sum > total_servers && d.target[i] == 0) continue;
            double rem_i = shares[i] - d.target[i];
            if (pick < 0) {
                pick = i;
                continue;
            }
            double rem_p = shares[pick] - d.target[pick];
            if (sum < total_servers ? rem_i > rem_p : rem_i < rem_p) pick = i;
        }
        if (sum < total_servers) {
            d.target[pick]++;
            sum++;
        } else {
            d.target[pick]--;
            sum--;
        }
    }
    return d;
}

AllocationDecision allocate_offered_loads(const std::vector<TrafficEstimate>& estimates,
                                          const std::vector<ServiceClass>& classes,
                                          int total_servers) {
    std::vector<double> weights(classes.size());
    for (std::size_t i = 0; i < classes.size(); ++i) {
        double rho = estimates[i].arrival_rate * estimates[i].mean_service;
        weights[i] = rho * classes[i].weight;
    }
    return allocate_proportional(weights, total_servers);
}

std::optional<AllocationDecision> AdmissionPolicy::on_session_completion(
    const SystemSnapshot& snap) {
    return allocate_offered_loads(snap.estimates, snap.classes, snap.total_servers);
}

AdmissionDecision AdmitAllPolicy::on_session_arrival(int /*class_id*/,
                                                     const SystemSnapshot& snap) {
    AdmissionDecision d;
    d.accept = true;
    d.allocation = allocate_offered_loads(snap.estimates, snap.classes, snap.total_servers);
    return d;
}

void ThresholdPolicy::recompute(const SystemSnapshot& snap) {
    thresholds_.assign(snap.classes.size(), kUnboundedThreshold);
    for (std::size_t i = 0; i < snap.classes.size(); ++i) {
        queueing::ClassTraffic t{snap.estimates[i].mean_service,
                                 snap.estimates[i].interarrival_scv,
                                 snap.estimates[i].service_scv};
        thresholds_[i] = queueing::find_threshold(snap.classes[i], snap.allocation[i], t, search_);
    }
}

void ThresholdPolicy::on_state_refreshed(const SystemSnapshot& snap) { recompute(snap); }

AdmissionDecision ThresholdPolicy::on_session_arrival(int class_id, const SystemSnapshot& snap) {
    if (thresholds_.empty()) recompute(snap);
    AdmissionDecision d;
    int m = thresholds_[class_id];
    auto active = static_cast<int>(snap.active_sessions[class_id].size());
    d.accept = (m == kUnboundedThreshold) || (active < m);
    if (d.accept)
        d.allocation = allocate_offered_loads(snap.estimates, snap.classes, snap.total_servers);
    return d;
}

AdmissionDecision CurrentStatePolicy::on_session_arrival(int class_id,
                                                         const SystemSnapshot& snap) {
    const auto& classes = snap.classes;
    const int m = static_cast<int>(classes.size());
    const ServiceClass& cls = classes[class_id];

    std::vector<double> lambda(m), lambda_next(m);
    for (int j = 0; j < m; ++j) lambda[j] = snap.estimates[j].arrival_rate;
    lambda_next = lambda;
    lambda_next[class_id] += cls.job_rate;

    std::vector<double> weights(m);
    for (int j = 0; j < m; ++j)
        weights[j] = lambda_next[j] * snap.estimates[j].mean_service * classes[j].weight;
    AllocationDecision alloc = allocate_proportional(weights, snap.total_servers);

    auto gj = [&](double x, double rate, int k, int n, int j) {
        return g(x, rate, k, n, snap.estimates[j].mean_service,
                 snap.estimates[j].interarrival_scv, snap.estimates[j].service_scv);
    };

    double delta_r = cls.charge -
                     cls.penalty * gj(cls.obligation, lambda_next[class_id],
                                      cls.jobs_per_session, alloc.target[class_id], class_id);

    for (int j = 0; j < m; ++j) {
        const ServiceClass& cj = classes[j];
        for (const SessionState* t : snap.active_sessions[j]) {
            int remaining = cj.jobs_per_session - t->jobs_completed;
            if (remaining <= 0) continue; // complete, awaiting bookkeeping
            double residual = (cj.obligation * cj.jobs_per_session -
                               t->mean_wait() * t->jobs_completed) /
                              remaining;
            double dg = gj(residual, lambda_next[j], remaining, alloc.target[j], j) -
                        gj(residual, lambda[j], remaining, snap.allocation[j], j);
            delta_r -= cj.penalty * dg;
        }
    }

    AdmissionDecision d;
    d.delta_r = delta_r;
    d.accept = delta_r > 0;
    if (d.accept) d.allocation = std::move(alloc); // reject leaves allocation unchanged
    return d;
}

double LongRunPolicy::long_run_revenue(const std::vector<double>& active_counts,
                                       const SystemSnapshot& snap,
                                       AllocationDecision* alloc_out) {
    const auto& classes = snap.classes;
    const int m = static_cast<int>(classes.size());
    std::vector<double> lambda(m), weights(m);
    for (int j = 0; j < m; ++j) {
        lambda[j] = active_counts[j] * classes[j].job_rate;
        weights[j] = lambda[j] * snap.estimates[j].mean_service * classes[j].weight;
    }
    AllocationDecision alloc = allocate_proportional(weights, snap.total_servers);

    double revenue = 0.0;
    for (int j = 0; j < m; ++j) {
        const ServiceClass& cj = classes[j];
        double session_rate = active_counts[j] * cj.job_rate / cj.jobs_per_session;
        double ghat = g(cj.obligation, lambda[j], cj.jobs_per_session, alloc.target[j],
                        snap.estimates[j].mean_service, snap.estimates[j].interarrival_scv,
                        snap.estimates[j].service_scv);
        revenue += session_rate * (cj.charge - cj.penalty * ghat);
    }
    if (alloc_out) *alloc_out = std::move(alloc);
    return revenue;
}

AdmissionDecision LongRunPolicy::on_session_arrival(int class_id, const SystemSnapshot& snap) {
    const int m = static_cast<int>(snap.classes.size());
    std::vector<double> counts(m);
    for (int j = 0; j < m; ++j) counts[j] = static_cast<double>(snap.active_sessions[j].size());

    double current = long_run_revenue(counts, snap, nullptr);
    counts[class_id] += 1.0;
    AllocationDecision alloc;
    double with_new = long_run_revenue(counts, snap, &alloc);

    AdmissionDecision d;
    d.delta_r = with_new - current;
    d.accept = with_new > current;
    if (d.accept) d.allocation = std::move(alloc);
    return d;
}

std::optional<AllocationDecision> LongRunPolicy::on_session_completion(
    const SystemSnapshot& snap) {
    const int m = static_cast<int>(snap.classes.size());
    std::vector<double> counts(m), weights(m);
    for (int j = 0; j < m; ++j) {
        counts[j] = static_cast<double>(snap.active_sessions[j].size());
        weights[j] = counts[j] * snap.classes[j].job_rate * snap.estimates[j].mean_service *
                     snap.classes[j].weight;
    }
    return allocate_proportional(weights, snap.total_servers);
}

std::unique_ptr<AdmissionPolicy> make_policy(const std::string& name,
                                             queueing::ThresholdSearch search) {
    if (name == "admit_all") return std::make_unique<AdmitAllPolicy>();
    if (name == "threshold") return std::make_unique<ThresholdPolicy>(search);
    if (name == "current_state") return std::make_unique<CurrentStatePolicy>();
    if (name == "long_run") return std::make_unique<LongRunPolicy>();
    throw std::invalid_argument("unknown policy: " + name);
}

} // namespace provsim
