#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "provsim/domain.hpp"
#include "provsim/queueing.hpp"

namespace provsim {

struct AllocationDecision {
    std::vector<int> target;       // n', sums to N
    std::vector<double> raw_shares; // shares before rounding
};

struct AdmissionDecision {
    bool accept = false;
    SessionId session_id = kRejectedCookie; // filled by the engine on accept
    std::optional<AllocationDecision> allocation;
    std::optional<double> delta_r;
};

// Read-only view of the system handed to policies; valid only during the call.
struct SystemSnapshot {
    const std::vector<ServiceClass>& classes;
    const std::vector<TrafficEstimate>& estimates;
    const std::vector<int>& allocation; // current n
    int total_servers;
    // Active (accepted, incomplete) sessions grouped by class.
    const std::vector<std::vector<const SessionState*>>& active_sessions;
};

// Proportional integer split of N servers over nonnegative weights, rounded
// half-up and repaired to sum N: a deficit goes to the largest fractional
// remainders, a surplus is taken from the smallest (ties to the lowest
// index). All-zero weights fall back to a uniform split.
AllocationDecision allocate_proportional(const std::vector<double>& weights, int total_servers);

// Offered-loads allocation: weights rho_i * alpha_i with rho_i from the
// estimates' arrival rate and mean service time.
AllocationDecision allocate_offered_loads(const std::vector<TrafficEstimate>& estimates,
                                          const std::vector<ServiceClass>& classes,
                                          int total_servers);

class AdmissionPolicy {
public:
    virtual ~AdmissionPolicy() = default;
    virtual std::string name() const = 0;

    virtual AdmissionDecision on_session_arrival(int class_id, const SystemSnapshot& snap) = 0;

    // Invoked at session completion instants; default: offered-loads on the
    // current estimates.
    virtual std::optional<AllocationDecision> on_session_completion(const SystemSnapshot& snap);

    // Invoked after estimate refreshes and after allocation changes.
    virtual void on_state_refreshed(const SystemSnapshot& snap) { (void)snap; }
};

class AdmitAllPolicy final : public AdmissionPolicy {
public:
    std::string name() const override { return "admit_all"; }
    AdmissionDecision on_session_arrival(int class_id, const SystemSnapshot& snap) override;
};

class ThresholdPolicy final : public AdmissionPolicy {
public:
    explicit ThresholdPolicy(queueing::ThresholdSearch search = {}) : search_(search) {}

    std::string name() const override { return "threshold"; }
    AdmissionDecision on_session_arrival(int class_id, const SystemSnapshot& snap) override;
    void on_state_refreshed(const SystemSnapshot& snap) override;

    const std::vector<int>& thresholds() const { return thresholds_; }

private:
    void recompute(const SystemSnapshot& snap);

    queueing::ThresholdSearch search_;
    std::vector<int> thresholds_; // kUnboundedThreshold means no limit
};

// Algorithm-1 state-based admission: perturb the arrival-rate vector with the
// candidate session, simulate a fresh allocation, and accept only if the
// expected revenue change (charge minus new and shifted penalty risks over
// every active session) is positive.
class CurrentStatePolicy final : public AdmissionPolicy {
public:
    std::string name() const override { return "current_state"; }
    AdmissionDecision on_session_arrival(int class_id, const SystemSnapshot& snap) override;
};

// Long-run fluid admission: compare the stationary revenue rate of the
// current active-session vector L with L + e_i, each under its own
// offered-loads allocation.
class LongRunPolicy final : public AdmissionPolicy {
public:
    std::string name() const override { return "long_run"; }
    AdmissionDecision on_session_arrival(int class_id, const SystemSnapshot& snap) override;
    std::optional<AllocationDecision> on_session_completion(const SystemSnapshot& snap) override;

    // Stationary revenue rate for active-session counts L, with its best
    // allocation as a side result.
    static double long_run_revenue(const std::vector<double>& active_counts,
                                   const SystemSnapshot& snap, AllocationDecision* alloc_out);
};

std::unique_ptr<AdmissionPolicy> make_policy(const std::string& name,
                                             queueing::ThresholdSearch search = {});

} // namespace provsim
