#include "provsim/domain.hpp"

#include <cmath>

namespace provsim {

int RevenueLedger::bucket_index(double t) {
    if (bucket_width_ <= 0) return 0;
    int idx = static_cast<int>(std::floor(t / bucket_width_));
    if (idx < 0) idx = 0;
    if (idx >= static_cast<int>(buckets_.size())) buckets_.resize(idx + 1, 0.0);
    return idx;
}

void RevenueLedger::on_session_accepted(SessionId sid, int class_id, double charge, double now) {
    int b = bucket_index(now);
    charges_ += charge;
    buckets_[b] += charge;
    counters_.at(class_id).accepted++;
    open_.emplace(sid, OpenCharge{b, charge});
}

void RevenueLedger::on_session_rejected(int class_id) { counters_.at(class_id).rejected++; }

void RevenueLedger::on_session_completed(SessionId sid, int class_id, double mean_wait,
                                         bool violated, double penalty, double now) {
    auto& ctr = counters_.at(class_id);
    ctr.completed++;
    if (violated) {
        ctr.violated++;
        penalties_ += penalty;
        buckets_[bucket_index(now)] -= penalty;
    }
    final_mean_waits_.at(class_id).push_back(mean_wait);
    open_.erase(sid);
}

void RevenueLedger::finalize() {
    if (finalized_) return;
    for (const auto& [sid, oc] : open_) {
        charges_ -= oc.amount;
        buckets_[oc.bucket] -= oc.amount;
        in_flight_charges_ += oc.amount;
        in_flight_sessions_++;
    }
    open_.clear();
    finalized_ = true;
}

} // namespace provsim
