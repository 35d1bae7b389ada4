#pragma once

#include <optional>
#include <vector>

#include "provsim/domain.hpp"

namespace provsim {

struct ConfidenceInterval {
    double mean = 0.0;
    double half_width = 0.0;
    bool defined = false; // false with fewer than 2 samples
};

// Two-sided 95% Student-t interval: mean +/- t_{n-1,0.975} s / sqrt(n).
// t-quantiles come from a built-in table up to 30 degrees of freedom,
// normal approximation beyond.
ConfidenceInterval confidence_interval(const std::vector<double>& samples);

double student_t_975(int dof);

// (charges - penalties) / span; call on a finalized ledger.
double revenue_rate(const RevenueLedger& ledger, double span);

// (completed - violated) / completed; nullopt with zero completions.
std::optional<double> sla_met_fraction(const RevenueLedger& ledger, int class_id);

// Histogram of completed-session mean waits.
class WaitPdf {
public:
    explicit WaitPdf(double bin_width = 0.05) : bin_width_(bin_width) {}

    void add(double mean_wait);
    void add_all(const std::vector<double>& waits);

    double bin_width() const { return bin_width_; }
    std::int64_t total() const { return total_; }
    const std::vector<std::int64_t>& counts() const { return counts_; }

    // Fraction of recorded sessions with mean wait < bound.
    double fraction_below(double bound) const;

private:
    double bin_width_;
    std::int64_t total_ = 0;
    std::vector<std::int64_t> counts_;
    std::vector<double> raw_;
};

} // namespace provsim
