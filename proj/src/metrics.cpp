#include "provsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace provsim {

double student_t_975(int dof) {
    // Two-sided 95% quantiles, dof 1..30.
    static const double table[] = {
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
    if (dof < 1) throw std::invalid_argument("t quantile needs dof >= 1");
    if (dof <= 30) return table[dof - 1];
    return 1.96;
}

ConfidenceInterval confidence_interval(const std::vector<double>& samples) {
    ConfidenceInterval ci;
    const int n = static_cast<int>(samples.size());
    if (n < 2) {
        if (n == 1) ci.mean = samples[0];
        return ci;
    }
    double sum = 0.0;
    for (double x : samples) sum += x;
    double mean = sum / n;
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / (n - 1));
    ci.mean = mean;
    ci.half_width = student_t_975(n - 1) * sd / std::sqrt(static_cast<double>(n));
    ci.defined = true;
    return ci;
}

double revenue_rate(const RevenueLedger& ledger, double span) {
    if (span <= 0) throw std::invalid_argument("revenue_rate: span must be > 0");
    return ledger.revenue() / span;
}

std::optional<double> sla_met_fraction(const RevenueLedger& ledger, int class_id) {
    const auto& c = ledger.counters(class_id);
    if (c.completed == 0) return std::nullopt;
    return static_cast<double>(c.completed - c.violated) / static_cast<double>(c.completed);
}

void WaitPdf::add(double mean_wait) {
    int bin = static_cast<int>(std::floor(mean_wait / bin_width_));
    if (bin < 0) bin = 0;
    if (bin >= static_cast<int>(counts_.size())) counts_.resize(bin + 1, 0);
    counts_[bin]++;
    total_++;
    raw_.push_back(mean_wait);
}

void WaitPdf::add_all(const std::vector<double>& waits) {
    for (double w : waits) add(w);
}

double WaitPdf::fraction_below(double bound) const {
    if (total_ == 0) return 0.0;
    std::int64_t below = std::count_if(raw_.begin(), raw_.end(), [&](double w) { return w < bound; });
    return static_cast<double>(below) / static_cast<double>(total_);
}

} // namespace provsim
