#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <variant>

namespace provsim {

// Service / interarrival time distributions used by the workload generators.
// Each descriptor knows its analytic mean and squared coefficient of variation.

struct Exponential {
    double mean = 1.0;
};

struct HyperExp2 {
    double p1 = 0.5;
    double mean1 = 1.0;
    double p2 = 0.5;
    double mean2 = 1.0;
};

struct Deterministic {
    double value = 1.0;
};

class Distribution {
public:
    using Descriptor = std::variant<Exponential, HyperExp2, Deterministic>;

    Distribution() : desc_(Exponential{1.0}) {}
    Distribution(Descriptor d) : desc_(std::move(d)) { validate(); }

    double mean() const;
    double scv() const;
    double sample(std::mt19937_64& rng) const;

    const Descriptor& descriptor() const { return desc_; }
    std::string describe() const;

private:
    void validate() const;
    Descriptor desc_;
};

} // namespace provsim
