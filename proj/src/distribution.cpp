#include "provsim/distribution.hpp"

#include <cmath>

namespace provsim {

namespace {

struct MeanVisitor {
    double operator()(const Exponential& e) const { return e.mean; }
    double operator()(const HyperExp2& h) const { return h.p1 * h.mean1 + h.p2 * h.mean2; }
    double operator()(const Deterministic& d) const { return d.value; }
};

struct SecondMomentVisitor {
    double operator()(const Exponential& e) const { return 2.0 * e.mean * e.mean; }
    double operator()(const HyperExp2& h) const {
        return 2.0 * (h.p1 * h.mean1 * h.mean1 + h.p2 * h.mean2 * h.mean2);
    }
    double operator()(const Deterministic& d) const { return d.value * d.value; }
};

} // namespace

double Distribution::mean() const { return std::visit(MeanVisitor{}, desc_); }

double Distribution::scv() const {
    double m = mean();
    double m2 = std::visit(SecondMomentVisitor{}, desc_);
    return m2 / (m * m) - 1.0;
}

double Distribution::sample(std::mt19937_64& rng) const {
    if (const auto* e = std::get_if<Exponential>(&desc_)) {
        return std::exponential_distribution<double>(1.0 / e->mean)(rng);
    }
    if (const auto* h = std::get_if<HyperExp2>(&desc_)) {
        double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        double m = (u < h->p1) ? h->mean1 : h->mean2;
        return std::exponential_distribution<double>(1.0 / m)(rng);
    }
    return std::get<Deterministic>(desc_).value;
}

std::string Distribution::describe() const {
    if (const auto* e = std::get_if<Exponential>(&desc_)) {
        return "exponential(" + std::to_string(e->mean) + ")";
    }
    if (const auto* h = std::get_if<HyperExp2>(&desc_)) {
        return "hyperexponential2(" + std::to_string(h->p1) + "," + std::to_string(h->mean1) +
               "," + std::to_string(h->p2) + "," + std::to_string(h->mean2) + ")";
    }
    return "deterministic(" + std::to_string(std::get<Deterministic>(desc_).value) + ")";
}

void Distribution::validate() const {
    if (const auto* e = std::get_if<Exponential>(&desc_)) {
        if (e->mean <= 0) throw std::invalid_argument("exponential mean must be > 0");
    } else if (const auto* h = std::get_if<HyperExp2>(&desc_)) {
        if (h->mean1 <= 0 || h->mean2 <= 0)
            throw std::invalid_argument("hyperexponential means must be > 0");
        if (h->p1 < 0 || h->p2 < 0 || std::abs(h->p1 + h->p2 - 1.0) > 1e-9)
            throw std::invalid_argument("hyperexponential branch probabilities must sum to 1");
    } else if (const auto* d = std::get_if<Deterministic>(&desc_)) {
        if (d->value <= 0) throw std::invalid_argument("deterministic value must be > 0");
    }
}

} // namespace provsim
