#include <cmath>
#include <optional>
#include <vector>

#include "doctest.h"
#include "provsim/workload.hpp"

using namespace provsim;

namespace {

ServiceClass make_class(int id, double session_rate, double job_rate,
                        Distribution service = Distribution{Exponential{1.0}}) {
    ServiceClass cls;
    cls.id = id;
    cls.charge = 1;
    cls.session_rate = session_rate;
    cls.job_rate = job_rate;
    cls.jobs_per_session = 10;
    cls.service_time = service;
    return cls;
}

struct Moments {
    double mean;
    double scv;
};

Moments sample_moments(const Distribution& d, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double sum = 0, sumsq = 0;
    for (std::size_t i = 0; i < count; ++i) {
        double x = d.sample(rng);
        sum += x;
        sumsq += x * x;
    }
    double mean = sum / count;
    double var = sumsq / count - mean * mean;
    return {mean, var / (mean * mean)};
}

} // namespace

TEST_CASE("exponential distribution moments") {
    Distribution d{Exponential{1.0}};
    CHECK(d.mean() == doctest::Approx(1.0));
    CHECK(d.scv() == doctest::Approx(1.0));

    auto m = sample_moments(d, 1000000, 42);
    CHECK(m.mean == doctest::Approx(1.0).epsilon(0.01));
    CHECK(m.scv == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("two-phase hyperexponential moments") {
    // Mix 0.8/0.2 of means 0.2/4.2: mean 1, scv 6.12.
    Distribution d{HyperExp2{0.8, 0.2, 0.2, 4.2}};
    CHECK(d.mean() == doctest::Approx(1.0));
    CHECK(d.scv() == doctest::Approx(6.12));

    auto m = sample_moments(d, 1000000, 43);
    CHECK(m.mean == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::fabs(m.scv - 6.15) < 0.2);
}

TEST_CASE("deterministic distribution") {
    Distribution d{Deterministic{1.0}};
    CHECK(d.mean() == doctest::Approx(1.0));
    CHECK(d.scv() == doctest::Approx(0.0));
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) CHECK(d.sample(rng) == doctest::Approx(1.0));
}

TEST_CASE("within-session job interarrivals") {
    std::mt19937_64 rng(7);

    SUBCASE("rate 2 has mean spacing one half") {
        auto cls = make_class(0, 0.1, 2.0);
        double sum = 0;
        const int count = 1000000;
        for (int i = 0; i < count; ++i) {
            double x = job_interarrival(cls, rng);
            CHECK(x > 0);
            sum += x;
        }
        CHECK(sum / count == doctest::Approx(0.5).epsilon(0.01));
    }
    SUBCASE("deterministic spacing") {
        auto cls = make_class(0, 0.1, 2.0);
        for (int i = 0; i < 10; ++i)
            CHECK(job_interarrival(cls, rng, true) == doctest::Approx(0.5));
    }
    SUBCASE("unit rate has unit mean") {
        auto cls = make_class(0, 0.1, 1.0);
        double sum = 0;
        const int count = 200000;
        for (int i = 0; i < count; ++i) sum += job_interarrival(cls, rng);
        CHECK(sum / count == doctest::Approx(1.0).epsilon(0.02));
    }
}

TEST_CASE("service time sampling is positive and follows the class distribution") {
    auto cls = make_class(0, 0.1, 1.0, Distribution{HyperExp2{0.8, 0.2, 0.2, 4.2}});
    std::mt19937_64 rng(11);
    double sum = 0;
    const int count = 500000;
    for (int i = 0; i < count; ++i) {
        double x = job_service_time(cls, rng);
        CHECK(x > 0);
        sum += x;
    }
    CHECK(sum / count == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("session arrival stream") {
    std::vector<ServiceClass> classes = {make_class(0, 0.1, 2.0), make_class(1, 0.0, 2.0)};
    std::vector<std::optional<OnOffParams>> bursts(classes.size());

    SUBCASE("zero-rate classes never arrive; counts match the rate") {
        SessionArrivalStream stream(classes, bursts, 99);
        int count0 = 0;
        double last = 0.0;
        while (auto a = stream.next()) {
            if (a->time > 7200.0) break;
            CHECK(a->time > last);
            last = a->time;
            CHECK(a->class_id == 0); // class 1 has rate 0
            ++count0;
        }
        // Poisson(720): three standard deviations is about 80.
        CHECK(count0 > 640);
        CHECK(count0 < 800);
    }
    SUBCASE("fixed seed reproduces the sequence") {
        SessionArrivalStream s1(classes, bursts, 123), s2(classes, bursts, 123);
        for (int i = 0; i < 200; ++i) {
            auto a = s1.next(), b = s2.next();
            REQUIRE(a.has_value());
            REQUIRE(b.has_value());
            CHECK(a->time == b->time);
            CHECK(a->class_id == b->class_id);
        }
    }
    SUBCASE("different seeds differ") {
        SessionArrivalStream s1(classes, bursts, 123), s2(classes, bursts, 124);
        auto a = s1.next(), b = s2.next();
        REQUIRE(a.has_value());
        REQUIRE(b.has_value());
        CHECK(a->time != b->time);
    }
}

TEST_CASE("on-off arrivals thin the stream") {
    std::vector<ServiceClass> classes = {make_class(0, 1.0, 2.0)};

    auto count_until = [&](const std::vector<std::optional<OnOffParams>>& bursts) {
        SessionArrivalStream stream(classes, bursts, 5);
        int count = 0;
        while (auto a = stream.next()) {
            if (a->time > 2000.0) break;
            ++count;
        }
        return count;
    };

    // Equal on/off periods at double rate keep the average rate, long off
    // periods with the same on-rate thin it.
    std::vector<std::optional<OnOffParams>> half_on = {OnOffParams{2.0, 5.0, 5.0}};
    std::vector<std::optional<OnOffParams>> mostly_off = {OnOffParams{2.0, 1.0, 9.0}};
    int base = count_until({std::nullopt});
    int burst_balanced = count_until(half_on);
    int burst_thin = count_until(mostly_off);
    CHECK(base > 1800);
    CHECK(burst_balanced > 1500);
    CHECK(burst_thin < base / 2);
}
