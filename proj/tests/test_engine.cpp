#include <map>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "provsim/engine.hpp"
#include "provsim/metrics.hpp"
#include "provsim/queueing.hpp"

using namespace provsim;

namespace {

ServiceClass make_class(int id, double charge, double penalty, double obligation, int k,
                        double gamma, double delta,
                        Distribution service = Distribution{Exponential{1.0}}) {
    ServiceClass cls;
    cls.id = id;
    cls.charge = charge;
    cls.penalty = penalty;
    cls.obligation = obligation;
    cls.jobs_per_session = k;
    cls.job_rate = gamma;
    cls.session_rate = delta;
    cls.service_time = service;
    return cls;
}

SimConfig base_config() {
    SimConfig cfg;
    cfg.total_servers = 20;
    cfg.horizon = 2000.0;
    cfg.classes = {make_class(0, 10, 10, 1.0, 50, 2.0, 0.05),
                   make_class(1, 10, 10, 1.0, 50, 1.0, 0.05)};
    return cfg;
}

struct LedgerDigest {
    double charges, penalties;
    std::vector<std::int64_t> accepted, rejected, completed, violated;
    std::vector<double> buckets;

    explicit LedgerDigest(const RevenueLedger& l)
        : charges(l.charges()), penalties(l.penalties()), buckets(l.bucket_revenue()) {
        for (const auto& c : l.counters()) {
            accepted.push_back(c.accepted);
            rejected.push_back(c.rejected);
            completed.push_back(c.completed);
            violated.push_back(c.violated);
        }
    }

    bool operator==(const LedgerDigest& o) const {
        return charges == o.charges && penalties == o.penalties && accepted == o.accepted &&
               rejected == o.rejected && completed == o.completed && violated == o.violated &&
               buckets == o.buckets;
    }
};

} // namespace

TEST_CASE("zero arrival rates produce an empty run") {
    SimConfig cfg = base_config();
    for (auto& c : cfg.classes) c.session_rate = 0.0;
    AdmitAllPolicy policy;
    RunStats stats;
    RevenueLedger ledger = run(cfg, policy, 1, &stats);
    CHECK(ledger.revenue() == 0.0);
    CHECK(stats.jobs_served == 0);
    for (const auto& c : ledger.counters()) {
        CHECK(c.accepted == 0);
        CHECK(c.rejected == 0);
    }
}

TEST_CASE("identical seeds reproduce the ledger exactly") {
    SimConfig cfg = base_config();
    for (const char* name : {"admit_all", "threshold", "current_state", "long_run"}) {
        CAPTURE(name);
        auto p1 = make_policy(name);
        auto p2 = make_policy(name);
        RevenueLedger a = run(cfg, *p1, 7777);
        RevenueLedger b = run(cfg, *p2, 7777);
        CHECK(LedgerDigest(a) == LedgerDigest(b));

        auto p3 = make_policy(name);
        RevenueLedger c = run(cfg, *p3, 7778);
        CHECK_FALSE(LedgerDigest(a) == LedgerDigest(c));
    }
}

TEST_CASE("single-class admit-all revenue approaches the analytic rate") {
    // Load 0.6 on 20 servers: lambda = delta * k = 12 jobs/s.
    SimConfig cfg;
    cfg.total_servers = 20;
    cfg.horizon = 30000.0;
    cfg.classes = {make_class(0, 10, 10, 2.0, 10, 1.0, 1.2)};
    AdmitAllPolicy policy;
    RevenueLedger ledger = run(cfg, policy, 31);

    const auto& cls = cfg.classes[0];
    double lambda = cls.session_rate * cls.jobs_per_session;
    double ghat = queueing::g(cls.obligation, lambda, cls.jobs_per_session, cfg.total_servers, 1.0);
    double analytic = cls.session_rate * (cls.charge - cls.penalty * ghat);
    CHECK(ghat < 0.2);
    CHECK(ledger.counters(0).rejected == 0);
    CHECK(revenue_rate(ledger, cfg.horizon) == doctest::Approx(analytic).epsilon(0.08));
}

TEST_CASE("event-level invariants hold under a reallocating policy") {
    SimConfig cfg = base_config();
    cfg.horizon = 500.0;
    cfg.bucket_width = 100.0;
    cfg.classes[0].session_rate = 0.2;
    cfg.classes[1].session_rate = 0.2;
    CurrentStatePolicy policy;
    Simulation sim(cfg, policy, 99);

    // Track every distinct (start, end) service interval per server. A new
    // interval may only begin at or after the previous one ended, so a
    // reassigned busy server must finish its current job before switching.
    std::vector<std::optional<std::pair<double, double>>> current(cfg.total_servers);
    std::int64_t events = 0, transitions = 0;
    sim.set_observer([&](const Simulation& s, const Event& ev) {
        (void)ev;
        ++events;
        int sum = std::accumulate(s.cluster().allocation.begin(), s.cluster().allocation.end(), 0);
        REQUIRE(sum == cfg.total_servers);
        for (int i = 0; i < cfg.total_servers; ++i) {
            const auto& srv = s.cluster().servers[i];
            if (!srv.busy()) continue;
            REQUIRE(srv.service_start <= s.now() + 1e-9);
            REQUIRE(srv.service_end >= s.now() - 1e-9);
            std::pair<double, double> interval{srv.service_start, srv.service_end};
            if (current[i] && *current[i] != interval) {
                REQUIRE(interval.first >= current[i]->second - 1e-9);
                ++transitions;
            }
            current[i] = interval;
        }
    });
    sim.run();

    CHECK(events > 1000);
    CHECK(transitions > 100);
}

TEST_CASE("waits are measured from arrival to service start") {
    // One slow server and deterministic service keeps the timeline simple.
    SimConfig cfg;
    cfg.total_servers = 1;
    cfg.horizon = 300.0;
    cfg.bucket_width = 100.0;
    cfg.deterministic_job_spacing = true;
    cfg.drain_at_horizon = true;
    cfg.classes = {make_class(0, 10, 0, 1.0, 4, 1.0, 0.02, Distribution{Deterministic{2.0}})};
    AdmitAllPolicy policy;
    Simulation sim(cfg, policy, 3);
    sim.run();

    // Deterministic service of 2 s against job spacing of 1 s: queue grows,
    // so measured mean waits are positive and the run serves jobs FIFO.
    CHECK(sim.stats().jobs_served > 4);
    CHECK(sim.stats().total_wait > 0.0);
    CHECK(sim.stats().total_response ==
          doctest::Approx(sim.stats().total_wait + 2.0 * sim.stats().jobs_served));
}

TEST_CASE("accepted sessions run all their jobs when the horizon drains") {
    SimConfig cfg = base_config();
    cfg.horizon = 300.0;
    cfg.bucket_width = 100.0;
    cfg.drain_at_horizon = true;
    cfg.classes[0].session_rate = 0.1;
    cfg.classes[1].session_rate = 0.1;
    ThresholdPolicy policy;
    Simulation sim(cfg, policy, 12);
    sim.run();

    std::int64_t accepted = 0;
    for (const auto& c : sim.ledger().counters()) accepted += c.accepted;
    REQUIRE(accepted > 10);
    CHECK(sim.active_session_count() == 0);
    std::int64_t sessions_fully_served = 0;
    for (const auto& [sid, count] : sim.jobs_served_per_session()) {
        (void)sid;
        // Both classes run 50 jobs per session.
        CHECK(count == 50);
        ++sessions_fully_served;
    }
    CHECK(sessions_fully_served == accepted);
}

TEST_CASE("violations reduce revenue by exactly the penalty") {
    // A near-impossible obligation on a busy single server makes nearly every
    // completed session violate.
    SimConfig cfg;
    cfg.total_servers = 1;
    cfg.horizon = 2000.0;
    cfg.classes = {make_class(0, 10, 10, 1e-9, 10, 2.0, 0.09)};
    AdmitAllPolicy policy;
    RevenueLedger ledger = run(cfg, policy, 21);

    const auto& c = ledger.counters(0);
    CHECK(c.completed > 20);
    CHECK(c.violated > 20);
    CHECK(ledger.penalties() == doctest::Approx(10.0 * c.violated));
    auto met = sla_met_fraction(ledger, 0);
    REQUIRE(met.has_value());
    CHECK(*met == doctest::Approx(1.0 - double(c.violated) / c.completed));
}

TEST_CASE("config validation rejects nonsense") {
    SimConfig cfg = base_config();
    cfg.total_servers = 0;
    CHECK_THROWS(cfg.validate());

    cfg = base_config();
    cfg.classes.clear();
    CHECK_THROWS(cfg.validate());

    cfg = base_config();
    cfg.horizon = -1;
    CHECK_THROWS(cfg.validate());

    cfg = base_config();
    cfg.initial_allocation = std::vector<int>{1, 2}; // must sum to 20
    CHECK_THROWS(cfg.validate());
}
