#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tshuffle/coupled.hpp"
#include "tshuffle/permutation.hpp"
#include "tshuffle/rng.hpp"

using namespace tshuffle;

namespace {

CouplingConfig make_cfg(int n, std::uint64_t seed = 0) {
    CouplingConfig cfg;
    cfg.n = n;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("strategy names round-trip and bad names throw") {
    for (Strategy s : {Strategy::qp_baseline, Strategy::two_phase, Strategy::superfast})
        CHECK(parse_strategy(strategy_name(s)) == s);
    CHECK(strategy_name(Strategy::qp_baseline) == "qp");
    CHECK(strategy_name(Strategy::two_phase) == "two-phase");
    CHECK_THROWS_AS(parse_strategy("qp2"), std::invalid_argument);
}

TEST_CASE("config validation") {
    CHECK_NOTHROW(make_cfg(2).validate());
    CHECK_THROWS_AS(make_cfg(1).validate(), std::invalid_argument);
    CouplingConfig bad = make_cfg(8);
    bad.epsilon = 0.6;  // must stay below kappa
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = make_cfg(8);
    bad.kappa = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = make_cfg(8);
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("init places the decks as asked") {
    const CouplingConfig cfg = make_cfg(6);
    Permutation b0(6);
    std::swap(b0.arrangement[2], b0.arrangement[4]);
    const CoupledDecks s = init(cfg, b0);
    CHECK(s.deck_a == Permutation(6));
    CHECK(s.deck_b == b0);
    CHECK(s.clock == 0.0);
    CHECK(discrepancies(s.deck_a, s.deck_b).size() == 2);

    // A uniform second deck almost always disagrees nearly everywhere.
    Rng rng(41);
    double total = 0;
    const int reps = 2000, n = 30;
    const CouplingConfig big = make_cfg(n);
    for (int i = 0; i < reps; ++i) {
        const CoupledDecks u = init(big, rng);
        CHECK(u.deck_b.is_valid());
        total += static_cast<double>(discrepancies(u.deck_a, u.deck_b).size());
    }
    // E[#fixed points] = 1, so mean discrepancies = n - 1.
    CHECK(std::abs(total / reps - (n - 1)) < 0.2);
}

TEST_CASE("both baselines couple and their records are consistent") {
    for (Strategy s : {Strategy::qp_baseline, Strategy::two_phase}) {
        Rng rng(43);
        const CouplingConfig cfg = make_cfg(12, 43);
        const CoupledDecks start = init(cfg, rng);
        Rng run_rng(44);
        const RunRecord rec = s == Strategy::qp_baseline
                                  ? couple_qp_baseline(start, cfg, run_rng)
                                  : couple_two_phase(start, cfg, run_rng);
        CHECK(rec.n == 12);
        CHECK(rec.coupling_time > 0.0);
        CHECK(rec.events_total > 0);
        CHECK(rec.last_cancellation_time <= rec.coupling_time);
        CHECK(rec.maps_created == 0);  // baselines never build maps
        CHECK(!rec.capacity_exceeded);
        CHECK(!rec.cancellations.empty());
        // Discrepancy counts recorded at cancellations never increase the
        // running total past n and end at a positive count.
        for (const auto& [d, t] : rec.cancellations) {
            CHECK(d >= 1);
            CHECK(d <= 12);
            CHECK(t <= rec.coupling_time);
        }
    }
}

TEST_CASE("already-coupled start couples at time zero") {
    const CouplingConfig cfg = make_cfg(8);
    const CoupledDecks start = init(cfg, Permutation(8));
    Rng rng(45);
    const RunRecord rec = couple_qp_baseline(start, cfg, rng);
    CHECK(rec.coupling_time == 0.0);
    CHECK(rec.events_total == 0);
}

TEST_CASE("recorded traces replay to the horizon-time decks") {
    for (Strategy s : {Strategy::qp_baseline, Strategy::two_phase}) {
        const CouplingConfig cfg = make_cfg(7);
        Rng init_rng(47);
        const CoupledDecks start = init(cfg, init_rng);
        Rng rng(48);
        Trace trace;
        const CoupledDecks end = run_baseline_horizon(s, start, cfg, 25.0, rng, &trace);
        CHECK(replay(start.deck_a, trace.a) == end.deck_a);
        CHECK(replay(start.deck_b, trace.b) == end.deck_b);
        // Event times are strictly within the horizon and increasing.
        double prev = 0.0;
        for (const auto& ev : trace.a) {
            CHECK(ev.time >= prev);
            CHECK(ev.time <= 25.0);
            prev = ev.time;
        }
    }
}

TEST_CASE("identical seeds give bit-identical records") {
    const CouplingConfig cfg = make_cfg(16, 7);
    Rng r1(7), r2(7);
    const RunRecord a = couple_two_phase(init(cfg, r1), cfg, r1);
    const RunRecord b = couple_two_phase(init(cfg, r2), cfg, r2);
    CHECK(a.serialize() == b.serialize());
}

TEST_CASE("horizon runner rejects the map-chain strategy") {
    const CouplingConfig cfg = make_cfg(6);
    Rng rng(51);
    const CoupledDecks start = init(cfg, Permutation(6));
    CHECK_THROWS_AS(run_baseline_horizon(Strategy::superfast, start, cfg, 1.0, rng),
                    std::invalid_argument);
}

TEST_CASE("event cap is reported, not thrown") {
    CouplingConfig cfg = make_cfg(24, 3);
    cfg.event_cap = 10;
    Rng rng(53);
    const CoupledDecks start = init(cfg, rng);
    Rng run_rng(54);
    const RunRecord rec = couple_qp_baseline(start, cfg, run_rng);
    CHECK(rec.capacity_exceeded);
    CHECK(rec.events_total <= 10);
}
