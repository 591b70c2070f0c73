#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tshuffle/permutation.hpp"
#include "tshuffle/rng.hpp"

namespace tshuffle {

enum class Strategy { qp_baseline, two_phase, superfast };

std::string strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);

struct CouplingConfig {
    int n = 2;
    double epsilon = 0.2;
    double kappa = 0.5;
    std::uint64_t seed = 0;
    long long event_cap = 2'000'000'000LL;
    Strategy strategy = Strategy::superfast;

    void validate() const;
};

/// Two decks sharing one continuous clock.
struct CoupledDecks {
    Permutation deck_a;
    Permutation deck_b;
    double clock = 0.0;
};

/// deck_a = identity, deck_b given explicitly.
CoupledDecks init(const CouplingConfig& cfg, const Permutation& b0);
/// deck_a = identity, deck_b uniform.
CoupledDecks init(const CouplingConfig& cfg, Rng& rng);

/// One marginal's event as locations swapped in that deck (equal locations
/// record a no-op pick). Replaying a trace reproduces the final deck.
struct TraceEvent {
    double time;
    int loc1;
    int loc2;
};

struct Trace {
    std::vector<TraceEvent> a;
    std::vector<TraceEvent> b;
};

Permutation replay(const Permutation& start, const std::vector<TraceEvent>& events);

/// Everything recorded about one coupled replicate.
struct RunRecord {
    int n = 0;
    double epsilon = 0.0;
    double kappa = 0.0;
    std::uint64_t seed = 0;
    /// Clock at which the decks are equal and stay equal (for the map-based
    /// strategy this includes trailing map expiries).
    double coupling_time = 0.0;
    /// Clock of the last discrepancy-count drop to zero.
    double last_cancellation_time = 0.0;
    long long events_total = 0;
    long long maps_created = 0;
    long long maps_expired = 0;
    long long maps_non_reusable = 0;
    /// Peak number of simultaneously live maps (for the cap invariant).
    long long max_live_maps = 0;
    /// (discrepancy count before the drop, time of the drop).
    std::vector<std::pair<int, double>> cancellations;
    /// Durations during which chain growth was blocked by the live-map cap.
    std::vector<double> wait_times;
    bool capacity_exceeded = false;

    std::string serialize() const;
};

/// Each rate-1 event draws a uniform card and location and moves the card
/// there in both decks; runs until the decks agree.
RunRecord couple_qp_baseline(const CoupledDecks& state, const CouplingConfig& cfg, Rng& rng,
                             Trace* trace = nullptr);

/// Each event draws a uniform card; a coupled card swaps labels with a
/// second uniform card in both decks, an uncoupled card is aligned by
/// location; runs until the decks agree.
RunRecord couple_two_phase(const CoupledDecks& state, const CouplingConfig& cfg, Rng& rng,
                           Trace* trace = nullptr);

/// Runs the given baseline strategy to a fixed horizon instead of to
/// coalescence and returns the decks at that time (for marginal sampling).
CoupledDecks run_baseline_horizon(Strategy strategy, const CoupledDecks& state,
                                  const CouplingConfig& cfg, double horizon, Rng& rng,
                                  Trace* trace = nullptr);

}  // namespace tshuffle
