#pragma once

#include <utility>

#include "tshuffle/coupled.hpp"
#include "tshuffle/permutation.hpp"
#include "tshuffle/rng.hpp"

namespace tshuffle {

/// One round of the single-map construction on a state with exactly two
/// discrepancies: the uncoupled card `a` gets one association map, the rival
/// card `b` and the revealed card `a1` get the dedicated low-rate clocks, and
/// everything else runs as simultaneous label-to-label picks at the
/// complementary rate. Returns whether the decks agree at the map's expiry.
struct RoundResult {
    bool coupled = false;
    double elapsed = 0.0;
    long long events = 0;
};

RoundResult superfast_d2_k1_round(const CoupledDecks& state, Rng& rng);

/// Closed-form success probability for one round (the two-stage composition:
/// direct hit, one-shot rival jump, then the four slow clocks racing expiry).
double d2_k1_success_formula(int n);

/// Full map-chain coupling: one chain of association maps per uncoupled card,
/// lengths ~ eps*n/d, global live-map cap kappa*n, conjugated site swaps at
/// expiries. Runs until the decks agree and every map has expired.
RunRecord superfast_full(const CouplingConfig& cfg, Rng& rng, Trace* trace = nullptr);

/// Same engine from an explicit initial deck_b (deck_a starts at identity).
RunRecord superfast_full_from(const CouplingConfig& cfg, const Permutation& b0, Rng& rng,
                              Trace* trace = nullptr);

/// Runs the engine to a fixed horizon and returns the decks at that time,
/// for marginal-law sampling.
CoupledDecks superfast_run_horizon(const CouplingConfig& cfg, const Permutation& b0,
                                   double horizon, Rng& rng, Trace* trace = nullptr);

}  // namespace tshuffle
