#pragma once

#include <utility>
#include <vector>

#include "tshuffle/rng.hpp"

namespace tshuffle {

/// State of the 6-state toy process: a bit and a residue mod 3.
struct ToyState {
    int x = 0;  // in {0,1}
    int y = 0;  // in {0,1,2}

    bool operator==(const ToyState&) const = default;
};

/// Row/column order (0,0), (0,1), (0,2), (1,0), (1,1), (1,2).
inline int toy_index(const ToyState& s) { return s.x * 3 + s.y; }
inline ToyState toy_state(int index) { return {index / 3, index % 3}; }

/// 6x6 generator: x flips alone at rate 10; y shifts +-1 mod 3 at rate 1
/// each, every y shift accompanied by an x flip; diagonals are -12.
std::vector<std::vector<double>> build_toy_generator();

using ToyTrajectory = std::vector<std::pair<double, ToyState>>;

/// Jump-chain realization up to the horizon; starts with (0, start).
ToyTrajectory simulate_toy(const ToyState& start, double horizon, Rng& rng);

/// Exact law at time t from `start` via the uniformized series.
std::vector<double> toy_law(const ToyState& start, double t);

/// Result of one coupled run: the coupling time plus both marginal
/// trajectories (for empirical generator checks).
struct ToyCouplingRun {
    double coupling_time = 0;
    ToyTrajectory first;
    ToyTrajectory second;
};

/// Naive product coupling: a rate-20 race assigns a shared bit to both x
/// coordinates; a rate-3 race assigns a shared residue to both y
/// coordinates, forcing an x flip in any marginal whose y actually moved
/// (which is what keeps decoupling x). Returns the first time the chains
/// agree (they then share all events and agree forever).
ToyCouplingRun naive_coupling_run(const ToyState& s, const ToyState& s2, Rng& rng);
double naive_coupling(const ToyState& s, const ToyState& s2, Rng& rng);

/// Coupling to the future: pre-draws T1 ~ Exp(20), T2 ~ Exp(3) and the
/// shared y assignment at T2; if that assignment matches either initial y
/// (and the initial ys differ), x is paired with 1-x' until T2 so the forced
/// flip at T2 completes the coupling. Returns exactly max{T1, T2} for
/// distinct starts, 0 for equal starts.
ToyCouplingRun future_coupling_run(const ToyState& s, const ToyState& s2, Rng& rng);
double future_coupling(const ToyState& s, const ToyState& s2, Rng& rng);

/// Estimated off-diagonal generator entries from a trajectory: jump counts
/// divided by occupancy time of the source state.
std::vector<std::vector<double>> estimate_generator(const std::vector<ToyTrajectory>& trajs,
                                                    double horizon);

}  // namespace tshuffle
