#include "tshuffle/coupled.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace tshuffle {

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::qp_baseline: return "qp";
        case Strategy::two_phase: return "two-phase";
        case Strategy::superfast: return "superfast";
    }
    throw std::logic_error("unknown strategy");
}

Strategy parse_strategy(const std::string& name) {
    if (name == "qp") return Strategy::qp_baseline;
    if (name == "two-phase") return Strategy::two_phase;
    if (name == "superfast") return Strategy::superfast;
    throw std::invalid_argument("unknown strategy: " + name);
}

void CouplingConfig::validate() const {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    if (!(epsilon > 0.0 && epsilon < kappa && kappa < 1.0))
        throw std::invalid_argument("need 0 < epsilon < kappa < 1");
    if (event_cap <= 0) throw std::invalid_argument("event_cap must be positive");
}

CoupledDecks init(const CouplingConfig& cfg, const Permutation& b0) {
    cfg.validate();
    if (b0.n() != cfg.n) throw std::invalid_argument("b0 has wrong size");
    CoupledDecks s;
    s.deck_a = Permutation(cfg.n);
    s.deck_b = b0;
    s.clock = 0.0;
    return s;
}

CoupledDecks init(const CouplingConfig& cfg, Rng& rng) {
    return init(cfg, random_uniform(cfg.n, rng));
}

Permutation replay(const Permutation& start, const std::vector<TraceEvent>& events) {
    Permutation p = start;
    for (const auto& e : events) {
        if (e.loc1 != e.loc2) apply_inplace(p, loc_loc(e.loc1, e.loc2));
    }
    return p;
}

std::string RunRecord::serialize() const {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "n=" << n << " eps=" << epsilon << " kappa=" << kappa << " seed=" << seed
       << " coupling_time=" << coupling_time
       << " last_cancellation_time=" << last_cancellation_time
       << " events_total=" << events_total << " maps_created=" << maps_created
       << " maps_expired=" << maps_expired << " maps_non_reusable=" << maps_non_reusable
       << " max_live_maps=" << max_live_maps
       << " capacity_exceeded=" << (capacity_exceeded ? 1 : 0) << "\ncancellations:";
    for (const auto& [d, t] : cancellations) os << " (" << d << "," << t << ")";
    os << "\nwait_times:";
    for (double w : wait_times) os << " " << w;
    os << "\n";
    return os.str();
}

namespace {

/// Two array-backed decks with cached inverse lookups and an incrementally
/// maintained count of locations where the decks disagree.
struct PairState {
    int n;
    std::vector<int> a, b, pa, pb;
    int diff = 0;

    explicit PairState(const CoupledDecks& s)
        : n(s.deck_a.n()), a(s.deck_a.arrangement), b(s.deck_b.arrangement), pa(n), pb(n) {
        for (int i = 0; i < n; ++i) {
            pa[a[i]] = i;
            pb[b[i]] = i;
            if (a[i] != b[i]) ++diff;
        }
    }

    void swap_a(int i, int j) {
        if (i == j) return;
        diff -= (a[i] != b[i]) + (a[j] != b[j]);
        std::swap(a[i], a[j]);
        pa[a[i]] = i;
        pa[a[j]] = j;
        diff += (a[i] != b[i]) + (a[j] != b[j]);
    }

    void swap_b(int i, int j) {
        if (i == j) return;
        diff -= (a[i] != b[i]) + (a[j] != b[j]);
        std::swap(b[i], b[j]);
        pb[b[i]] = i;
        pb[b[j]] = j;
        diff += (a[i] != b[i]) + (a[j] != b[j]);
    }

    CoupledDecks to_decks(double clock) const {
        CoupledDecks s;
        s.deck_a = Permutation{a};
        s.deck_b = Permutation{b};
        s.clock = clock;
        return s;
    }
};

RunRecord make_record(const CouplingConfig& cfg) {
    RunRecord r;
    r.n = cfg.n;
    r.epsilon = cfg.epsilon;
    r.kappa = cfg.kappa;
    r.seed = cfg.seed;
    return r;
}

enum class StopRule { coalesce, horizon };

/// Shared loop for both baseline strategies.
RunRecord run_baseline(Strategy strategy, const CoupledDecks& state, const CouplingConfig& cfg,
                       Rng& rng, Trace* trace, StopRule stop, double horizon,
                       CoupledDecks* out_state) {
    PairState st(state);
    const int n = st.n;
    RunRecord rec = make_record(cfg);
    double clock = state.clock;

    while (true) {
        if (stop == StopRule::coalesce && st.diff == 0) break;
        double dt = rng.exponential(1.0);
        if (stop == StopRule::horizon && clock + dt >= horizon) {
            clock = horizon;
            break;
        }
        clock += dt;
        if (rec.events_total >= cfg.event_cap) {
            rec.capacity_exceeded = true;
            break;
        }
        ++rec.events_total;
        int before = st.diff;
        int z = rng.uniform_int(n);
        if (strategy == Strategy::qp_baseline) {
            int v = rng.uniform_int(n);
            if (trace) {
                trace->a.push_back({clock, st.pa[z], v});
                trace->b.push_back({clock, st.pb[z], v});
            }
            st.swap_a(st.pa[z], v);
            st.swap_b(st.pb[z], v);
        } else {
            if (st.pa[z] == st.pb[z]) {
                int w = rng.uniform_int(n);
                if (trace) {
                    trace->a.push_back({clock, st.pa[z], st.pa[w]});
                    trace->b.push_back({clock, st.pb[z], st.pb[w]});
                }
                st.swap_a(st.pa[z], st.pa[w]);
                st.swap_b(st.pb[z], st.pb[w]);
            } else {
                int v = rng.uniform_int(n);
                if (trace) {
                    trace->a.push_back({clock, st.pa[z], v});
                    trace->b.push_back({clock, st.pb[z], v});
                }
                st.swap_a(st.pa[z], v);
                st.swap_b(st.pb[z], v);
            }
        }
        if (st.diff < before) rec.cancellations.emplace_back(before, clock);
    }

    rec.coupling_time = clock;
    rec.last_cancellation_time = clock;
    if (out_state) *out_state = st.to_decks(clock);
    return rec;
}

}  // namespace

RunRecord couple_qp_baseline(const CoupledDecks& state, const CouplingConfig& cfg, Rng& rng,
                             Trace* trace) {
    return run_baseline(Strategy::qp_baseline, state, cfg, rng, trace, StopRule::coalesce, 0.0,
                        nullptr);
}

RunRecord couple_two_phase(const CoupledDecks& state, const CouplingConfig& cfg, Rng& rng,
                           Trace* trace) {
    return run_baseline(Strategy::two_phase, state, cfg, rng, trace, StopRule::coalesce, 0.0,
                        nullptr);
}

CoupledDecks run_baseline_horizon(Strategy strategy, const CoupledDecks& state,
                                  const CouplingConfig& cfg, double horizon, Rng& rng,
                                  Trace* trace) {
    if (strategy == Strategy::superfast)
        throw std::invalid_argument("run_baseline_horizon does not handle the map strategy");
    CoupledDecks out;
    run_baseline(strategy, state, cfg, rng, trace, StopRule::horizon, horizon, &out);
    return out;
}

}  // namespace tshuffle
