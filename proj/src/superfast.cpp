#include "tshuffle/superfast.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <vector>

namespace tshuffle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// The coupled map-chain engine.
///
/// Real decks carry the actual marginal processes. Virtual decks carry the
/// same decks with every live map's pending jump applied "as if" it had
/// already happened. A map for carrier card c (virtually at site x in deck A
/// and site y in deck B) applies the site swaps (x, i) / (y, i) to the
/// virtual decks at creation; the real decks perform that swap only at the
/// map's expiry, conjugated through the still-pending earlier maps, so that
/// once every map has expired the real decks equal the virtual decks.
///
/// Rate budget, per deck and unit time: every card not carrying a pending
/// jump picks a uniform site at rate 1/n; each live map accounts for its
/// carrier's full 1/n as (n-T)/n^2 on the pre-drawn jump plus T/n^2 of live
/// picks onto the T sites excluded from the jump's target set (T = live-map
/// count at creation). The total event rate seen by each marginal is
/// therefore exactly 1 at all times.
class Engine {
public:
    Engine(const CouplingConfig& cfg, const Permutation& b0, Rng& rng, Trace* trace)
        : n_(cfg.n),
          cap_(std::max(1, static_cast<int>(std::floor(cfg.kappa * cfg.n)))),
          eps_(cfg.epsilon),
          kappa_(cfg.kappa),
          event_cap_(cfg.event_cap),
          rng_(rng),
          trace_(trace),
          ra_(cfg.n),
          rb_(b0.arrangement),
          va_(cfg.n),
          vb_(b0.arrangement),
          pra_(cfg.n),
          prb_(cfg.n),
          pva_(cfg.n),
          pvb_(cfg.n),
          frozen_a_(cfg.n, 0),
          frozen_b_(cfg.n, 0),
          target_owner_(cfg.n, -1) {
        cfg.validate();
        if (b0.n() != cfg.n) throw std::invalid_argument("initial deck has wrong size");
        for (int i = 0; i < n_; ++i) {
            ra_[i] = i;
            va_[i] = i;
            pra_[i] = i;
            pva_[i] = i;
            prb_[rb_[i]] = i;
            pvb_[vb_[i]] = i;
            if (ra_[i] != rb_[i]) ++rdiff_;
            if (va_[i] != vb_[i]) ++vdiff_;
        }
        rec_.n = cfg.n;
        rec_.epsilon = cfg.epsilon;
        rec_.kappa = cfg.kappa;
        rec_.seed = cfg.seed;
    }

    /// Runs to coalescence (horizon = inf: decks equal and all maps expired)
    /// or to a fixed horizon.
    void run(double horizon) {
        rebuild_chains();
        grow_and_note_drops();
        while (true) {
            if (std::isinf(horizon) && vdiff_ == 0 && live_ == 0) {
                assert(rdiff_ == 0);
                rec_.coupling_time = clock_;
                break;
            }
            const double poisson_rate = total_poisson_rate();
            double next_poisson = kInf;
            if (poisson_rate > 0.0) next_poisson = clock_ + rng_.exponential(poisson_rate);
            const double next_expiry = heap_.empty() ? kInf : heap_.top().first;
            const double next_time = std::min(next_poisson, next_expiry);
            if (next_time >= horizon) {
                clock_ = horizon;
                break;
            }
            if (++rec_.events_total > event_cap_) {
                rec_.capacity_exceeded = true;
                rec_.coupling_time = clock_;
                break;
            }
            const int before = vdiff_;
            clock_ = next_time;
            if (next_expiry <= next_poisson) {
                const long long seq = heap_.top().second;
                heap_.pop();
                process_expiry(seq);
            } else {
                process_poisson(poisson_rate);
            }
            note_drop(before);
            if (vdiff_ != before || any_chain_invalid()) rebuild_chains();
            grow_and_note_drops();
            assert(live_ <= cap_);
        }
    }

    CoupledDecks real_decks() const {
        CoupledDecks s;
        s.deck_a = Permutation(ra_);
        s.deck_b = Permutation(rb_);
        s.clock = clock_;
        return s;
    }

    const RunRecord& record() const { return rec_; }

private:
    struct MapRec {
        int chain_id;
        int x, y;      // chain pair sites (A side, B side)
        int target;    // the pre-drawn jump target
        double expiry;
        std::vector<int> excluded;  // live targets at creation: the carrier's live picks
        bool reusable = true;
    };

    struct Chain {
        int x, y;
        int len = 0;
    };

    int n_;
    int cap_;
    double eps_, kappa_;
    long long event_cap_;
    Rng& rng_;
    Trace* trace_;

    std::vector<int> ra_, rb_, va_, vb_;      // location -> label
    std::vector<int> pra_, prb_, pva_, pvb_;  // label -> location
    int rdiff_ = 0, vdiff_ = 0;
    double clock_ = 0.0;

    std::map<long long, MapRec> pending_;  // keyed by creation sequence
    using HeapItem = std::pair<double, long long>;
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap_;
    long long next_seq_ = 0;
    int live_ = 0;
    int nonreusable_live_ = 0;
    long long sum_excluded_ = 0;

    std::vector<char> frozen_a_, frozen_b_;
    int frozen_both_ = 0;
    std::vector<long long> target_owner_;  // site -> pending map seq, or -1

    std::vector<Chain> chains_;
    bool waiting_ = false;
    double wait_start_ = 0.0;

    RunRecord rec_;

    // --- frozen-flag bookkeeping (one frozen carrier per live map, per deck)

    void set_frozen_a(int label, bool on) {
        if (frozen_a_[label] == static_cast<char>(on)) return;
        frozen_a_[label] = static_cast<char>(on);
        if (frozen_b_[label]) frozen_both_ += on ? 1 : -1;
    }

    void set_frozen_b(int label, bool on) {
        if (frozen_b_[label] == static_cast<char>(on)) return;
        frozen_b_[label] = static_cast<char>(on);
        if (frozen_a_[label]) frozen_both_ += on ? 1 : -1;
    }

    // --- deck updates ---------------------------------------------------

    void vswap_a(int i, int j) {
        if (i == j) return;
        if (target_owner_[i] >= 0) set_frozen_a(va_[i], false);
        if (target_owner_[j] >= 0) set_frozen_a(va_[j], false);
        vdiff_ -= (va_[i] != vb_[i]) + (va_[j] != vb_[j]);
        std::swap(va_[i], va_[j]);
        pva_[va_[i]] = i;
        pva_[va_[j]] = j;
        vdiff_ += (va_[i] != vb_[i]) + (va_[j] != vb_[j]);
        if (target_owner_[i] >= 0) set_frozen_a(va_[i], true);
        if (target_owner_[j] >= 0) set_frozen_a(va_[j], true);
    }

    void vswap_b(int i, int j) {
        if (i == j) return;
        if (target_owner_[i] >= 0) set_frozen_b(vb_[i], false);
        if (target_owner_[j] >= 0) set_frozen_b(vb_[j], false);
        vdiff_ -= (va_[i] != vb_[i]) + (va_[j] != vb_[j]);
        std::swap(vb_[i], vb_[j]);
        pvb_[vb_[i]] = i;
        pvb_[vb_[j]] = j;
        vdiff_ += (va_[i] != vb_[i]) + (va_[j] != vb_[j]);
        if (target_owner_[i] >= 0) set_frozen_b(vb_[i], true);
        if (target_owner_[j] >= 0) set_frozen_b(vb_[j], true);
    }

    void rswap_a(int i, int j) {
        if (trace_) trace_->a.push_back({clock_, i, j});
        if (i == j) return;
        rdiff_ -= (ra_[i] != rb_[i]) + (ra_[j] != rb_[j]);
        std::swap(ra_[i], ra_[j]);
        pra_[ra_[i]] = i;
        pra_[ra_[j]] = j;
        rdiff_ += (ra_[i] != rb_[i]) + (ra_[j] != rb_[j]);
    }

    void rswap_b(int i, int j) {
        if (trace_) trace_->b.push_back({clock_, i, j});
        if (i == j) return;
        rdiff_ -= (ra_[i] != rb_[i]) + (ra_[j] != rb_[j]);
        std::swap(rb_[i], rb_[j]);
        prb_[rb_[i]] = i;
        prb_[rb_[j]] = j;
        rdiff_ += (ra_[i] != rb_[i]) + (ra_[j] != rb_[j]);
    }

    /// Virtual pick of card z to site v in deck A, mirrored to the real deck
    /// as the label swap {z, previous virtual occupant of v}: conjugating the
    /// virtual site swap through the pending maps lands on those two labels.
    void pick_a(int z, int v) {
        const int w = va_[v];
        vswap_a(pva_[z], v);
        rswap_a(pra_[z], pra_[w]);
    }

    void pick_b(int z, int v) {
        const int w = vb_[v];
        vswap_b(pvb_[z], v);
        rswap_b(prb_[z], prb_[w]);
    }

    // --- event streams ----------------------------------------------------

    int count_both_free() const { return n_ - 2 * live_ + frozen_both_; }
    int count_single_free() const { return live_ - frozen_both_; }

    double total_poisson_rate() const {
        const double free_rate =
            static_cast<double>(count_both_free() + 2 * count_single_free()) / n_;
        const double side_rate =
            static_cast<double>(sum_excluded_) / (static_cast<double>(n_) * n_);
        return free_rate + side_rate;
    }

    void process_poisson(double total) {
        double u = rng_.uniform() * total;
        const double r_both = static_cast<double>(count_both_free()) / n_;
        const double r_single = static_cast<double>(count_single_free()) / n_;
        if (u < r_both) {
            int z;
            do {
                z = rng_.uniform_int(n_);
            } while (frozen_a_[z] || frozen_b_[z]);
            const int v = rng_.uniform_int(n_);
            pick_a(z, v);
            pick_b(z, v);
            return;
        }
        u -= r_both;
        if (u < r_single) {
            int z;
            do {
                z = rng_.uniform_int(n_);
            } while (frozen_a_[z] || !frozen_b_[z]);
            pick_a(z, rng_.uniform_int(n_));
            return;
        }
        u -= r_single;
        if (u < r_single) {
            int z;
            do {
                z = rng_.uniform_int(n_);
            } while (!frozen_a_[z] || frozen_b_[z]);
            pick_b(z, rng_.uniform_int(n_));
            return;
        }
        u -= r_single;
        // A carrier's pick onto one of its excluded sites: choose a map
        // weighted by excluded-set size, then a uniform excluded site. Both
        // decks' carriers fire on the one clock.
        double acc = u * static_cast<double>(n_) * n_;
        const MapRec* chosen = nullptr;
        for (const auto& [seq, m] : pending_) {
            acc -= static_cast<double>(m.excluded.size());
            if (acc < 0.0) {
                chosen = &m;
                break;
            }
        }
        if (!chosen) chosen = &pending_.rbegin()->second;  // floating-point edge
        const int site =
            chosen->excluded[rng_.uniform_int(static_cast<int>(chosen->excluded.size()))];
        const int za = va_[chosen->target];
        const int zb = vb_[chosen->target];
        pick_a(za, site);
        pick_b(zb, site);
    }

    void process_expiry(long long seq) {
        auto it = pending_.find(seq);
        assert(it != pending_.end());
        int pa1 = it->second.x, pa2 = it->second.target;
        int pb1 = it->second.y, pb2 = it->second.target;
        // Conjugate the map's site swap through every earlier still-pending
        // map, most recent first.
        for (auto rit = std::make_reverse_iterator(it); rit != pending_.rend(); ++rit) {
            const MapRec& e = rit->second;
            auto track = [](int& p, int a, int b) {
                if (p == a)
                    p = b;
                else if (p == b)
                    p = a;
            };
            track(pa1, e.x, e.target);
            track(pa2, e.x, e.target);
            track(pb1, e.y, e.target);
            track(pb2, e.y, e.target);
        }

        const MapRec& m = it->second;
        set_frozen_a(va_[m.target], false);
        set_frozen_b(vb_[m.target], false);
        target_owner_[m.target] = -1;
        sum_excluded_ -= static_cast<long long>(m.excluded.size());
        --live_;
        if (!m.reusable) --nonreusable_live_;
        if (m.chain_id >= 0 && m.chain_id < static_cast<int>(chains_.size()) &&
            chains_[m.chain_id].len > 0)
            --chains_[m.chain_id].len;
        pending_.erase(it);
        ++rec_.maps_expired;

        rswap_a(pa1, pa2);
        rswap_b(pb1, pb2);
    }

    // --- chains and growth --------------------------------------------------

    bool chain_valid(const Chain& c) const { return c.x != c.y && va_[c.x] == vb_[c.y]; }

    bool any_chain_invalid() const {
        for (const auto& c : chains_)
            if (!chain_valid(c)) return true;
        return false;
    }

    void rebuild_chains() {
        // Maps of chains that no longer carry an uncoupled card stay live
        // until expiry but are never reused.
        std::vector<int> renumber(chains_.size(), -1);
        std::vector<Chain> kept;
        for (std::size_t c = 0; c < chains_.size(); ++c) {
            if (vdiff_ > 0 && chain_valid(chains_[c])) {
                renumber[c] = static_cast<int>(kept.size());
                kept.push_back(chains_[c]);
            }
        }
        for (auto& [seq, m] : pending_) {
            if (m.chain_id < 0) continue;
            const int nc = m.chain_id < static_cast<int>(renumber.size()) ? renumber[m.chain_id]
                                                                          : -1;
            if (nc < 0 && m.reusable) {
                m.reusable = false;
                ++rec_.maps_non_reusable;
                ++nonreusable_live_;
            }
            m.chain_id = nc;
        }
        chains_ = std::move(kept);
        if (vdiff_ == 0) return;
        // One chain per uncoupled card that does not already carry one.
        std::vector<char> has_chain(n_, 0);
        for (const auto& c : chains_) has_chain[va_[c.x]] = 1;
        for (int s = 0; s < n_; ++s) {
            if (va_[s] == vb_[s]) continue;
            const int card = va_[s];
            if (has_chain[card]) continue;
            has_chain[card] = 1;
            chains_.push_back(Chain{pva_[card], pvb_[card], 0});
        }
    }

    /// Chain lengths: the budget of floor(eps*n) maps is split evenly over
    /// the chains, remainder to the lowest chain ids, minimum one per chain.
    int desired_length(std::size_t chain_idx) const {
        if (chains_.empty()) return 0;
        const int budget = static_cast<int>(std::floor(eps_ * n_));
        const int d = static_cast<int>(chains_.size());
        const int base = budget / d;
        const int rem = budget % d;
        return std::max(1, base + (static_cast<int>(chain_idx) < rem ? 1 : 0));
    }

    bool garbage_ok() const {
        if (nonreusable_live_ == 0) return true;
        const double limit = (kappa_ - eps_) * n_ - eps_ * n_ / vdiff_;
        return nonreusable_live_ < limit;
    }

    void note_drop(int before) {
        if (vdiff_ < before) {
            rec_.cancellations.emplace_back(before, clock_);
            rec_.last_cancellation_time = clock_;
        }
    }

    /// A map creation can itself align the virtual decks (the pending jump
    /// lands a chain's card on the site it already occupies in the other
    /// deck), so discrepancy drops during growth are recorded as well.
    void grow_and_note_drops() {
        const int before = vdiff_;
        grow();
        note_drop(before);
    }

    void grow() {
        if (vdiff_ == 0) return;
        bool grew = true;
        bool blocked = false;
        while (grew) {
            grew = false;
            for (std::size_t c = 0; c < chains_.size(); ++c) {
                if (live_ >= cap_) {
                    blocked = true;
                    break;
                }
                if (chains_[c].len >= desired_length(c) || !chain_valid(chains_[c])) continue;
                if (!garbage_ok()) {
                    blocked = true;
                    continue;
                }
                create_map(static_cast<int>(c));
                grew = true;
                if (waiting_) {
                    rec_.wait_times.push_back(clock_ - wait_start_);
                    waiting_ = false;
                }
            }
        }
        if (blocked && !waiting_) {
            waiting_ = true;
            wait_start_ = clock_;
        }
    }

    void create_map(int chain_id) {
        Chain& c = chains_[chain_id];
        MapRec m;
        m.chain_id = chain_id;
        m.x = c.x;
        m.y = c.y;
        m.excluded.reserve(live_);
        for (int s = 0; s < n_; ++s)
            if (target_owner_[s] >= 0) m.excluded.push_back(s);
        const int free_sites = n_ - live_;
        do {
            m.target = rng_.uniform_int(n_);
        } while (target_owner_[m.target] >= 0);
        m.expiry = clock_ + rng_.exponential(static_cast<double>(free_sites) /
                                             (static_cast<double>(n_) * n_));

        // The pending jump applies to the virtual decks only.
        vswap_a(c.x, m.target);
        vswap_b(c.y, m.target);

        const long long seq = next_seq_++;
        target_owner_[m.target] = seq;
        set_frozen_a(va_[m.target], true);
        set_frozen_b(vb_[m.target], true);
        sum_excluded_ += static_cast<long long>(m.excluded.size());
        ++live_;
        rec_.max_live_maps = std::max<long long>(rec_.max_live_maps, live_);
        heap_.push({m.expiry, seq});
        pending_.emplace(seq, std::move(m));
        ++c.len;
        ++rec_.maps_created;
    }
};

RunRecord run_engine(const CouplingConfig& cfg, const Permutation& b0, Rng& rng, Trace* trace,
                     double horizon, CoupledDecks* out) {
    Engine e(cfg, b0, rng, trace);
    e.run(horizon);
    if (out) *out = e.real_decks();
    return e.record();
}

}  // namespace

RunRecord superfast_full_from(const CouplingConfig& cfg, const Permutation& b0, Rng& rng,
                              Trace* trace) {
    return run_engine(cfg, b0, rng, trace, kInf, nullptr);
}

RunRecord superfast_full(const CouplingConfig& cfg, Rng& rng, Trace* trace) {
    cfg.validate();
    Permutation b0 = random_uniform(cfg.n, rng);
    return run_engine(cfg, b0, rng, trace, kInf, nullptr);
}

CoupledDecks superfast_run_horizon(const CouplingConfig& cfg, const Permutation& b0,
                                   double horizon, Rng& rng, Trace* trace) {
    CoupledDecks out;
    run_engine(cfg, b0, rng, trace, horizon, &out);
    return out;
}

double d2_k1_success_formula(int n) {
    const double p1 =
        2.0 / n +
        (1.0 - 2.0 / n) * (static_cast<double>(n - 1) / (2.0 * n - 1.0)) * (2.0 / (n - 1));
    return p1 + (1.0 - p1) * (4.0 / (n + 4.0));
}

RoundResult superfast_d2_k1_round(const CoupledDecks& state, Rng& rng) {
    const int n = state.deck_a.n();
    const auto disc = discrepancies(state.deck_a, state.deck_b);
    if (disc.size() != 2) throw std::invalid_argument("round requires exactly 2 discrepancies");
    const int d1 = disc[0], d2 = disc[1];

    // Virtual and real decks with inverse lookups, as in the full engine but
    // with exactly one association map.
    std::vector<int> ra = state.deck_a.arrangement, rb = state.deck_b.arrangement;
    std::vector<int> va = ra, vb = rb;
    std::vector<int> pra(n), prb(n), pva(n), pvb(n);
    int vdiff = 0;
    for (int i = 0; i < n; ++i) {
        pra[ra[i]] = i;
        prb[rb[i]] = i;
        pva[va[i]] = i;
        pvb[vb[i]] = i;
        if (va[i] != vb[i]) ++vdiff;
    }
    auto vswap_a = [&](int i, int j) {
        if (i == j) return;
        vdiff -= (va[i] != vb[i]) + (va[j] != vb[j]);
        std::swap(va[i], va[j]);
        pva[va[i]] = i;
        pva[va[j]] = j;
        vdiff += (va[i] != vb[i]) + (va[j] != vb[j]);
    };
    auto vswap_b = [&](int i, int j) {
        if (i == j) return;
        vdiff -= (va[i] != vb[i]) + (va[j] != vb[j]);
        std::swap(vb[i], vb[j]);
        pvb[vb[i]] = i;
        pvb[vb[j]] = j;
        vdiff += (va[i] != vb[i]) + (va[j] != vb[j]);
    };
    auto rswap_a = [&](int i, int j) {
        if (i == j) return;
        std::swap(ra[i], ra[j]);
        pra[ra[i]] = i;
        pra[ra[j]] = j;
    };
    auto rswap_b = [&](int i, int j) {
        if (i == j) return;
        std::swap(rb[i], rb[j]);
        prb[rb[i]] = i;
        prb[rb[j]] = j;
    };
    auto pick_a = [&](int z, int v) {
        const int w = va[v];
        vswap_a(pva[z], v);
        rswap_a(pra[z], pra[w]);
    };
    auto pick_b = [&](int z, int v) {
        const int w = vb[v];
        vswap_b(pvb[z], v);
        rswap_b(prb[z], prb[w]);
    };

    RoundResult res;
    const int card_a = state.deck_a.label_at(d1);
    const int card_b = state.deck_a.label_at(d2);
    const double n2 = static_cast<double>(n) * n;

    const int i1 = rng.uniform_int(n);
    const double t1 = rng.exponential(1.0 / n);
    res.elapsed = t1;

    // Apply card a's pending jump to the virtual decks.
    vswap_a(pva[card_a], i1);
    vswap_b(pvb[card_a], i1);
    bool cancelled = (vdiff == 0);
    const int card_a1 = va[d1];  // the revealed rival card

    // One-shot pre-drawn clock for a1's own jump.
    const double t_a1 = rng.exponential(static_cast<double>(n - 1) / n2);
    bool a1_armed = !cancelled;

    double clock = 0.0;
    while (true) {
        const bool b_armed = !cancelled;
        double churn_rate = 1.0 - 1.0 / n;
        if (a1_armed) churn_rate -= static_cast<double>(n - 1) / n2;
        if (b_armed) churn_rate -= 3.0 / n2;
        const double b_rate = b_armed ? 4.0 / n2 : 0.0;
        const double poisson = churn_rate + b_rate;
        double next = clock + rng.exponential(poisson);
        bool a1_fires = false;
        if (a1_armed && t_a1 < next) {
            next = t_a1;
            a1_fires = true;
        }
        if (t1 <= next) break;
        clock = next;
        ++res.events;
        if (a1_fires) {
            a1_armed = false;
            int v = rng.uniform_int(n - 1);
            if (v >= i1) ++v;  // uniform over the sites other than i1
            pick_a(card_a1, v);
            pick_b(card_a1, v);
            if (vdiff == 0) cancelled = true;
            continue;
        }
        const double u = rng.uniform() * poisson;
        if (b_armed && u < b_rate) {
            // One of card b's four dedicated clocks; each closes the pair.
            const int which = rng.uniform_int(4);
            if (which == 0) {  // simultaneous pick of site d1
                pick_a(card_b, d1);
                pick_b(card_b, d1);
            } else if (which == 1) {  // simultaneous pick of site d2
                pick_a(card_b, d2);
                pick_b(card_b, d2);
            } else if (which == 2) {  // A-side label swap with the card at d1
                pick_a(card_b, d1);
            } else {  // B-side label swap with the card at d2
                pick_b(card_b, d2);
            }
            if (vdiff == 0) cancelled = true;
            continue;
        }
        // Simultaneous label-to-label pick among non-special cards.
        auto special = [&](int c) {
            if (c == card_a) return true;
            if (a1_armed && c == card_a1) return true;
            if (b_armed && c == card_b) return true;
            return false;
        };
        int p, q;
        do {
            p = rng.uniform_int(n);
        } while (special(p));
        do {
            q = rng.uniform_int(n);
        } while (special(q));
        vswap_a(pva[p], pva[q]);
        vswap_b(pvb[p], pvb[q]);
        rswap_a(pra[p], pra[q]);
        rswap_b(prb[p], prb[q]);
    }

    // Expiry of the single map: the real decks perform the jump's site swaps.
    rswap_a(d1, i1);
    rswap_b(d2, i1);
    ++res.events;

    int rd = 0;
    for (int i = 0; i < n; ++i)
        if (ra[i] != rb[i]) ++rd;
    assert((rd == 0) == cancelled);
    res.coupled = (rd == 0);
    return res;
}

}  // namespace tshuffle
