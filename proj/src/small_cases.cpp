#include "tshuffle/small_cases.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "tshuffle/shuffle_chain.hpp"

namespace tshuffle {

const std::vector<std::string>& s3_states() {
    static const std::vector<std::string> order = {"123", "231", "312", "132", "213", "321"};
    return order;
}

Permutation s3_deck(const std::string& s) {
    if (s.size() != 3) throw std::invalid_argument("bad 3-card deck string");
    std::vector<int> arr(3);
    for (int i = 0; i < 3; ++i) arr[i] = s[i] - '1';
    Permutation p(arr);
    if (!p.is_valid()) throw std::invalid_argument("bad 3-card deck string");
    return p;
}

std::string s3_name(const Permutation& p) {
    std::string s;
    for (int i = 0; i < 3; ++i) s += static_cast<char>('1' + p.arrangement[i]);
    return s;
}

static int s3_index(const Permutation& p) {
    const auto& order = s3_states();
    std::string name = s3_name(p);
    for (int i = 0; i < 6; ++i)
        if (order[i] == name) return i;
    throw std::logic_error("unreachable");
}

std::vector<std::vector<long>> s3_matrix() {
    std::vector<std::vector<long>> m(6, std::vector<long>(6, 0));
    for (int i = 0; i < 6; ++i) {
        Permutation p = s3_deck(s3_states()[i]);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) m[i][s3_index(apply(p, label_label(a, b)))] += 1;
    }
    return m;
}

bool s3_square_check() {
    auto m = s3_matrix();
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            long v = 0;
            for (int k = 0; k < 6; ++k) v += m[i][k] * m[k][j];
            long expect = 12 + (i == j ? 9 : 0);
            if (v != expect) return false;
        }
    return true;
}

/// m-step integer counts: row i of M^m (denominator 9^m).
static std::vector<std::vector<mpz_class>> s3_power(int m) {
    auto base = s3_matrix();
    std::vector<std::vector<mpz_class>> acc(6, std::vector<mpz_class>(6, 0));
    for (int i = 0; i < 6; ++i) acc[i][i] = 1;
    for (int step = 0; step < m; ++step) {
        std::vector<std::vector<mpz_class>> next(6, std::vector<mpz_class>(6, 0));
        for (int i = 0; i < 6; ++i)
            for (int k = 0; k < 6; ++k)
                for (int j = 0; j < 6; ++j) next[i][j] += acc[i][k] * base[k][j];
        acc = std::move(next);
    }
    return acc;
}

Rat s3_tv(int m) {
    if (m < 0) throw std::invalid_argument("m must be >= 0");
    auto p = s3_power(m);
    mpz_class denom;
    mpz_ui_pow_ui(denom.get_mpz_t(), 9, static_cast<unsigned long>(m));
    Rat s = 0;
    for (int j = 0; j < 6; ++j) s += abs(make_rat(p[0][j], denom) - Rat(1, 6));
    return s / 2;
}

Rat s3_max_tv_two_starts(int m) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    auto p = s3_power(m);
    mpz_class denom;
    mpz_ui_pow_ui(denom.get_mpz_t(), 9, static_cast<unsigned long>(m));
    Rat best = 0;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            Rat s = 0;
            for (int k = 0; k < 6; ++k) s += abs(make_rat(p[i][k], denom) - make_rat(p[j][k], denom));
            best = std::max(best, Rat(s / 2));
        }
    return best;
}

std::array<std::array<Permutation, 3>, 3> s3_qp_table(const Permutation& start) {
    if (start.n() != 3 || !start.is_valid()) throw std::invalid_argument("start must be in S3");
    std::array<std::array<Permutation, 3>, 3> out;
    for (int q = 0; q < 3; ++q)
        for (int p = 0; p < 3; ++p)
            out[q][p] = apply(start, label_loc(start.label_at(q), p));
    return out;
}

namespace {

/// One slot pairing between the two 9-entry charts of a deck pair.
struct SlotPair {
    int q1, p1;  // slot in the chart of the first deck
    int q2, p2;  // slot in the chart of the second deck
    bool coupled;
};

// The fixed pairing narrated for the charts of (123, 132): equal 123s and
// 132s matched first, then 123<->312 and 213<->132 (which differ by a
// 3-cycle) are treated as coupled, and the remaining three slots are paired
// lexicographically and stay uncoupled.
const std::vector<SlotPair>& base_described_pairing() {
    static const std::vector<SlotPair> pairing = {
        {0, 0, 1, 2, true},  // 123 <-> 123
        {1, 1, 2, 1, true},  // 123 <-> 123
        {1, 2, 0, 0, true},  // 132 <-> 132
        {2, 1, 1, 1, true},  // 132 <-> 132
        {2, 2, 0, 1, true},  // 123 <-> 312 (3-cycle apart)
        {0, 1, 2, 2, true},  // 213 <-> 132 (3-cycle apart)
        {1, 0, 0, 2, false}, // 213 <-> 231
        {0, 2, 2, 0, false}, // 321 <-> 231
        {2, 0, 1, 0, false}, // 321 <-> 312
    };
    return pairing;
}

Permutation compose_loc(const Permutation& s, const Permutation& lam) {
    // (s ∘ lam)(l) = s(lam(l))
    std::vector<int> arr(3);
    for (int l = 0; l < 3; ++l) arr[l] = s.arrangement[lam.arrangement[l]];
    return Permutation(arr);
}

Permutation invert(const Permutation& p) {
    std::vector<int> arr(p.n());
    for (int l = 0; l < p.n(); ++l) arr[p.arrangement[l]] = l;
    return Permutation(arr);
}

/// Transports the base pairing of (123, 132) to an arbitrary pair whose
/// decks differ by a transposition, using the invariance of the chart under
/// simultaneous relabeling of cards and relocation of sites:
/// chart_{g.s.l^-1}(l(a), l(b)) = g ∘ chart_s(a, b) ∘ l^-1.
std::vector<SlotPair> transported_pairing(const Permutation& u, const Permutation& v) {
    Permutation sigma = s3_deck("132");
    Permutation w = compose_loc(invert(u), v);  // u^-1 ∘ v, wanted = lam ∘ sigma ∘ lam^-1
    for (std::uint64_t r = 0; r < 6; ++r) {
        Permutation lam = perm_unrank(3, r);
        Permutation conj = compose_loc(compose_loc(lam, sigma), invert(lam));
        if (conj == w) {
            std::vector<SlotPair> out;
            for (const SlotPair& b : base_described_pairing())
                out.push_back({lam.arrangement[b.q1], lam.arrangement[b.p1],
                               lam.arrangement[b.q2], lam.arrangement[b.p2], b.coupled});
            return out;
        }
    }
    throw std::logic_error("pair is not a transposition apart; cannot transport pairing");
}

/// Greedy pairing: match equal chart entries first (row-major scan), then
/// pair the leftovers of both charts in lexicographic entry order.
std::vector<SlotPair> greedy_pairing(const Permutation& u, const Permutation& v) {
    auto c1 = s3_qp_table(u);
    auto c2 = s3_qp_table(v);
    std::vector<SlotPair> out;
    std::array<std::array<bool, 3>, 3> used2{};
    std::vector<std::pair<int, int>> rest1;
    for (int q1 = 0; q1 < 3; ++q1)
        for (int p1 = 0; p1 < 3; ++p1) {
            bool matched = false;
            for (int q2 = 0; q2 < 3 && !matched; ++q2)
                for (int p2 = 0; p2 < 3 && !matched; ++p2)
                    if (!used2[q2][p2] && c1[q1][p1] == c2[q2][p2]) {
                        used2[q2][p2] = true;
                        out.push_back({q1, p1, q2, p2, true});
                        matched = true;
                    }
            if (!matched) rest1.emplace_back(q1, p1);
        }
    std::vector<std::pair<int, int>> rest2;
    for (int q2 = 0; q2 < 3; ++q2)
        for (int p2 = 0; p2 < 3; ++p2)
            if (!used2[q2][p2]) rest2.emplace_back(q2, p2);
    auto key1 = [&](const std::pair<int, int>& s) {
        return s3_name(c1[s.first][s.second]) + static_cast<char>('0' + s.first) +
               static_cast<char>('0' + s.second);
    };
    auto key2 = [&](const std::pair<int, int>& s) {
        return s3_name(c2[s.first][s.second]) + static_cast<char>('0' + s.first) +
               static_cast<char>('0' + s.second);
    };
    std::sort(rest1.begin(), rest1.end(),
              [&](const auto& a, const auto& b) { return key1(a) < key1(b); });
    std::sort(rest2.begin(), rest2.end(),
              [&](const auto& a, const auto& b) { return key2(a) < key2(b); });
    for (std::size_t i = 0; i < rest1.size(); ++i)
        out.push_back({rest1[i].first, rest1[i].second, rest2[i].first, rest2[i].second, false});
    return out;
}

}  // namespace

std::vector<std::pair<int, Rat>> s3_round_coupling(PairingRule rule, int m_max) {
    if (m_max < 1) throw std::invalid_argument("m_max must be >= 1");
    std::map<std::pair<std::string, std::string>, Rat> mass;
    mass[{"123", "132"}] = 1;
    std::vector<std::pair<int, Rat>> curve;
    for (int m = 1; m <= m_max; ++m) {
        std::map<std::pair<std::string, std::string>, Rat> next;
        for (const auto& [pair_state, w] : mass) {
            Permutation u = s3_deck(pair_state.first);
            Permutation v = s3_deck(pair_state.second);
            auto c1 = s3_qp_table(u);
            auto c2 = s3_qp_table(v);
            std::vector<SlotPair> pairing = (rule == PairingRule::described)
                                                ? transported_pairing(u, v)
                                                : greedy_pairing(u, v);
            for (const SlotPair& sp : pairing) {
                if (sp.coupled) continue;  // coupled pairs stay coupled
                next[{s3_name(c1[sp.q1][sp.p1]), s3_name(c2[sp.q2][sp.p2])}] += w / 9;
            }
        }
        mass = std::move(next);
        Rat uncoupled = 0;
        for (const auto& [k, w] : mass) uncoupled += w;
        curve.emplace_back(m, uncoupled);
    }
    return curve;
}

SmallChain four_state_chain() {
    SmallChain c;
    c.states = {"a1", "a2", "b1", "b2"};
    c.matrix.assign(4, RatVec(4, Rat(0)));
    // Transition list: a1->a2, a1->b1, a2->b1, a2->b2, b1->a1, b1->a2,
    // b2->a1, b2->b2, each with conditional probability one-half.
    const int succ[4][2] = {{1, 2}, {2, 3}, {0, 1}, {0, 3}};
    for (int s = 0; s < 4; ++s)
        for (int k = 0; k < 2; ++k) c.matrix[s][succ[s][k]] += Rat(1, 2);
    return c;
}

Rat four_state_tv(int m) {
    if (m < 0) throw std::invalid_argument("m must be >= 0");
    SmallChain c = four_state_chain();
    RatVec pa(4, Rat(0)), pb(4, Rat(0));
    pa[0] = 1;  // a1
    pb[3] = 1;  // b2
    for (int step = 0; step < m; ++step) {
        RatVec na(4, Rat(0)), nb(4, Rat(0));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                na[j] += pa[i] * c.matrix[i][j];
                nb[j] += pb[i] * c.matrix[i][j];
            }
        pa = std::move(na);
        pb = std::move(nb);
    }
    return tv_exact(pa, pb);
}

namespace {

Rat best_tree(int u, int v, int depth, std::map<std::tuple<int, int, int>, Rat>& memo) {
    if (u == v) return 1;
    if (depth == 0) return 0;
    auto key = std::make_tuple(u, v, depth);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const int succ[4][2] = {{1, 2}, {2, 3}, {0, 1}, {0, 3}};
    // Two child slots of equal mass on each side: a tree coupling may pair
    // them in parallel or crossed; descendants of a pair stay paired.
    Rat parallel = (best_tree(succ[u][0], succ[v][0], depth - 1, memo) +
                    best_tree(succ[u][1], succ[v][1], depth - 1, memo)) /
                   2;
    Rat crossed = (best_tree(succ[u][0], succ[v][1], depth - 1, memo) +
                   best_tree(succ[u][1], succ[v][0], depth - 1, memo)) /
                  2;
    Rat best = std::max(parallel, crossed);
    memo[key] = best;
    return best;
}

}  // namespace

Rat four_state_best_tree_coupling(int depth) {
    if (depth < 0) throw std::invalid_argument("depth must be >= 0");
    if (depth > 4) throw std::length_error("exhaustive search bounded at depth <= 4");
    std::map<std::tuple<int, int, int>, Rat> memo;
    return best_tree(0, 3, depth, memo);
}

}  // namespace tshuffle
