#include <doctest.h>

#include <numeric>
#include <vector>

#include "tshuffle/rational.hpp"
#include "tshuffle/shuffle_chain.hpp"
#include "tshuffle/small_cases.hpp"

using namespace tshuffle;

TEST_CASE("3-card state order and deck/name round-trip") {
    const auto& states = s3_states();
    REQUIRE(states == std::vector<std::string>{"123", "231", "312", "132", "213", "321"});
    for (const std::string& s : states) CHECK(s3_name(s3_deck(s)) == s);
}

TEST_CASE("3-card integer matrix entries and row sums") {
    const auto m = s3_matrix();
    REQUIRE(m.size() == 6);
    CHECK(m[0][0] == 3);  // stay at 123
    CHECK(m[0][1] == 0);  // 123 -> 231 impossible in one pick
    CHECK(m[0][2] == 0);
    CHECK(m[0][3] == 2);
    for (const auto& row : m) CHECK(std::accumulate(row.begin(), row.end(), 0L) == 9);
}

TEST_CASE("3-card matrix over 9 equals the exact full kernel") {
    const auto m = s3_matrix();
    const FullKernel k = build_full_kernel(3);
    for (int r = 0; r < 6; ++r) {
        std::vector<long> row(6, 0);
        const std::uint64_t rr = perm_rank(s3_deck(s3_states()[r]));
        for (const auto& [col, cnt] : k.rows[rr]) {
            // Translate kernel's lexicographic index to the 3-card order.
            int c = 0;
            while (perm_rank(s3_deck(s3_states()[c])) != static_cast<std::uint64_t>(col)) ++c;
            row[c] = cnt;
        }
        CHECK(row == m[r]);
    }
}

TEST_CASE("square of the 3-card matrix") {
    const auto m = s3_matrix();
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            long v = 0;
            for (int k = 0; k < 6; ++k) v += m[i][k] * m[k][j];
            CHECK(v == (i == j ? 21 : 12));
        }
    CHECK(s3_square_check());
}

TEST_CASE("3-card TV agrees with the independent class-lumped oracle") {
    // Oracle: tv_curve comes from the conjugacy-class kernel, a different
    // code path from the 6-state integer matrix powers behind s3_tv.
    const auto curve = tv_curve(3, 10);
    for (const auto& [m, v] : curve) CHECK(s3_tv(m) == v);
    CHECK(s3_tv(1) == Rat(1, 3));
    CHECK(s3_tv(2) == Rat(5, 54));
    CHECK(s3_tv(3) == Rat(1, 27));
    CHECK(s3_tv(0) == Rat(5, 6));
}

TEST_CASE("3-card two-start TV decays as 3^{-2m} at even steps") {
    CHECK(s3_max_tv_two_starts(2) == Rat(1, 9));
    Rat expected = 1;
    for (int m = 1; m <= 4; ++m) {
        expected /= 9;
        CHECK(s3_max_tv_two_starts(2 * m) == expected);
    }
    // At any step the two-start max dominates nothing below zero and the
    // distance between identical starts is zero by definition; spot-check
    // that the max is attained by some distinct-pair value > 0.
    CHECK(s3_max_tv_two_starts(1) > 0);
}

TEST_CASE("3-card pick chart reproduces the printed entries") {
    const auto from123 = s3_qp_table(s3_deck("123"));
    // Entry (label 1, location 2): 0-based (0, 1).
    CHECK(s3_name(from123[0][1]) == "213");
    const auto from132 = s3_qp_table(s3_deck("132"));
    CHECK(s3_name(from132[1][2]) == "123");
    // A label already in place leaves the deck unchanged.
    CHECK(s3_name(from123[0][0]) == "123");
    CHECK(s3_name(from123[1][1]) == "123");
}

TEST_CASE("chart coupling: described rule leaves mass 1/3 per round") {
    const auto seq = s3_round_coupling(PairingRule::described, 6);
    REQUIRE(seq.size() == 6);
    CHECK(seq[0] == std::pair<int, Rat>{1, Rat(1, 3)});
    Rat prev = 1;
    for (const auto& [m, mass] : seq) {
        CHECK(mass <= prev);
        CHECK(mass >= 0);
        prev = mass;
    }
}

TEST_CASE("chart coupling: greedy rule matches at least the described rule") {
    const auto greedy = s3_round_coupling(PairingRule::greedy, 6);
    const auto described = s3_round_coupling(PairingRule::described, 6);
    // 4 of the 9 chart entries agree between the 123 and 132 charts, so the
    // best single-round match leaves 5/9 uncoupled.
    CHECK(greedy[0].second == Rat(5, 9));
    // Greedy is only round-local: the described pairing sacrifices first-round
    // matches to couple faster overall, so no dominance either way is
    // asserted beyond monotonicity.
    Rat prev = 1;
    for (const auto& [m, mass] : greedy) {
        CHECK(mass <= prev);
        prev = mass;
    }
    CHECK(described.back().second < greedy.back().second);
}

TEST_CASE("four-state chain structure") {
    const SmallChain c = four_state_chain();
    REQUIRE(c.states == std::vector<std::string>{"a1", "a2", "b1", "b2"});
    // Row a1 -> {a2: 1/2, b1: 1/2}.
    CHECK(c.matrix[0][1] == Rat(1, 2));
    CHECK(c.matrix[0][2] == Rat(1, 2));
    CHECK(c.matrix[0][0] == 0);
    CHECK(c.matrix[0][3] == 0);
    // Doubly stochastic.
    for (int i = 0; i < 4; ++i) {
        Rat row = 0, col = 0;
        for (int j = 0; j < 4; ++j) {
            row += c.matrix[i][j];
            col += c.matrix[j][i];
        }
        CHECK(row == 1);
        CHECK(col == 1);
    }
}

TEST_CASE("four-state TV collapses at step two") {
    CHECK(four_state_tv(0) == 1);
    CHECK(four_state_tv(1) == 1);
    CHECK(four_state_tv(2) == 0);
    CHECK(four_state_tv(3) == 0);
}

TEST_CASE("four-state exhaustive tree-coupling search") {
    CHECK(four_state_best_tree_coupling(0) == 0);
    CHECK(four_state_best_tree_coupling(1) == 0);  // disjoint level-1 supports
    CHECK(four_state_best_tree_coupling(2) == Rat(1, 2));
    // Coupled mass is monotone in depth.
    Rat prev = 0;
    for (int d = 0; d <= 4; ++d) {
        const Rat v = four_state_best_tree_coupling(d);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS(four_state_best_tree_coupling(5));
}
