#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "tshuffle/permutation.hpp"
#include "tshuffle/rational.hpp"

namespace tshuffle {

/// A tiny chain given by explicit states and an exact transition matrix.
struct SmallChain {
    std::vector<std::string> states;
    RatMatrix matrix;
};

/// Deck order used by the 3-card analysis: 123, 231, 312, 132, 213, 321.
const std::vector<std::string>& s3_states();

Permutation s3_deck(const std::string& s);
std::string s3_name(const Permutation& p);

/// 6x6 integer matrix whose (i,j) entry counts, out of the 9 equally likely
/// picks, those taking state i to state j; divided by 9 it is the kernel.
std::vector<std::vector<long>> s3_matrix();

/// True iff the square of the matrix equals 9I + 12N (N all-ones).
bool s3_square_check();

/// Exact TV between the m-step law from 123 and uniform.
Rat s3_tv(int m);

/// Max over ordered start pairs of the exact TV between m-step laws.
Rat s3_max_tv_two_starts(int m);

/// Chart of the 9 equally likely one-step outcomes: entry (q,p) moves the
/// card currently at location q to location p (locations 0-based here).
std::array<std::array<Permutation, 3>, 3> s3_qp_table(const Permutation& start);

enum class PairingRule {
    described,  ///< the fixed pairing narrated for the (123, 132) charts
    greedy,     ///< maximum equal-state matching, lexicographic remainder
};

/// Iterates a 9-slot chart pairing on the start pair (123, 132); returns the
/// exact uncoupled mass after each round m = 1..m_max.
std::vector<std::pair<int, Rat>> s3_round_coupling(PairingRule rule, int m_max);

/// The 4-state chain from the transition list (a1->a2, a1->b1, ...); states
/// ordered a1, a2, b1, b2.
SmallChain four_state_chain();

/// Exact TV between the m-step laws started at a1 and at b2.
Rat four_state_tv(int m);

/// Maximum probability of having coupled by the given depth over all
/// couplings acting as level-wise slot bijections that respect descent.
/// Starts are a1 and b2. Exhaustive; depth <= 4.
Rat four_state_best_tree_coupling(int depth);

}  // namespace tshuffle
