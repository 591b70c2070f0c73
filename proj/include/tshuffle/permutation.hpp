#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tshuffle/rng.hpp"

namespace tshuffle {

/// One deck of n labeled cards: arrangement[location] = label, both 0-based.
struct Permutation {
    std::vector<int> arrangement;

    Permutation() = default;
    explicit Permutation(int n) : arrangement(n) {
        for (int i = 0; i < n; ++i) arrangement[i] = i;
    }
    explicit Permutation(std::vector<int> arr) : arrangement(std::move(arr)) {}

    int n() const { return static_cast<int>(arrangement.size()); }
    int label_at(int location) const { return arrangement.at(location); }

    /// Location of a label (linear scan; decks here are small or the caller
    /// maintains its own inverse).
    int location_of(int label) const;

    bool operator==(const Permutation& o) const = default;
    bool is_valid() const;
};

/// How the two operands of a transposition are interpreted.
enum class TranspositionKind {
    location_location,  ///< swap the contents of two locations
    label_location,     ///< move a label to a location, displaced label goes back
    label_label,        ///< exchange the locations of two labels
};

struct Transposition {
    TranspositionKind kind;
    int first;
    int second;
};

inline Transposition loc_loc(int i, int j) { return {TranspositionKind::location_location, i, j}; }
inline Transposition label_loc(int a, int i) { return {TranspositionKind::label_location, a, i}; }
inline Transposition label_label(int a, int b) { return {TranspositionKind::label_label, a, b}; }

/// Multiset of cycle lengths, sorted descending; sums to n.
using CycleType = std::vector<int>;

/// Applies a transposition, returning a new deck (input untouched).
Permutation apply(const Permutation& p, const Transposition& t);

/// In-place variant with the identical contract, for hot loops.
void apply_inplace(Permutation& p, const Transposition& t);

/// Canonical cycle type (descending lengths).
CycleType cycle_type(const Permutation& p);

/// Minimum number of transpositions to sort: n minus the number of cycles.
int weight(const Permutation& p);

/// Locations where the two decks hold different cards.
std::vector<int> discrepancies(const Permutation& a, const Permutation& b);

/// Exactly uniform over S_n (Fisher-Yates), deterministic given the stream.
Permutation random_uniform(int n, Rng& rng);

}  // namespace tshuffle
