#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tshuffle/permutation.hpp"
#include "tshuffle/rational.hpp"
#include "tshuffle/rng.hpp"

namespace tshuffle {

/// One discrete shuffle step: two labels drawn uniformly with replacement
/// are interchanged (no-op with probability 1/n).
Permutation step(const Permutation& p, Rng& rng);

/// Continuous-time run: events arrive as a rate-1 Poisson process and each
/// applies the step rule. Equivalently each unordered pair of labels fires
/// at rate 2/n^2 and each no-op pick at 1/n^2. Trajectory starts at (0, p0).
std::vector<std::pair<double, Permutation>> simulate_poissonized(const Permutation& p0,
                                                                 double horizon, Rng& rng);

std::uint64_t factorial(int n);

/// Lexicographic rank of the arrangement among all n! arrangements.
std::uint64_t perm_rank(const Permutation& p);
Permutation perm_unrank(int n, std::uint64_t rank);

/// Exact transition matrix over all of S_n, stored sparsely: row entries are
/// (column, count) with probability count/n^2. States are in lexicographic
/// arrangement order. Bounded at n <= 7 (5040 states).
struct FullKernel {
    int n = 0;
    std::vector<std::vector<std::pair<int, int>>> rows;

    std::uint64_t size() const { return rows.size(); }
};

FullKernel build_full_kernel(int n);

/// Dense exact-rational view of a full kernel (n <= 5 to bound memory).
RatMatrix full_kernel_dense(const FullKernel& k);

/// All partitions of n in descending lexicographic order, each partition in
/// descending part order. The identity class [1,1,...,1] is last.
std::vector<CycleType> partitions(int n);

/// Number of permutations with the given cycle type.
mpz_class class_size(const CycleType& type, int n);

/// Exact chain on conjugacy classes (cycle types). Row-stochastic; for a
/// start at the identity this lumping loses nothing.
struct LumpedKernel {
    int n = 0;
    std::vector<CycleType> classes;
    std::vector<mpz_class> sizes;
    RatMatrix matrix;

    int class_index(const CycleType& t) const;
    /// Stationary (uniform-on-S_n) mass of each class.
    RatVec stationary() const;
};

/// Classifies all n^2 equally likely picks applied to a canonical class
/// representative (cycles in descending length on consecutive locations);
/// the result is representative-independent. Bounded at n <= 40.
LumpedKernel build_lumped_kernel(int n);

/// Exact TV between the m-step class distribution from the identity and the
/// uniform distribution, for m = 1..horizon.
std::vector<std::pair<int, Rat>> tv_curve(int n, int horizon);

/// Smallest m whose tv_curve value is < threshold. Throws if not reached
/// within a generous cap (8 n ln n + 64 steps).
int mixing_time(int n, double threshold);

/// Distribution over S_n (lexicographic ranks, doubles) of the Poissonized
/// shuffle at time t from the given start; series truncated to 1e-14 tail.
std::vector<double> poissonized_law(const FullKernel& k, std::uint64_t start_rank, double t);

/// Half the L1 distance, double version, for Monte Carlo comparisons.
double tv_double(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace tshuffle
