#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace tshuffle {

/// Exact rational scalar used for all kernels and total-variation values.
using Rat = mpq_class;

/// Exact rational from a possibly non-reduced fraction. The two-argument
/// mpq_class constructor leaves values non-canonical, which breaks equality
/// comparisons; always build fractions through this helper.
template <typename N, typename D>
inline Rat make_rat(const N& num, const D& den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

/// Renders a rational as "p/q" ("p" when the denominator is 1).
inline std::string rat_to_string(const Rat& r) {
    Rat c = r;
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

using RatVec = std::vector<Rat>;
using RatMatrix = std::vector<RatVec>;

/// Half the L1 distance between two exact distributions on the same space.
Rat tv_exact(const RatVec& p, const RatVec& q);

}  // namespace tshuffle
