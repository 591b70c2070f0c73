#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tshuffle {

/// splitmix64 step; used to derive independent per-replicate seeds from a
/// master seed so replicate results do not depend on scheduling order.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic random stream. All draws go through explicit conversions
/// (never std distributions, whose output is implementation-defined) so
/// results are bit-identical for a given seed on any conforming platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Stream for replicate `rep` of a run seeded with `master`.
    static Rng for_replicate(std::uint64_t master, std::uint64_t rep) {
        std::uint64_t s = master;
        std::uint64_t a = splitmix64(s);
        s = master ^ (rep * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
        std::uint64_t b = splitmix64(s);
        return Rng(a ^ (b + 0x165667b19e3779f9ULL + (rep << 1)));
    }

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in {0, .., n-1}, bias-free by rejection.
    int uniform_int(int n) {
        const std::uint64_t bound = ~0ULL - ~0ULL % static_cast<std::uint64_t>(n);
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= bound);
        return static_cast<int>(v % static_cast<std::uint64_t>(n));
    }

    /// Exponential with the given rate (mean 1/rate).
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
    std::mt19937_64 eng_;
};

}  // namespace tshuffle
