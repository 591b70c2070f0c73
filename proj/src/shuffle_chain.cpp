#include "tshuffle/shuffle_chain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace tshuffle {

Rat tv_exact(const RatVec& p, const RatVec& q) {
    if (p.size() != q.size()) throw std::invalid_argument("state space mismatch");
    Rat s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += abs(p[i] - q[i]);
    return s / 2;
}

Permutation step(const Permutation& p, Rng& rng) {
    const int n = p.n();
    int a = rng.uniform_int(n);
    int b = rng.uniform_int(n);
    return apply(p, label_label(a, b));
}

std::vector<std::pair<double, Permutation>> simulate_poissonized(const Permutation& p0,
                                                                 double horizon, Rng& rng) {
    if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    std::vector<std::pair<double, Permutation>> traj;
    traj.emplace_back(0.0, p0);
    double t = rng.exponential(1.0);
    Permutation cur = p0;
    while (t <= horizon) {
        cur = step(cur, rng);
        traj.emplace_back(t, cur);
        t += rng.exponential(1.0);
    }
    return traj;
}

std::uint64_t factorial(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

std::uint64_t perm_rank(const Permutation& p) {
    const int n = p.n();
    std::uint64_t rank = 0;
    for (int i = 0; i < n; ++i) {
        int smaller = 0;
        for (int j = i + 1; j < n; ++j)
            if (p.arrangement[j] < p.arrangement[i]) ++smaller;
        rank += static_cast<std::uint64_t>(smaller) * factorial(n - 1 - i);
    }
    return rank;
}

Permutation perm_unrank(int n, std::uint64_t rank) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    std::vector<int> arr(n);
    for (int i = 0; i < n; ++i) {
        std::uint64_t f = factorial(n - 1 - i);
        int idx = static_cast<int>(rank / f);
        rank %= f;
        arr[i] = pool[idx];
        pool.erase(pool.begin() + idx);
    }
    return Permutation(arr);
}

FullKernel build_full_kernel(int n) {
    if (n < 1 || n > 7) throw std::length_error("full kernel bounded at n <= 7");
    const std::uint64_t count = factorial(n);
    FullKernel k;
    k.n = n;
    k.rows.resize(count);
    for (std::uint64_t r = 0; r < count; ++r) {
        Permutation p = perm_unrank(n, r);
        std::map<int, int> acc;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                acc[static_cast<int>(perm_rank(apply(p, label_label(a, b))))] += 1;
        k.rows[r].assign(acc.begin(), acc.end());
    }
    return k;
}

RatMatrix full_kernel_dense(const FullKernel& k) {
    if (k.n > 5) throw std::length_error("dense view bounded at n <= 5");
    const std::size_t m = k.rows.size();
    RatMatrix out(m, RatVec(m, Rat(0)));
    const long denom = static_cast<long>(k.n) * k.n;
    for (std::size_t r = 0; r < m; ++r)
        for (auto [c, cnt] : k.rows[r]) out[r][c] = make_rat(cnt, denom);
    return out;
}

static void partitions_rec(int remaining, int max_part, CycleType& cur,
                           std::vector<CycleType>& out) {
    if (remaining == 0) {
        out.push_back(cur);
        return;
    }
    for (int part = std::min(remaining, max_part); part >= 1; --part) {
        cur.push_back(part);
        partitions_rec(remaining - part, part, cur, out);
        cur.pop_back();
    }
}

std::vector<CycleType> partitions(int n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    std::vector<CycleType> out;
    CycleType cur;
    partitions_rec(n, n, cur, out);
    return out;
}

mpz_class class_size(const CycleType& type, int n) {
    mpz_class fact;
    mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(n));
    mpz_class denom = 1;
    int run = 0;
    for (std::size_t i = 0; i < type.size(); ++i) {
        denom *= type[i];
        run = (i > 0 && type[i] == type[i - 1]) ? run + 1 : 1;
        denom *= run;
    }
    return fact / denom;
}

int LumpedKernel::class_index(const CycleType& t) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i] == t) return static_cast<int>(i);
    throw std::invalid_argument("unknown cycle type");
}

RatVec LumpedKernel::stationary() const {
    mpz_class fact;
    mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(n));
    RatVec pi(classes.size());
    for (std::size_t i = 0; i < classes.size(); ++i) pi[i] = make_rat(sizes[i], fact);
    return pi;
}

LumpedKernel build_lumped_kernel(int n) {
    if (n < 1 || n > 40) throw std::length_error("lumped kernel bounded at n <= 40");
    LumpedKernel k;
    k.n = n;
    k.classes = partitions(n);
    std::map<CycleType, int> index;
    for (std::size_t i = 0; i < k.classes.size(); ++i) {
        k.sizes.push_back(class_size(k.classes[i], n));
        index[k.classes[i]] = static_cast<int>(i);
    }
    const long denom = static_cast<long>(n) * n;
    k.matrix.assign(k.classes.size(), RatVec(k.classes.size(), Rat(0)));
    for (std::size_t ci = 0; ci < k.classes.size(); ++ci) {
        const CycleType& type = k.classes[ci];
        RatVec& row = k.matrix[ci];
        // Swapping a label with itself: n of the n^2 picks change nothing.
        row[ci] += make_rat(n, denom);
        // Two labels in the same cycle of the representative: the cycle of
        // length L splits into (g, L-g), where g is the directed distance
        // between the picks; each (cycle, g) pattern arises from L ordered
        // pairs.
        for (std::size_t i = 0; i < type.size(); ++i) {
            const int L = type[i];
            for (int g = 1; g < L; ++g) {
                CycleType next = type;
                next.erase(next.begin() + static_cast<long>(i));
                next.push_back(g);
                next.push_back(L - g);
                std::sort(next.begin(), next.end(), std::greater<int>());
                row[index.at(next)] += make_rat(L, denom);
            }
        }
        // Labels in two different cycles merge them; 2*L1*L2 ordered pairs.
        for (std::size_t i = 0; i < type.size(); ++i)
            for (std::size_t j = i + 1; j < type.size(); ++j) {
                CycleType next = type;
                next[i] = type[i] + type[j];
                next.erase(next.begin() + static_cast<long>(j));
                std::sort(next.begin(), next.end(), std::greater<int>());
                row[index.at(next)] += make_rat(2L * type[i] * type[j], denom);
            }
    }
    return k;
}

std::vector<std::pair<int, Rat>> tv_curve(int n, int horizon) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    LumpedKernel k = build_lumped_kernel(n);
    RatVec pi = k.stationary();
    CycleType id(static_cast<std::size_t>(n), 1);
    RatVec v(k.classes.size(), Rat(0));
    v[static_cast<std::size_t>(k.class_index(id))] = 1;
    std::vector<std::pair<int, Rat>> curve;
    for (int m = 1; m <= horizon; ++m) {
        RatVec next(v.size(), Rat(0));
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] == 0) continue;
            for (std::size_t j = 0; j < v.size(); ++j) next[j] += v[i] * k.matrix[i][j];
        }
        v = std::move(next);
        curve.emplace_back(m, tv_exact(v, pi));
    }
    return curve;
}

int mixing_time(int n, double threshold) {
    if (threshold <= 0 || threshold >= 1) throw std::invalid_argument("threshold in (0,1)");
    const int cap = static_cast<int>(8.0 * n * std::log(std::max(2, n))) + 64;
    LumpedKernel k = build_lumped_kernel(n);
    RatVec pi = k.stationary();
    CycleType id(static_cast<std::size_t>(n), 1);
    RatVec v(k.classes.size(), Rat(0));
    v[static_cast<std::size_t>(k.class_index(id))] = 1;
    if (tv_exact(v, pi).get_d() < threshold) return 0;
    for (int m = 1; m <= cap; ++m) {
        RatVec next(v.size(), Rat(0));
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] == 0) continue;
            for (std::size_t j = 0; j < v.size(); ++j) next[j] += v[i] * k.matrix[i][j];
        }
        v = std::move(next);
        if (tv_exact(v, pi).get_d() < threshold) return m;
    }
    throw std::length_error("mixing_time cap exceeded");
}

std::vector<double> poissonized_law(const FullKernel& k, std::uint64_t start_rank, double t) {
    const std::size_t m = k.rows.size();
    const double denom = static_cast<double>(k.n) * k.n;
    std::vector<double> power(m, 0.0);
    power[start_rank] = 1.0;
    std::vector<double> out(m, 0.0);
    double pois = std::exp(-t);  // Poisson(t) weight of count 0
    double acc = pois;
    for (std::size_t i = 0; i < m; ++i) out[i] += pois * power[i];
    for (int step = 1; acc < 1.0 - 1e-14; ++step) {
        std::vector<double> next(m, 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            if (power[r] == 0.0) continue;
            for (auto [c, cnt] : k.rows[r]) next[c] += power[r] * cnt / denom;
        }
        power = std::move(next);
        pois *= t / step;
        acc += pois;
        for (std::size_t i = 0; i < m; ++i) out[i] += pois * power[i];
        if (step > 1000000) throw std::length_error("series truncation failed");
    }
    return out;
}

double tv_double(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("state space mismatch");
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
    return s / 2;
}

}  // namespace tshuffle
