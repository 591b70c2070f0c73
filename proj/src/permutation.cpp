#include "tshuffle/permutation.hpp"

#include <algorithm>

namespace tshuffle {

int Permutation::location_of(int label) const {
    for (int i = 0; i < n(); ++i)
        if (arrangement[i] == label) return i;
    throw std::invalid_argument("label out of range");
}

bool Permutation::is_valid() const {
    std::vector<char> seen(arrangement.size(), 0);
    for (int v : arrangement) {
        if (v < 0 || v >= n() || seen[v]) return false;
        seen[v] = 1;
    }
    return n() >= 1;
}

static void check_operand(int v, int n) {
    if (v < 0 || v >= n) throw std::invalid_argument("transposition operand out of range");
}

void apply_inplace(Permutation& p, const Transposition& t) {
    const int n = p.n();
    check_operand(t.first, n);
    check_operand(t.second, n);
    int i, j;
    switch (t.kind) {
        case TranspositionKind::location_location:
            i = t.first;
            j = t.second;
            break;
        case TranspositionKind::label_location:
            i = p.location_of(t.first);
            j = t.second;
            break;
        case TranspositionKind::label_label:
            i = p.location_of(t.first);
            j = p.location_of(t.second);
            break;
        default:
            throw std::invalid_argument("bad kind");
    }
    std::swap(p.arrangement[i], p.arrangement[j]);
}

Permutation apply(const Permutation& p, const Transposition& t) {
    Permutation out = p;
    apply_inplace(out, t);
    return out;
}

CycleType cycle_type(const Permutation& p) {
    const int n = p.n();
    std::vector<char> seen(n, 0);
    CycleType parts;
    for (int start = 0; start < n; ++start) {
        if (seen[start]) continue;
        int len = 0;
        int cur = start;
        while (!seen[cur]) {
            seen[cur] = 1;
            cur = p.arrangement[cur];
            ++len;
        }
        parts.push_back(len);
    }
    std::sort(parts.begin(), parts.end(), std::greater<int>());
    return parts;
}

int weight(const Permutation& p) {
    return p.n() - static_cast<int>(cycle_type(p).size());
}

std::vector<int> discrepancies(const Permutation& a, const Permutation& b) {
    if (a.n() != b.n()) throw std::invalid_argument("deck size mismatch");
    std::vector<int> out;
    for (int i = 0; i < a.n(); ++i)
        if (a.arrangement[i] != b.arrangement[i]) out.push_back(i);
    return out;
}

Permutation random_uniform(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    Permutation p(n);
    for (int i = n - 1; i > 0; --i) {
        int j = rng.uniform_int(i + 1);
        std::swap(p.arrangement[i], p.arrangement[j]);
    }
    return p;
}

}  // namespace tshuffle
