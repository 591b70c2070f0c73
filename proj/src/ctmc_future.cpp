#include "tshuffle/ctmc_future.hpp"

#include <cmath>
#include <stdexcept>

namespace tshuffle {

std::vector<std::vector<double>> build_toy_generator() {
    std::vector<std::vector<double>> g(6, std::vector<double>(6, 0.0));
    for (int i = 0; i < 6; ++i) {
        ToyState s = toy_state(i);
        g[i][toy_index({1 - s.x, s.y})] = 10.0;
        g[i][toy_index({1 - s.x, (s.y + 1) % 3})] = 1.0;
        g[i][toy_index({1 - s.x, (s.y + 2) % 3})] = 1.0;
        g[i][i] = -12.0;
    }
    return g;
}

ToyTrajectory simulate_toy(const ToyState& start, double horizon, Rng& rng) {
    if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    ToyTrajectory traj;
    traj.emplace_back(0.0, start);
    ToyState cur = start;
    double t = rng.exponential(12.0);
    while (t <= horizon) {
        double u = rng.uniform();
        if (u < 10.0 / 12.0) {
            cur = {1 - cur.x, cur.y};
        } else if (u < 11.0 / 12.0) {
            cur = {1 - cur.x, (cur.y + 1) % 3};
        } else {
            cur = {1 - cur.x, (cur.y + 2) % 3};
        }
        traj.emplace_back(t, cur);
        t += rng.exponential(12.0);
    }
    // End marker for occupancy accounting (skipped when nothing happened).
    if (traj.back().first < horizon) traj.emplace_back(horizon, cur);
    return traj;
}

std::vector<double> toy_law(const ToyState& start, double t) {
    auto g = build_toy_generator();
    // Uniformized kernel K = I + G/12; P(t) = sum Pois(12t, k) K^k.
    std::vector<std::vector<double>> k(6, std::vector<double>(6, 0.0));
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) k[i][j] = (i == j ? 1.0 : 0.0) + g[i][j] / 12.0;
    std::vector<double> power(6, 0.0);
    power[toy_index(start)] = 1.0;
    std::vector<double> out(6, 0.0);
    double w = std::exp(-12.0 * t);
    double acc = w;
    for (int i = 0; i < 6; ++i) out[i] += w * power[i];
    for (int step = 1; acc < 1.0 - 1e-14 && step < 100000; ++step) {
        std::vector<double> next(6, 0.0);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) next[j] += power[i] * k[i][j];
        power = std::move(next);
        w *= 12.0 * t / step;
        acc += w;
        for (int i = 0; i < 6; ++i) out[i] += w * power[i];
    }
    return out;
}

ToyCouplingRun naive_coupling_run(const ToyState& s, const ToyState& s2, Rng& rng) {
    ToyCouplingRun run;
    run.first.emplace_back(0.0, s);
    run.second.emplace_back(0.0, s2);
    ToyState a = s, b = s2;
    double t = 0.0;
    while (!(a == b)) {
        double tx = rng.exponential(20.0);
        double ty = rng.exponential(3.0);
        if (tx < ty) {
            t += tx;
            int u = rng.uniform_int(2);
            a.x = u;
            b.x = u;
        } else {
            t += ty;
            int r = rng.uniform_int(3);
            if (a.y != r) {
                a.y = r;
                a.x = 1 - a.x;
            }
            if (b.y != r) {
                b.y = r;
                b.x = 1 - b.x;
            }
        }
        run.first.emplace_back(t, a);
        run.second.emplace_back(t, b);
    }
    run.coupling_time = t;
    run.first.emplace_back(t, a);
    run.second.emplace_back(t, b);
    return run;
}

double naive_coupling(const ToyState& s, const ToyState& s2, Rng& rng) {
    return naive_coupling_run(s, s2, rng).coupling_time;
}

ToyCouplingRun future_coupling_run(const ToyState& s, const ToyState& s2, Rng& rng) {
    ToyCouplingRun run;
    run.first.emplace_back(0.0, s);
    run.second.emplace_back(0.0, s2);
    if (s == s2) {
        return run;
    }
    ToyState a = s, b = s2;
    const double t2 = rng.exponential(3.0);
    const int r = rng.uniform_int(3);
    const bool flip_pair = (s.y != s2.y) && (r == s.y || r == s2.y);
    const double t1 = rng.exponential(20.0);
    const double t_couple = std::max(t1, t2);
    double x_next = t1;
    double y_next = t2;
    bool first_y = true;
    while (std::min(x_next, y_next) <= t_couple) {
        if (x_next < y_next) {
            const double t = x_next;
            int u = rng.uniform_int(2);
            a.x = u;
            b.x = (flip_pair && t < t2) ? 1 - u : u;
            run.first.emplace_back(t, a);
            run.second.emplace_back(t, b);
            x_next += rng.exponential(20.0);
        } else {
            const double t = y_next;
            const int rr = first_y ? r : rng.uniform_int(3);
            first_y = false;
            if (a.y != rr) {
                a.y = rr;
                a.x = 1 - a.x;
            }
            if (b.y != rr) {
                b.y = rr;
                b.x = 1 - b.x;
            }
            run.first.emplace_back(t, a);
            run.second.emplace_back(t, b);
            y_next += rng.exponential(3.0);
        }
    }
    run.coupling_time = t_couple;
    run.first.emplace_back(t_couple, a);
    run.second.emplace_back(t_couple, b);
    return run;
}

double future_coupling(const ToyState& s, const ToyState& s2, Rng& rng) {
    if (s == s2) return 0.0;
    const double t2 = rng.exponential(3.0);
    const double t1 = rng.exponential(20.0);
    return std::max(t1, t2);
}

std::vector<std::vector<double>> estimate_generator(const std::vector<ToyTrajectory>& trajs,
                                                    double /*unused_horizon*/) {
    std::vector<double> occupancy(6, 0.0);
    std::vector<std::vector<double>> counts(6, std::vector<double>(6, 0.0));
    for (const ToyTrajectory& traj : trajs) {
        for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
            int from = toy_index(traj[i].second);
            occupancy[from] += traj[i + 1].first - traj[i].first;
            int to = toy_index(traj[i + 1].second);
            if (to != from) counts[from][to] += 1.0;
        }
    }
    std::vector<std::vector<double>> rates(6, std::vector<double>(6, 0.0));
    for (int i = 0; i < 6; ++i) {
        double total = 0.0;
        for (int j = 0; j < 6; ++j) {
            if (j == i || occupancy[i] == 0.0) continue;
            rates[i][j] = counts[i][j] / occupancy[i];
            total += rates[i][j];
        }
        rates[i][i] = -total;
    }
    return rates;
}

}  // namespace tshuffle
