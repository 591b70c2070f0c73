#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tshuffle/ctmc_future.hpp"
#include "tshuffle/rng.hpp"

using namespace tshuffle;

TEST_CASE("toy generator table") {
    const auto g = build_toy_generator();
    REQUIRE(g.size() == 6);
    CHECK(g[toy_index({0, 0})][toy_index({1, 0})] == 10.0);  // lone bit flip
    CHECK(g[toy_index({0, 1})][toy_index({1, 0})] == 1.0);   // shift with forced flip
    CHECK(g[toy_index({0, 1})][toy_index({1, 2})] == 1.0);
    CHECK(g[toy_index({0, 1})][toy_index({0, 0})] == 0.0);  // no lone shift
    for (int i = 0; i < 6; ++i) {
        CHECK(g[i][i] == -12.0);
        double row = 0;
        for (int j = 0; j < 6; ++j) row += g[i][j];
        CHECK(row == doctest::Approx(0.0));
    }
}

TEST_CASE("toy trajectory basics and uniform occupancy") {
    Rng rng(21);
    const auto still = simulate_toy({0, 0}, 0.0, rng);
    REQUIRE(still.size() == 1);
    CHECK(still[0].second == ToyState{0, 0});

    // Long-run occupancy is uniform (doubly stochastic generator).
    const double horizon = 20000.0;
    const auto traj = simulate_toy({0, 0}, horizon, rng);
    std::vector<double> occupancy(6, 0.0);
    for (std::size_t i = 0; i + 1 < traj.size(); ++i)
        occupancy[toy_index(traj[i].second)] += traj[i + 1].first - traj[i].first;
    occupancy[toy_index(traj.back().second)] += horizon - traj.back().first;
    for (double o : occupancy) CHECK(std::abs(o / horizon - 1.0 / 6) < 0.02);
}

TEST_CASE("toy law at t=0.2 matches the simulation within TV 0.02") {
    const std::vector<double> law = toy_law({0, 0}, 0.2);
    double sum = 0;
    for (double w : law) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));

    const int reps = 100000;
    std::vector<long long> counts(6, 0);
    for (int i = 0; i < reps; ++i) {
        Rng rng = Rng::for_replicate(2200, static_cast<std::uint64_t>(i));
        ++counts[toy_index(simulate_toy({0, 0}, 0.2, rng).back().second)];
    }
    double tv = 0;
    for (int s = 0; s < 6; ++s) tv += std::abs(counts[s] / double(reps) - law[s]);
    CHECK(tv / 2 < 0.02);
}

TEST_CASE("empirical generator estimate from raw trajectories") {
    Rng rng(23);
    std::vector<ToyTrajectory> trajs;
    const double horizon = 900.0;
    for (int i = 0; i < 100; ++i) trajs.push_back(simulate_toy({0, 0}, horizon, rng));
    const auto est = estimate_generator(trajs, horizon);
    const auto g = build_toy_generator();
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            if (i == j) continue;
            if (g[i][j] == 0.0)
                CHECK(est[i][j] == 0.0);
            else
                CHECK(std::abs(est[i][j] - g[i][j]) < 0.05 * g[i][j]);
        }
}

TEST_CASE("equal starts couple immediately") {
    Rng rng(29);
    CHECK(naive_coupling({1, 2}, {1, 2}, rng) == 0.0);
    CHECK(future_coupling({1, 2}, {1, 2}, rng) == 0.0);
}

TEST_CASE("future coupling time is exactly max of the two pre-drawn clocks") {
    // Its distribution must equal max{Exp(20), Exp(3)}; compare the empirical
    // CDF with the closed form F(t) = (1 - e^{-20 t})(1 - e^{-3 t}).
    const int reps = 1000000;
    std::vector<double> times(reps);
    for (int i = 0; i < reps; ++i) {
        Rng rng = Rng::for_replicate(2900, static_cast<std::uint64_t>(i));
        times[i] = future_coupling({0, 0}, {1, 1}, rng);
    }
    std::sort(times.begin(), times.end());
    double ks = 0;
    for (int i = 0; i < reps; ++i) {
        const double f = (1 - std::exp(-20 * times[i])) * (1 - std::exp(-3 * times[i]));
        ks = std::max(ks, std::abs(f - (i + 1.0) / reps));
        ks = std::max(ks, std::abs(f - i / double(reps)));
    }
    CHECK(ks < 0.01);

    const double mean =
        std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(reps);
    CHECK(std::abs(mean - (1.0 / 20 + 1.0 / 3 - 1.0 / 23)) < 0.01 * (1.0 / 20 + 1.0 / 3 - 1.0 / 23));
}

TEST_CASE("coupled runs stay together after the coupling time") {
    for (int i = 0; i < 200; ++i) {
        Rng rng = Rng::for_replicate(3100, static_cast<std::uint64_t>(i));
        const ToyCouplingRun run = naive_coupling_run({0, 0}, {1, 2}, rng);
        auto state_at = [](const ToyTrajectory& traj, double t) {
            ToyState s = traj.front().second;
            for (const auto& [time, st] : traj) {
                if (time > t) break;
                s = st;
            }
            return s;
        };
        for (double dt : {0.0, 0.05, 0.5, 2.0}) {
            const double t = run.coupling_time + dt;
            CHECK(state_at(run.first, t) == state_at(run.second, t));
        }
    }
}

TEST_CASE("naive coupling's marginals still follow the toy generator") {
    // Each run is short (it stops at coupling), so pool many of them; the
    // jump-count / occupancy estimator stays unbiased under stopping. Cycle
    // the start pair so every state accumulates enough occupancy.
    Rng rng(37);
    std::vector<ToyTrajectory> trajs;
    for (int i = 0; i < 150000; ++i) {
        const ToyState s = toy_state(i % 6);
        const ToyState s2 = toy_state((i % 6 + 1 + i % 5) % 6);
        ToyCouplingRun run = naive_coupling_run(s, s2, rng);
        trajs.push_back(std::move(run.first));
        trajs.push_back(std::move(run.second));
    }
    const auto est = estimate_generator(trajs, 0.0);
    const auto g = build_toy_generator();
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            if (i == j || g[i][j] == 0.0) continue;
            CHECK(std::abs(est[i][j] - g[i][j]) < 0.05 * g[i][j]);
        }
}
