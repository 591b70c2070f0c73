#include "tshuffle/acceptance.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "tshuffle/coupled.hpp"
#include "tshuffle/ctmc_future.hpp"
#include "tshuffle/harness.hpp"
#include "tshuffle/shuffle_chain.hpp"
#include "tshuffle/small_cases.hpp"
#include "tshuffle/stats.hpp"
#include "tshuffle/superfast.hpp"

namespace tshuffle {

namespace {

constexpr std::uint64_t kSeed = 0x5eed0acceb7a11ceULL;

/// Static deterministic partition of [0, total) over the worker pool; the
/// per-chunk results are merged in thread-id order, so outcomes do not
/// depend on scheduling.
void parallel_chunks(long long total,
                     const std::function<void(long long, long long, int)>& fn) {
    int nthreads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    nthreads = static_cast<int>(std::min<long long>(nthreads, std::max(1LL, total)));
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) {
        const long long b = total * t / nthreads;
        const long long e = total * (t + 1) / nthreads;
        pool.emplace_back(fn, b, e, t);
    }
    for (auto& th : pool) th.join();
}

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

CriterionResult c1() {
    CriterionResult r{1, "3-card matrix square identity", false, ""};
    r.pass = s3_square_check();
    r.detail = r.pass ? "M^2 == 9I + 12N exactly" : "integer mismatch";
    return r;
}

CriterionResult c2() {
    CriterionResult r{2, "3-card two-start TV at m=2", false, ""};
    Rat v = s3_max_tv_two_starts(2);
    r.pass = (v == Rat(1, 9));
    r.detail = "value " + rat_to_string(v) + ", expected 1/9";
    return r;
}

CriterionResult c3() {
    CriterionResult r{3, "3-card TV sandwich m=1..12", true, ""};
    Rat pow3 = 1;
    for (int m = 1; m <= 12; ++m) {
        pow3 *= 3;
        const Rat lo = Rat(1, 2) / pow3;
        const Rat hi = Rat(5, 2) / pow3;
        const Rat v = s3_tv(m);
        if (v < lo || v > hi) {
            r.pass = false;
            r.detail = "m=" + std::to_string(m) + " out of band: " + rat_to_string(v);
            return r;
        }
    }
    r.detail = "all 12 exact values inside [3^-m/2, 5*3^-m/2]";
    return r;
}

CriterionResult c4() {
    CriterionResult r{4, "four-state example and depth-2 tree coupling", false, ""};
    const Rat t1 = four_state_tv(1);
    const Rat t2 = four_state_tv(2);
    const Rat best = four_state_best_tree_coupling(2);
    r.pass = (t1 == 1) && (t2 == 0) && (best == Rat(1, 2));
    r.detail = "TV(1)=" + rat_to_string(t1) + " TV(2)=" + rat_to_string(t2) +
               " best depth-2 coupling=" + rat_to_string(best);
    return r;
}

CriterionResult c5() {
    CriterionResult r{5, "6-state coupling-to-the-future vs naive", false, ""};
    const long long reps = 1'000'000;
    const ToyState s{0, 0}, s2{1, 1};
    const double exact = 1.0 / 20 + 1.0 / 3 - 1.0 / 23;

    struct Acc {
        double sum = 0, sumsq = 0;
    };
    const int maxt = 256;
    std::vector<Acc> fut(maxt), nai(maxt);
    parallel_chunks(reps, [&](long long b, long long e, int tid) {
        for (long long i = b; i < e; ++i) {
            Rng rng = Rng::for_replicate(kSeed + 5, static_cast<std::uint64_t>(i));
            const double f = future_coupling(s, s2, rng);
            const double g = naive_coupling(s, s2, rng);
            fut[tid].sum += f;
            fut[tid].sumsq += f * f;
            nai[tid].sum += g;
            nai[tid].sumsq += g * g;
        }
    });
    double fs = 0, fss = 0, ns = 0, nss = 0;
    for (int t = 0; t < maxt; ++t) {
        fs += fut[t].sum;
        fss += fut[t].sumsq;
        ns += nai[t].sum;
        nss += nai[t].sumsq;
    }
    const double fn = static_cast<double>(reps);
    const double mf = fs / fn, mn = ns / fn;
    const double vf = fss / fn - mf * mf, vn = nss / fn - mn * mn;
    const double se = std::sqrt(vf / fn + vn / fn);
    const double z = (mn - mf) / se;
    const bool within = std::abs(mf - exact) < 0.01 * exact;
    r.pass = within && z > 5.0;
    r.detail = "future mean " + fmt(mf) + " (exact " + fmt(exact) + "), naive mean " + fmt(mn) +
               ", separation z=" + fmt(z);
    return r;
}

CriterionResult c6() {
    CriterionResult r{6, "baseline coupling scales as n^2", false, ""};
    ExperimentPlan plan;
    plan.strategy = Strategy::qp_baseline;
    plan.n_grid = {16, 32, 64, 128};
    plan.reps = 1000;
    plan.master_seed = kSeed + 6;
    ScalingResult sr = run_scaling(plan);
    std::vector<std::pair<double, double>> grid;
    for (const auto& s : sr.summaries) grid.emplace_back(s.n, s.coupling_time.mean);
    const FitResult fit = fit_power_law(grid);

    // d=2 start at n=64.
    const int n = 64;
    const long long reps = 3000;
    CouplingConfig cfg;
    cfg.n = n;
    Permutation b0(n);
    std::swap(b0.arrangement[0], b0.arrangement[1]);
    std::vector<double> sums(256, 0.0);
    parallel_chunks(reps, [&](long long b, long long e, int tid) {
        for (long long i = b; i < e; ++i) {
            Rng rng = Rng::for_replicate(kSeed + 60, static_cast<std::uint64_t>(i));
            sums[tid] += couple_qp_baseline(init(cfg, b0), cfg, rng).coupling_time;
        }
    });
    double total = 0;
    for (double s : sums) total += s;
    const double mean = total / static_cast<double>(reps);
    const double target = n * n / 4.0;

    const bool exp_ok = std::abs(fit.exponent - 2.0) <= 0.15;
    const bool mean_ok = std::abs(mean - target) <= 0.10 * target;
    r.pass = exp_ok && mean_ok;
    r.detail = "exponent " + fmt(fit.exponent) + " (want 2.0 +- 0.15); d=2 mean " + fmt(mean) +
               " vs " + fmt(target) + " +- 10%";
    return r;
}

CriterionResult c7() {
    CriterionResult r{7, "single-map round success probability", true, ""};
    std::ostringstream detail;
    for (const int n : {64, 256}) {
        const long long reps = 100'000;
        CouplingConfig cfg;
        cfg.n = n;
        Permutation b0(n);
        std::swap(b0.arrangement[0], b0.arrangement[1]);
        const CoupledDecks state = init(cfg, b0);
        std::vector<long long> wins(256, 0);
        parallel_chunks(reps, [&](long long b, long long e, int tid) {
            for (long long i = b; i < e; ++i) {
                Rng rng = Rng::for_replicate(kSeed + 7 + n, static_cast<std::uint64_t>(i));
                if (superfast_d2_k1_round(state, rng).coupled) ++wins[tid];
            }
        });
        long long w = 0;
        for (long long x : wins) w += x;
        const double phat = static_cast<double>(w) / static_cast<double>(reps);
        const double p = d2_k1_success_formula(n);
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
        if (std::abs(phat - p) > 3.0 * sigma) r.pass = false;
        if (n == 256 && (n * phat < 6.5 || n * phat > 9.0)) r.pass = false;
        detail << "n=" << n << ": phat " << fmt(phat) << " vs " << fmt(p) << " (3sigma "
               << fmt(3 * sigma) << ")";
        if (n == 256) detail << ", n*phat " << fmt(n * phat);
        detail << "; ";
    }
    r.detail = detail.str();
    return r;
}

CriterionResult c8() {
    CriterionResult r{8, "map-chain coupling scales as C n log n with C < 6", false, ""};
    ExperimentPlan plan;
    plan.strategy = Strategy::superfast;
    plan.n_grid = {32, 64, 128, 256, 512};
    plan.reps = 200;
    plan.epsilon = 0.2;
    plan.kappa = 0.5;
    plan.master_seed = kSeed + 8;
    ScalingResult sr = run_scaling(plan);
    long long cap_errors = 0;
    std::vector<std::pair<double, double>> grid;
    for (const auto& s : sr.summaries) {
        grid.emplace_back(s.n, s.coupling_time.mean);
        cap_errors += s.capacity_errors;
    }
    const FitResult nlogn = fit_n_log_n(grid);
    const FitResult quad = fit_quadratic(grid);
    r.pass = cap_errors == 0 && nlogn.rms_log_residual < quad.rms_log_residual &&
             nlogn.constant < 6.0;
    r.detail = "C=" + fmt(nlogn.constant) + ", rms(n log n)=" + fmt(nlogn.rms_log_residual) +
               " vs rms(n^2)=" + fmt(quad.rms_log_residual) +
               ", capacity errors=" + std::to_string(cap_errors);
    return r;
}

Permutation reverse_permutation(int n) {
    Permutation p(n);
    for (int i = 0; i < n; ++i) p.arrangement[i] = n - 1 - i;
    return p;
}

CriterionResult c9() {
    CriterionResult r{9, "marginal faithfulness of every strategy", true, ""};
    std::ostringstream detail;
    double worst_tv = 0.0;
    const long long reps = 100'000;
    for (const int n : {3, 4, 5}) {
        const FullKernel kernel = build_full_kernel(n);
        const Permutation b0 = reverse_permutation(n);
        const std::uint64_t rank_b = perm_rank(b0);
        CouplingConfig cfg;
        cfg.n = n;
        for (const Strategy strat :
             {Strategy::qp_baseline, Strategy::two_phase, Strategy::superfast}) {
            cfg.strategy = strat;
            for (const double t : {0.5, 1.0, 2.0, 4.0}) {
                const std::vector<double> law_a = poissonized_law(kernel, 0, t);
                const std::vector<double> law_b = poissonized_law(kernel, rank_b, t);
                const std::size_t states = law_a.size();
                std::vector<std::vector<long long>> ha(256), hb(256);
                parallel_chunks(reps, [&](long long b, long long e, int tid) {
                    ha[tid].assign(states, 0);
                    hb[tid].assign(states, 0);
                    for (long long i = b; i < e; ++i) {
                        Rng rng = Rng::for_replicate(
                            kSeed + 9000 + n * 100 + static_cast<int>(strat) * 10 +
                                static_cast<int>(t * 2),
                            static_cast<std::uint64_t>(i));
                        CoupledDecks out;
                        if (strat == Strategy::superfast)
                            out = superfast_run_horizon(cfg, b0, t, rng);
                        else
                            out = run_baseline_horizon(strat, init(cfg, b0), cfg, t, rng);
                        ++ha[tid][perm_rank(out.deck_a)];
                        ++hb[tid][perm_rank(out.deck_b)];
                    }
                });
                std::vector<long long> ca(states, 0), cb(states, 0);
                for (int tid = 0; tid < 256; ++tid) {
                    if (ha[tid].empty()) continue;
                    for (std::size_t s = 0; s < states; ++s) {
                        ca[s] += ha[tid][s];
                        cb[s] += hb[tid][s];
                    }
                }
                double tva = 0, tvb = 0;
                for (std::size_t s = 0; s < states; ++s) {
                    tva += std::abs(static_cast<double>(ca[s]) / reps - law_a[s]);
                    tvb += std::abs(static_cast<double>(cb[s]) / reps - law_b[s]);
                }
                tva /= 2;
                tvb /= 2;
                worst_tv = std::max({worst_tv, tva, tvb});
                if (tva >= 0.02 || tvb >= 0.02) {
                    r.pass = false;
                    detail << "FAIL " << strategy_name(strat) << " n=" << n << " t=" << t
                           << " tv=(" << fmt(tva) << "," << fmt(tvb) << "); ";
                }
            }
        }
    }

    // Rate-1 inter-arrival law of one marginal of the map-chain engine.
    const int n = 5;
    const double horizon = 2200.0;
    const long long runs = 460;
    CouplingConfig cfg;
    cfg.n = n;
    const Permutation b0 = reverse_permutation(n);
    std::vector<std::vector<double>> gap_chunks(256);
    parallel_chunks(runs, [&](long long b, long long e, int tid) {
        for (long long i = b; i < e; ++i) {
            Rng rng = Rng::for_replicate(kSeed + 99, static_cast<std::uint64_t>(i));
            Trace trace;
            superfast_run_horizon(cfg, b0, horizon, rng, &trace);
            double prev = 0.0;
            for (const auto& ev : trace.a) {
                gap_chunks[tid].push_back(ev.time - prev);
                prev = ev.time;
            }
        }
    });
    std::vector<double> gaps;
    for (auto& c : gap_chunks) gaps.insert(gaps.end(), c.begin(), c.end());
    const double ks = ks_distance_exp1(std::move(gaps));
    if (ks >= 0.01) r.pass = false;
    detail << "worst marginal tv " << fmt(worst_tv) << " (limit 0.02); inter-arrival KS " << fmt(ks)
           << " (limit 0.01)";
    r.detail = detail.str();
    return r;
}

CriterionResult c10() {
    CriterionResult r{10, "structural invariants", true, ""};
    std::ostringstream detail;

    // Simultaneous label-to-label picks never change the discrepancy count.
    {
        Rng rng(kSeed + 10);
        const int n = 8;
        bool ok = true;
        for (long long i = 0; i < 1'000'000 && ok; ++i) {
            Permutation a = random_uniform(n, rng);
            Permutation b = random_uniform(n, rng);
            const int before = static_cast<int>(discrepancies(a, b).size());
            const Transposition t = label_label(rng.uniform_int(n), rng.uniform_int(n));
            apply_inplace(a, t);
            apply_inplace(b, t);
            ok = (static_cast<int>(discrepancies(a, b).size()) == before);
        }
        if (!ok) {
            r.pass = false;
            detail << "label-to-label changed a discrepancy count; ";
        } else {
            detail << "10^6 label-to-label checks preserved counts; ";
        }
    }

    // Live-map cap, observed over full runs.
    {
        CouplingConfig cfg;
        cfg.n = 64;
        cfg.seed = 1234;
        const long long cap = static_cast<long long>(std::floor(cfg.kappa * cfg.n));
        bool ok = true;
        for (int rep = 0; rep < 100 && ok; ++rep) {
            Rng rng = Rng::for_replicate(kSeed + 100, static_cast<std::uint64_t>(rep));
            RunRecord rec = superfast_full(cfg, rng);
            ok = rec.max_live_maps <= cap && !rec.capacity_exceeded;
        }
        if (!ok) {
            r.pass = false;
            detail << "live-map cap violated; ";
        } else {
            detail << "peak live maps <= " << cap << " over 100 runs; ";
        }
    }

    // Bit-identical records for identical config+seed, and scheduling
    // independence of the threaded runner.
    {
        CouplingConfig cfg;
        cfg.n = 32;
        cfg.seed = 99;
        Rng r1(cfg.seed), r2(cfg.seed);
        const std::string s1 = superfast_full(cfg, r1).serialize();
        const std::string s2 = superfast_full(cfg, r2).serialize();
        ExperimentPlan plan;
        plan.strategy = Strategy::superfast;
        plan.n_grid = {16, 32};
        plan.reps = 8;
        plan.master_seed = kSeed + 101;
        plan.threads = 1;
        ScalingResult a = run_scaling(plan);
        plan.threads = 4;
        ScalingResult b = run_scaling(plan);
        bool same = s1 == s2 && a.rows.size() == b.rows.size();
        for (std::size_t i = 0; same && i < a.rows.size(); ++i)
            same = a.rows[i].serialize() == b.rows[i].serialize();
        if (!same) {
            r.pass = false;
            detail << "determinism violated; ";
        } else {
            detail << "records bit-identical across reruns and thread counts";
        }
    }
    r.detail = detail.str();
    return r;
}

CriterionResult c11() {
    CriterionResult r{11, "exact mixing profile consistency", true, ""};
    std::ostringstream detail;
    double lo = 1e300, hi = 0.0;
    for (const int n : {8, 12, 16}) {
        MixingProfile p = mixing_profile(n, 0.25);
        for (std::size_t m = 1; m < p.tv.size(); ++m) {
            if (p.tv[m] > p.tv[m - 1] + 1e-15) {
                r.pass = false;
                detail << "TV curve not monotone at n=" << n << " m=" << m << "; ";
            }
        }
        lo = std::min(lo, p.ratio_to_n_log_n);
        hi = std::max(hi, p.ratio_to_n_log_n);
        detail << "n=" << n << " mix=" << p.mixing_time << " ratio=" << fmt(p.ratio_to_n_log_n)
               << "; ";
    }
    if (hi > 1.3 * lo) r.pass = false;
    detail << "ratio spread " << fmt(hi / lo) << " (limit 1.3)";
    r.detail = detail.str();
    return r;
}

}  // namespace

CriterionResult run_criterion(int id) {
    switch (id) {
        case 1: return c1();
        case 2: return c2();
        case 3: return c3();
        case 4: return c4();
        case 5: return c5();
        case 6: return c6();
        case 7: return c7();
        case 8: return c8();
        case 9: return c9();
        case 10: return c10();
        case 11: return c11();
        default: throw std::invalid_argument("criterion id must be 1..11");
    }
}

std::vector<CriterionResult> run_all_criteria() {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= 11; ++id) out.push_back(run_criterion(id));
    return out;
}

CriterionResult run_marginal_validation() { return run_criterion(9); }

}  // namespace tshuffle
