#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tshuffle/acceptance.hpp"
#include "tshuffle/coupled.hpp"
#include "tshuffle/ctmc_future.hpp"
#include "tshuffle/harness.hpp"
#include "tshuffle/rng.hpp"
#include "tshuffle/shuffle_chain.hpp"
#include "tshuffle/small_cases.hpp"
#include "tshuffle/stats.hpp"
#include "tshuffle/superfast.hpp"

namespace {

using namespace tshuffle;

/// Shared option values; each subcommand attaches the flags it uses.
struct Options {
    int n = 16;
    std::vector<int> n_grid;
    double eps = 0.2;
    double kappa = 0.5;
    int reps = 100;
    std::uint64_t seed = 0;
    std::string strategy = "superfast";
    std::string out;
    std::string format = "csv";
    std::string trace_path;
    double threshold = 0.25;
    double horizon = 0.0;
};

std::ostream& open_sink(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::invalid_argument("cannot open output file: " + path);
    return file;
}

int cmd_exact(const Options&) {
    bool ok = true;
    const bool sq = s3_square_check();
    ok = ok && sq;
    std::cout << "3-card square identity: " << (sq ? "ok" : "FAIL") << "\n";
    std::cout << "3-card TV from start, m=1..8:";
    for (int m = 1; m <= 8; ++m) std::cout << " " << rat_to_string(s3_tv(m));
    std::cout << "\n";
    std::cout << "3-card two-start max TV, m=2: " << rat_to_string(s3_max_tv_two_starts(2))
              << "\n";
    std::cout << "3-card chart coupling (described rule), uncoupled mass m=1..4:";
    for (const auto& [m, mass] : s3_round_coupling(PairingRule::described, 4))
        std::cout << " " << rat_to_string(mass);
    std::cout << "\n";
    std::cout << "3-card chart coupling (greedy rule), uncoupled mass m=1..4:";
    for (const auto& [m, mass] : s3_round_coupling(PairingRule::greedy, 4))
        std::cout << " " << rat_to_string(mass);
    std::cout << "\n";
    const Rat t1 = four_state_tv(1);
    const Rat t2 = four_state_tv(2);
    const Rat best = four_state_best_tree_coupling(2);
    const bool fs = (t1 == 1) && (t2 == 0) && (best == Rat(1, 2));
    ok = ok && fs;
    std::cout << "four-state TV(1)=" << rat_to_string(t1) << " TV(2)=" << rat_to_string(t2)
              << " best depth-2 coupling=" << rat_to_string(best) << (fs ? " (ok)" : " (FAIL)")
              << "\n";
    return ok ? 0 : 1;
}

int cmd_toy(const Options& opt) {
    const ToyState s{0, 0}, s2{1, 1};
    // The shared --strategy flag doubles as the coupling picker here; the
    // untouched default ("superfast") means "report both couplings".
    const bool both = opt.strategy == "superfast" || opt.strategy == "both";
    const bool want_naive = both || opt.strategy == "naive";
    const bool want_future = both || opt.strategy == "future";
    if (!want_naive && !want_future)
        throw std::invalid_argument("toy strategy must be 'naive', 'future', or 'both'");
    nlohmann::json j;
    j["reps"] = opt.reps;
    j["seed"] = opt.seed;
    j["exact_future_mean"] = 1.0 / 20 + 1.0 / 3 - 1.0 / 23;
    for (const char* which : {"naive", "future"}) {
        if ((which[0] == 'n' && !want_naive) || (which[0] == 'f' && !want_future)) continue;
        std::vector<double> samples;
        samples.reserve(opt.reps);
        for (int i = 0; i < opt.reps; ++i) {
            Rng rng = Rng::for_replicate(opt.seed, static_cast<std::uint64_t>(i));
            samples.push_back(which[0] == 'n' ? naive_coupling(s, s2, rng)
                                              : future_coupling(s, s2, rng));
        }
        const Summary sum = summarize(samples);
        j[which] = {{"mean", sum.mean},
                    {"variance", sum.variance},
                    {"ci95_half_width", sum.half_width_95}};
    }
    std::ofstream file;
    std::ostream& os = open_sink(opt.out, file);
    os << j.dump(2) << "\n";
    return 0;
}

void write_trace_csv(const Trace& trace, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("cannot open trace file: " + path);
    os << "time,deck,loc1,loc2\n";
    for (const auto& ev : trace.a)
        os << format_real(ev.time) << ",a," << ev.loc1 << "," << ev.loc2 << "\n";
    for (const auto& ev : trace.b)
        os << format_real(ev.time) << ",b," << ev.loc1 << "," << ev.loc2 << "\n";
}

int cmd_couple(const Options& opt) {
    CouplingConfig cfg;
    cfg.n = opt.n;
    cfg.epsilon = opt.eps;
    cfg.kappa = opt.kappa;
    cfg.seed = opt.seed;
    cfg.strategy = parse_strategy(opt.strategy);
    cfg.validate();
    Rng rng(cfg.seed);
    Trace trace;
    Trace* tp = opt.trace_path.empty() ? nullptr : &trace;
    RunRecord rec;
    if (cfg.strategy == Strategy::superfast) {
        rec = superfast_full(cfg, rng, tp);
    } else {
        CoupledDecks state = init(cfg, rng);
        rec = (cfg.strategy == Strategy::qp_baseline) ? couple_qp_baseline(state, cfg, rng, tp)
                                                      : couple_two_phase(state, cfg, rng, tp);
    }
    if (!opt.trace_path.empty()) write_trace_csv(trace, opt.trace_path);
    std::ofstream file;
    std::ostream& os = open_sink(opt.out, file);
    if (parse_format(opt.format) == OutputFormat::json) {
        nlohmann::json j;
        j["strategy"] = strategy_name(cfg.strategy);
        j["n"] = rec.n;
        j["eps"] = rec.epsilon;
        j["kappa"] = rec.kappa;
        j["seed"] = rec.seed;
        j["coupling_time"] = rec.coupling_time;
        j["last_cancellation_time"] = rec.last_cancellation_time;
        j["events_total"] = rec.events_total;
        j["maps_created"] = rec.maps_created;
        j["maps_expired"] = rec.maps_expired;
        j["maps_non_reusable"] = rec.maps_non_reusable;
        j["max_live_maps"] = rec.max_live_maps;
        j["capacity_exceeded"] = rec.capacity_exceeded;
        os << j.dump(2) << "\n";
    } else {
        os << rec.serialize();
    }
    return rec.capacity_exceeded ? 1 : 0;
}

int cmd_scaling(const Options& opt) {
    ExperimentPlan plan;
    plan.strategy = parse_strategy(opt.strategy);
    plan.n_grid = opt.n_grid.empty() ? std::vector<int>{opt.n} : opt.n_grid;
    plan.reps = opt.reps;
    plan.epsilon = opt.eps;
    plan.kappa = opt.kappa;
    plan.master_seed = opt.seed;
    plan.validate();
    const ScalingResult result = run_scaling(plan);
    std::ofstream file;
    std::ostream& os = open_sink(opt.out, file);
    if (parse_format(opt.format) == OutputFormat::json)
        write_scaling_json(result, os);
    else
        write_scaling_csv(result, os);
    if (result.summaries.size() >= 3) {
        std::vector<std::pair<double, double>> grid;
        for (const auto& s : result.summaries) grid.emplace_back(s.n, s.coupling_time.mean);
        const FitResult p = fit_power_law(grid);
        const FitResult l = fit_n_log_n(grid);
        std::cerr << "power-law fit: exponent " << format_real(p.exponent) << ", residual "
                  << format_real(p.rms_log_residual) << "\n";
        std::cerr << "n log n fit: constant " << format_real(l.constant) << ", residual "
                  << format_real(l.rms_log_residual) << "\n";
    }
    return 0;
}

int cmd_validate(const Options&) {
    const CriterionResult r = run_marginal_validation();
    std::cout << (r.pass ? "PASS" : "FAIL") << " " << r.name << ": " << r.detail << "\n";
    return r.pass ? 0 : 1;
}

int cmd_mix(const Options& opt) {
    const MixingProfile p = mixing_profile(opt.n, opt.threshold);
    std::ofstream file;
    std::ostream& os = open_sink(opt.out, file);
    if (parse_format(opt.format) == OutputFormat::json) {
        nlohmann::json j;
        j["n"] = p.n;
        j["threshold"] = p.threshold;
        j["tv"] = p.tv;
        j["mixing_time"] = p.mixing_time;
        j["ratio_to_n_log_n"] = p.ratio_to_n_log_n;
        os << j.dump(2) << "\n";
    } else {
        os << "m,tv\n";
        for (std::size_t m = 0; m < p.tv.size(); ++m)
            os << (m + 1) << "," << format_real(p.tv[m]) << "\n";
        os << "# mixing_time," << p.mixing_time << "\n";
        os << "# ratio_to_n_log_n," << format_real(p.ratio_to_n_log_n) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled random-transposition shuffles: exact small cases, "
                 "coupling strategies, and scaling studies"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--eps", opt.eps, "discrepancy budget fraction");
        sub->add_option("--kappa", opt.kappa, "live-map cap fraction");
        sub->add_option("--reps", opt.reps, "replicates");
        sub->add_option("--seed", opt.seed, "master seed");
        sub->add_option("--strategy", opt.strategy, "qp | two-phase | superfast");
        sub->add_option("--out", opt.out, "output path (default stdout)");
        sub->add_option("--format", opt.format, "csv | json");
    };

    CLI::App* exact = app.add_subcommand("exact", "exact small-deck computations");
    add_common(exact);

    CLI::App* toy = app.add_subcommand("toy", "6-state coupling-to-the-future demo");
    add_common(toy);

    CLI::App* couple = app.add_subcommand("couple", "one coupled run");
    couple->add_option("--n", opt.n, "deck size");
    couple->add_option("--trace", opt.trace_path, "write the per-deck event trace as CSV");
    add_common(couple);

    CLI::App* scaling = app.add_subcommand("scaling", "grid study over deck sizes");
    scaling->add_option("--n", opt.n_grid, "deck sizes (repeatable)");
    add_common(scaling);

    CLI::App* validate = app.add_subcommand("validate", "marginal-law checks");
    add_common(validate);

    CLI::App* mix = app.add_subcommand("mix", "exact mixing profile");
    mix->add_option("--n", opt.n, "deck size");
    mix->add_option("--threshold", opt.threshold, "TV threshold");
    add_common(mix);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (exact->parsed()) return cmd_exact(opt);
        if (toy->parsed()) return cmd_toy(opt);
        if (couple->parsed()) return cmd_couple(opt);
        if (scaling->parsed()) return cmd_scaling(opt);
        if (validate->parsed()) return cmd_validate(opt);
        if (mix->parsed()) return cmd_mix(opt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
