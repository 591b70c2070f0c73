#include "tshuffle/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "tshuffle/rational.hpp"
#include "tshuffle/shuffle_chain.hpp"
#include "tshuffle/superfast.hpp"

namespace tshuffle {

OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw std::invalid_argument("unknown format: " + name);
}

void ExperimentPlan::validate() const {
    if (reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (n_grid.empty()) throw std::invalid_argument("empty n grid");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw std::invalid_argument("n grid must be strictly increasing");
    CouplingConfig probe;
    probe.n = n_grid.front();
    probe.epsilon = epsilon;
    probe.kappa = kappa;
    probe.validate();
}

namespace {

RunRecord run_one(const ExperimentPlan& plan, int n, std::uint64_t rep_index) {
    CouplingConfig cfg;
    cfg.n = n;
    cfg.epsilon = plan.epsilon;
    cfg.kappa = plan.kappa;
    cfg.seed = plan.master_seed;
    cfg.strategy = plan.strategy;
    Rng rng = Rng::for_replicate(plan.master_seed, rep_index);
    switch (plan.strategy) {
        case Strategy::qp_baseline:
            return couple_qp_baseline(init(cfg, rng), cfg, rng);
        case Strategy::two_phase:
            return couple_two_phase(init(cfg, rng), cfg, rng);
        case Strategy::superfast:
            return superfast_full(cfg, rng);
    }
    throw std::logic_error("unknown strategy");
}

}  // namespace

ScalingResult run_scaling(const ExperimentPlan& plan) {
    plan.validate();
    ScalingResult result;
    result.plan = plan;
    const std::size_t total = plan.n_grid.size() * static_cast<std::size_t>(plan.reps);
    result.rows.resize(total);

    unsigned workers = plan.threads > 0 ? static_cast<unsigned>(plan.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(total));
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        while (true) {
            const std::size_t idx = cursor.fetch_add(1);
            if (idx >= total) return;
            const int n = plan.n_grid[idx / plan.reps];
            result.rows[idx] = run_one(plan, n, static_cast<std::uint64_t>(idx));
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t g = 0; g < plan.n_grid.size(); ++g) {
        ScalingSummary s;
        s.n = plan.n_grid[g];
        std::vector<double> times, cancels;
        for (int r = 0; r < plan.reps; ++r) {
            const RunRecord& rec = result.rows[g * plan.reps + r];
            if (rec.capacity_exceeded) {
                ++s.capacity_errors;
                continue;
            }
            times.push_back(rec.coupling_time);
            cancels.push_back(rec.last_cancellation_time);
        }
        s.coupling_time = summarize(times);
        s.last_cancellation = summarize(cancels);
        result.summaries.push_back(s);
    }
    return result;
}

std::string format_real(double x) {
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

void write_scaling_csv(const ScalingResult& r, std::ostream& os) {
    os << "strategy,n,eps,kappa,master_seed,rep,coupling_time,events_total,maps_created,"
          "maps_non_reusable\n";
    const auto& plan = r.plan;
    for (std::size_t g = 0; g < plan.n_grid.size(); ++g) {
        for (int rep = 0; rep < plan.reps; ++rep) {
            const RunRecord& rec = r.rows[g * plan.reps + rep];
            os << strategy_name(plan.strategy) << ',' << plan.n_grid[g] << ','
               << format_real(plan.epsilon) << ',' << format_real(plan.kappa) << ','
               << plan.master_seed << ',' << rep << ',' << format_real(rec.coupling_time) << ','
               << rec.events_total << ',' << rec.maps_created << ',' << rec.maps_non_reusable
               << '\n';
        }
    }
}

void write_scaling_json(const ScalingResult& r, std::ostream& os) {
    nlohmann::json j;
    j["plan"] = {{"strategy", strategy_name(r.plan.strategy)},
                 {"n_grid", r.plan.n_grid},
                 {"reps", r.plan.reps},
                 {"eps", r.plan.epsilon},
                 {"kappa", r.plan.kappa},
                 {"master_seed", r.plan.master_seed}};
    j["rows"] = nlohmann::json::array();
    for (std::size_t g = 0; g < r.plan.n_grid.size(); ++g) {
        for (int rep = 0; rep < r.plan.reps; ++rep) {
            const RunRecord& rec = r.rows[g * r.plan.reps + rep];
            j["rows"].push_back({{"n", r.plan.n_grid[g]},
                                 {"rep", rep},
                                 {"coupling_time", rec.coupling_time},
                                 {"last_cancellation_time", rec.last_cancellation_time},
                                 {"events_total", rec.events_total},
                                 {"maps_created", rec.maps_created},
                                 {"maps_expired", rec.maps_expired},
                                 {"maps_non_reusable", rec.maps_non_reusable},
                                 {"capacity_exceeded", rec.capacity_exceeded}});
        }
    }
    j["summaries"] = nlohmann::json::array();
    for (const auto& s : r.summaries) {
        j["summaries"].push_back({{"n", s.n},
                                  {"mean", s.coupling_time.mean},
                                  {"variance", s.coupling_time.variance},
                                  {"ci95_half_width", s.coupling_time.half_width_95},
                                  {"reps_used", s.coupling_time.count},
                                  {"capacity_errors", s.capacity_errors}});
    }
    os << j.dump(2) << '\n';
}

void write_lumped_kernel_csv(int n, std::ostream& os) {
    LumpedKernel k = build_lumped_kernel(n);
    os << "row_class,col_class,probability\n";
    auto name = [](const CycleType& t) {
        std::string s;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i) s += '+';
            s += std::to_string(t[i]);
        }
        return s;
    };
    for (std::size_t i = 0; i < k.classes.size(); ++i)
        for (std::size_t j = 0; j < k.classes.size(); ++j)
            if (k.matrix[i][j] != 0)
                os << name(k.classes[i]) << ',' << name(k.classes[j]) << ','
                   << rat_to_string(k.matrix[i][j]) << '\n';
}

MixingProfile mixing_profile(int n, double threshold) {
    MixingProfile p;
    p.n = n;
    p.threshold = threshold;
    if (threshold >= 1.0) {
        p.mixing_time = 0;
        return p;
    }
    p.mixing_time = mixing_time(n, threshold);
    const int horizon = std::max(p.mixing_time + 4, 8);
    for (const auto& [m, tv] : tv_curve(n, horizon)) {
        (void)m;
        p.tv.push_back(tv.get_d());
    }
    p.ratio_to_n_log_n = static_cast<double>(p.mixing_time) / (n * std::log(n));
    return p;
}

}  // namespace tshuffle
