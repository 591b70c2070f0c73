#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tshuffle/coupled.hpp"
#include "tshuffle/stats.hpp"

namespace tshuffle {

enum class OutputFormat { csv, json };

OutputFormat parse_format(const std::string& name);

/// A scaling study: one strategy over a grid of deck sizes.
struct ExperimentPlan {
    Strategy strategy = Strategy::superfast;
    std::vector<int> n_grid;
    int reps = 1;
    double epsilon = 0.2;
    double kappa = 0.5;
    std::uint64_t master_seed = 0;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct ScalingSummary {
    int n = 0;
    Summary coupling_time;
    Summary last_cancellation;
    long long capacity_errors = 0;
};

struct ScalingResult {
    ExperimentPlan plan;
    std::vector<RunRecord> rows;  // ordered by (n, rep)
    std::vector<ScalingSummary> summaries;
};

/// Runs the plan with a worker pool. Each replicate gets its own rng stream
/// derived from (master_seed, global replicate index), so results are
/// identical regardless of thread count or scheduling.
ScalingResult run_scaling(const ExperimentPlan& plan);

/// Real with 12 significant digits.
std::string format_real(double x);

void write_scaling_csv(const ScalingResult& r, std::ostream& os);
void write_scaling_json(const ScalingResult& r, std::ostream& os);

/// Exact class-level transition matrix as CSV with rationals "p/q".
void write_lumped_kernel_csv(int n, std::ostream& os);

/// Exact TV decay of the single chain plus the threshold crossing.
struct MixingProfile {
    int n = 0;
    double threshold = 0.0;
    std::vector<double> tv;  // tv[m-1] = TV after m steps
    int mixing_time = 0;
    double ratio_to_n_log_n = 0.0;
};

MixingProfile mixing_profile(int n, double threshold);

}  // namespace tshuffle
