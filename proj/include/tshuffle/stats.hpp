#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace tshuffle {

/// Moments plus a 95% confidence half-width (normal approximation at
/// count >= 100, Student-t below).
struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // sample variance (unbiased)
    double stddev = 0.0;
    double half_width_95 = 0.0;
};

Summary summarize(const std::vector<double>& samples);

/// 97.5% Student-t quantile (series expansion around the normal quantile).
double t_quantile_975(std::size_t df);

/// Kolmogorov-Smirnov distance between the sample and the Exp(1) law.
double ks_distance_exp1(std::vector<double> samples);

/// Pearson chi-square against an expected distribution, plus the plain total
/// variation distance between the empirical and expected distributions.
struct GofResult {
    double chi_square = 0.0;
    double p_value = 1.0;
    double tv = 0.0;
    std::size_t df = 0;
};

GofResult chi_square_or_tv_test(const std::vector<long long>& observed,
                                const std::vector<double>& expected_probs);

/// Regularized lower incomplete gamma P(a, x); chi-square CDF with k degrees
/// of freedom is P(k/2, x/2).
double regularized_gamma_p(double a, double x);

/// Least-squares fits of mean(n) over a grid, compared by RMS residual in
/// log space.
struct FitResult {
    double exponent = 0.0;  // fitted (power law) or fixed (other models)
    double constant = 0.0;  // multiplicative constant
    double rms_log_residual = 0.0;
};

/// mean ≈ c * n^e, both fitted.
FitResult fit_power_law(const std::vector<std::pair<double, double>>& grid);
/// mean ≈ C * n ln n, C fitted.
FitResult fit_n_log_n(const std::vector<std::pair<double, double>>& grid);
/// mean ≈ c * n^2, c fitted.
FitResult fit_quadratic(const std::vector<std::pair<double, double>>& grid);

}  // namespace tshuffle
