#include "tshuffle/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tshuffle {

Summary summarize(const std::vector<double>& samples) {
    Summary s;
    s.count = samples.size();
    if (s.count == 0) return s;
    double sum = 0.0;
    for (double x : samples) sum += x;
    s.mean = sum / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (double x : samples) ss += (x - s.mean) * (x - s.mean);
        s.variance = ss / static_cast<double>(s.count - 1);
        s.stddev = std::sqrt(s.variance);
        s.half_width_95 =
            t_quantile_975(s.count - 1) * s.stddev / std::sqrt(static_cast<double>(s.count));
    }
    return s;
}

namespace {

/// Regularized incomplete beta I_x(a, b) by the standard continued fraction
/// (modified Lentz), switched at the symmetry point for convergence.
double betacf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-14) break;
    }
    return h;
}

double regularized_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                      b * std::log1p(-x);
    const double front = std::exp(ln);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double t_quantile_975(std::size_t df) {
    if (df == 0) throw std::invalid_argument("zero degrees of freedom");
    const double z = 1.959963984540054;  // normal 97.5% quantile
    if (df >= 100) return z;
    // Invert the exact tail: for x > 0 the two-sided tail mass outside
    // (-x, x) is I_{v/(v+x^2)}(v/2, 1/2); solve tail = 0.05 by bisection.
    const double v = static_cast<double>(df);
    auto tail = [&](double x) { return regularized_beta(v / 2.0, 0.5, v / (v + x * x)); };
    double lo = 0.0, hi = 1024.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (tail(mid) > 0.05 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double ks_distance_exp1(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf = 1.0 - std::exp(-samples[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(std::abs(hi - cdf), std::abs(cdf - lo)));
    }
    return d;
}

namespace {

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 10000; ++k) {
        term *= x / (a + k);
        sum += term;
        if (term < sum * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    // Lentz's continued fraction for Q(a, x), x > a + 1.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("bad incomplete gamma arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

GofResult chi_square_or_tv_test(const std::vector<long long>& observed,
                                const std::vector<double>& expected_probs) {
    if (observed.size() != expected_probs.size() || observed.empty())
        throw std::invalid_argument("support mismatch");
    long long total = 0;
    for (long long c : observed) {
        if (c < 0) throw std::invalid_argument("negative count");
        total += c;
    }
    if (total < 1) throw std::invalid_argument("empty sample");
    GofResult r;
    const double tot = static_cast<double>(total);
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected_probs[i] <= 0.0)
            throw std::invalid_argument("expected distribution must be positive on the support");
        const double e = expected_probs[i] * tot;
        const double diff = static_cast<double>(observed[i]) - e;
        r.chi_square += diff * diff / e;
        r.tv += std::abs(static_cast<double>(observed[i]) / tot - expected_probs[i]);
    }
    r.tv /= 2.0;
    r.df = observed.size() - 1;
    r.p_value = 1.0 - regularized_gamma_p(static_cast<double>(r.df) / 2.0, r.chi_square / 2.0);
    return r;
}

namespace {

void check_grid(const std::vector<std::pair<double, double>>& grid) {
    if (grid.size() < 3) throw std::invalid_argument("need at least 3 grid points");
    for (const auto& [n, m] : grid)
        if (n <= 1.0 || m <= 0.0) throw std::invalid_argument("grid values must be positive");
    bool distinct = false;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i].first != grid[0].first) distinct = true;
    if (!distinct) throw std::invalid_argument("degenerate grid");
}

FitResult fit_fixed_shape(const std::vector<std::pair<double, double>>& grid, double exponent,
                          bool log_factor) {
    check_grid(grid);
    double acc = 0.0;
    for (const auto& [n, m] : grid) {
        double lx = exponent * std::log(n) + (log_factor ? std::log(std::log(n)) : 0.0);
        acc += std::log(m) - lx;
    }
    const double logc = acc / static_cast<double>(grid.size());
    double ss = 0.0;
    for (const auto& [n, m] : grid) {
        double lx = exponent * std::log(n) + (log_factor ? std::log(std::log(n)) : 0.0);
        const double res = std::log(m) - (logc + lx);
        ss += res * res;
    }
    FitResult f;
    f.exponent = exponent;
    f.constant = std::exp(logc);
    f.rms_log_residual = std::sqrt(ss / static_cast<double>(grid.size()));
    return f;
}

}  // namespace

FitResult fit_power_law(const std::vector<std::pair<double, double>>& grid) {
    check_grid(grid);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double k = static_cast<double>(grid.size());
    for (const auto& [n, m] : grid) {
        const double x = std::log(n), y = std::log(m);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = k * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("degenerate grid");
    const double e = (k * sxy - sx * sy) / denom;
    const double logc = (sy - e * sx) / k;
    double ss = 0.0;
    for (const auto& [n, m] : grid) {
        const double res = std::log(m) - (logc + e * std::log(n));
        ss += res * res;
    }
    FitResult f;
    f.exponent = e;
    f.constant = std::exp(logc);
    f.rms_log_residual = std::sqrt(ss / k);
    return f;
}

FitResult fit_n_log_n(const std::vector<std::pair<double, double>>& grid) {
    return fit_fixed_shape(grid, 1.0, true);
}

FitResult fit_quadratic(const std::vector<std::pair<double, double>>& grid) {
    return fit_fixed_shape(grid, 2.0, false);
}

}  // namespace tshuffle
