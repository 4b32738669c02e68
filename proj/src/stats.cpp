#include "spinsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "spinsim/errors.hpp"

namespace spinsim {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw InputError("mean: empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) {
    if (xs.size() < 2) throw InputError("stddev: need at least two samples");
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

double percentile(std::span<const double> xs, double p) {
    if (xs.empty()) throw InputError("percentile: empty sample");
    if (p < 0.0 || p > 100.0) throw InputError("percentile: p outside [0,100]");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const auto rank = static_cast<std::size_t>(
        std::max(1.0, std::ceil(p / 100.0 * static_cast<double>(v.size()))));
    return v[rank - 1];
}

namespace {

// ln Gamma via the Lanczos approximation (g=7, n=9); |rel err| < 1e-15 on the
// positive axis.
double lgamma_lanczos(double x) {
    static const double c[9] = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // Reflection; not needed for chi-square but keeps the helper total.
        return std::log(M_PI / std::sin(M_PI * x)) - lgamma_lanczos(1.0 - x);
    }
    x -= 1.0;
    double a = c[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += c[i] / (x + static_cast<double>(i));
    return 0.5 * std::log(2.0 * M_PI) + (x + 0.5) * std::log(t) - t + std::log(a);
}

// Lower regularized incomplete gamma by series (x < a+1).
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 10000; ++k) {
        term *= x / (a + static_cast<double>(k));
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lgamma_lanczos(a));
}

// Upper regularized incomplete gamma by Lentz continued fraction (x >= a+1).
double gamma_q_cf(double a, double x) {
    constexpr double tiny = 1e-300;
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
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - lgamma_lanczos(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw InputError("gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi2_sf(double stat, int dof) {
    if (dof < 1) throw InputError("chi2_sf: dof must be >= 1");
    if (stat <= 0.0) return 1.0;
    return gamma_q(0.5 * static_cast<double>(dof), 0.5 * stat);
}

double chi2_gof_pvalue(std::span<const std::int64_t> observed, std::span<const double> expected,
                       int dof_override) {
    if (observed.size() != expected.size() || observed.empty())
        throw InputError("chi2_gof_pvalue: mismatched or empty bins");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] <= 0.0) throw InputError("chi2_gof_pvalue: non-positive expectation");
        const double d = static_cast<double>(observed[i]) - expected[i];
        stat += d * d / expected[i];
    }
    const int dof = dof_override > 0 ? dof_override : static_cast<int>(observed.size()) - 1;
    return chi2_sf(stat, dof);
}

void merge_sparse_tail(std::vector<std::int64_t>& observed, std::vector<double>& expected,
                       double min_expected) {
    while (expected.size() > 2 && expected.back() < min_expected) {
        expected[expected.size() - 2] += expected.back();
        observed[observed.size() - 2] += observed.back();
        expected.pop_back();
        observed.pop_back();
    }
}

double ks_uniform_statistic(std::vector<double> samples) {
    if (samples.empty()) throw InputError("ks_uniform_statistic: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = samples[i];  // uniform CDF
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    return d;
}

double ks_critical(std::size_t n, double alpha) {
    if (n == 0 || alpha <= 0.0 || alpha >= 1.0) throw InputError("ks_critical: bad arguments");
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

double poisson_pmf(int k, double lambda) {
    if (k < 0) return 0.0;
    return std::exp(-lambda + static_cast<double>(k) * std::log(lambda) -
                    lgamma_lanczos(static_cast<double>(k) + 1.0));
}

double geometric_pmf(int k, double p) {
    if (k < 1) return 0.0;
    return std::pow(1.0 - p, static_cast<double>(k - 1)) * p;
}

}  // namespace spinsim
