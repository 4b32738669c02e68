#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace spinsim {

// Small statistics toolbox shared by tests, the acceptance suite and the CLI.

double mean(std::span<const double> xs);
double stddev(std::span<const double> xs);

// Nearest-rank percentile of a copy of xs; p in [0,100].
double percentile(std::span<const double> xs, double p);

// Upper regularized incomplete gamma Q(a,x) (series + continued fraction).
double gamma_q(double a, double x);

// Survival function of the chi-square distribution.
double chi2_sf(double stat, int dof);

// Pearson chi-square p-value of observed counts against expected counts
// (same length, expected > 0); dof = bins - 1 unless overridden.
double chi2_gof_pvalue(std::span<const std::int64_t> observed,
                       std::span<const double> expected, int dof_override = -1);

// Merge trailing low-expectation bins (expected < min_expected) into one.
void merge_sparse_tail(std::vector<std::int64_t>& observed, std::vector<double>& expected,
                       double min_expected = 5.0);

// Kolmogorov-Smirnov distance of samples against the uniform [0,1) CDF.
double ks_uniform_statistic(std::vector<double> samples);

// Asymptotic one-sample KS critical value sqrt(-ln(alpha/2)/2) / sqrt(n).
double ks_critical(std::size_t n, double alpha);

double poisson_pmf(int k, double lambda);
double geometric_pmf(int k, double p);  // k >= 1, first-success convention

}  // namespace spinsim
