#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ddlab {

// Exact pairwise (tree) summation. The reduction order depends only on the
// number of elements, so results are identical for any thread count as long
// as samples land in their slots by index.
double pairwise_sum(std::span<const double> values);

// Monte Carlo estimate: sample mean, standard error and a two-sided 95%
// confidence interval. `flagged` counts non-finite samples that were
// excluded from the estimate (they are surfaced, not hidden).
struct MCEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
    std::size_t flagged = 0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

// Builds an MCEstimate from raw samples; non-finite entries are counted in
// `flagged` and excluded. Requires at least 2 finite samples for the SE.
MCEstimate mc_estimate(std::span<const double> samples);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
    std::size_t n = 0;
};

// Survival function of the Kolmogorov distribution,
// Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2), series truncated at 100
// terms and clamped to [0,1].
double kolmogorov_pvalue(double x);

// One-sample Kolmogorov-Smirnov test of `samples` against a continuous CDF.
// Asymptotic p-value; requires n >= 20.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace ddlab
