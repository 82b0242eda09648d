#include "ddlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "ddlab/errors.hpp"

namespace ddlab {

namespace {

double pairwise_sum_impl(const double* data, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum_impl(data, half) + pairwise_sum_impl(data + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
    return pairwise_sum_impl(values.data(), values.size());
}

MCEstimate mc_estimate(std::span<const double> samples) {
    MCEstimate est;
    std::vector<double> finite;
    finite.reserve(samples.size());
    for (double s : samples) {
        if (std::isfinite(s)) {
            finite.push_back(s);
        } else {
            ++est.flagged;
        }
    }
    est.n = finite.size();
    if (est.n == 0) return est;
    est.mean = pairwise_sum(finite) / static_cast<double>(est.n);
    if (est.n >= 2) {
        std::vector<double> sq(finite.size());
        for (std::size_t i = 0; i < finite.size(); ++i) {
            const double d = finite[i] - est.mean;
            sq[i] = d * d;
        }
        const double var = pairwise_sum(sq) / static_cast<double>(est.n - 1);
        est.se = std::sqrt(var / static_cast<double>(est.n));
    }
    est.ci_lo = est.mean - 1.96 * est.se;
    est.ci_hi = est.mean + 1.96 * est.se;
    return est;
}

double kolmogorov_pvalue(double x) {
    if (x <= 0.0) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1) ? term : -term;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.size() < 20) {
        throw invalid_input("ks_test: need at least 20 samples");
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    KsResult res;
    res.statistic = d;
    res.n = samples.size();
    res.p_value = kolmogorov_pvalue(std::sqrt(n) * d);
    return res;
}

}  // namespace ddlab
