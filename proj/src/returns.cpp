#include "ddlab/returns.hpp"

#include <cmath>
#include <limits>

#include "ddlab/errors.hpp"
#include "ddlab/parallel.hpp"

namespace ddlab {

double rr_at(const SampledPath& x, const SampledPath& x_ref, StopIndex t) {
    if (!(x.grid == x_ref.grid)) {
        throw invalid_input("rr_at: paths must share the same grid");
    }
    const std::size_t k = t.is_finite() ? std::min(t.index, x.grid.n_steps)
                                        : x.grid.n_steps;
    const double a = x.values[k];
    const double b = x_ref.values[k];
    if (b == 0.0) {
        // 0/0 = 1 convention: both bankrupt means zero relative return.
        return a == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return (a - b) / b;
}

RrIdentityReport rr_inequality_check(const SampledPath& x, const SampledPath& x_ref,
                                     StopIndex t) {
    RrIdentityReport rep;
    rep.rr_forward = rr_at(x, x_ref, t);
    rep.rr_reverse = rr_at(x_ref, x, t);
    const double r = rep.rr_forward;
    double expected;
    if (std::isinf(r)) {
        expected = -1.0;
    } else if (r == -1.0) {
        expected = std::numeric_limits<double>::infinity();
    } else {
        expected = -r / (1.0 + r);
    }
    if (std::isinf(expected) && std::isinf(rep.rr_reverse)) {
        rep.identity_residual = 0.0;
    } else {
        rep.identity_residual = rep.rr_reverse - expected;
    }
    rep.sum = rep.rr_forward + rep.rr_reverse;
    const double scale = 1.0 + std::fabs(r) + std::fabs(rep.rr_reverse);
    rep.ok = std::isfinite(rep.identity_residual)
                 ? (std::fabs(rep.identity_residual) <= 1e-12 * scale && rep.sum >= -1e-12 * scale)
                 : true;
    return rep;
}

MCEstimate err_mc(const std::function<double(std::size_t)>& evaluator,
                  std::size_t n_paths, int threads) {
    if (n_paths < 2) throw invalid_input("err_mc: need at least 2 paths");
    std::vector<double> samples(n_paths);
    parallel_for_index(n_paths, threads,
                       [&](std::size_t i) { samples[i] = evaluator(i); });
    return mc_estimate(samples);
}

SampledPath phi_process(const SampledPath& x, const SampledPath& xhat,
                        DrawdownParam alpha) {
    if (!(x.grid == xhat.grid)) {
        throw invalid_input("phi_process: paths must share the same grid");
    }
    std::vector<double> ratio(x.values.size());
    for (std::size_t k = 0; k < ratio.size(); ++k) {
        if (!(xhat.values[k] > 0.0)) {
            throw invalid_input("phi_process: reference wealth hits zero on the grid");
        }
        ratio[k] = x.values[k] / xhat.values[k];
    }
    return az_forward(SampledPath(x.grid, std::move(ratio)), alpha);
}

SupermartingaleCheck maxima_supermartingale_check(
    const std::function<MaximaPair(std::size_t)>& rr_pair, std::size_t n_paths,
    int threads) {
    if (n_paths < 2) throw invalid_input("maxima_supermartingale_check: need >= 2 paths");
    std::vector<double> at_sigma(n_paths), at_tau(n_paths), diff(n_paths);
    parallel_for_index(n_paths, threads, [&](std::size_t i) {
        const MaximaPair pair = rr_pair(i);
        if (pair.sigma > pair.tau) {
            throw invalid_input(
                "maxima_supermartingale_check: sigma must not exceed tau");
        }
        at_sigma[i] = pair.rr_sigma;
        at_tau[i] = pair.rr_tau;
        diff[i] = pair.rr_tau - pair.rr_sigma;
    });
    SupermartingaleCheck check;
    check.rr_sigma = mc_estimate(at_sigma);
    check.rr_tau = mc_estimate(at_tau);
    check.difference = mc_estimate(diff);
    return check;
}

}  // namespace ddlab
