#pragma once

#include <cstddef>
#include <functional>

#include "ddlab/path.hpp"
#include "ddlab/stats.hpp"
#include "ddlab/transform.hpp"

namespace ddlab {

// Return of x relative to x_ref over [0, t]: (x[k] - ref[k]) / ref[k] at
// k = min(t, n_steps). The infinite horizon evaluates at the last grid
// point (the finite-grid proxy for the limit). Convention 0/0 = 1, so the
// relative return of one bankrupt path against another is 0; ref = 0 with
// x > 0 gives +infinity, a legitimate value surfaced to callers.
double rr_at(const SampledPath& x, const SampledPath& x_ref, StopIndex t);

struct RrIdentityReport {
    double rr_forward = 0.0;
    double rr_reverse = 0.0;
    double identity_residual = 0.0;  // rr_reverse - (-r/(1+r))
    double sum = 0.0;                // rr_forward + rr_reverse, >= 0
    bool ok = false;
};

// Checks the finite-horizon reversal identity rr(ref|x) = -r/(1+r) with
// r = rr(x|ref), to 1e-12, and the nonnegativity of the rr sum.
RrIdentityReport rr_inequality_check(const SampledPath& x, const SampledPath& x_ref,
                                     StopIndex t);

// Monte Carlo expected relative return: `evaluator` is called once per path
// index and must be a pure function of it. Non-finite values are flagged
// and excluded, never hidden.
MCEstimate err_mc(const std::function<double(std::size_t)>& evaluator,
                  std::size_t n_paths, int threads = 1);

// The supermartingale diagnostic: the drawdown transform applied to the
// ratio path chi = x / xhat. Starts at 1; its expectation at times of
// maximum of xhat stays <= 1.
SampledPath phi_process(const SampledPath& x, const SampledPath& xhat,
                        DrawdownParam alpha);

struct SupermartingaleCheck {
    MCEstimate rr_sigma;
    MCEstimate rr_tau;
    MCEstimate difference;  // rr_tau - rr_sigma per path; mean <= 0 expected
};

// One path's realization of two nested times of maximum and the relative
// returns sampled there.
struct MaximaPair {
    StopIndex sigma;
    StopIndex tau;
    double rr_sigma = 0.0;
    double rr_tau = 0.0;
};

// Sampled-supermartingale consequence at two nested times of maximum: the
// per-path values rr_tau - rr_sigma are averaged; their mean stays at or
// below zero when the reference has the numeraire property along these
// times. Requires sigma <= tau on every path.
SupermartingaleCheck maxima_supermartingale_check(
    const std::function<MaximaPair(std::size_t path)>& rr_pair, std::size_t n_paths,
    int threads = 1);

}  // namespace ddlab
