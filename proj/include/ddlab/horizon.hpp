#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ddlab/market.hpp"
#include "ddlab/path.hpp"
#include "ddlab/stats.hpp"
#include "ddlab/transform.hpp"

namespace ddlab {

// Alternating drawdown/recovery cycle times of a wealth path:
//   T_{1/2} = 0,
//   T_n     = first index after T_{n-1/2} with X/X* <= alpha,
//   T_{n+1/2} = first index after T_n with X >= X*_{T_n}.
// cycles[j] holds (T_{(j+1)-1/2}, T_{j+1}); the last entry may carry an
// infinite hit. Every cycle start is a time of maximum.
struct CycleTimes {
    std::vector<std::pair<StopIndex, StopIndex>> cycles;
};

CycleTimes cycle_times(const SampledPath& xhat, double alpha,
                       std::size_t max_cycles = 1u << 20);

// The wealth process with the numeraire property for the horizon T_n:
// follows the transformed path until T_{n-1/2}, then invests like the
// unconstrained optimum until T_n, then parks everything in the baseline.
struct FiniteHorizonPath {
    SampledPath path;
    bool horizon_reached = false;  // T_n was found on the grid
};

FiniteHorizonPath finite_horizon_numeraire(const SampledPath& xhat, double alpha,
                                           std::size_t n);

struct ZetaSample {
    std::size_t path = 0;
    std::size_t n = 0;  // cycle index, 1-based
    double zeta = 0.0;
};

struct ZetaHarvest {
    std::vector<ZetaSample> samples;  // sorted by (path, n)
    bool empty_warning = false;       // no finite cycles anywhere
};

// Terminal wealth ratio of the horizon-T_n optimum to the asymptotic one:
// zeta_n = (2-alpha)^{-1} * (X*_{T_n} / X_{T_{n-1/2}})^alpha, harvested per
// path and cycle. Samples across cycles are i.i.d. in the continuous model.
// alpha = 0 is outside the precondition: the drawdown clock never ticks and
// the ratio exponent vanishes (zeta would sit at the constant 1/2).
std::vector<ZetaSample> zeta_from_path(const SampledPath& xhat, double alpha,
                                       std::size_t max_n, std::size_t path_id = 0);
ZetaHarvest zeta_samples(const SimBatch& batch, double alpha, std::size_t max_n,
                         int threads = 1);

// zeta as a function of a uniform variable:
// zeta_map(eta) = (2-alpha)^{-1} * (alpha + (1-alpha)/eta)^alpha.
double zeta_map(double eta, double alpha);

// CDF of zeta_map(eta) for eta uniform on (0,1):
// F(z) = 1 - min(1, (1-alpha) / (((2-alpha) z)^{1/alpha} - alpha)) above the
// support point 1/(2-alpha), zero at or below it.
double zeta_analytic_cdf(double z, double alpha);

// CDF of (2-alpha)^{-1} R^alpha when log R is exponential with rate
// alpha/(1-alpha) -- the law of the running maximum at the first
// alpha-drawdown time of exp(t/2 + beta_t) (Lehoczky 1977):
// F(z) = 1 - ((2-alpha) z)^{-1/(1-alpha)} above 1/(2-alpha).
double zeta_pareto_cdf(double z, double alpha);

// Lag-1 sample autocorrelation of consecutive-cycle zeta pairs within each
// path, pooled over paths.
double zeta_lag1_autocorrelation(const ZetaHarvest& harvest);

// Summary of the relative drawdown of a constrained path: its minimum and
// maximum, entries into [0, alpha+eps_low] and entries into [1-eps_high, 1].
struct OscillationStats {
    double min_rel_dd = 1.0;
    double max_rel_dd = 0.0;
    std::size_t crossings_below = 0;
    std::size_t crossings_above = 0;
};

OscillationStats oscillation_stats(const SampledPath& constrained, double alpha,
                                   double eps_low = 0.02, double eps_high = 0.02);

// Sup-deviation of the horizon-n portfolio from the asymptotic one over
// [0, upto]; exactly zero whenever the switch time T_{n-1/2} lies beyond
// `upto`. One entry per n in n_list.
std::vector<double> turnpike_supdev(const SampledPath& xhat, double alpha,
                                    const std::vector<std::size_t>& n_list,
                                    std::size_t upto);

// Per-cycle running min / running max of the zeta sequence along each path.
struct RatioOscillationRow {
    std::size_t n = 0;
    double mean_running_min = 0.0;
    double mean_running_max = 0.0;
    double frac_running_max_above = 0.0;  // fraction of paths whose running max
                                          // exceeded threshold_mult/(2-alpha)
};

struct RatioOscillation {
    std::vector<RatioOscillationRow> rows;
    double lag1_autocorrelation = 0.0;
    std::size_t n_pairs = 0;
};

RatioOscillation horizon_ratio_oscillation(const SimBatch& batch, double alpha,
                                           const std::vector<std::size_t>& n_list,
                                           double threshold_mult = 5.0,
                                           int threads = 1);

}  // namespace ddlab
