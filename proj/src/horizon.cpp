#include "ddlab/horizon.hpp"

#include <algorithm>
#include <cmath>

#include "ddlab/errors.hpp"
#include "ddlab/parallel.hpp"
#include "ddlab/rng.hpp"

namespace ddlab {

namespace {

void check_cycle_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw invalid_input("drawdown cycles need alpha strictly inside (0,1)");
    }
}

}  // namespace

CycleTimes cycle_times(const SampledPath& xhat, double alpha, std::size_t max_cycles) {
    check_cycle_alpha(alpha);
    const std::vector<double>& v = xhat.values;
    if (v.empty()) throw invalid_input("cycle_times: empty path");

    CycleTimes ct;
    std::size_t start = 0;
    double runmax = v[0];
    std::size_t k = 1;
    while (ct.cycles.size() < max_cycles) {
        StopIndex hit = StopIndex::infinity();
        for (; k < v.size(); ++k) {
            if (v[k] > runmax) runmax = v[k];
            if (v[k] <= alpha * runmax) {
                hit = StopIndex::at(k);
                break;
            }
        }
        ct.cycles.emplace_back(StopIndex::at(start), hit);
        if (!hit.is_finite()) break;

        const double target = runmax;  // maximum attained at the hit
        StopIndex rec = StopIndex::infinity();
        for (++k; k < v.size(); ++k) {
            if (v[k] >= target) {
                rec = StopIndex::at(k);
                break;
            }
        }
        if (!rec.is_finite()) break;
        start = rec.index;
        if (v[start] > runmax) runmax = v[start];
        k = start + 1;
    }
    return ct;
}

FiniteHorizonPath finite_horizon_numeraire(const SampledPath& xhat, double alpha,
                                           std::size_t n) {
    if (n < 1) throw invalid_input("finite_horizon_numeraire: n must be >= 1");
    check_cycle_alpha(alpha);
    const SampledPath axhat = az_forward(xhat, alpha);
    const CycleTimes ct = cycle_times(xhat, alpha, n);

    FiniteHorizonPath out;
    if (ct.cycles.size() < n || !ct.cycles[n - 1].second.is_finite()) {
        out.path = axhat;
        out.horizon_reached = false;
        return out;
    }
    const std::size_t start = ct.cycles[n - 1].first.index;
    const std::size_t hit = ct.cycles[n - 1].second.index;

    std::vector<double> values = axhat.values;  // identical up to the switch time
    const double anchor = axhat.values[start];  // (xhat_start)^(1-alpha), bitwise
    const double x_start = xhat.values[start];
    double ratio_max = 1.0;
    for (std::size_t k = start + 1; k < hit; ++k) {
        const double ratio = xhat.values[k] / x_start;
        if (ratio > ratio_max) ratio_max = ratio;
        values[k] = anchor * ratio;
    }
    {
        const double ratio = xhat.values[hit] / x_start;
        if (ratio > ratio_max) ratio_max = ratio;
    }
    // From the drawdown hit on, all capital sits in the baseline. The frozen
    // value is written as alpha * running_max so the floor holds bitwise.
    const double frozen = alpha * (anchor * ratio_max);
    for (std::size_t k = hit; k < values.size(); ++k) values[k] = frozen;

    out.path = SampledPath(xhat.grid, std::move(values));
    out.horizon_reached = true;
    return out;
}

std::vector<ZetaSample> zeta_from_path(const SampledPath& xhat, double alpha,
                                       std::size_t max_n, std::size_t path_id) {
    check_cycle_alpha(alpha);
    const CycleTimes ct = cycle_times(xhat, alpha, max_n);
    std::vector<ZetaSample> out;
    out.reserve(ct.cycles.size());
    for (std::size_t j = 0; j < ct.cycles.size(); ++j) {
        const auto& [start, hit] = ct.cycles[j];
        if (!hit.is_finite()) break;
        double m = xhat.values[start.index];  // start is a time of maximum
        for (std::size_t k = start.index + 1; k <= hit.index; ++k) {
            m = std::max(m, xhat.values[k]);
        }
        ZetaSample s;
        s.path = path_id;
        s.n = j + 1;
        s.zeta = std::pow(m / xhat.values[start.index], alpha) / (2.0 - alpha);
        out.push_back(s);
    }
    return out;
}

namespace {

// Direct log-space harvest for the one-asset preset whose price is the
// growth-optimal wealth: log X = t/2 + beta_t, no exp per step.
std::vector<ZetaSample> zeta_dds_path(const SimBatch& batch, std::size_t path,
                                      double alpha, std::size_t max_n) {
    const double dt = batch.grid.dt;
    const double sqdt = std::sqrt(dt);
    const double log_alpha = std::log(alpha);
    CounterRng rng(batch.seed, path);

    std::vector<ZetaSample> out;
    double lw = 0.0, lmax = 0.0, start_lw = 0.0;
    bool recovering = false;
    double target = 0.0;
    for (std::size_t k = 1; k <= batch.grid.n_steps && out.size() < max_n; ++k) {
        lw += 0.5 * dt + sqdt * rng.next_normal();
        if (lw > lmax) lmax = lw;
        if (recovering) {
            if (lw >= target) {
                start_lw = lw;
                recovering = false;
            }
        } else if (lw - lmax <= log_alpha) {
            ZetaSample s;
            s.path = path;
            s.n = out.size() + 1;
            s.zeta = std::exp(alpha * (lmax - start_lw)) / (2.0 - alpha);
            out.push_back(s);
            target = lmax;
            recovering = true;
        }
    }
    return out;
}

}  // namespace

ZetaHarvest zeta_samples(const SimBatch& batch, double alpha, std::size_t max_n,
                         int threads) {
    check_cycle_alpha(alpha);
    std::vector<std::vector<ZetaSample>> per_path(batch.n_paths);
    const bool dds = batch.model.kind == MarketModel::Kind::DdsDirect;
    parallel_for_index(batch.n_paths, threads, [&](std::size_t i) {
        if (dds) {
            per_path[i] = zeta_dds_path(batch, i, alpha, max_n);
        } else {
            const NumerairePath num = numeraire_path(batch, i);
            per_path[i] = zeta_from_path(num.wealth, alpha, max_n, i);
        }
    });
    ZetaHarvest harvest;
    for (auto& v : per_path) {
        harvest.samples.insert(harvest.samples.end(), v.begin(), v.end());
    }
    harvest.empty_warning = harvest.samples.empty();
    return harvest;
}

double zeta_map(double eta, double alpha) {
    check_cycle_alpha(alpha);
    if (!(eta > 0.0 && eta < 1.0)) {
        throw invalid_input("zeta_map: eta must lie strictly in (0,1)");
    }
    return std::pow(alpha + (1.0 - alpha) / eta, alpha) / (2.0 - alpha);
}

double zeta_analytic_cdf(double z, double alpha) {
    check_cycle_alpha(alpha);
    const double lower = 1.0 / (2.0 - alpha);
    if (!(z > lower)) return 0.0;
    const double w = std::pow((2.0 - alpha) * z, 1.0 / alpha);
    return 1.0 - std::min(1.0, (1.0 - alpha) / (w - alpha));
}

double zeta_pareto_cdf(double z, double alpha) {
    check_cycle_alpha(alpha);
    const double lower = 1.0 / (2.0 - alpha);
    if (!(z > lower)) return 0.0;
    return 1.0 - std::pow((2.0 - alpha) * z, -1.0 / (1.0 - alpha));
}

double zeta_lag1_autocorrelation(const ZetaHarvest& harvest) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i + 1 < harvest.samples.size(); ++i) {
        const ZetaSample& a = harvest.samples[i];
        const ZetaSample& b = harvest.samples[i + 1];
        if (a.path == b.path && b.n == a.n + 1) {
            xs.push_back(a.zeta);
            ys.push_back(b.zeta);
        }
    }
    if (xs.size() < 2) return 0.0;
    const double n = static_cast<double>(xs.size());
    const double mx = pairwise_sum(xs) / n;
    const double my = pairwise_sum(ys) / n;
    std::vector<double> xy(xs.size()), xx(xs.size()), yy(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xy[i] = (xs[i] - mx) * (ys[i] - my);
        xx[i] = (xs[i] - mx) * (xs[i] - mx);
        yy[i] = (ys[i] - my) * (ys[i] - my);
    }
    const double denom = std::sqrt(pairwise_sum(xx) * pairwise_sum(yy));
    if (denom == 0.0) return 0.0;
    return pairwise_sum(xy) / denom;
}

OscillationStats oscillation_stats(const SampledPath& constrained, double alpha,
                                   double eps_low, double eps_high) {
    const SampledPath rel = relative_drawdown(constrained);
    OscillationStats st;
    const double lo = alpha + eps_low;
    const double hi = 1.0 - eps_high;
    bool in_low = false, in_high = false;
    for (std::size_t k = 0; k < rel.values.size(); ++k) {
        const double r = rel.values[k];
        st.min_rel_dd = std::min(st.min_rel_dd, r);
        st.max_rel_dd = std::max(st.max_rel_dd, r);
        const bool low = r <= lo;
        const bool high = r >= hi;
        if (low && !in_low) ++st.crossings_below;
        if (high && !in_high) ++st.crossings_above;
        in_low = low;
        in_high = high;
    }
    return st;
}

std::vector<double> turnpike_supdev(const SampledPath& xhat, double alpha,
                                    const std::vector<std::size_t>& n_list,
                                    std::size_t upto) {
    check_cycle_alpha(alpha);
    if (upto >= xhat.values.size()) {
        throw invalid_input("turnpike_supdev: upto beyond grid");
    }
    std::size_t max_n = 0;
    for (std::size_t n : n_list) {
        if (n < 1) throw invalid_input("turnpike_supdev: n must be >= 1");
        max_n = std::max(max_n, n);
    }
    const SampledPath axhat = az_forward(xhat, alpha);
    const CycleTimes ct = cycle_times(xhat, alpha, max_n);

    std::vector<double> out;
    out.reserve(n_list.size());
    for (std::size_t n : n_list) {
        if (ct.cycles.size() < n || ct.cycles[n - 1].first.index > upto) {
            out.push_back(0.0);  // switch happens after the window: identical paths
            continue;
        }
        const std::size_t start = ct.cycles[n - 1].first.index;
        const StopIndex hit = ct.cycles[n - 1].second;
        const double anchor = axhat.values[start];
        const double x_start = xhat.values[start];
        double dev = 0.0;
        double ratio_max = 1.0;
        double frozen = 0.0;
        for (std::size_t k = start + 1; k <= upto; ++k) {
            double val;
            if (!hit.is_finite() || k < hit.index) {
                const double ratio = xhat.values[k] / x_start;
                if (ratio > ratio_max) ratio_max = ratio;
                val = anchor * ratio;
            } else {
                if (k == hit.index) {
                    const double ratio = xhat.values[k] / x_start;
                    if (ratio > ratio_max) ratio_max = ratio;
                    frozen = alpha * (anchor * ratio_max);
                }
                val = frozen;
            }
            dev = std::max(dev, std::fabs(val - axhat.values[k]));
        }
        out.push_back(dev);
    }
    return out;
}

RatioOscillation horizon_ratio_oscillation(const SimBatch& batch, double alpha,
                                           const std::vector<std::size_t>& n_list,
                                           double threshold_mult, int threads) {
    check_cycle_alpha(alpha);
    std::size_t max_n = 0;
    for (std::size_t n : n_list) max_n = std::max(max_n, n);
    const ZetaHarvest harvest = zeta_samples(batch, alpha, max_n, threads);

    RatioOscillation result;
    result.lag1_autocorrelation = zeta_lag1_autocorrelation(harvest);
    std::size_t pairs = 0;
    for (std::size_t i = 0; i + 1 < harvest.samples.size(); ++i) {
        if (harvest.samples[i].path == harvest.samples[i + 1].path &&
            harvest.samples[i + 1].n == harvest.samples[i].n + 1) {
            ++pairs;
        }
    }
    result.n_pairs = pairs;

    const double threshold = threshold_mult / (2.0 - alpha);
    for (std::size_t n : n_list) {
        RatioOscillationRow row;
        row.n = n;
        std::vector<double> mins, maxs;
        double above = 0.0, count = 0.0;
        std::size_t i = 0;
        while (i < harvest.samples.size()) {
            const std::size_t path = harvest.samples[i].path;
            double rmin = harvest.samples[i].zeta, rmax = rmin;
            std::size_t reached = harvest.samples[i].n;
            std::size_t j = i;
            while (j < harvest.samples.size() && harvest.samples[j].path == path &&
                   harvest.samples[j].n <= n) {
                rmin = std::min(rmin, harvest.samples[j].zeta);
                rmax = std::max(rmax, harvest.samples[j].zeta);
                reached = harvest.samples[j].n;
                ++j;
            }
            if (reached == n) {  // path produced all n cycles
                mins.push_back(rmin);
                maxs.push_back(rmax);
                count += 1.0;
                if (rmax > threshold) above += 1.0;
            }
            while (j < harvest.samples.size() && harvest.samples[j].path == path) ++j;
            i = j;
        }
        if (!mins.empty()) {
            row.mean_running_min = pairwise_sum(mins) / static_cast<double>(mins.size());
            row.mean_running_max = pairwise_sum(maxs) / static_cast<double>(maxs.size());
            row.frac_running_max_above = count > 0.0 ? above / count : 0.0;
        }
        result.rows.push_back(row);
    }
    return result;
}

}  // namespace ddlab
