#include "ddlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ddlab/errors.hpp"
#include "ddlab/horizon.hpp"
#include "ddlab/parallel.hpp"
#include "ddlab/returns.hpp"
#include "ddlab/rng.hpp"

namespace ddlab {

namespace {

std::string fmt(double v, const char* spec = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return std::string(buf);
}

MetricRow row_from_estimate(std::string name, const MCEstimate& est, bool pass) {
    MetricRow row;
    row.test = std::move(name);
    row.mean = est.mean;
    row.se = est.se;
    row.n = est.n;
    row.flagged = est.flagged;
    row.pass = pass;
    return row;
}

// One-sided Monte Carlo acceptance at three standard errors.
bool below_with_margin(const MCEstimate& est, double bound) {
    return est.mean <= bound + 3.0 * est.se;
}

// Log-space step of the direct preset: log X = t/2 + beta_t.
struct DdsWalk {
    CounterRng rng;
    double dt;
    double sqdt;
    double lw = 0.0;
    double lmax = 0.0;

    DdsWalk(std::uint64_t seed, std::size_t path, double dt_)
        : rng(seed, path), dt(dt_), sqdt(std::sqrt(dt_)) {}

    void step() {
        lw += 0.5 * dt + sqdt * rng.next_normal();
        if (lw > lmax) lmax = lw;
    }
};

// log of the transformed value from (log x, log x*).
double log_az_value(double lw, double lmax, double alpha) {
    if (alpha == 0.0) return lw;
    return (1.0 - alpha) * lmax + std::log(alpha + (1.0 - alpha) * std::exp(lw - lmax));
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Per-step proportions for a named strategy on a realized path.
struct StrategyRule {
    std::string name;
    // table rows for "custom" strategies loaded from CSV (n_steps x d)
    std::vector<double> table;
    int d = 1;

    ProportionRule make(const NumerairePath& num) const {
        const int dim = d;
        if (name == "baseline") {
            return [dim](std::size_t, double, std::span<const double>, std::span<double> pi) {
                std::fill(pi.begin(), pi.end(), 0.0);
            };
        }
        if (name == "buyhold") {
            return [dim](std::size_t, double, std::span<const double>, std::span<double> pi) {
                std::fill(pi.begin(), pi.end(), 0.0);
                pi[0] = 1.0;
            };
        }
        if (name == "halfkelly") {
            const std::vector<double>* rho = &num.rho;
            return [rho, dim](std::size_t k, double, std::span<const double>,
                              std::span<double> pi) {
                const double* r = rho->data() + k * static_cast<std::size_t>(dim);
                for (int i = 0; i < dim; ++i) pi[static_cast<std::size_t>(i)] = 0.5 * r[i];
            };
        }
        const std::vector<double>* tab = &table;
        return [tab, dim](std::size_t k, double, std::span<const double>,
                          std::span<double> pi) {
            const std::size_t off = k * static_cast<std::size_t>(dim);
            for (int i = 0; i < dim; ++i) {
                pi[static_cast<std::size_t>(i)] =
                    (*tab)[std::min(off + static_cast<std::size_t>(i), tab->size() - 1)];
            }
        };
    }
};

std::vector<double> load_proportions_csv(const std::string& filename, int d,
                                         std::size_t n_steps) {
    std::ifstream is(filename);
    if (!is) throw io_error("cannot open proportions csv: " + filename);
    std::string line;
    if (!std::getline(is, line)) throw io_error("proportions csv: empty file");
    std::vector<double> table;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) table.push_back(std::stod(cell));
    }
    if (table.size() < static_cast<std::size_t>(d) * n_steps) {
        throw io_error("proportions csv: need n_steps rows of d columns");
    }
    return table;
}

}  // namespace

void ExperimentReport::add(MetricRow row) {
    passed = passed && row.pass;
    rows.push_back(std::move(row));
}

// ---------------------------------------------------------------------------
// numeraire-test: expected relative returns against the constrained optimum
// at the log-level hitting time, the phi supermartingale diagnostic, and the
// sampled-supermartingale difference between two nested times of maximum.
// ---------------------------------------------------------------------------

ExperimentReport run_numeraire_test(const ExperimentConfig& cfg) {
    ExperimentReport report;
    report.experiment = "numeraire-test";
    report.claim =
        "expected relative return vs the constrained optimum at times of "
        "maximum is nonpositive; E[phi] stays at or below 1 (hitting times "
        "unresolved on the grid evaluate at the horizon)";
    report.seed = cfg.seed;
    report.config_echo = cfg.echo();

    const SimBatch batch = simulate_batch(cfg.build_model(), cfg.build_grid(),
                                          cfg.n_paths, cfg.seed);
    const double alpha = cfg.alpha;
    const double level_hi = std::exp(cfg.level);
    const double level_lo = std::exp(0.5 * cfg.level);

    std::vector<StrategyRule> rules;
    for (const std::string& name : split_list(cfg.strategy)) {
        StrategyRule rule;
        rule.name = name;
        rule.d = batch.model.d;
        if (name != "baseline" && name != "buyhold" && name != "halfkelly") {
            rule.table = load_proportions_csv(name, batch.model.d, batch.grid.n_steps);
        }
        rules.push_back(std::move(rule));
    }
    if (rules.empty()) throw invalid_input("numeraire-test: no strategies given");

    const std::size_t ns = rules.size();
    const std::size_t np = batch.n_paths;
    std::vector<std::vector<double>> rr_tau(ns, std::vector<double>(np));
    std::vector<std::vector<double>> phi_tau(ns, std::vector<double>(np));
    std::vector<std::vector<double>> sm_diff(ns, std::vector<double>(np));

    parallel_for_index(np, cfg.threads, [&](std::size_t i) {
        const PathRecord rec = generate_path(batch, i);
        const NumerairePath num = numeraire_path(batch.model, rec, i);
        const SampledPath axhat = az_forward(num.wealth, alpha);
        const StopIndex tau = first_hit_level(num.wealth, level_hi);
        const StopIndex sigma = first_hit_level(num.wealth, level_lo);
        for (std::size_t s = 0; s < ns; ++s) {
            const SampledPath x = wealth_from_proportions(rec, rules[s].make(num));
            const SampledPath ax = az_forward(x, alpha);
            rr_tau[s][i] = rr_at(ax, axhat, tau);
            const SampledPath phi = phi_process(x, num.wealth, alpha);
            const std::size_t k =
                tau.is_finite() ? std::min(tau.index, phi.grid.n_steps) : phi.grid.n_steps;
            phi_tau[s][i] = phi.values[k];
            sm_diff[s][i] = rr_at(ax, axhat, tau) - rr_at(ax, axhat, sigma);
        }
    });

    std::ostringstream dump;
    dump << "strategy,path,rr_tau,phi_tau,sm_diff\n";
    for (std::size_t s = 0; s < ns; ++s) {
        const MCEstimate err = mc_estimate(rr_tau[s]);
        report.add(row_from_estimate("err_tau_" + rules[s].name, err,
                                     below_with_margin(err, 0.0)));
        const MCEstimate phi = mc_estimate(phi_tau[s]);
        report.add(row_from_estimate("phi_tau_" + rules[s].name, phi,
                                     below_with_margin(phi, 1.0)));
        const MCEstimate diff = mc_estimate(sm_diff[s]);
        report.add(row_from_estimate("supermartingale_diff_" + rules[s].name, diff,
                                     below_with_margin(diff, 0.0)));
        if (cfg.dump_samples) {
            for (std::size_t i = 0; i < np; ++i) {
                dump << rules[s].name << ',' << i << ',' << fmt(rr_tau[s][i], "%.17g")
                     << ',' << fmt(phi_tau[s][i], "%.17g") << ','
                     << fmt(sm_diff[s][i], "%.17g") << '\n';
            }
        }
    }
    if (cfg.dump_samples) report.artifacts.emplace_back("numeraire_test_samples.csv", dump.str());
    return report;
}

// ---------------------------------------------------------------------------
// growth: mean of log(constrained optimum at T) / G_T against 1 - alpha,
// with a panel of constrained test strategies bounded above by it.
// ---------------------------------------------------------------------------

ExperimentReport run_growth(const ExperimentConfig& cfg) {
    ExperimentReport report;
    report.experiment = "growth";
    report.claim =
        "normalized log growth of the constrained optimum tends to 1-alpha; "
        "no constrained strategy beats it";
    report.seed = cfg.seed;
    report.config_echo = cfg.echo();

    const SimBatch batch = simulate_batch(cfg.build_model(), cfg.build_grid(),
                                          cfg.n_paths, cfg.seed);
    const double alpha = cfg.alpha;
    const std::size_t np = cfg.n_paths;
    const std::size_t n = batch.grid.n_steps;

    std::vector<double> main_ratio(np), base_ratio(np), half_ratio(np), hold_ratio(np);

    if (batch.model.kind == MarketModel::Kind::DdsDirect) {
        // G_t = t/2 for this preset.
        const double g_T = 0.5 * batch.grid.t_max();
        parallel_for_index(np, cfg.threads, [&](std::size_t i) {
            DdsWalk walk(batch.seed, i, batch.grid.dt);
            double lhk = 0.0, lhk_max = 0.0;  // half-fraction wealth in log scale
            for (std::size_t k = 0; k < n; ++k) {
                const double before = walk.lw;
                walk.step();
                const double inc = walk.lw - before;
                lhk += std::log1p(0.5 * std::expm1(inc));
                if (lhk > lhk_max) lhk_max = lhk;
            }
            main_ratio[i] = log_az_value(walk.lw, walk.lmax, alpha) / g_T;
            hold_ratio[i] = main_ratio[i];  // the asset is the optimum here
            base_ratio[i] = 0.0;            // transformed baseline stays at 1
            half_ratio[i] = log_az_value(lhk, lhk_max, alpha) / g_T;
        });
    } else {
        parallel_for_index(np, cfg.threads, [&](std::size_t i) {
            const PathRecord rec = generate_path(batch, i);
            const NumerairePath num = numeraire_path(batch.model, rec, i);
            const double g_T = num.growth.back();
            if (!(g_T > 0.0)) {
                throw invalid_input("growth: degenerate model with G_T = 0");
            }
            const SampledPath ax = az_forward(num.wealth, alpha);
            main_ratio[i] = std::log(ax.back()) / g_T;
            base_ratio[i] = 0.0;
            const int d = batch.model.d;
            std::vector<double> e1(static_cast<std::size_t>(d), 0.0);
            e1[0] = 1.0;
            const SampledPath hold = wealth_from_proportions(rec, e1);
            hold_ratio[i] = std::log(az_forward(hold, alpha).back()) / g_T;
            StrategyRule half;
            half.name = "halfkelly";
            half.d = d;
            const SampledPath hk = wealth_from_proportions(rec, half.make(num));
            half_ratio[i] = std::log(az_forward(hk, alpha).back()) / g_T;
        });
    }

    const double target = 1.0 - alpha;
    const MCEstimate main_est = mc_estimate(main_ratio);
    report.add(row_from_estimate("mean_log_optimum_over_G", main_est,
                                 std::fabs(main_est.mean - target) <= 0.05));
    const MCEstimate base_est = mc_estimate(base_ratio);
    report.add(row_from_estimate("panel_baseline", base_est, base_est.mean <= target + 0.05));
    const MCEstimate hold_est = mc_estimate(hold_ratio);
    report.add(row_from_estimate("panel_buyhold", hold_est, hold_est.mean <= target + 0.05));
    const MCEstimate half_est = mc_estimate(half_ratio);
    report.add(row_from_estimate("panel_halfkelly", half_est, half_est.mean <= target + 0.05));

    if (cfg.dump_samples) {
        std::ostringstream dump;
        dump << "path,ratio_optimum,ratio_baseline,ratio_buyhold,ratio_halfkelly\n";
        for (std::size_t i = 0; i < np; ++i) {
            dump << i << ',' << fmt(main_ratio[i], "%.17g") << ','
                 << fmt(base_ratio[i], "%.17g") << ',' << fmt(hold_ratio[i], "%.17g")
                 << ',' << fmt(half_ratio[i], "%.17g") << '\n';
        }
        report.artifacts.emplace_back("growth_samples.csv", dump.str());
    }
    return report;
}

// ---------------------------------------------------------------------------
// zeta-law: distribution of the cycle wealth ratios.
// ---------------------------------------------------------------------------

ExperimentReport run_zeta_law(const ExperimentConfig& cfg) {
    ExperimentReport report;
    report.experiment = "zeta-law";
    report.claim =
        "cycle wealth ratios are i.i.d. on [1/(2-alpha), inf); the uniform-eta "
        "closed form is tested against them alongside the exponential form";
    report.seed = cfg.seed;
    report.config_echo = cfg.echo();

    const double alpha = cfg.alpha;
    const SimBatch batch = simulate_batch(cfg.build_model(), cfg.build_grid(),
                                          cfg.n_paths, cfg.seed);
    const ZetaHarvest harvest = zeta_samples(batch, alpha, cfg.max_n, cfg.threads);

    // Pre-validation of the closed form against the direct eta-sampling
    // oracle. This checks the CDF algebra against its own sampler.
    {
        const std::size_t k_oracle = 1000000;
        CounterRng rng(cfg.seed ^ 0x5ca1ab1eULL, 0);
        std::vector<double> mapped(k_oracle);
        for (std::size_t i = 0; i < k_oracle; ++i) {
            mapped[i] = zeta_map(rng.next_uniform(), alpha);
        }
        std::sort(mapped.begin(), mapped.end());
        double sup = 0.0;
        const double kn = static_cast<double>(k_oracle);
        for (std::size_t i = 0; i < k_oracle; ++i) {
            const double f = zeta_analytic_cdf(mapped[i], alpha);
            sup = std::max(sup, std::fabs((static_cast<double>(i) + 1.0) / kn - f));
            sup = std::max(sup, std::fabs(f - static_cast<double>(i) / kn));
        }
        MetricRow row;
        row.test = "cdf_oracle_supdiff";
        row.mean = sup;
        row.n = k_oracle;
        row.pass = sup < 0.005;
        report.add(row);
    }

    std::vector<double> zs;
    zs.reserve(harvest.samples.size());
    for (const ZetaSample& s : harvest.samples) zs.push_back(s.zeta);

    {
        MetricRow row;
        row.test = "n_samples";
        row.mean = static_cast<double>(zs.size());
        row.n = zs.size();
        row.pass = !harvest.empty_warning;
        report.add(row);
    }
    if (zs.empty()) return report;

    {
        const double lower = 1.0 / (2.0 - alpha);
        const double zmin = *std::min_element(zs.begin(), zs.end());
        MetricRow row;
        row.test = "min_sample_vs_support";
        row.mean = zmin;
        row.n = zs.size();
        row.pass = zmin >= lower - 1e-3;
        report.add(row);
    }
    if (zs.size() >= 20) {
        const KsResult ks_eta = ks_test(zs, [alpha](double z) {
            return zeta_analytic_cdf(z, alpha);
        });
        MetricRow row;
        row.test = "ks_p_uniform_eta_form";
        row.mean = ks_eta.p_value;
        row.se = ks_eta.statistic;
        row.n = ks_eta.n;
        row.pass = ks_eta.p_value > 0.01;
        report.add(row);

        const KsResult ks_exp = ks_test(zs, [alpha](double z) {
            return zeta_pareto_cdf(z, alpha);
        });
        MetricRow row2;
        row2.test = "ks_p_exponential_form";
        row2.mean = ks_exp.p_value;
        row2.se = ks_exp.statistic;
        row2.n = ks_exp.n;
        row2.pass = ks_exp.p_value > 0.01;
        report.add(row2);
    }
    {
        const double rho = zeta_lag1_autocorrelation(harvest);
        std::size_t pairs = 0;
        for (std::size_t i = 0; i + 1 < harvest.samples.size(); ++i) {
            if (harvest.samples[i].path == harvest.samples[i + 1].path &&
                harvest.samples[i + 1].n == harvest.samples[i].n + 1) {
                ++pairs;
            }
        }
        MetricRow row;
        row.test = "lag1_autocorrelation";
        row.mean = rho;
        row.n = pairs;
        row.pass = pairs < 4 || std::fabs(rho) <= 3.0 / std::sqrt(static_cast<double>(pairs));
        report.add(row);
    }
    if (cfg.dump_samples) {
        std::ostringstream dump;
        dump << "path,n,zeta\n";
        for (const ZetaSample& s : harvest.samples) {
            dump << s.path << ',' << s.n << ',' << fmt(s.zeta, "%.17g") << '\n';
        }
        report.artifacts.emplace_back("zeta_samples.csv", dump.str());
    }
    return report;
}

// ---------------------------------------------------------------------------
// oscillation: the relative drawdown of the constrained optimum visits a
// neighbourhood of alpha and touches 1 on every path.
// ---------------------------------------------------------------------------

ExperimentReport run_oscillation(const ExperimentConfig& cfg) {
    ExperimentReport report;
    report.experiment = "oscillation";
    report.claim =
        "relative drawdown of the constrained optimum oscillates: liminf at "
        "alpha, maximum 1 on every path";
    report.seed = cfg.seed;
    report.config_echo = cfg.echo();

    const SimBatch batch = simulate_batch(cfg.build_model(), cfg.build_grid(),
                                          cfg.n_paths, cfg.seed);
    const double alpha = cfg.alpha;
    const double eps = cfg.eps;
    const std::size_t np = cfg.n_paths;
    const std::size_t n = batch.grid.n_steps;

    std::vector<double> min_rel(np), max_rel(np), below(np), above(np);

    if (batch.model.kind == MarketModel::Kind::DdsDirect) {
        const double lo_log = std::log(eps / (1.0 - alpha));          // rel <= alpha+eps
        const double hi_log = std::log1p(-eps / (1.0 - alpha));       // rel >= 1-eps
        parallel_for_index(np, cfg.threads, [&](std::size_t i) {
            DdsWalk walk(batch.seed, i, batch.grid.dt);
            double dmin = 0.0;
            std::size_t n_below = 0, n_above = 1;  // starts at a maximum
            bool in_low = false, in_high = true;
            for (std::size_t k = 0; k < n; ++k) {
                walk.step();
                const double dd = walk.lw - walk.lmax;
                if (dd < dmin) dmin = dd;
                const bool low = dd <= lo_log;
                const bool high = dd >= hi_log;
                if (low && !in_low) ++n_below;
                if (high && !in_high) ++n_above;
                in_low = low;
                in_high = high;
            }
            min_rel[i] = alpha + (1.0 - alpha) * std::exp(dmin);
            max_rel[i] = 1.0;  // attained at time 0
            below[i] = static_cast<double>(n_below);
            above[i] = static_cast<double>(n_above);
        });
    } else {
        parallel_for_index(np, cfg.threads, [&](std::size_t i) {
            const NumerairePath num = numeraire_path(batch, i);
            const SampledPath ax = az_forward(num.wealth, alpha);
            const OscillationStats st = oscillation_stats(ax, alpha, eps, eps);
            min_rel[i] = st.min_rel_dd;
            max_rel[i] = st.max_rel_dd;
            below[i] = static_cast<double>(st.crossings_below);
            above[i] = static_cast<double>(st.crossings_above);
        });
    }

    std::vector<double> hit(np);
    for (std::size_t i = 0; i < np; ++i) hit[i] = min_rel[i] <= alpha + eps ? 1.0 : 0.0;
    const MCEstimate frac = mc_estimate(hit);
    report.add(row_from_estimate("frac_min_rel_dd_near_alpha", frac, frac.mean >= 0.99));

    bool all_max_one = true;
    for (std::size_t i = 0; i < np; ++i) all_max_one = all_max_one && max_rel[i] == 1.0;
    MetricRow maxrow;
    maxrow.test = "max_rel_dd_equals_one";
    maxrow.mean = all_max_one ? 1.0 : 0.0;
    maxrow.n = np;
    maxrow.pass = all_max_one;
    report.add(maxrow);

    report.add(row_from_estimate("mean_min_rel_dd", mc_estimate(min_rel), true));
    report.add(row_from_estimate("mean_entries_below", mc_estimate(below), true));
    report.add(row_from_estimate("mean_entries_above", mc_estimate(above), true));

    if (cfg.dump_samples) {
        std::ostringstream dump;
        dump << "path,min_rel_dd,max_rel_dd,entries_below,entries_above\n";
        for (std::size_t i = 0; i < np; ++i) {
            dump << i << ',' << fmt(min_rel[i], "%.17g") << ',' << fmt(max_rel[i], "%.17g")
                 << ',' << below[i] << ',' << above[i] << '\n';
        }
        report.artifacts.emplace_back("oscillation_samples.csv", dump.str());
    }
    return report;
}

// ---------------------------------------------------------------------------
// drawdown-race: probability that the relative drawdown reaches alpha before
// the wealth e-folds its starting maximum.
// ---------------------------------------------------------------------------

ExperimentReport run_drawdown_race(const ExperimentConfig& cfg) {
    ExperimentReport report;
    report.experiment = "drawdown-race";
    report.claim = "P(drawdown to alpha before an e-fold of the maximum) >= alpha";
    report.seed = cfg.seed;
    report.config_echo = cfg.echo();

    const double alpha = cfg.alpha;
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw invalid_input("drawdown-race: alpha must lie strictly in (0,1)");
    }
    const SimBatch batch = simulate_batch(cfg.build_model(), cfg.build_grid(),
                                          cfg.n_paths, cfg.seed);
    const std::size_t np = cfg.n_paths;
    const std::size_t n = batch.grid.n_steps;
    std::vector<double> win(np);

    if (batch.model.kind == MarketModel::Kind::DdsDirect) {
        const double log_alpha = std::log(alpha);
        parallel_for_index(np, cfg.threads, [&](std::size_t i) {
            DdsWalk walk(batch.seed, i, batch.grid.dt);
            double result = std::numeric_limits<double>::quiet_NaN();  // unresolved
            for (std::size_t k = 0; k < n; ++k) {
                walk.step();
                if (walk.lw - walk.lmax <= log_alpha) {
                    result = 1.0;
                    break;
                }
                if (walk.lw >= 1.0) {
                    result = 0.0;
                    break;
                }
            }
            win[i] = result;
        });
    } else {
        parallel_for_index(np, cfg.threads, [&](std::size_t i) {
            const NumerairePath num = numeraire_path(batch, i);
            const StopIndex dd = first_drawdown_hit(num.wealth, alpha);
            const StopIndex up =
                first_hit_level(num.wealth, std::exp(1.0) * num.wealth.front());
            if (!dd.is_finite() && !up.is_finite()) {
                win[i] = std::numeric_limits<double>::quiet_NaN();
            } else {
                win[i] = dd < up ? 1.0 : 0.0;
            }
        });
    }

    const MCEstimate freq = mc_estimate(win);  // unresolved paths land in `flagged`
    report.add(row_from_estimate("win_frequency", freq,
                                 freq.mean >= alpha - 3.0 * freq.se));

    if (cfg.dump_samples) {
        std::ostringstream dump;
        dump << "path,win\n";
        for (std::size_t i = 0; i < np; ++i) {
            dump << i << ',' << (std::isnan(win[i]) ? std::string("excluded") : fmt(win[i], "%.0f"))
                 << '\n';
        }
        report.artifacts.emplace_back("race_samples.csv", dump.str());
    }
    return report;
}

// ---------------------------------------------------------------------------
// turnpike: the horizon-n optimum coincides with the asymptotic optimum on
// [0, tau_l] unless its switch time arrives first; the probability of that
// event decays in n.
// ---------------------------------------------------------------------------

ExperimentReport run_turnpike(const ExperimentConfig& cfg) {
    ExperimentReport report;
    report.experiment = "turnpike";
    report.claim =
        "finite-horizon optima coincide with the asymptotic optimum on initial "
        "segments; deviation probability on [0,tau_l] decays in the horizon index";
    report.seed = cfg.seed;
    report.config_echo = cfg.echo();

    const double alpha = cfg.alpha;
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw invalid_input("turnpike: alpha must lie strictly in (0,1)");
    }
    const SimBatch batch = simulate_batch(cfg.build_model(), cfg.build_grid(),
                                          cfg.n_paths, cfg.seed);
    const std::vector<std::size_t>& n_list = cfg.n_list;
    std::size_t max_n = 0;
    for (std::size_t v : n_list) max_n = std::max(max_n, v);

    const std::size_t np = cfg.n_paths;
    const std::size_t n_steps = batch.grid.n_steps;
    const double level = cfg.level;

    std::vector<std::vector<double>> switched(n_list.size(), std::vector<double>(np));
    std::vector<std::vector<double>> supdev(n_list.size(), std::vector<double>(np));
    std::vector<char> zero_dev_consistent(np, 1);
    const bool dds = batch.model.kind == MarketModel::Kind::DdsDirect;

    parallel_for_index(np, cfg.threads, [&](std::size_t i) {
        // Materialize the optimum wealth up to the hitting time of exp(level).
        std::vector<double> values;
        std::size_t upto = StopIndex::npos;
        if (dds) {
            DdsWalk walk(batch.seed, i, batch.grid.dt);
            values.reserve(4096);
            values.push_back(1.0);
            for (std::size_t k = 0; k < n_steps; ++k) {
                walk.step();
                values.push_back(std::exp(walk.lw));
                if (walk.lw >= level) {
                    upto = k + 1;
                    break;
                }
            }
        } else {
            const NumerairePath num = numeraire_path(batch, i);
            values = num.wealth.values;
            const StopIndex tau = first_hit_level(num.wealth, std::exp(level));
            if (tau.is_finite()) upto = tau.index;
        }
        if (upto == StopIndex::npos) {
            for (std::size_t j = 0; j < n_list.size(); ++j) {
                switched[j][i] = std::numeric_limits<double>::quiet_NaN();
                supdev[j][i] = std::numeric_limits<double>::quiet_NaN();
            }
            return;  // tau_l not realized on the grid; excluded with a flag
        }
        values.resize(upto + 1);
        const SampledPath xhat(TimeGrid(batch.grid.dt, upto), std::move(values));
        const CycleTimes ct = cycle_times(xhat, alpha, max_n);
        const std::vector<double> devs = turnpike_supdev(xhat, alpha, n_list, upto);
        for (std::size_t j = 0; j < n_list.size(); ++j) {
            const std::size_t n = n_list[j];
            const bool has_switch =
                ct.cycles.size() >= n && ct.cycles[n - 1].first.index <= upto;
            switched[j][i] = has_switch ? 1.0 : 0.0;
            supdev[j][i] = devs[j];
            if (!has_switch && devs[j] != 0.0) zero_dev_consistent[i] = 0;
        }
    });

    double prev_p = 1.0;
    bool monotone = true;
    double p_last = 1.0;
    for (std::size_t j = 0; j < n_list.size(); ++j) {
        const MCEstimate sw = mc_estimate(switched[j]);
        if (sw.mean > prev_p + 1e-15) monotone = false;
        prev_p = sw.mean;
        p_last = sw.mean;
        report.add(row_from_estimate("p_switch_before_tau_n" + std::to_string(n_list[j]),
                                     sw, true));
        const MCEstimate dv = mc_estimate(supdev[j]);
        report.add(row_from_estimate("mean_supdev_n" + std::to_string(n_list[j]), dv, true));
    }
    {
        MetricRow row;
        row.test = "p_switch_nonincreasing";
        row.mean = monotone ? 1.0 : 0.0;
        row.pass = monotone;
        report.add(row);
    }
    {
        MetricRow row;
        row.test = "p_switch_last_below_0.05";
        row.mean = p_last;
        row.pass = p_last < 0.05;
        report.add(row);
    }
    {
        bool all_zero = true;
        for (char c : zero_dev_consistent) all_zero = all_zero && c == 1;
        MetricRow row;
        row.test = "supdev_zero_without_switch";
        row.mean = all_zero ? 1.0 : 0.0;
        row.n = np;
        row.pass = all_zero;
        report.add(row);
    }

    if (cfg.dump_samples) {
        std::ostringstream dump;
        dump << "path,n,switched,supdev\n";
        for (std::size_t j = 0; j < n_list.size(); ++j) {
            for (std::size_t i = 0; i < np; ++i) {
                dump << i << ',' << n_list[j] << ',' << fmt(switched[j][i], "%.0f") << ','
                     << fmt(supdev[j][i], "%.17g") << '\n';
            }
        }
        report.artifacts.emplace_back("turnpike_samples.csv", dump.str());
    }
    return report;
}

// ---------------------------------------------------------------------------
// selftest: exact pathwise identities on deterministic and simulated paths.
// ---------------------------------------------------------------------------

namespace {

SampledPath make_path(std::initializer_list<double> vals) {
    std::vector<double> v(vals);
    const std::size_t steps = v.size() - 1;
    return SampledPath(TimeGrid(1.0, steps), std::move(v));
}

}  // namespace

ExperimentReport run_selftest(const ExperimentConfig& cfg) {
    ExperimentReport report;
    report.experiment = "selftest";
    report.claim = "exact pathwise identities of the transform calculus";
    report.seed = cfg.seed;
    report.config_echo = cfg.echo();

    auto check = [&report](const std::string& name, bool ok, double value = 0.0) {
        MetricRow row;
        row.test = name;
        row.mean = value;
        row.pass = ok;
        report.add(row);
    };

    // running max / relative drawdown on hand paths
    {
        const SampledPath p = make_path({1.0, 2.0, 1.5});
        const SampledPath m = running_max(p);
        const SampledPath mm = running_max(m);
        check("running_max_prefix", m.values == std::vector<double>({1.0, 2.0, 2.0}));
        check("running_max_idempotent", mm.values == m.values);
        const SampledPath r = relative_drawdown(p);
        check("relative_drawdown_values",
              r.values == std::vector<double>({1.0, 1.0, 0.75}));
    }

    // simulated corpus for the transform identities
    const SimBatch batch =
        simulate_batch(MarketModel::gbm_preset(), TimeGrid(0.01, 400), 64, cfg.seed);
    bool dd_identity = true, intertwine = true, round_trip = true, composition = true;
    bool argmax_same = true, max_value = true, phi_starts = true, rr_identity = true;
    bool wealth_repro = true, hit_identity = true;
    double worst_rt = 0.0;
    const double alphas[] = {0.1, 0.5, 0.9};
    for (std::size_t i = 0; i < batch.n_paths; ++i) {
        const PathRecord rec = generate_path(batch, i);
        const NumerairePath num = numeraire_path(batch.model, rec, i);
        const SampledPath& x = num.wealth;
        const SampledPath relx = relative_drawdown(x);
        for (double a : alphas) {
            const SampledPath ax = az_forward(x, a);
            const SampledPath m = running_max(x);
            const SampledPath am = running_max(ax);
            const SampledPath rel = relative_drawdown(ax);
            for (std::size_t k = 0; k < x.size(); ++k) {
                if (std::fabs(rel[k] - (a + (1.0 - a) * relx[k])) > 1e-12) dd_identity = false;
                if (am[k] != std::pow(m[k], 1.0 - a)) intertwine = false;
                const bool xmax = x[k] == m[k];
                const bool axmax = ax[k] == am[k];
                if (xmax != axmax) argmax_same = false;
                if (xmax && ax[k] != std::pow(m[k], 1.0 - a)) max_value = false;
            }
            const SampledPath back = az_inverse(ax, a);
            for (std::size_t k = 0; k < x.size(); ++k) {
                const double err = std::fabs(back[k] - x[k]) / std::max(1e-300, x[k]);
                worst_rt = std::max(worst_rt, err);
                if (err > 1e-10) round_trip = false;
            }
            const double b = 0.35;
            const SampledPath ab = az_forward(ax, b);
            const SampledPath ag = az_forward(x, 1.0 - (1.0 - a) * (1.0 - b));
            for (std::size_t k = 0; k < x.size(); ++k) {
                if (std::fabs(ab[k] - ag[k]) / std::max(1.0, ag[k]) > 1e-10) {
                    composition = false;
                }
            }
        }
        // phi starts at 1; rr reversal identity at the terminal index
        const SampledPath hold = wealth_from_proportions(rec, std::vector<double>{1.0});
        const SampledPath phi = phi_process(hold, x, 0.5);
        if (phi.values[0] != 1.0) phi_starts = false;
        const RrIdentityReport rr =
            rr_inequality_check(hold, x, StopIndex::infinity());
        if (!rr.ok) rr_identity = false;
        // reproducing the optimum through the generic recursion is bit-exact
        const std::vector<double>& rho = num.rho;
        const SampledPath same = wealth_from_proportions(
            rec, [&rho](std::size_t k, double, std::span<const double>,
                        std::span<double> pi) { pi[0] = rho[k]; });
        if (same.values != x.values) wealth_repro = false;
        // hitting-level identity: the transformed optimum first reaches
        // exp((1-a) l) within one step of when the optimum reaches exp(l)
        const double l = 0.2;
        const StopIndex t1 = first_hit_level(x, std::exp(l));
        const SampledPath ax = az_forward(x, 0.5);
        const StopIndex t2 = first_hit_level(ax, std::exp(0.5 * l));
        if (t1.is_finite() != t2.is_finite()) hit_identity = false;
        if (t1.is_finite()) {
            const std::size_t d =
                t1.index > t2.index ? t1.index - t2.index : t2.index - t1.index;
            if (d > 1) hit_identity = false;
        }
    }
    check("drawdown_identity_1e-12", dd_identity);
    check("running_max_intertwining_exact", intertwine);
    check("round_trip_1e-10", round_trip, worst_rt);
    check("composition_law_1e-10", composition);
    check("argmax_sets_coincide", argmax_same);
    check("value_at_maximum_pow", max_value);
    check("phi_starts_at_one", phi_starts);
    check("rr_reversal_identity", rr_identity);
    check("wealth_reproduction_bitwise", wealth_repro);
    check("hitting_level_identity_one_step", hit_identity);

    // finite-horizon construction on an exact-hit path
    {
        const SampledPath x = make_path({1.0, 2.0, 1.0});
        const FiniteHorizonPath fh = finite_horizon_numeraire(x, 0.5, 1);
        check("finite_horizon_trace",
              fh.horizon_reached && fh.path.values == std::vector<double>({1.0, 2.0, 1.0}));
        const SampledPath ax = az_forward(x, 0.5);
        const double direct = fh.path.values[2] / ax.values[2];
        const double formula = std::pow(2.0 / 1.0, 0.5) / 1.5;
        check("zeta_two_routes_1e-10", std::fabs(direct - formula) <= 1e-10, direct);
        check("finite_horizon_constraint",
              verify_drawdown(fh.path, 0.5, 1e-12).ok());
        const CycleTimes ct = cycle_times(make_path({1, 2, 1, 2, 3, 1.5}), 0.5);
        check("cycle_trace",
              ct.cycles.size() >= 2 && ct.cycles[0].first.index == 0 &&
                  ct.cycles[0].second.index == 2 && ct.cycles[1].first.index == 3 &&
                  ct.cycles[1].second.index == 5);
    }

    // zeta map and closed forms at pinned points
    {
        const double z_mid = zeta_map(0.5, 0.5);
        check("zeta_map_at_half", std::fabs(z_mid - 0.8164965809277260) <= 1e-12, z_mid);
        check("zeta_cdf_at_map_half",
              std::fabs(zeta_analytic_cdf(z_mid, 0.5) - 0.5) <= 1e-12);
        check("zeta_cdf_support", zeta_analytic_cdf(1.0 / 1.5, 0.5) == 0.0 &&
                                      zeta_analytic_cdf(1e9, 0.5) > 0.999999);
    }

    // remaining exact identities on a small direct-preset batch
    {
        const SimBatch dds = simulate_batch(MarketModel::dds_preset(),
                                            TimeGrid(5e-4, 20000), 24, cfg.seed + 1);
        bool rel_range = true, hit_monotone = true, dd_antitone = true;
        bool growth_monotone = true, regen_bitwise = true;
        bool zeta_support = true, fh_prefix = true, boundary_value = true;
        for (std::size_t i = 0; i < dds.n_paths; ++i) {
            const NumerairePath num = numeraire_path(dds, i);
            const SampledPath& x = num.wealth;
            for (std::size_t k = 0; k < x.size(); ++k) {
                if (num.growth[k] > num.growth[std::min(k + 1, x.grid.n_steps)]) {
                    growth_monotone = false;
                }
            }
            const SampledPath rel = relative_drawdown(x);
            if (rel[0] != 1.0) rel_range = false;
            for (double v : rel.values) {
                if (!(v >= 0.0 && v <= 1.0)) rel_range = false;
            }
            StopIndex prev_hit = StopIndex::at(0);
            for (double level : {1.05, 1.2, 1.5}) {
                const StopIndex hit = first_hit_level(x, level);
                if (hit < prev_hit) hit_monotone = false;
                prev_hit = hit;
            }
            StopIndex prev_dd = StopIndex::infinity();
            for (double a : {0.3, 0.6, 0.9}) {
                const StopIndex hit = first_drawdown_hit(x, a);
                if (hit > prev_dd) dd_antitone = false;
                prev_dd = hit;
            }
            if (numeraire_path(dds, i).wealth.values != x.values) regen_bitwise = false;
            for (const ZetaSample& s : zeta_from_path(x, 0.5, 8, i)) {
                if (s.zeta < 1.0 / 1.5) zeta_support = false;
            }
            const FiniteHorizonPath fh = finite_horizon_numeraire(x, 0.5, 1);
            if (fh.horizon_reached) {
                const SampledPath ax = az_forward(x, 0.5);
                const CycleTimes ct = cycle_times(x, 0.5, 1);
                for (std::size_t k = 0; k <= ct.cycles[0].first.index; ++k) {
                    if (fh.path.values[k] != ax.values[k]) fh_prefix = false;
                }
            }
        }
        // value at an exact drawdown hit: alpha(2-alpha)(max)^(1-alpha)
        {
            const SampledPath x = make_path({1.0, 2.0, 1.0});
            const SampledPath ax = az_forward(x, 0.5);
            boundary_value =
                std::fabs(ax[2] - 0.5 * 1.5 * std::pow(2.0, 0.5)) <= 1e-15;
        }
        check("relative_drawdown_range", rel_range);
        check("first_hit_monotone_in_level", hit_monotone);
        check("drawdown_hit_antitone_in_alpha", dd_antitone);
        check("growth_nondecreasing", growth_monotone);
        check("batch_regeneration_bitwise", regen_bitwise);
        check("zeta_at_or_above_support", zeta_support);
        check("finite_horizon_prefix_bitwise", fh_prefix);
        check("value_at_exact_drawdown_hit", boundary_value);
    }

    // deterministic seeding
    {
        const bool same = seed_for_path(42, 7) == seed_for_path(42, 7);
        const bool distinct = seed_for_path(42, 0) != seed_for_path(42, 1) &&
                              seed_for_path(42, 0) != seed_for_path(43, 0);
        check("seed_for_path_deterministic", same && distinct);
    }
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& name) {
    if (name == "numeraire-test") return run_numeraire_test(cfg);
    if (name == "growth") return run_growth(cfg);
    if (name == "zeta-law") return run_zeta_law(cfg);
    if (name == "oscillation") return run_oscillation(cfg);
    if (name == "drawdown-race") return run_drawdown_race(cfg);
    if (name == "turnpike") return run_turnpike(cfg);
    if (name == "selftest") return run_selftest(cfg);
    throw invalid_input("unknown experiment: " + name);
}

void run_simulate(const ExperimentConfig& cfg, std::ostream& os) {
    const SimBatch batch = simulate_batch(cfg.build_model(), cfg.build_grid(),
                                          cfg.n_paths, cfg.seed);
    write_batch_csv(batch, os);
}

void write_report_csv(const ExperimentReport& report, std::ostream& os) {
    os << "test,mean,se,n,flagged,pass\n";
    for (const MetricRow& row : report.rows) {
        os << row.test << ',' << fmt(row.mean) << ',' << fmt(row.se) << ','
           << row.n << ',' << row.flagged << ',' << (row.pass ? "1" : "0") << '\n';
    }
}

std::string render_report_text(const ExperimentReport& report) {
    std::ostringstream os;
    os << "experiment: " << report.experiment << '\n';
    os << "claim:      " << report.claim << '\n';
    os << "seed:       " << report.seed << '\n';
    os << "config:     " << report.config_echo << '\n';
    for (const MetricRow& row : report.rows) {
        os << (row.pass ? "  [pass] " : "  [FAIL] ") << row.test
           << "  mean=" << fmt(row.mean) << " se=" << fmt(row.se) << " n=" << row.n;
        if (row.flagged > 0) os << " flagged=" << row.flagged;
        os << '\n';
    }
    os << (report.passed ? "RESULT: PASS" : "RESULT: FAIL") << '\n';
    return os.str();
}

void write_report_files(const ExperimentReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw io_error("cannot create output directory: " + out_dir);

    const fs::path base(out_dir);
    {
        std::ofstream os(base / (report.experiment + "_summary.csv"));
        if (!os) throw io_error("cannot write summary csv");
        write_report_csv(report, os);
    }
    {
        std::ofstream os(base / (report.experiment + "_report.txt"));
        if (!os) throw io_error("cannot write report text");
        os << render_report_text(report);
    }
    for (const auto& [name, content] : report.artifacts) {
        std::ofstream os(base / name);
        if (!os) throw io_error("cannot write artifact: " + name);
        os << content;
    }
}

}  // namespace ddlab
