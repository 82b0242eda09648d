// Acceptance suite: one check per numbered criterion, each printing a single
// pass/fail line. Run with no arguments for the full suite or with
// --criterion N for one check. Exit code 0 iff everything run passed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "ddlab/experiments.hpp"
#include "ddlab/horizon.hpp"
#include "ddlab/market.hpp"
#include "ddlab/returns.hpp"
#include "ddlab/rng.hpp"
#include "ddlab/transform.hpp"

using namespace ddlab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

const MetricRow* find_row(const ExperimentReport& report, const std::string& name) {
    for (const MetricRow& row : report.rows) {
        if (row.test == name) return &row;
    }
    return nullptr;
}

std::vector<SampledPath> gbm_corpus(std::size_t n_paths, std::uint64_t seed) {
    const SimBatch batch =
        simulate_batch(MarketModel::gbm_preset(), TimeGrid(0.01, 2000), n_paths, seed);
    std::vector<SampledPath> corpus;
    corpus.reserve(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) {
        corpus.push_back(numeraire_path(batch, i).wealth);
    }
    return corpus;
}

// 1. relative_drawdown(az_forward(x,a)) = a + (1-a) relative_drawdown(x)
//    with max abs error < 1e-12 over 1000 paths and a in {0.1, 0.5, 0.9}.
Outcome criterion_1() {
    const std::vector<SampledPath> corpus = gbm_corpus(1000, 1889);
    double worst = 0.0;
    for (const SampledPath& x : corpus) {
        const SampledPath relx = relative_drawdown(x);
        for (double a : {0.1, 0.5, 0.9}) {
            const SampledPath rel = relative_drawdown(az_forward(x, a));
            for (std::size_t k = 0; k < x.size(); ++k) {
                worst = std::max(worst, std::fabs(rel[k] - (a + (1.0 - a) * relx[k])));
            }
        }
    }
    return {worst < 1e-12, "max abs err " + std::to_string(worst)};
}

// 2. az_inverse . az_forward = id and the composition law
//    gamma = 1-(1-a)(1-b), both to 1e-10 relative error.
Outcome criterion_2() {
    const std::vector<SampledPath> corpus = gbm_corpus(1000, 1890);
    double worst = 0.0;
    const double alphas[] = {0.1, 0.5, 0.9};
    for (const SampledPath& x : corpus) {
        for (double a : alphas) {
            const SampledPath ax = az_forward(x, a);
            const SampledPath back = az_inverse(ax, a);
            for (std::size_t k = 0; k < x.size(); ++k) {
                worst = std::max(worst,
                                 std::fabs(back[k] - x[k]) / std::max(1e-12, x[k]));
            }
            for (double b : alphas) {
                const double g = 1.0 - (1.0 - a) * (1.0 - b);
                const SampledPath lhs = az_forward(ax, b);
                const SampledPath rhs = az_forward(x, g);
                for (std::size_t k = 0; k < x.size(); ++k) {
                    worst = std::max(worst, std::fabs(lhs[k] - rhs[k]) /
                                                std::max(1e-12, rhs[k]));
                }
            }
        }
    }
    return {worst < 1e-10, "max rel err " + std::to_string(worst)};
}

ExperimentConfig numeraire_cfg() {
    ExperimentConfig cfg;
    cfg.preset = "gbm";
    cfg.alpha = 0.5;
    cfg.level = 1.0;
    cfg.n_paths = 5000;
    cfg.dt = 0.005;
    cfg.t_max = 40.0;
    cfg.seed = 90210;
    return cfg;
}

// 3. err at tau_1 <= 0 + 3 SE for the transformed test strategies.
Outcome criterion_3() {
    const ExperimentReport report = run_numeraire_test(numeraire_cfg());
    std::string detail;
    bool pass = true;
    for (const char* name : {"err_tau_baseline", "err_tau_buyhold", "err_tau_halfkelly"}) {
        const MetricRow* row = find_row(report, name);
        if (!row) return {false, std::string("missing row ") + name};
        pass = pass && row->pass;
        detail += std::string(name) + " mean=" + std::to_string(row->mean) +
                  " se=" + std::to_string(row->se) + "; ";
    }
    return {pass, detail};
}

// 4. E[phi at tau_1 ^ t_end] <= 1 + 3 SE.
Outcome criterion_4() {
    const ExperimentReport report = run_numeraire_test(numeraire_cfg());
    std::string detail;
    bool pass = true;
    for (const char* name : {"phi_tau_baseline", "phi_tau_buyhold", "phi_tau_halfkelly"}) {
        const MetricRow* row = find_row(report, name);
        if (!row) return {false, std::string("missing row ") + name};
        pass = pass && row->pass;
        detail += std::string(name) + " mean=" + std::to_string(row->mean) +
                  " se=" + std::to_string(row->se) + "; ";
    }
    return {pass, detail};
}

// 5. mean log(optimum)/G within 0.05 of 1-alpha at G_T = 100, and the test
//    panel bounded by 1-alpha+0.05, for alpha in {0, 0.5}.
Outcome criterion_5() {
    std::string detail;
    bool pass = true;
    for (double alpha : {0.0, 0.5}) {
        ExperimentConfig cfg;
        cfg.preset = "dds";
        cfg.alpha = alpha;
        cfg.dt = 0.004;
        cfg.t_max = 200.0;  // growth clock 100
        cfg.n_paths = 2000;
        cfg.seed = 550;
        const ExperimentReport report = run_growth(cfg);
        pass = pass && report.passed;
        const MetricRow* main = find_row(report, "mean_log_optimum_over_G");
        if (!main) return {false, "missing main row"};
        detail += "alpha=" + std::to_string(alpha) + " mean=" +
                  std::to_string(main->mean) + "; ";
    }
    return {pass, detail};
}

// 6. KS of pooled cycle ratios against the uniform-eta closed form at
//    p > 0.01 with >= 5000 samples at dt <= 1e-4; samples never fall below
//    the support point. The KS statistic against the exponential form is
//    reported alongside as a diagnostic.
Outcome criterion_6() {
    ExperimentConfig cfg;
    cfg.preset = "dds";
    cfg.alpha = 0.5;
    cfg.dt = 1e-4;
    cfg.t_max = 50.0;
    cfg.n_paths = 400;
    cfg.max_n = 20;
    cfg.seed = 660;
    const ExperimentReport report = run_zeta_law(cfg);

    const MetricRow* oracle = find_row(report, "cdf_oracle_supdiff");
    const MetricRow* count = find_row(report, "n_samples");
    const MetricRow* minrow = find_row(report, "min_sample_vs_support");
    const MetricRow* ks_eta = find_row(report, "ks_p_uniform_eta_form");
    const MetricRow* ks_exp = find_row(report, "ks_p_exponential_form");
    if (!oracle || !count || !minrow || !ks_eta || !ks_exp) {
        return {false, "missing rows"};
    }
    const bool enough = count->mean >= 5000.0;
    const bool pass =
        oracle->pass && enough && minrow->pass && ks_eta->pass;
    std::string detail =
        "samples=" + std::to_string(static_cast<long>(count->mean)) +
        " oracle_supdiff=" + std::to_string(oracle->mean) +
        " ks_p_uniform_eta=" + std::to_string(ks_eta->mean) +
        " (D=" + std::to_string(ks_eta->se) + ")" +
        " | diagnostic ks_p_exponential=" + std::to_string(ks_exp->mean) +
        " (D=" + std::to_string(ks_exp->se) + ")";
    return {pass, detail};
}

// 7. P(drawdown to alpha before an e-fold of the maximum) >= alpha - 3 SE
//    for alpha in {0.3, 0.5, 0.7} with 10^4 paths.
Outcome criterion_7() {
    std::string detail;
    bool pass = true;
    for (double alpha : {0.3, 0.5, 0.7}) {
        ExperimentConfig cfg;
        cfg.preset = "dds";
        cfg.alpha = alpha;
        cfg.dt = 1e-4;
        cfg.t_max = 20.0;
        cfg.n_paths = 10000;
        cfg.seed = 770;
        const ExperimentReport report = run_drawdown_race(cfg);
        const MetricRow* row = find_row(report, "win_frequency");
        if (!row) return {false, "missing row"};
        pass = pass && row->pass;
        detail += "alpha=" + std::to_string(alpha) + " freq=" +
                  std::to_string(row->mean) + " flagged=" + std::to_string(row->flagged) +
                  "; ";
    }
    return {pass, detail};
}

// 8. P(T_{n-1/2} <= tau_1) nonincreasing over n = 1..6 and below 0.05 at
//    n = 6; the sup-deviation is exactly zero whenever the switch time lies
//    beyond tau_1; the horizon portfolio equals the optimum bitwise before
//    its switch time.
Outcome criterion_8() {
    ExperimentConfig cfg;
    cfg.preset = "dds";
    cfg.alpha = 0.5;
    cfg.level = 1.0;
    cfg.dt = 1e-4;
    cfg.t_max = 40.0;
    cfg.n_paths = 2000;
    cfg.seed = 880;
    cfg.n_list = {1, 2, 3, 4, 5, 6};
    const ExperimentReport report = run_turnpike(cfg);
    const MetricRow* mono = find_row(report, "p_switch_nonincreasing");
    const MetricRow* last = find_row(report, "p_switch_last_below_0.05");
    const MetricRow* zero = find_row(report, "supdev_zero_without_switch");
    if (!mono || !last || !zero) return {false, "missing rows"};

    // bitwise prefix property on a materialized subsample
    bool prefix_ok = true;
    const SimBatch batch = simulate_batch(MarketModel::dds_preset(),
                                          TimeGrid(1e-3, 20000), 25, 881);
    for (std::size_t i = 0; i < batch.n_paths; ++i) {
        const NumerairePath num = numeraire_path(batch, i);
        const SampledPath ax = az_forward(num.wealth, 0.5);
        for (std::size_t n : {1u, 2u, 3u}) {
            const FiniteHorizonPath fh = finite_horizon_numeraire(num.wealth, 0.5, n);
            if (!fh.horizon_reached) continue;
            const CycleTimes ct = cycle_times(num.wealth, 0.5, n);
            const std::size_t start = ct.cycles[n - 1].first.index;
            for (std::size_t k = 0; k <= start; ++k) {
                prefix_ok = prefix_ok && fh.path.values[k] == ax.values[k];
            }
            prefix_ok = prefix_ok && verify_drawdown(fh.path, 0.5, 1e-12).ok();
        }
    }
    const bool pass = mono->pass && last->pass && zero->pass && prefix_ok;
    return {pass, "P(switch<=tau) at n=6: " + std::to_string(last->mean) +
                      ", prefix bitwise: " + (prefix_ok ? "yes" : "no")};
}

// 9. At growth clock 100, at least 99% of paths see the relative drawdown of
//    the constrained optimum reach alpha + 0.02, and its maximum is 1 on
//    every path.
Outcome criterion_9() {
    ExperimentConfig cfg;
    cfg.preset = "dds";
    cfg.alpha = 0.5;
    cfg.dt = 0.002;
    cfg.t_max = 200.0;
    cfg.n_paths = 3000;
    cfg.eps = 0.02;
    cfg.seed = 990;
    const ExperimentReport report = run_oscillation(cfg);
    const MetricRow* frac = find_row(report, "frac_min_rel_dd_near_alpha");
    const MetricRow* maxr = find_row(report, "max_rel_dd_equals_one");
    if (!frac || !maxr) return {false, "missing rows"};
    return {frac->pass && maxr->pass,
            "frac=" + std::to_string(frac->mean) + " max_row=" +
                (maxr->pass ? "1" : "0")};
}

// 10. Byte-identical reports and sample dumps for 1 vs 8 threads.
Outcome criterion_10() {
    auto run_with_threads = [](const char* name, int threads) {
        ExperimentConfig cfg;
        cfg.preset = "dds";
        cfg.alpha = 0.5;
        cfg.dt = 1e-3;
        cfg.t_max = 10.0;
        cfg.n_paths = 200;
        cfg.seed = 1010;
        cfg.threads = threads;
        cfg.dump_samples = true;
        const ExperimentReport report = run_experiment(cfg, name);
        std::ostringstream os;
        write_report_csv(report, os);
        std::string blob = os.str();
        for (const auto& [fname, content] : report.artifacts) {
            blob += fname + "\n" + content;
        }
        return blob;
    };
    bool pass = true;
    std::string detail;
    for (const char* name : {"zeta-law", "drawdown-race", "oscillation", "turnpike"}) {
        const std::string a = run_with_threads(name, 1);
        const std::string b = run_with_threads(name, 8);
        const bool same = a == b;
        pass = pass && same;
        detail += std::string(name) + (same ? "=identical; " : "=DIFFERS; ");
    }
    return {pass, detail};
}

struct Criterion {
    int id;
    const char* title;
    double budget_seconds;
    Outcome (*fn)();
};

const Criterion kCriteria[] = {
    {1, "exact drawdown identity", 10.0, criterion_1},
    {2, "round trip and composition", 10.0, criterion_2},
    {3, "numeraire property at hitting times", 120.0, criterion_3},
    {4, "phi supermartingale diagnostic", 120.0, criterion_4},
    {5, "asymptotic growth rate", 120.0, criterion_5},
    {6, "zeta law", 300.0, criterion_6},
    {7, "drawdown race", 120.0, criterion_7},
    {8, "turnpike", 180.0, criterion_8},
    {9, "oscillation", 120.0, criterion_9},
    {10, "determinism across thread counts", 120.0, criterion_10},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[i + 1]);
        }
    }
    bool all_pass = true;
    for (const Criterion& c : kCriteria) {
        if (only != 0 && c.id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.fn();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        const bool in_budget = elapsed < c.budget_seconds;
        const bool pass = outcome.pass && in_budget;
        all_pass = all_pass && pass;
        std::printf("[%s] criterion %d (%s): %s [%.1fs/%.0fs]\n",
                    pass ? "PASS" : "FAIL", c.id, c.title, outcome.detail.c_str(),
                    elapsed, c.budget_seconds);
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
