// Command-line front end. Links only the shared C API.
//
// Exit codes: 0 success, 1 experiment failure or constraint violation,
// 2 bad configuration or usage.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddlab.h"

namespace {

struct ConfigHandle {
    ddlab_config* cfg = nullptr;
    ConfigHandle() { ddlab_config_create(&cfg); }
    ~ConfigHandle() { ddlab_config_free(cfg); }
    ConfigHandle(const ConfigHandle&) = delete;
    ConfigHandle& operator=(const ConfigHandle&) = delete;
};

int fail(ddlab_status status) {
    std::fprintf(stderr, "error: %s\n", ddlab_last_error());
    return status == DDLAB_ERR_CONSTRAINT_VIOLATION ? 1 : 2;
}

// Options shared by every simulation-backed subcommand; values are applied
// in order: file config first, then explicit flags override.
struct CommonOpts {
    std::string config_file;
    std::vector<std::pair<std::string, std::string>> overrides;

    void attach(CLI::App* app) {
        app->add_option("--config", config_file, "key=value config file");
        auto track = [this](const char* key) {
            return [this, key](const std::string& v) {
                overrides.emplace_back(key, v);
            };
        };
        app->add_option_function<std::string>("--preset", track("preset"),
                                              "model preset: custom|gbm|dds");
        app->add_option_function<std::string>("--alpha", track("alpha"),
                                              "drawdown floor fraction in [0,1)");
        app->add_option_function<std::string>("--level", track("level"),
                                              "log level l of the hitting time");
        app->add_option_function<std::string>("--n-paths", track("n_paths"),
                                              "Monte Carlo paths");
        app->add_option_function<std::string>("--seed", track("seed"), "base seed");
        app->add_option_function<std::string>("--dt", track("dt"), "time step");
        app->add_option_function<std::string>("--t-max", track("t_max"), "horizon");
        app->add_option_function<std::string>("--threads", track("threads"),
                                              "worker threads (results invariant)");
        app->add_option_function<std::string>("--max-n", track("max_n"),
                                              "cycles harvested per path");
        app->add_option_function<std::string>("--n-list", track("n_list"),
                                              "turnpike horizon indices");
        app->add_option_function<std::string>("--eps", track("eps"),
                                              "oscillation band width");
        app->add_option_function<std::string>("--strategy", track("strategy"),
                                              "baseline|buyhold|halfkelly|<csv>, comma list");
        app->add_option_function<std::string>("--out", track("out_dir"),
                                              "output directory");
        app->add_flag_function("--dump-samples",
                               [this](std::int64_t) {
                                   overrides.emplace_back("dump_samples", "true");
                               },
                               "write per-sample CSVs");
    }

    ddlab_status apply(ddlab_config* cfg) const {
        if (!config_file.empty()) {
            const ddlab_status st = ddlab_config_load_file(cfg, config_file.c_str());
            if (st != DDLAB_OK) return st;
        }
        for (const auto& [key, value] : overrides) {
            const ddlab_status st = ddlab_config_set(cfg, key.c_str(), value.c_str());
            if (st != DDLAB_OK) return st;
        }
        return DDLAB_OK;
    }
};

int run_experiment_command(const CommonOpts& opts, const std::string& name,
                           const std::string& out_dir) {
    ConfigHandle handle;
    ddlab_status st = opts.apply(handle.cfg);
    if (st != DDLAB_OK) return fail(st);
    char* summary = nullptr;
    int passed = 0;
    st = ddlab_run_experiment(handle.cfg, name.c_str(), out_dir.c_str(), &summary,
                              &passed);
    if (st != DDLAB_OK) return fail(st);
    if (summary) {
        std::fputs(summary, stdout);
        ddlab_string_free(summary);
    }
    return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"drawdown-constrained growth-optimal portfolio lab"};
    app.require_subcommand(1);

    const std::vector<std::string> experiments = {
        "numeraire-test", "growth", "zeta-law", "oscillation",
        "drawdown-race",  "turnpike", "selftest"};

    std::vector<std::pair<CLI::App*, CommonOpts>> subs;
    subs.reserve(experiments.size());
    std::vector<std::string> report_dirs(experiments.size(), "out");

    for (std::size_t i = 0; i < experiments.size(); ++i) {
        CLI::App* sub = app.add_subcommand(experiments[i], experiments[i] + " experiment");
        subs.emplace_back(sub, CommonOpts{});
        subs.back().second.attach(sub);
        sub->add_option("--report-dir", report_dirs[i],
                        "directory for report files (defaults to out)");
    }

    // simulate: dump a batch CSV
    CommonOpts sim_opts;
    std::string sim_out = "batch.csv";
    CLI::App* sim = app.add_subcommand("simulate", "simulate a batch and dump CSV");
    sim_opts.attach(sim);
    sim->add_option("--output", sim_out, "output CSV file");

    // transform: map a path CSV through the drawdown transform
    CLI::App* tr = app.add_subcommand("transform", "apply the drawdown transform to a path CSV");
    std::string tr_in, tr_out = "transformed.csv";
    double tr_alpha = 0.5;
    double tr_tol = 1e-9;
    bool tr_inverse = false, tr_verify = false;
    tr->add_option("input", tr_in, "input path CSV")->required();
    tr->add_option("--output", tr_out, "output path CSV");
    tr->add_option("--alpha", tr_alpha, "drawdown floor fraction");
    tr->add_option("--tol", tr_tol, "constraint tolerance (inverse/verify)");
    tr->add_flag("--inverse", tr_inverse, "apply the inverse transform");
    tr->add_flag("--verify", tr_verify, "only verify the drawdown constraint");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    for (std::size_t i = 0; i < experiments.size(); ++i) {
        if (subs[i].first->parsed()) {
            return run_experiment_command(subs[i].second, experiments[i], report_dirs[i]);
        }
    }

    if (sim->parsed()) {
        ConfigHandle handle;
        ddlab_status st = sim_opts.apply(handle.cfg);
        if (st != DDLAB_OK) return fail(st);
        st = ddlab_simulate_csv(handle.cfg, sim_out.c_str());
        if (st != DDLAB_OK) return fail(st);
        std::printf("wrote %s\n", sim_out.c_str());
        return 0;
    }

    if (tr->parsed()) {
        ddlab_path* input = nullptr;
        ddlab_status st = ddlab_path_read_csv(tr_in.c_str(), &input);
        if (st != DDLAB_OK) return fail(st);
        if (tr_verify) {
            size_t first_bad = 0;
            st = ddlab_path_verify_drawdown(input, tr_alpha, tr_tol, &first_bad);
            ddlab_path_free(input);
            if (st == DDLAB_OK) {
                std::printf("constraint holds (alpha=%g)\n", tr_alpha);
                return 0;
            }
            if (st == DDLAB_ERR_CONSTRAINT_VIOLATION) {
                std::fprintf(stderr, "constraint violated at index %zu\n", first_bad);
                return 1;
            }
            return fail(st);
        }
        ddlab_path* output = nullptr;
        st = tr_inverse ? ddlab_path_az_inverse(input, tr_alpha, tr_tol, &output)
                        : ddlab_path_az_forward(input, tr_alpha, &output);
        ddlab_path_free(input);
        if (st != DDLAB_OK) {
            const int code = fail(st);
            return st == DDLAB_ERR_CONSTRAINT_VIOLATION ? 1 : code;
        }
        st = ddlab_path_write_csv(output, tr_out.c_str());
        ddlab_path_free(output);
        if (st != DDLAB_OK) return fail(st);
        std::printf("wrote %s\n", tr_out.c_str());
        return 0;
    }

    return 2;
}
