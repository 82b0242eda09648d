#include "ddlab.h"

#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "ddlab/config.hpp"
#include "ddlab/errors.hpp"
#include "ddlab/experiments.hpp"
#include "ddlab/path.hpp"
#include "ddlab/transform.hpp"

namespace {

thread_local std::string g_last_error;

ddlab_status set_error(ddlab_status code, const char* what) {
    g_last_error = what ? what : "";
    return code;
}

template <typename Fn>
ddlab_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ddlab::constraint_violation_error& e) {
        return set_error(DDLAB_ERR_CONSTRAINT_VIOLATION, e.what());
    } catch (const ddlab::no_numeraire_error& e) {
        return set_error(DDLAB_ERR_NO_NUMERAIRE, e.what());
    } catch (const ddlab::simulation_error& e) {
        return set_error(DDLAB_ERR_SIMULATION, e.what());
    } catch (const ddlab::io_error& e) {
        return set_error(DDLAB_ERR_IO, e.what());
    } catch (const ddlab::config_error& e) {
        return set_error(DDLAB_ERR_BAD_CONFIG, e.what());
    } catch (const ddlab::invalid_input& e) {
        return set_error(DDLAB_ERR_INVALID_INPUT, e.what());
    } catch (const std::bad_alloc&) {
        return set_error(DDLAB_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(DDLAB_ERR_INTERNAL, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct ddlab_config {
    ddlab::ExperimentConfig cfg;
};

struct ddlab_path {
    ddlab::SampledPath path;
};

extern "C" {

const char* ddlab_version(void) { return "1.0.0"; }

const char* ddlab_last_error(void) { return g_last_error.c_str(); }

void ddlab_string_free(char* s) { delete[] s; }

ddlab_status ddlab_config_create(ddlab_config** out) {
    if (!out) return set_error(DDLAB_ERR_INVALID_INPUT, "null output handle");
    return guarded([&] {
        *out = new ddlab_config{};
        return DDLAB_OK;
    });
}

ddlab_status ddlab_config_load_file(ddlab_config* cfg, const char* filename) {
    if (!cfg || !filename) return set_error(DDLAB_ERR_INVALID_INPUT, "null argument");
    return guarded([&] {
        cfg->cfg = ddlab::load_config_file(filename);
        return DDLAB_OK;
    });
}

ddlab_status ddlab_config_set(ddlab_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return set_error(DDLAB_ERR_INVALID_INPUT, "null argument");
    return guarded([&] {
        cfg->cfg.set(key, value);
        return DDLAB_OK;
    });
}

void ddlab_config_free(ddlab_config* cfg) { delete cfg; }

ddlab_status ddlab_path_read_csv(const char* filename, ddlab_path** out) {
    if (!filename || !out) return set_error(DDLAB_ERR_INVALID_INPUT, "null argument");
    return guarded([&] {
        auto* p = new ddlab_path{ddlab::read_path_csv(filename)};
        *out = p;
        return DDLAB_OK;
    });
}

ddlab_status ddlab_path_write_csv(const ddlab_path* path, const char* filename) {
    if (!path || !filename) return set_error(DDLAB_ERR_INVALID_INPUT, "null argument");
    return guarded([&] {
        ddlab::write_path_csv(path->path, filename);
        return DDLAB_OK;
    });
}

size_t ddlab_path_n_points(const ddlab_path* path) {
    return path ? path->path.size() : 0;
}

ddlab_status ddlab_path_az_forward(const ddlab_path* in, double alpha,
                                   ddlab_path** out) {
    if (!in || !out) return set_error(DDLAB_ERR_INVALID_INPUT, "null argument");
    return guarded([&] {
        *out = new ddlab_path{ddlab::az_forward(in->path, alpha)};
        return DDLAB_OK;
    });
}

ddlab_status ddlab_path_az_inverse(const ddlab_path* in, double alpha, double tol,
                                   ddlab_path** out) {
    if (!in || !out) return set_error(DDLAB_ERR_INVALID_INPUT, "null argument");
    return guarded([&] {
        *out = new ddlab_path{ddlab::az_inverse(in->path, alpha, tol)};
        return DDLAB_OK;
    });
}

ddlab_status ddlab_path_verify_drawdown(const ddlab_path* in, double alpha,
                                        double tol, size_t* first_bad) {
    if (!in) return set_error(DDLAB_ERR_INVALID_INPUT, "null argument");
    return guarded([&] {
        const ddlab::DrawdownReport report =
            ddlab::verify_drawdown(in->path, alpha, tol);
        if (!report.ok()) {
            if (first_bad) *first_bad = report.violations.front();
            return set_error(DDLAB_ERR_CONSTRAINT_VIOLATION,
                             "drawdown constraint violated");
        }
        return DDLAB_OK;
    });
}

void ddlab_path_free(ddlab_path* path) { delete path; }

ddlab_status ddlab_simulate_csv(const ddlab_config* cfg, const char* out_file) {
    if (!cfg || !out_file) return set_error(DDLAB_ERR_INVALID_INPUT, "null argument");
    return guarded([&] {
        std::ofstream os(out_file);
        if (!os) throw ddlab::io_error(std::string("cannot open: ") + out_file);
        ddlab::run_simulate(cfg->cfg, os);
        if (!os) throw ddlab::io_error(std::string("write failed: ") + out_file);
        return DDLAB_OK;
    });
}

ddlab_status ddlab_run_experiment(const ddlab_config* cfg, const char* name,
                                  const char* out_dir, char** summary_text,
                                  int* passed) {
    if (!cfg || !name) return set_error(DDLAB_ERR_INVALID_INPUT, "null argument");
    return guarded([&] {
        const ddlab::ExperimentReport report =
            ddlab::run_experiment(cfg->cfg, name);
        if (out_dir && out_dir[0] != '\0') {
            ddlab::write_report_files(report, out_dir);
        }
        if (summary_text) *summary_text = dup_string(ddlab::render_report_text(report));
        if (passed) *passed = report.passed ? 1 : 0;
        return DDLAB_OK;
    });
}

}  // extern "C"
