/* C interface to the drawdown-constrained growth lab.
 *
 * All objects are opaque handles created and destroyed here. Calls return a
 * ddlab_status; on failure ddlab_last_error() describes the problem for the
 * calling thread. Strings returned through char** are heap-allocated and
 * must be released with ddlab_string_free().
 */
#ifndef DDLAB_H
#define DDLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ddlab_status {
    DDLAB_OK = 0,
    DDLAB_ERR_INVALID_INPUT = 1,
    DDLAB_ERR_NO_NUMERAIRE = 2,
    DDLAB_ERR_CONSTRAINT_VIOLATION = 3,
    DDLAB_ERR_SIMULATION = 4,
    DDLAB_ERR_IO = 5,
    DDLAB_ERR_BAD_CONFIG = 6,
    DDLAB_ERR_INTERNAL = 7
} ddlab_status;

typedef struct ddlab_config ddlab_config;
typedef struct ddlab_path ddlab_path;

const char* ddlab_version(void);
/* Message for the last failing call on this thread ("" if none). */
const char* ddlab_last_error(void);
void ddlab_string_free(char* s);

/* Configuration: starts from defaults; keys are the documented config-file
 * keys (preset, d, mu, sigma, s0, pinv_tol, dt, t_max, n_paths, seed, alpha,
 * level, threads, max_n, n_list, eps, strategy, out_dir, dump_samples). */
ddlab_status ddlab_config_create(ddlab_config** out);
ddlab_status ddlab_config_load_file(ddlab_config* cfg, const char* filename);
ddlab_status ddlab_config_set(ddlab_config* cfg, const char* key, const char* value);
void ddlab_config_free(ddlab_config* cfg);

/* Paths: CSV format "t,value", uniform grid starting at t = 0. */
ddlab_status ddlab_path_read_csv(const char* filename, ddlab_path** out);
ddlab_status ddlab_path_write_csv(const ddlab_path* path, const char* filename);
size_t ddlab_path_n_points(const ddlab_path* path);

/* Drawdown transform and its inverse; alpha in [0,1). */
ddlab_status ddlab_path_az_forward(const ddlab_path* in, double alpha,
                                   ddlab_path** out);
ddlab_status ddlab_path_az_inverse(const ddlab_path* in, double alpha, double tol,
                                   ddlab_path** out);
/* DDLAB_OK when the constraint holds everywhere; otherwise
 * DDLAB_ERR_CONSTRAINT_VIOLATION with *first_bad set to the first
 * offending index. */
ddlab_status ddlab_path_verify_drawdown(const ddlab_path* in, double alpha,
                                        double tol, size_t* first_bad);
void ddlab_path_free(ddlab_path* path);

/* Writes the batch CSV (path_id,t,asset_1..asset_d,xhat,growth). */
ddlab_status ddlab_simulate_csv(const ddlab_config* cfg, const char* out_file);

/* Runs one experiment (numeraire-test, growth, zeta-law, oscillation,
 * drawdown-race, turnpike, selftest), writes its report files into out_dir,
 * sets *passed, and optionally returns the human-readable summary. */
ddlab_status ddlab_run_experiment(const ddlab_config* cfg, const char* name,
                                  const char* out_dir, char** summary_text,
                                  int* passed);

#ifdef __cplusplus
}
#endif

#endif /* DDLAB_H */
