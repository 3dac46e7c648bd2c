/* C interface to the stochastic fourth-order controllability toolkit.
 *
 * Usage: create an experiment handle, feed it settings (from a config file,
 * individual key/value pairs, or both; later calls override earlier ones),
 * run a subcommand, and read the output text. All functions are safe to call
 * with a NULL handle except create; they then return SHUM_ERROR_INTERNAL or
 * an empty string. A handle is not thread-safe; use one per thread.
 */
#ifndef SHUM_H
#define SHUM_H

#ifdef __cplusplus
extern "C" {
#endif

/* Status values double as CLI exit codes. */
typedef enum shum_status {
    SHUM_OK = 0,
    SHUM_ERROR_VERIFICATION = 1, /* a requested check did not pass */
    SHUM_ERROR_CONFIG = 2,       /* invalid configuration or argument */
    SHUM_ERROR_NUMERIC = 3,      /* numerical guard tripped */
    SHUM_ERROR_INTERNAL = 4
} shum_status;

typedef struct shum_experiment shum_experiment;

shum_experiment* shum_experiment_create(void);
void shum_experiment_destroy(shum_experiment* exp);

/* Set one configuration key (e.g. "N", "lambda", "a1"). */
shum_status shum_experiment_set(shum_experiment* exp, const char* key, const char* value);

/* Load a flat key=value config file with # comments. */
shum_status shum_experiment_load_config(shum_experiment* exp, const char* path);

/* Run a subcommand: verify-identities, weights, simulate, control,
 * observability, sweep, or carleman. Output text (tables or CSV) is
 * available afterwards even when the run reports a verification failure. */
shum_status shum_experiment_run(shum_experiment* exp, const char* subcommand);

/* Output of the last run; valid until the next call on the handle. */
const char* shum_experiment_output(const shum_experiment* exp);

/* Message for the last error on the handle; empty if none. */
const char* shum_experiment_error(const shum_experiment* exp);

const char* shum_status_name(shum_status status);
const char* shum_version(void);

#ifdef __cplusplus
}
#endif

#endif /* SHUM_H */
