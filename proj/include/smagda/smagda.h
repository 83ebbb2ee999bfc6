/*
 * smagda - stochastic smoothed alternating gradient descent ascent toolkit.
 *
 * C API of the shared library. All functions return a smagda_status; any
 * non-OK status leaves a human-readable message retrievable through
 * smagda_last_error() (thread-local). Objects returned through out-pointers
 * are owned by the caller and released with the matching _destroy call.
 */
#ifndef SMAGDA_H
#define SMAGDA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum smagda_status {
  SMAGDA_OK = 0,
  SMAGDA_ERR_INVALID_ARG = 1,
  SMAGDA_ERR_CONFIG = 2,      /* bad config / input file; CLI exit code 2 */
  SMAGDA_ERR_DIVERGENCE = 3,  /* sample paths diverged; CLI exit code 3 */
  SMAGDA_ERR_CHECK_FAILED = 4, /* a verification verdict failed; CLI exit code 4 */
  SMAGDA_ERR_UNSUPPORTED = 5, /* outside the guarantee (e.g. constrained dual bound) */
  SMAGDA_ERR_RUNTIME = 6
} smagda_status;

const char* smagda_status_name(smagda_status status);
const char* smagda_last_error(void);
void smagda_version(int* major, int* minor, int* patch);

/* ------------------------------------------------------------------------
 * Problems (opaque handles).
 * ---------------------------------------------------------------------- */
typedef struct smagda_problem smagda_problem;

/* json_spec follows the config schema of the "problem" block, e.g.
 * {"type":"ncpl","d":30,"m1":1,"m2":1,"sigma_sq":1,"delta_sq":1,
 *  "matrix_seed":42}. */
smagda_status smagda_problem_create(const char* json_spec, smagda_problem** out);
/* Parses a LIBSVM file; json_options may be NULL or a DRO options block. */
smagda_status smagda_problem_create_dro(const char* libsvm_path, const char* json_options,
                                        smagda_problem** out);
void smagda_problem_destroy(smagda_problem* problem);

smagda_status smagda_problem_dims(const smagda_problem* problem, int32_t* dim_x,
                                  int32_t* dim_y);
smagda_status smagda_problem_constants(const smagda_problem* problem, double* ell,
                                       double* mu, double* kappa);
smagda_status smagda_problem_value(const smagda_problem* problem, const double* x,
                                   const double* y, double* out);
smagda_status smagda_problem_grad_x(const smagda_problem* problem, const double* x,
                                    const double* y, double* out);
smagda_status smagda_problem_grad_y(const smagda_problem* problem, const double* x,
                                    const double* y, double* out);
smagda_status smagda_problem_grad_x_stoch(const smagda_problem* problem, const double* x,
                                          const double* y, uint64_t base_seed,
                                          uint64_t path_index, uint64_t step, double* out);
smagda_status smagda_problem_grad_y_stoch(const smagda_problem* problem, const double* x,
                                          const double* y, uint64_t base_seed,
                                          uint64_t path_index, uint64_t step, double* out);

/* ------------------------------------------------------------------------
 * Optimizer.
 * ---------------------------------------------------------------------- */
typedef struct smagda_params {
  double tau1;
  double tau2;
  double beta;
  double p;
  double alpha;
  int64_t iterations;
  int theory_mode; /* nonzero validates the policy against the constants */
} smagda_params;

/* Stepsize policy: tau1 = min(1/(3 ell), 48 sqrt(delta0_b0)/sqrt(T ell delta^2)),
 * tau2 = tau1/48, beta = alpha mu tau2, p = 2 ell. */
smagda_status smagda_params_derive(double ell, double mu, int64_t iterations,
                                   double delta0_b0, double noise_var_sum, double alpha,
                                   smagda_params* out);

typedef struct smagda_run smagda_run;

/* Runs T iterations from (x0, y0); z0 may be NULL (defaults to x0).
 * retain_iterates != 0 keeps every iterate for smagda_run_select_output. The
 * per-iteration stationarity metric |grad_x f|^2 + kappa |grad_y f|^2 (or the
 * projected-residual variant for constrained problems) is always recorded. */
smagda_status smagda_run_path(const smagda_problem* problem, const smagda_params* params,
                              uint64_t base_seed, uint64_t path_index, const double* x0,
                              const double* y0, const double* z0, int retain_iterates,
                              smagda_run** out);
void smagda_run_destroy(smagda_run* run);

smagda_status smagda_run_diverged(const smagda_run* run, int* diverged,
                                  int64_t* at_iteration);
/* Metric series over t = 0..T-1 (before each update) and its average. */
smagda_status smagda_run_metric_series(const smagda_run* run, const double** data,
                                       int64_t* length);
smagda_status smagda_run_metric_average(const smagda_run* run, double* out);
smagda_status smagda_run_final_state(const smagda_run* run, double* x, double* y, double* z);
/* Uniform draw over the recorded iterates {0..T-1}. */
smagda_status smagda_run_select_output(const smagda_run* run, uint64_t selection_seed,
                                       double* x, double* y, int64_t* index);

/* ------------------------------------------------------------------------
 * Bounds.
 * ---------------------------------------------------------------------- */
smagda_status smagda_sigma_c_sq(double tau1, double delta_x_sq, double delta_y_sq,
                                double* out);
smagda_status smagda_sigma_d_sq(double ell, double tau1, double tau2, double delta_x_sq,
                                double delta_y_sq, double* out);

/* Quantile bound at one qbar; the policy tau2 = tau1/48 is validated. */
smagda_status smagda_quantile_bound(double ell, double mu, double tau1, double tau2,
                                    double alpha, double delta_x_sq, double delta_y_sq,
                                    double delta0_b0, int64_t iterations, double qbar,
                                    double* out);

/* Initialization-gap estimate for the problem; search_json may be NULL for
 * defaults (see the SearchSpec schema in the README). */
smagda_status smagda_estimate_delta0_b0(const smagda_problem* problem, const double* x0,
                                        const double* y0, const double* z0,
                                        double p_smoothing, const char* search_json,
                                        double* out);

/* ------------------------------------------------------------------------
 * Command entry points (what the CLI calls). Each reads a JSON config and
 * writes outputs plus manifest.json into out_dir.
 * ---------------------------------------------------------------------- */
smagda_status smagda_cmd_run_ensemble(const char* config_path, const char* out_dir);
smagda_status smagda_cmd_bound(const char* config_path, const char* out_dir);
smagda_status smagda_cmd_compare(const char* ensemble_dir, const char* bound_config_path,
                                 const char* out_dir);
smagda_status smagda_cmd_dro(const char* config_path, const char* out_dir);
smagda_status smagda_cmd_check_concentration(const char* config_path, const char* out_dir);
smagda_status smagda_cmd_ingest(const char* libsvm_path, const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SMAGDA_H */
