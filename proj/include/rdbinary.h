/* rdbinary — finite-sample minimax estimation and inference for regression
 * discontinuity designs with binary (and bounded) outcomes.
 *
 * C ABI of the shared library. All functions return rdb_status; outputs are
 * written through pointers. Designs are opaque handles created and destroyed
 * by the library. Weight buffers supplied by the caller must hold one double
 * per observation of the relevant side, ordered by ascending radius (the
 * order reported by rdb_design_radii).
 */
#ifndef RDBINARY_H
#define RDBINARY_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RDB_API __declspec(dllexport)
#else
#define RDB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rdb_status {
  RDB_OK = 0,
  RDB_ERR_INVALID_ARGUMENT = 1,
  RDB_ERR_EMPTY_SIDE = 2,
  RDB_ERR_OUT_OF_RANGE = 3,
  RDB_ERR_LENGTH_MISMATCH = 4,
  RDB_ERR_TOO_LARGE = 5,
  RDB_ERR_NUMERIC = 6,
  RDB_ERR_INSUFFICIENT_DATA = 7
} rdb_status;

RDB_API const char* rdb_status_message(rdb_status status);
RDB_API const char* rdb_version(void);

/* ------------------------------------------------------------------ */
/* Designs                                                             */

typedef struct rdb_design rdb_design;

typedef enum rdb_side { RDB_TREATED = 0, RDB_CONTROL = 1 } rdb_side;

/* Split raw (running variable, outcome) points at the cutoff (ties treated),
 * recenter to radii and sort each side ascending. Outcomes must lie in [0,1]. */
RDB_API rdb_status rdb_design_create(const double* r, const double* y, size_t n,
                                     double cutoff, rdb_design** out);

/* Build a design from already-recentered per-side data (radii ascending). */
RDB_API rdb_status rdb_design_create_recentered(const double* radii_plus,
                                                const double* y_plus, size_t n_plus,
                                                const double* radii_minus,
                                                const double* y_minus, size_t n_minus,
                                                rdb_design** out);

RDB_API void rdb_design_free(rdb_design* d);

RDB_API size_t rdb_design_size(const rdb_design* d, rdb_side side);
RDB_API rdb_status rdb_design_radii(const rdb_design* d, rdb_side side, double* buf);
RDB_API rdb_status rdb_design_outcomes(const rdb_design* d, rdb_side side, double* buf);

/* ------------------------------------------------------------------ */
/* Weight solvers                                                      */

typedef struct rdb_solver_options {
  double tol;        /* relative convergence tolerance (default 1e-8)   */
  int max_iter;      /* iteration cap (default 5000)                    */
  int restarts;      /* jittered restarts (default 3)                   */
  int anchor_grid;   /* anchors for grid evaluations (default 1001)    */
  uint64_t seed;     /* restart jitter seed                             */
} rdb_solver_options;

RDB_API rdb_solver_options rdb_solver_options_default(void);

/* Minimax shrinkage weights for one side. weights_out: n doubles.
 * worst_mse_out receives the certified worst-case MSE. */
RDB_API rdb_status rdb_solve_minimax_weights(const double* radii, size_t n,
                                             double lipschitz,
                                             const rdb_solver_options* opts,
                                             double* weights_out,
                                             double* worst_mse_out);

/* Gaussian-model quadratic-program weights (sum to one, nonnegative).
 * sigma2 may be NULL for the homoskedastic 1/4 default. */
RDB_API rdb_status rdb_solve_gaussian_weights(const double* radii, size_t n,
                                              double lipschitz, const double* sigma2,
                                              const rdb_solver_options* opts,
                                              double* weights_out, double* value_out);

/* Jointly optimal two-sided weights. */
RDB_API rdb_status rdb_solve_ate_weights(const rdb_design* d, double lipschitz,
                                         const rdb_solver_options* opts,
                                         double* w_plus_out, double* w_minus_out,
                                         double* worst_mse_out);

/* ------------------------------------------------------------------ */
/* Worst-case evaluation                                               */

/* Closed-form worst-case MSE of given one-side weights. */
RDB_API rdb_status rdb_worst_case_mse(const double* w, const double* radii, size_t n,
                                      double lipschitz, double* value_out,
                                      double* argmax_out);

/* Two-sided worst case on the anchor rectangle (grid_m x grid_m grid with
 * local refinement; grid_m <= 0 selects the default 101). */
RDB_API rdb_status rdb_ate_worst_case_mse(const rdb_design* d, const double* w_plus,
                                          const double* w_minus, double lipschitz,
                                          int grid_m, double* value_out,
                                          double* argmax_plus_out,
                                          double* argmax_minus_out);

/* Point estimate sum w+(Y+ - 1/2) - sum w-(Y- - 1/2). */
RDB_API rdb_status rdb_estimate(const rdb_design* d, const double* w_plus,
                                const double* w_minus, double* tau_out);

/* ------------------------------------------------------------------ */
/* Inference                                                           */

typedef struct rdb_inference_options {
  int n_sims;         /* calibration draws per tail (default 3000)        */
  int anchor_lattice; /* anchor lattice denominator (default 200)         */
  int bisect_iters;   /* endpoint halvings (default 20)                   */
  uint64_t seed;
  int exact;          /* nonzero: exact enumeration (n+ + n- <= 22)       */
} rdb_inference_options;

RDB_API rdb_inference_options rdb_inference_options_default(void);

typedef enum rdb_direction { RDB_RIGHT = 0, RDB_LEFT = 1 } rdb_direction;

/* One-sided critical value at level alpha for H0: tau = tau0. */
RDB_API rdb_status rdb_critical_value(const rdb_design* d, const double* w_plus,
                                      const double* w_minus, double lipschitz,
                                      double tau0, double alpha, rdb_direction dir,
                                      const rdb_inference_options* opts,
                                      double* gamma_out);

/* Worst rejection probability of the one-sided test at a fixed gamma. */
RDB_API rdb_status rdb_worst_rejection(const rdb_design* d, const double* w_plus,
                                       const double* w_minus, double lipschitz,
                                       double tau0, double gamma, rdb_direction dir,
                                       const rdb_inference_options* opts,
                                       double* prob_out);

/* Two-sided test-inversion confidence interval at level alpha. */
RDB_API rdb_status rdb_confidence_interval(const rdb_design* d, const double* w_plus,
                                           const double* w_minus, double lipschitz,
                                           double alpha,
                                           const rdb_inference_options* opts,
                                           double* lower_out, double* upper_out);

/* Maximum bias of the weighted estimator over the feasible mean profiles. */
RDB_API rdb_status rdb_max_abs_bias(const rdb_design* d, const double* w_plus,
                                    const double* w_minus, double lipschitz,
                                    double* bias_out);

typedef enum rdb_hoeffding_mode {
  RDB_HOEFFDING_ONE_SIDED = 0,
  RDB_HOEFFDING_TWO_NAIVE = 1,
  RDB_HOEFFDING_TWO_OPTIMIZED = 2
} rdb_hoeffding_mode;

/* Concentration-bound interval for bounded outcomes. */
RDB_API rdb_status rdb_hoeffding_interval(const rdb_design* d, const double* w_plus,
                                          const double* w_minus, double lipschitz,
                                          double alpha, rdb_hoeffding_mode mode,
                                          double* lower_out, double* upper_out,
                                          double* gamma_out);

/* ------------------------------------------------------------------ */
/* Gaussian comparison                                                 */

typedef struct rdb_ratio_report {
  size_t n;
  double lipschitz;
  double value_binary;
  double value_gauss_under_binary;
  double ratio_mse;
  double ratio_root_mse;
  double u_hat;
  double lemma_upper; /* NaN when u_hat == 0 */
  double lemma_cap;   /* 2 / u_hat^2; NaN when u_hat == 0 */
  int degenerate;     /* nonzero when u_hat == 0 */
} rdb_ratio_report;

RDB_API rdb_status rdb_compare_worst_case(const double* radii, size_t n,
                                          double lipschitz,
                                          const rdb_solver_options* opts,
                                          rdb_ratio_report* out);

/* ------------------------------------------------------------------ */
/* Monte Carlo studies                                                 */

typedef enum rdb_dgp_kind {
  RDB_DGP_LEE = 0,
  RDB_DGP_WORST_CASE = 1,
  RDB_DGP_FLAT = 2
} rdb_dgp_kind;

typedef struct rdb_study_spec {
  rdb_dgp_kind dgp;
  double dgp_c;       /* worst-case envelope slope                          */
  double flat_level;  /* flat model level (default 0.5)                     */
  const double* coef_left;  /* lee polynomial, control side; NULL = default */
  size_t n_coef_left;
  const double* coef_right; /* lee polynomial, treated side; NULL = default */
  size_t n_coef_right;
  int n_obs;
  int replications;
  int ci_replications;
  double alpha;
  double c_used;
  int n_sims;
  uint64_t seed;
  int with_rdbinary;
  int with_gauss;
  int with_unweighted;
} rdb_study_spec;

RDB_API rdb_study_spec rdb_study_spec_default(void);

typedef struct rdb_estimator_stats {
  int present;
  double root_mse, root_mse_se;
  double bias, bias_se;
  double mean_ci_length, ci_length_se;
  double coverage, coverage_se;
} rdb_estimator_stats;

typedef struct rdb_study_report {
  double tau_true;
  rdb_estimator_stats rdbinary;
  rdb_estimator_stats gauss;
  rdb_estimator_stats unweighted;
} rdb_study_report;

RDB_API rdb_status rdb_run_study(const rdb_study_spec* spec, rdb_study_report* out);

/* Conditional mean of a DGP at signed x (side 0 treated, 1 control). */
RDB_API rdb_status rdb_dgp_mean(const rdb_study_spec* spec, double x, rdb_side side,
                                double* mean_out);

/* Largest |slope| of the configured lee polynomials (the model's smallest
 * valid Lipschitz constant). */
RDB_API rdb_status rdb_lee_true_lipschitz(const rdb_study_spec* spec, double* c_out);

/* ------------------------------------------------------------------ */
/* Rule-of-thumb Lipschitz constant                                    */

/* Largest absolute slope between adjacent binned outcome means (bins with
 * fewer than 2 observations skipped). c_plus_out / c_minus_out may be NULL.
 * Returns RDB_ERR_INSUFFICIENT_DATA when neither side has 2 usable bins. */
RDB_API rdb_status rdb_rot_c(const rdb_design* d, int bins, double* c_out,
                             double* c_plus_out, double* c_minus_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RDBINARY_H */
