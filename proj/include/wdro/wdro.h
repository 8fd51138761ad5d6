/*
 * wdro - Wasserstein distributionally robust expected-utility maximization
 * for one-period markets over discrete return measures.
 *
 * C interface: opaque handles plus status codes. Every function returning
 * wdro_status leaves a human-readable message in wdro_last_error() on
 * failure. Handles are freed with the matching *_free call; passing NULL to
 * a *_free is a no-op.
 */
#ifndef WDRO_H
#define WDRO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define WDRO_API __declspec(dllexport)
#else
#define WDRO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wdro_status {
  WDRO_OK = 0,
  WDRO_ERR_INVALID_ARGUMENT = 1,
  WDRO_ERR_BALL_VIOLATION = 2,
  WDRO_ERR_DEGENERATE_SUPPORT = 3,
  WDRO_ERR_DEGENERATE_PROBE = 4,
  WDRO_ERR_INCONSISTENT_METADATA = 5,
  WDRO_ERR_ILL_POSED = 6,
  WDRO_ERR_NUMERICAL = 7,
  WDRO_ERR_NOT_APPLICABLE = 8,
  WDRO_ERR_INFEASIBLE = 9,
  WDRO_ERR_IO = 10,
  WDRO_ERR_NOMEM = 11
} wdro_status;

typedef struct wdro_utility wdro_utility;
typedef struct wdro_measure wdro_measure;
typedef struct wdro_constraint wdro_constraint;
typedef struct wdro_inner_solution wdro_inner_solution;
typedef struct wdro_outer_solution wdro_outer_solution;
typedef struct wdro_sweep wdro_sweep;

WDRO_API const char* wdro_version(void);
/* Message from the last failing call on this thread. */
WDRO_API const char* wdro_last_error(void);

/* ------------------------------------------------------------------ */
/* Utility functions                                                   */
/* ------------------------------------------------------------------ */

/* kind: "bounded_exp_power" | "log_linear" | "linear_power".
 * q is the family exponent (ignored for log_linear). Pass 0 for p_growth,
 * c1 or x_lower to accept the family defaults. */
WDRO_API wdro_status wdro_utility_create(const char* kind, double q, double p_growth, double c1,
                                         double x_lower, wdro_utility** out);

/* Piece forms: 0 affine a+bx, 1 logarithm a+b*log(x+c), 2 power a+b*(c-x)^e,
 * 3 exponential a+b*exp(c*x). Pieces ordered by `upper` breakpoint; the last
 * piece's upper bound is ignored (taken as +inf). */
typedef struct wdro_piece {
  int form;
  double a, b, c, e;
  double upper;
} wdro_piece;

WDRO_API wdro_status wdro_utility_create_piecewise(const wdro_piece* pieces, int n,
                                                   double p_growth, double c1, double x_lower,
                                                   wdro_utility** out);
WDRO_API void wdro_utility_free(wdro_utility* u);

WDRO_API wdro_status wdro_utility_value(const wdro_utility* u, double x, double* out);
WDRO_API wdro_status wdro_utility_derivative(const wdro_utility* u, double x, double* out);

typedef struct wdro_admissibility {
  int pass;
  int monotone_ok;
  int concave_ok;
  int negative_at_x_lower;
  int growth_ok;
  double first_violation_x;
  char violation[64];
} wdro_admissibility;

WDRO_API wdro_status wdro_utility_admissibility(const wdro_utility* u, double x_max, int points,
                                                wdro_admissibility* out);

/* case_tag: 0 bounded_above, 1 rae_minus, 2 rae_plus, 3 inadmissible */
typedef struct wdro_ae_report {
  double ae_plus;
  double ae_minus;
  int case_tag;
  double gamma_lower;
  double gamma_upper;
  double envelope_c;
  double x_upper;
} wdro_ae_report;

WDRO_API wdro_status wdro_utility_ae(const wdro_utility* u, wdro_ae_report* out);

/* side: +1 for x -> +inf, -1 for x -> -inf; probes are increasing magnitudes. */
WDRO_API wdro_status wdro_utility_ae_estimate(const wdro_utility* u, int side,
                                              const double* probes, int n, double* value,
                                              int* stabilized);

WDRO_API wdro_status wdro_utility_growth_envelope(const wdro_utility* u, double* c_hat);

/* Proposes (c1, x_lower) consistent with the declared growth order p on the
 * probe grid. Advisory: user metadata is never overwritten. found=0 when no
 * consistent pair exists (e.g. exponential tails). */
WDRO_API wdro_status wdro_utility_fit_growth(const wdro_utility* u, double p, double* c1,
                                             double* x_lower, int* found);

/* ------------------------------------------------------------------ */
/* Discrete measures                                                   */
/* ------------------------------------------------------------------ */

/* atoms: count x dim row-major; weights NULL means uniform 1/count. */
WDRO_API wdro_status wdro_measure_create(int dim, int count, const double* atoms,
                                         const double* weights, wdro_measure** out);
/* splitmix64(seed) + Box-Muller; mean/sigma are per-coordinate arrays. */
WDRO_API wdro_status wdro_measure_synthetic_gaussian(int dim, int count, uint64_t seed,
                                                     const double* mean, const double* sigma,
                                                     wdro_measure** out);
WDRO_API void wdro_measure_free(wdro_measure* m);

WDRO_API int wdro_measure_dim(const wdro_measure* m);
WDRO_API int wdro_measure_size(const wdro_measure* m);
WDRO_API wdro_status wdro_measure_atom(const wdro_measure* m, int i, double* coords);
WDRO_API double wdro_measure_weight(const wdro_measure* m, int i);

WDRO_API wdro_status wdro_measure_moment(const wdro_measure* m, double p, double* out);
WDRO_API wdro_status wdro_wasserstein(const wdro_measure* a, const wdro_measure* b, double p,
                                      double* out);

WDRO_API wdro_status wdro_measure_dirac_mixture(const wdro_measure* m, const double* x,
                                                double alpha, double p, double k,
                                                wdro_measure** out);
WDRO_API wdro_status wdro_measure_pstar(const wdro_measure* m, double p, double k,
                                        wdro_measure** out);
WDRO_API wdro_status wdro_measure_shift(const wdro_measure* m, const double* v,
                                        wdro_measure** out);
WDRO_API wdro_status wdro_measure_beta_star(const wdro_measure* m, int directions, double* beta,
                                            int* degenerate);
/* direction may be NULL; receives an arbitrage direction when one exists. */
WDRO_API wdro_status wdro_measure_na_check(const wdro_measure* m, int* no_arbitrage,
                                           double* direction);
/* Serializes {"atoms": [...], "weights": [...]} with 17 significant digits.
 * Returns the required size (including NUL) through `needed`. */
WDRO_API wdro_status wdro_measure_to_json(const wdro_measure* m, char* buf, size_t cap,
                                          size_t* needed);

/* ------------------------------------------------------------------ */
/* Worst-case inner problem                                            */
/* ------------------------------------------------------------------ */

WDRO_API wdro_status wdro_inner_solve(const wdro_utility* u, const wdro_measure* m, double p,
                                      double k, double x0, const double* w, int dim,
                                      wdro_inner_solution** out);
WDRO_API void wdro_inner_free(wdro_inner_solution* s);

WDRO_API double wdro_inner_value(const wdro_inner_solution* s);
WDRO_API double wdro_inner_lambda(const wdro_inner_solution* s);
WDRO_API int wdro_inner_saturated(const wdro_inner_solution* s);
WDRO_API double wdro_inner_gap(const wdro_inner_solution* s);
WDRO_API double wdro_inner_budget_norm(const wdro_inner_solution* s);
WDRO_API wdro_status wdro_inner_budget(const wdro_inner_solution* s, double* z, int cap);
WDRO_API wdro_status wdro_inner_worst_measure(const wdro_inner_solution* s, wdro_measure** out);

WDRO_API wdro_status wdro_inner_oracle(const wdro_utility* u, const wdro_measure* m, double p,
                                       double k, double x0, const double* w, int dim, int grid,
                                       double* out);
WDRO_API wdro_status wdro_shift_upper_bound(const wdro_utility* u, const wdro_measure* m,
                                            double x0, const double* w, int dim, double k,
                                            double* out);
WDRO_API wdro_status wdro_divergence_witness(const wdro_utility* u, const wdro_measure* m,
                                             double p, double k, double x0, const double* w,
                                             int dim, double target, wdro_measure** measure,
                                             double* k_used, double* expectation, int* reached);

/* ------------------------------------------------------------------ */
/* Constraint sets                                                     */
/* ------------------------------------------------------------------ */

/* kind: "halfspace" | "halfspace_nonneg" | "two_sided" with level a. */
WDRO_API wdro_status wdro_constraint_create(const char* kind, int dim, double a,
                                            wdro_constraint** out);
WDRO_API wdro_status wdro_constraint_polyhedron(int dim, int rows, const double* normals,
                                                const double* offsets, wdro_constraint** out);
WDRO_API wdro_status wdro_constraint_singleton(int dim, const double* w0, wdro_constraint** out);
WDRO_API wdro_status wdro_constraint_finite_list(int dim, int count, const double* candidates,
                                                 wdro_constraint** out);
WDRO_API void wdro_constraint_free(wdro_constraint* c);

WDRO_API wdro_status wdro_constraint_project(const wdro_constraint* c, const double* w,
                                             double* out);
WDRO_API int wdro_constraint_contains(const wdro_constraint* c, const double* w, double tol);
/* buf holds up to cap_points * dim doubles, row-major. */
WDRO_API wdro_status wdro_constraint_min_norm_points(const wdro_constraint* c, double* buf,
                                                     int cap_points, int* count);

/* ------------------------------------------------------------------ */
/* Outer maximization and radius sweeps                                */
/* ------------------------------------------------------------------ */

typedef struct wdro_solve_options {
  double eta0;         /* 0: scale-free default 1/(1+|x0| C_P) */
  int max_iterations;  /* ascent cap, default 5000 */
  double grad_tol;     /* projected-gradient stop, default 1e-6 */
  double gap_tol;      /* inner duality-gap tolerance, default 1e-8 */
  int threads;         /* worker pool for cold sweeps */
} wdro_solve_options;

WDRO_API void wdro_solve_options_init(wdro_solve_options* opts);

WDRO_API wdro_status wdro_maximize(const wdro_utility* u, const wdro_measure* m, double p,
                                   double k, double x0, const wdro_constraint* D,
                                   const wdro_solve_options* opts, wdro_outer_solution** out);
WDRO_API void wdro_outer_free(wdro_outer_solution* s);

WDRO_API double wdro_outer_value(const wdro_outer_solution* s);
WDRO_API wdro_status wdro_outer_weights(const wdro_outer_solution* s, double* w, int cap);
WDRO_API int wdro_outer_iterations(const wdro_outer_solution* s);
WDRO_API int wdro_outer_piece(const wdro_outer_solution* s);
WDRO_API double wdro_outer_k_bound(const wdro_outer_solution* s);
WDRO_API double wdro_outer_lambda(const wdro_outer_solution* s);
WDRO_API int wdro_outer_saturated(const wdro_outer_solution* s);
WDRO_API double wdro_outer_gap(const wdro_outer_solution* s);
WDRO_API double wdro_outer_budget_norm(const wdro_outer_solution* s);

/* Explicit radius K beyond which no constrained optimizer can lie (RAE cases
 * only; bounded-above utilities report WDRO_ERR_NOT_APPLICABLE). */
WDRO_API wdro_status wdro_weight_bound(const wdro_utility* u, const wdro_measure* m, double p,
                                       double k, double x0, const wdro_constraint* D,
                                       double* K);

WDRO_API wdro_status wdro_sweep_run(const wdro_utility* u, const wdro_measure* m, double p,
                                    const double* ks, int nk, double x0,
                                    const wdro_constraint* D, const wdro_solve_options* opts,
                                    int warm_chain, wdro_sweep** out);
WDRO_API void wdro_sweep_free(wdro_sweep* s);

typedef struct wdro_sweep_record {
  double k;
  double norm;
  double value;
  double dist;
  int iterations;
  double wall_ms;
  int ok;
  double bound_at_min_norm;
} wdro_sweep_record;

WDRO_API int wdro_sweep_count(const wdro_sweep* s);
WDRO_API wdro_status wdro_sweep_record_get(const wdro_sweep* s, int i, wdro_sweep_record* rec,
                                           double* w);
WDRO_API double wdro_sweep_min_norm(const wdro_sweep* s);
WDRO_API int wdro_sweep_value_monotone(const wdro_sweep* s);
WDRO_API int wdro_sweep_excursions(const wdro_sweep* s);
/* Smallest scheduled k with norm gap below delta; found=0 when none. */
WDRO_API wdro_status wdro_sweep_k0(const wdro_sweep* s, double delta, double* k0, int* found);

#ifdef __cplusplus
}
#endif

#endif /* WDRO_H */
