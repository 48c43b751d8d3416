/* hisd — high-index saddle dynamics solver, C interface.
 *
 * Every function returns a hisd_status; on failure hisd_last_error() holds a
 * thread-local description. Objects behind opaque handles are immutable once
 * created and safe to share across threads; handles must be released with
 * the matching _free call.
 */
#ifndef HISD_H
#define HISD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hisd_status {
  HISD_OK = 0,
  HISD_ERR_INVALID_ARGUMENT = 1,
  HISD_ERR_CONTRACT = 2,      /* a documented precondition failed            */
  HISD_ERR_RANK_DEFICIENT = 3,
  HISD_ERR_DEGENERATE = 4,    /* eigenvalue within 1e-10 of zero             */
  HISD_ERR_INADMISSIBLE = 5,  /* theory-side admissibility condition failed  */
  HISD_ERR_NO_CONVERGENCE = 6,
  HISD_ERR_DIVERGED = 7,
  HISD_ERR_MISSING_DATA = 8,
  HISD_ERR_IO = 9,
  HISD_ERR_INTERNAL = 10,
} hisd_status;

const char* hisd_last_error(void);
const char* hisd_version(void);

/* ---- landscapes -------------------------------------------------------- */

typedef struct hisd_landscape hisd_landscape;

/* E(x) = x^T A x / 2 for a symmetric d x d matrix in row-major order. */
hisd_status hisd_landscape_quadratic(const double* a, int d, hisd_landscape** out);
/* Four-dimensional singular-valley benchmark; s has 4 entries, the first
 * `modified` arctan^2 terms enter with a minus sign. */
hisd_status hisd_landscape_powell(const double* s, int modified, hisd_landscape** out);
/* Six-dimensional exponential-fitting benchmark; s has 6 entries. */
hisd_status hisd_landscape_biggs(const double* s, int modified, hisd_landscape** out);
/* d-dimensional banana-valley benchmark; s has d entries. */
hisd_status hisd_landscape_rosenbrock(const double* s, int d, int modified,
                                      hisd_landscape** out);
void hisd_landscape_free(hisd_landscape* land);

int hisd_landscape_dim(const hisd_landscape* land);
const char* hisd_landscape_name(const hisd_landscape* land);
hisd_status hisd_landscape_value(const hisd_landscape* land, const double* x, double* out);
hisd_status hisd_landscape_gradient(const hisd_landscape* land, const double* x,
                                    double* out);
/* Known stationary point (length d). */
hisd_status hisd_landscape_stationary_point(const hisd_landscape* land, double* out);
/* Negative-eigenvalue count of the Hessian at the stationary point. */
hisd_status hisd_landscape_morse_index(const hisd_landscape* land, int* out);

typedef struct hisd_spectrum_stats {
  double mu;     /* min |eigenvalue| */
  double L;      /* max |eigenvalue| */
  double kappa;  /* L / mu           */
  int morse_index;
  double gap_to_zero;
} hisd_spectrum_stats;

/* Eigenvalue-magnitude bounds of the Hessian at x. */
hisd_status hisd_landscape_spectrum_stats(const hisd_landscape* land, const double* x,
                                          hisd_spectrum_stats* out);

/* Sampled lower bound on the Hessian Lipschitz constant over a ball. */
hisd_status hisd_estimate_M(const hisd_landscape* land, const double* center,
                            double radius, int samples, uint64_t seed, double* out);

/* ---- saddle dynamics runs ---------------------------------------------- */

typedef enum hisd_beta_policy {
  HISD_BETA_CONSTANT = 0,
  HISD_BETA_THEORY_EXACT = 1,
  HISD_BETA_THEORY_ALPHA_INDEX1 = 2,
  HISD_BETA_THEORY_ALPHA_INDEXK = 3,
} hisd_beta_policy;

typedef enum hisd_eigen_method {
  HISD_EIGEN_EXACT = 0,
  HISD_EIGEN_SIRQIT = 1,
  HISD_EIGEN_LOBPCG = 2,
} hisd_eigen_method;

typedef struct hisd_run_options {
  int index_k;
  int beta_policy;        /* hisd_beta_policy */
  double beta;            /* constant policy  */
  double alpha;           /* alpha policies   */
  int eigen_method;       /* hisd_eigen_method */
  int sub_iterations;
  double gamma;           /* <= 0: defaults to the resolved beta (sirqit) */
  double dimer_length;
  int use_dimer;
  long max_iterations;
  double grad_tol;        /* 0 disables */
  double r_tol;           /* 0 disables; needs the reference point */
  int diagnostics;
  uint64_t seed;
  double v0_noise;        /* 0: exact warm start at x0 */
} hisd_run_options;

void hisd_run_options_default(hisd_run_options* opts);

typedef struct hisd_trace hisd_trace;

/* x_star may be NULL when no reference point is known. */
hisd_status hisd_run(const hisd_landscape* land, const hisd_run_options* opts,
                     const double* x0, const double* x_star, hisd_trace** out);
void hisd_trace_free(hisd_trace* trace);

typedef struct hisd_record {
  long n;
  double grad_norm;
  double r;           /* < 0 when absent */
  double alpha;       /* < 0 when absent */
  double contraction; /* < 0 when absent */
  double beta;
} hisd_record;

long hisd_trace_size(const hisd_trace* trace);
hisd_status hisd_trace_record(const hisd_trace* trace, long i, hisd_record* out);
const char* hisd_trace_termination(const hisd_trace* trace);
long hisd_trace_metadata_count(const hisd_trace* trace);
hisd_status hisd_trace_metadata(const hisd_trace* trace, long i, const char** key,
                                const char** value);
hisd_status hisd_trace_write_csv(const hisd_trace* trace, const char* path);
hisd_status hisd_trace_write_plot(const hisd_trace* trace, const char* path);
hisd_status hisd_trace_empirical_rate(const hisd_trace* trace, double tail_fraction,
                                      double* rate, double* r_squared);

/* ---- convergence-rate theory ------------------------------------------- */

typedef struct hisd_rate_bundle {
  double mu, L, kappa, M, alpha;
  int regime; /* 0 exact, 1 index1-approx, 2 indexk-approx */
  double beta, q, c, eta, r_hat, rate;
} hisd_rate_bundle;

hisd_status hisd_rate_exact(double mu, double L, double M, hisd_rate_bundle* out);
hisd_status hisd_rate_index1(double mu, double L, double M, double alpha,
                             hisd_rate_bundle* out);
hisd_status hisd_rate_indexk(double mu, double L, double M, double alpha,
                             hisd_rate_bundle* out);
/* regime: 1 or 2 as in hisd_rate_bundle.regime. */
hisd_status hisd_sup_admissible_alpha(double kappa, int regime, double* out);

/* ---- property battery --------------------------------------------------- */

typedef struct hisd_property_result {
  char name[64];
  long trials;
  long violations;
  double worst_margin;
  char detail[256]; /* first counterexample, empty when clean */
} hisd_property_result;

/* Runs the randomized verification battery. `only` restricts to one named
 * suite, `inject_fault` sign-flips the named suite's bound (self-test), both
 * may be NULL. Writes up to `cap` results and the total count to n_out. */
hisd_status hisd_verify_run(uint64_t seed, long trials, const char* only,
                            const char* inject_fault, hisd_property_result* results,
                            int cap, int* n_out);

/* Writes every per-trial margin of the last hisd_verify_run in this thread
 * as CSV lines `suite,trial,margin`. */
hisd_status hisd_verify_write_margins_csv(const char* path);

#ifdef __cplusplus
}
#endif

#endif /* HISD_H */
