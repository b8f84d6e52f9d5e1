#ifndef DLAB_DLAB_H
#define DLAB_DLAB_H

/*
 * C interface to the dispersion lab. Every function returns a dlab_status;
 * results come back through out-parameters. On failure a description is
 * available from dlab_last_error_message() on the calling thread.
 *
 * Handles are opaque and owned by the caller; release them with the matching
 * *_free function. Handles are immutable after creation and may be shared
 * between threads.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DLAB_BUILDING_LIBRARY)
#    define DLAB_API __declspec(dllexport)
#  else
#    define DLAB_API __declspec(dllimport)
#  endif
#else
#  define DLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dlab_status {
  DLAB_OK = 0,
  DLAB_ERR_INVALID_ARGUMENT = 1,
  DLAB_ERR_NOT_INVERTIBLE = 2,
  DLAB_ERR_PRECONDITION = 3,
  DLAB_ERR_DIVISOR_BOUND = 4,
  DLAB_ERR_PARSE = 5,
  DLAB_ERR_TABLE_LIMIT = 6,
  DLAB_ERR_QUADRATURE = 7,
  DLAB_ERR_IO = 8,
  DLAB_ERR_INTERNAL = 99
} dlab_status;

typedef struct dlab_tables dlab_tables;
typedef struct dlab_sequence dlab_sequence;
typedef struct dlab_psi dlab_psi;
typedef struct dlab_discrepancy_report dlab_discrepancy_report;
typedef struct dlab_dispersion_report dlab_dispersion_report;
typedef struct dlab_grid dlab_grid;

DLAB_API const char* dlab_version(void);
DLAB_API const char* dlab_last_error_message(void);
DLAB_API const char* dlab_status_name(dlab_status status);

/* Worker threads for parallel loops (0 means 1). Results never depend on it. */
DLAB_API void dlab_set_worker_count(unsigned workers);
DLAB_API unsigned dlab_worker_count(void);

/* Name of the seeded generator used for random instances. */
DLAB_API const char* dlab_rng_name(void);

/* ---- arithmetic tables and primitives ---- */

DLAB_API dlab_status dlab_tables_build(uint64_t limit, int k_max, dlab_tables** out);
DLAB_API void dlab_tables_free(dlab_tables* tables);
DLAB_API uint64_t dlab_tables_limit(const dlab_tables* tables);
DLAB_API dlab_status dlab_tables_tau(const dlab_tables* tables, int k, uint64_t n, uint64_t* out);
DLAB_API dlab_status dlab_tables_phi(const dlab_tables* tables, uint64_t n, uint64_t* out);
DLAB_API dlab_status dlab_tables_mu(const dlab_tables* tables, uint64_t n, int* out);
DLAB_API dlab_status dlab_tables_rad(const dlab_tables* tables, uint64_t n, uint64_t* out);

/* On DLAB_ERR_NOT_INVERTIBLE, *gcd_out (if non-null) receives gcd(n, q). */
DLAB_API dlab_status dlab_mod_inverse(int64_t n, uint64_t q, uint64_t* out, uint64_t* gcd_out);

typedef struct dlab_coprime_split {
  uint64_t d, nu1, nu2, d1, nu1p;
} dlab_coprime_split;

DLAB_API dlab_status dlab_coprime_split_compute(uint64_t n1, uint64_t n2, dlab_coprime_split* out);
DLAB_API dlab_status dlab_n_over_phi_expansion(uint64_t n, uint64_t cutoff, double* out);

/* ---- coefficient sequences ---- */

/* kind: constant_one, moebius, tau2, random, sign, zero. Support [lower, 2 lower). */
DLAB_API dlab_status dlab_sequence_make(const dlab_tables* tables, const char* kind, uint64_t lower,
                                        uint64_t seed, dlab_sequence** out);
/* Same on [lower, upper). */
DLAB_API dlab_status dlab_sequence_make_range(const dlab_tables* tables, const char* kind,
                                              uint64_t lower, uint64_t upper, uint64_t seed,
                                              dlab_sequence** out);
/* Explicit values on [lower, lower + count). */
DLAB_API dlab_status dlab_sequence_from_values(const dlab_tables* tables, uint64_t lower,
                                               const double* values, size_t count, int order_k,
                                               dlab_sequence** out);
/* "index value" lines; '#' comments. */
DLAB_API dlab_status dlab_sequence_load(const dlab_tables* tables, const char* path, int order_k,
                                        dlab_sequence** out);
/* Copy with beta_n = 0 for every n dividing a. */
DLAB_API dlab_status dlab_sequence_without_divisors_of(const dlab_tables* tables,
                                                       const dlab_sequence* seq, int64_t a,
                                                       dlab_sequence** out);
DLAB_API void dlab_sequence_free(dlab_sequence* seq);
DLAB_API uint64_t dlab_sequence_lower(const dlab_sequence* seq);
DLAB_API uint64_t dlab_sequence_upper(const dlab_sequence* seq);
DLAB_API int dlab_sequence_order(const dlab_sequence* seq);
/* 0 outside the support. */
DLAB_API double dlab_sequence_value(const dlab_sequence* seq, uint64_t n);

/* On DLAB_ERR_DIVISOR_BOUND the offending indices of the last failed
 * construction on this thread can be read back. */
DLAB_API size_t dlab_last_offending_count(void);
DLAB_API uint64_t dlab_last_offending(size_t i);

DLAB_API dlab_status dlab_sw_defect(const dlab_sequence* seq, uint64_t q, int64_t a, uint64_t r,
                                    double* out);
DLAB_API dlab_status dlab_bdh_variance(const dlab_sequence* seq, uint64_t Q_max, double* out);

typedef struct dlab_tau_ap {
  double sum;
  double bound_ratio;
  uint64_t terms;
} dlab_tau_ap;

DLAB_API dlab_status dlab_tau_ap_ratio(const dlab_tables* tables, uint64_t x, uint64_t y,
                                       uint64_t q, int64_t a, int k, dlab_tau_ap* out);

/* ---- smooth cutoff ---- */

DLAB_API dlab_status dlab_psi_build(double quad_tol, dlab_psi** out);
DLAB_API void dlab_psi_free(dlab_psi* psi);
DLAB_API double dlab_psi_value(const dlab_psi* psi, double t);
DLAB_API double dlab_psi_hat_zero(const dlab_psi* psi);
DLAB_API dlab_status dlab_psi_hat(const dlab_psi* psi, double xi, double* re, double* im,
                                  double* error_estimate);
DLAB_API dlab_status dlab_poisson_threshold(uint64_t M, uint64_t q, double* out);

typedef enum dlab_precision { DLAB_PRECISION_WORKING = 0, DLAB_PRECISION_EXTENDED = 1 } dlab_precision;

typedef struct dlab_poisson_check {
  double lhs, main, dual_sum, residual;
  double H, threshold;
  uint64_t dual_terms;
  int digits;
  double noise_floor;
} dlab_poisson_check;

DLAB_API dlab_status dlab_truncated_poisson_ap(const dlab_psi* psi, uint64_t M, uint64_t q,
                                               int64_t a, double H, dlab_precision precision,
                                               dlab_poisson_check* out);

typedef struct dlab_coprime_sum {
  double lhs, main, residual, constant;
} dlab_coprime_sum;

DLAB_API dlab_status dlab_coprime_psi_sum(const dlab_psi* psi, uint64_t M, uint64_t q,
                                          dlab_coprime_sum* out);

/* ---- discrepancy ---- */

DLAB_API dlab_status dlab_discrepancy_E(const dlab_sequence* alpha, const dlab_sequence* beta,
                                        uint64_t q, int64_t a, double* out);
/* Moduli Q <= q < 2Q coprime to a. */
DLAB_API dlab_status dlab_mean_discrepancy(const dlab_sequence* alpha, const dlab_sequence* beta,
                                           uint64_t Q, int64_t a, dlab_discrepancy_report** out);
DLAB_API void dlab_discrepancy_report_free(dlab_discrepancy_report* report);
DLAB_API size_t dlab_discrepancy_report_count(const dlab_discrepancy_report* report);
DLAB_API dlab_status dlab_discrepancy_report_entry(const dlab_discrepancy_report* report, size_t i,
                                                   uint64_t* q, double* E);
DLAB_API double dlab_discrepancy_report_delta(const dlab_discrepancy_report* report);
DLAB_API double dlab_discrepancy_report_X(const dlab_discrepancy_report* report);
DLAB_API double dlab_discrepancy_report_normalized(const dlab_discrepancy_report* report);

typedef struct dlab_q_window {
  int empty;
  double lo, hi;
  double exponent_lo, exponent_hi, n_exponent;
  int n_below_17_33;
} dlab_q_window;

DLAB_API dlab_status dlab_admissible_Q_window(double M, double N, double eps, dlab_q_window* out);

/* ---- dispersion ---- */

typedef struct dlab_dispersion_terms {
  double U, V, W, U_MT, V_MT, W_MT, H, R;
} dlab_dispersion_terms;

DLAB_API dlab_status dlab_compute_UVW(const dlab_sequence* beta, const dlab_psi* psi, uint64_t M,
                                      uint64_t Q, int64_t a, double eps,
                                      dlab_dispersion_report** out);
DLAB_API void dlab_dispersion_report_free(dlab_dispersion_report* report);
DLAB_API void dlab_dispersion_report_terms(const dlab_dispersion_report* report,
                                           dlab_dispersion_terms* out);
DLAB_API size_t dlab_dispersion_report_count(const dlab_dispersion_report* report);
DLAB_API dlab_status dlab_dispersion_report_entry(const dlab_dispersion_report* report, size_t i,
                                                  uint64_t* q, double* weight, double* U, double* V,
                                                  double* W);

typedef struct dlab_identity {
  double lhs, rhs, abs_gap;
  int holds;
} dlab_identity;

DLAB_API dlab_status dlab_dispersion_expansion_identity(const dlab_sequence* beta,
                                                        const dlab_psi* psi, uint64_t M,
                                                        uint64_t Q, int64_t a, dlab_identity* out);
DLAB_API dlab_status dlab_main_term_variance_identity(const dlab_sequence* beta,
                                                      const dlab_psi* psi, uint64_t M, uint64_t Q,
                                                      int64_t a, dlab_identity* out);

typedef struct dlab_cs_check {
  double delta, delta_sq, alpha_mass, expansion, bound, ratio;
} dlab_cs_check;

DLAB_API dlab_status dlab_cauchy_schwarz_bound(const dlab_sequence* alpha, const dlab_sequence* beta,
                                               const dlab_psi* psi, uint64_t Q, int64_t a,
                                               dlab_cs_check* out);

typedef struct dlab_truncation {
  double H, R;
  uint64_t H_ceil, R_ceil;
} dlab_truncation;

DLAB_API dlab_status dlab_truncation_parameters(double M, double Q, double X, double eps,
                                                dlab_truncation* out);

/* ---- exponential sums ---- */

DLAB_API dlab_status dlab_kloosterman(int64_t a, int64_t b, uint64_t c, double* re, double* im);
DLAB_API dlab_status dlab_weil_ratio(int64_t a, int64_t b, uint64_t c, double* out);

typedef struct dlab_weil_sweep {
  uint64_t c_max, checked, violations;
  double max_ratio;
  uint64_t worst_a, worst_b, worst_c;
} dlab_weil_sweep;

DLAB_API dlab_status dlab_weil_sweep_run(uint64_t c_max, dlab_weil_sweep* out);
/* Same sweep; ratios[c - 1] receives max over (a, b) of the ratio for modulus c.
 * ratios must hold c_max entries. */
DLAB_API dlab_status dlab_weil_sweep_profile(uint64_t c_max, dlab_weil_sweep* out, double* ratios);

typedef struct dlab_short_kloosterman {
  double re, im, bound_ratio, eps0;
  uint64_t terms;
} dlab_short_kloosterman;

DLAB_API dlab_status dlab_short_kloosterman_weighted(uint64_t lo, uint64_t hi, int64_t ell,
                                                     uint64_t a, uint64_t b,
                                                     dlab_short_kloosterman* out);

typedef struct dlab_short_kloosterman_sweep {
  uint64_t trials;
  double max_ratio, median_ratio;
} dlab_short_kloosterman_sweep;

DLAB_API dlab_status dlab_short_kloosterman_sweep_run(uint64_t trials, uint64_t a_max,
                                                      uint64_t b_max, uint64_t seed,
                                                      dlab_short_kloosterman_sweep* out);

/* Fractions are written as "num/den" in [0, 1). */
#define DLAB_FRACTION_CHARS 256

typedef struct dlab_bezout {
  char lhs[DLAB_FRACTION_CHARS];
  char rhs1[DLAB_FRACTION_CHARS];
  char rhs2[DLAB_FRACTION_CHARS];
  int exact_match;
} dlab_bezout;

DLAB_API dlab_status dlab_bezout_reciprocity(int64_t a, uint64_t m, uint64_t n, dlab_bezout* out);

typedef struct dlab_trial_sweep {
  uint64_t trials, mismatches, xi_pairs, xi_pair_mismatches;
} dlab_trial_sweep;

DLAB_API dlab_status dlab_bezout_sweep(uint64_t trials, uint64_t bound, uint64_t seed,
                                       dlab_trial_sweep* out);

typedef struct dlab_factorization_input {
  int64_t a, h, r;
  uint64_t d, d1, nu1p, nu2;
} dlab_factorization_input;

typedef struct dlab_factorization {
  uint64_t q;
  char original[DLAB_FRACTION_CHARS];
  char xi[DLAB_FRACTION_CHARS];
  char middle[DLAB_FRACTION_CHARS];
  char tail[DLAB_FRACTION_CHARS];
  uint64_t xi_modulus, xi_residue;
  int exact_match;
} dlab_factorization;

DLAB_API dlab_status dlab_kloosterman_fraction_factorization(const dlab_factorization_input* in,
                                                             dlab_factorization* out);
DLAB_API dlab_status dlab_xi_from_residues(const dlab_factorization_input* in, uint64_t* out);
DLAB_API dlab_status dlab_factorization_sweep(uint64_t trials, uint64_t seed, dlab_trial_sweep* out);

typedef struct dlab_trilinear {
  double re, im;
  double bc_bound, ratio, bc_bound_normalized, ratio_normalized, trivial_bound, eps;
  uint64_t skipped_pairs;
} dlab_trilinear;

/* Ranges [A, A + nu_len), [M, M + alpha_len), [N, N + beta_len). */
DLAB_API dlab_status dlab_trilinear_form(int64_t theta, uint64_t A, uint64_t M, uint64_t N,
                                         const double* alpha, size_t alpha_len, const double* beta,
                                         size_t beta_len, const double* nu, size_t nu_len,
                                         dlab_trilinear* out);
/* Dyadic ranges with seeded +-1 coefficients. */
DLAB_API dlab_status dlab_trilinear_random_sign(int64_t theta, uint64_t A, uint64_t M, uint64_t N,
                                                uint64_t seed, dlab_trilinear* out);

/* ---- Titchmarsh corollary ---- */

/* sieve_limit caps the largest tau_2 argument; pass UINT64_MAX for no cap. */
DLAB_API dlab_status dlab_corollary_lhs(const dlab_sequence* alpha, const dlab_sequence* beta,
                                        uint64_t sieve_limit, double* out);
DLAB_API dlab_status dlab_corollary_rhs(const dlab_sequence* alpha, const dlab_sequence* beta,
                                        uint64_t extra_q, double* out);

typedef struct dlab_hyperbola {
  double S0, S1, square_mass, reassembled;
  uint64_t sqrt_X;
} dlab_hyperbola;

DLAB_API dlab_status dlab_hyperbola_split(const dlab_sequence* alpha, const dlab_sequence* beta,
                                          dlab_hyperbola* out);

typedef struct dlab_deviation {
  double lhs, rhs, abs_dev, rel_dev;
} dlab_deviation;

DLAB_API dlab_status dlab_corollary_deviation(const dlab_sequence* alpha, const dlab_sequence* beta,
                                              uint64_t sieve_limit, dlab_deviation* out);

DLAB_API dlab_status dlab_grid_build(uint64_t M, uint64_t N, double B, dlab_grid** out);
DLAB_API void dlab_grid_free(dlab_grid* grid);

typedef struct dlab_grid_stats {
  double B, log_2X, delta, X;
  uint64_t L0, cells, e0_cells;
  double delta_pow_L0;
} dlab_grid_stats;

DLAB_API void dlab_grid_stats_get(const dlab_grid* grid, dlab_grid_stats* out);

typedef struct dlab_dissection {
  double s1_e0, s1_free;
  uint64_t triples, e0_triples, dropped_condition_violations;
} dlab_dissection;

DLAB_API dlab_status dlab_dissect_s1(const dlab_sequence* alpha, const dlab_sequence* beta,
                                     const dlab_grid* grid, dlab_dissection* out);

typedef struct dlab_shape {
  uint64_t M, N;
} dlab_shape;

DLAB_API dlab_status dlab_corollary_shape(double X, double delta, dlab_shape* out);

#ifdef __cplusplus
}
#endif

#endif
