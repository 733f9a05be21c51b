#ifndef XIMOD_XIMOD_H
#define XIMOD_XIMOD_H

/* C interface to the ximod library: theta series, xi(s), theta-kernel
 * moments, the polynomials f_{tau,n} and their root counts, tau scans and
 * the self-verification suites.
 *
 * Conventions: every call returns an ximod_status; on failure the message is
 * available from ximod_last_error() (per thread, valid until the next call on
 * that thread). Strings returned through char** are owned by the caller and
 * released with ximod_string_free(). Handles are released with their _free
 * function; passing NULL to a _free function is a no-op. */

#include <stddef.h>

#if defined(XIMOD_BUILDING_LIBRARY)
#define XIMOD_API __attribute__((visibility("default")))
#else
#define XIMOD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  XIMOD_OK = 0,
  XIMOD_E_ARGUMENT = 1,  /* malformed argument (null pointer, bad JSON, ...) */
  XIMOD_E_DOMAIN = 2,    /* argument outside the mathematical domain */
  XIMOD_E_PRECISION = 3, /* tolerance not reachable; message names what was */
  XIMOD_E_CAPACITY = 4,  /* moment table too small for the request */
  XIMOD_E_CACHE = 5,
  XIMOD_E_IO = 6,
  XIMOD_E_INTERNAL = 7
} ximod_status;

typedef enum { XIMOD_COUNT_STURM = 0, XIMOD_COUNT_HERMITE = 1 } ximod_count_method;

typedef struct {
  double value;
  double err;
} ximod_estimate;

typedef struct ximod_context ximod_context;
typedef struct ximod_table ximod_table;
typedef struct ximod_poly ximod_poly;

XIMOD_API const char* ximod_version(void);
XIMOD_API const char* ximod_last_error(void);
XIMOD_API void ximod_string_free(char* s);

/* Context: tolerance (default 1e-10), quantization digits (default 14),
 * worker threads (0 = hardware concurrency), cache directory (empty = no
 * cache), extended precision (0/1), per-row timing in scans (default 1). */
XIMOD_API ximod_status ximod_context_new(ximod_context** out);
XIMOD_API void ximod_context_free(ximod_context* ctx);
XIMOD_API ximod_status ximod_context_set_tol(ximod_context* ctx, double tol);
XIMOD_API ximod_status ximod_context_set_digits(ximod_context* ctx, int digits);
XIMOD_API ximod_status ximod_context_set_threads(ximod_context* ctx, int threads);
XIMOD_API ximod_status ximod_context_set_cache_dir(ximod_context* ctx, const char* dir);
XIMOD_API ximod_status ximod_context_set_extended(ximod_context* ctx, int on);
XIMOD_API ximod_status ximod_context_set_record_timing(ximod_context* ctx, int on);

/* psi(y) = sum_{n>=1} exp(-pi n^2 y) to the context tolerance. */
XIMOD_API ximod_status ximod_psi(const ximod_context* ctx, double y, ximod_estimate* out, int* terms);
XIMOD_API ximod_status ximod_psi_tail_bound(double y, int n, double* out);

/* xi(re + i im); err bounds the modulus of the error. */
XIMOD_API ximod_status ximod_xi(const ximod_context* ctx, double re, double im, double* out_re,
                                double* out_im, double* err);
/* 4 |xi(1/2 + tau - i t)|^2 */
XIMOD_API ximod_status ximod_F_direct(const ximod_context* ctx, double tau, double t,
                                      ximod_estimate* out);

/* Moment table with S_j, A_j for even j <= j_max. use_cache consults and
 * fills the context's cache directory when one is set. */
XIMOD_API ximod_status ximod_table_build(const ximod_context* ctx, double tau, int j_max,
                                         int use_cache, ximod_table** out);
XIMOD_API void ximod_table_free(ximod_table* table);
XIMOD_API ximod_status ximod_table_S(const ximod_table* table, int j, ximod_estimate* out);
XIMOD_API ximod_status ximod_table_A(const ximod_table* table, int j, ximod_estimate* out);
/* out[0..4] = J+, J-log, I1, I2, I3 */
XIMOD_API ximod_status ximod_table_one_dim(const ximod_table* table, ximod_estimate out[5]);
XIMOD_API ximod_status ximod_table_json(const ximod_table* table, char** out);

XIMOD_API ximod_status ximod_F_rhs(const ximod_context* ctx, const ximod_table* table, double t,
                                   ximod_estimate* out);
XIMOD_API ximod_status ximod_dF_dtau(const ximod_context* ctx, const ximod_table* table, double t,
                                     ximod_estimate* out);

/* f_{tau,n} from a table holding orders up to 4n-2. */
XIMOD_API ximod_status ximod_poly_build(const ximod_table* table, int n, ximod_poly** out);
XIMOD_API void ximod_poly_free(ximod_poly* poly);
/* Coefficients in s = t^2, c_0 .. c_{2n}; *count receives 2n+1. */
XIMOD_API ximod_status ximod_poly_coeffs(const ximod_poly* poly, ximod_estimate* out, int capacity,
                                         int* count);
XIMOD_API ximod_status ximod_poly_coeffs_json(const ximod_poly* poly, char** out);
XIMOD_API ximod_status ximod_poly_eval(const ximod_poly* poly, double t, ximod_estimate* out);
XIMOD_API ximod_status ximod_poly_count(const ximod_context* ctx, const ximod_poly* poly,
                                        ximod_count_method method, int* n_real, int* n_distinct,
                                        int* stable);
/* Discriminant of the quantized polynomial; exact may be NULL, otherwise it
 * receives the exact rational as text. */
XIMOD_API ximod_status ximod_poly_discriminant(const ximod_context* ctx, const ximod_poly* poly,
                                               double* value, char** exact);
XIMOD_API ximod_status ximod_poly_min(const ximod_poly* poly, double* s_min, double* value,
                                      double* err, int* flagged);
XIMOD_API ximod_status ximod_discriminant_biquadratic(double a0, double a1, double a2, double* out);
/* Sturm/Hermite agreement on random even integer polynomials. */
XIMOD_API ximod_status ximod_poly_selftest(int trials, unsigned long long seed, int* agreements,
                                           char** report_json);

/* config_json keys (all optional): tau_min, tau_max, steps, tau_list, n_list,
 * format ("csv" | "jsonl"). Tolerance, digits, threads, cache and precision
 * come from the context. output receives the table text; summary (may be
 * NULL) receives row counts, warnings and reproducer command lines. */
XIMOD_API ximod_status ximod_scan(const ximod_context* ctx, const char* config_json, char** output,
                                  char** summary_json);

/* suite: "all" or one suite name. options_json may be NULL or hold any of
 * {"s0_scale": x, "tau_list": [...], "t_list": [...], "rel_tol": x}; the
 * grids and rel_tol apply to identity ("thm1" is an alias) and grad. *pass receives 1 when every requested suite passed. */
XIMOD_API ximod_status ximod_verify(const ximod_context* ctx, const char* suite,
                                    const char* options_json, char** report_json, int* pass);

#ifdef __cplusplus
}
#endif

#endif /* XIMOD_XIMOD_H */
