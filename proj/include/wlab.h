/* wlab C API: Whittaker newvector invariants for GL(2, Q_p) principal
 * series, archimedean analogues, and modular-form evaluation harnesses.
 *
 * Conventions:
 *  - every function returns 0 on success and a nonzero error code on
 *    failure; wlab_last_error() describes the most recent failure in the
 *    calling thread;
 *  - objects are opaque handles freed by their matching *_free;
 *  - handles are immutable after construction and may be shared across
 *    threads;
 *  - characters mod p^c are addressed by the discrete-log multiplier k with
 *    respect to the smallest primitive root (chi(g^t) = e^{2 pi i k t / phi});
 *  - rational numbers are passed as (num, den) int64 pairs;
 *  - coefficients use the analytic normalization (a_1 = 1, |a_n| <= tau(n)).
 */

#ifndef WLAB_H
#define WLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* error codes (mirrors the library's internal taxonomy) */
enum {
    WLAB_OK = 0,
    WLAB_EINVAL = 1,
    WLAB_EOVERFLOW = 2,
    WLAB_EUNSUPPORTED = 3,
    WLAB_EPRECISION = 4,
    WLAB_EVALIDATION = 5,
    WLAB_EDATA = 6,
    WLAB_ECONVERGENCE = 7,
    WLAB_EIO = 8,
    WLAB_ENETWORK = 9,
    WLAB_EINTERNAL = 10
};

const char* wlab_version(void);
/* thread-local message for the last failing call in this thread */
const char* wlab_last_error(void);

/* ---- Dirichlet characters mod p^c ---- */

typedef struct wlab_char wlab_char;

wlab_char* wlab_char_new(int64_t p, int c, int64_t k);
void wlab_char_free(wlab_char* chi);

int wlab_char_info(const wlab_char* chi, int* cond_exp, int* parity, int* primitive,
                   int64_t* generator, int64_t* order);
int wlab_char_eval(const wlab_char* chi, int64_t u, double* re, double* im);
int wlab_gauss_sum(const wlab_char* chi, double* re, double* im);
/* b with chi(1 - p z) = e^{2 pi i b z / p} for all z, and a = b^{-1} mod p */
int wlab_find_b(const wlab_char* chi, int64_t* b, int64_t* a);
int wlab_count_chars(int64_t p, int c, int primitive_only, int even_only, int64_t* count);
/* Jacquet-integral W(e) for 1 boxplus chi, chi(p) = vp (unimodular) */
int wlab_epsilon_w(const wlab_char* chi, double vp_re, double vp_im, double* re, double* im);

/* ---- local Whittaker values ---- */

typedef struct wlab_ps wlab_ps;

/* pi = chi1 boxplus chi2: chi1 unramified with value vp1 at p, chi2 with
 * unit part (p, c, k2) and value vp2 at p */
wlab_ps* wlab_ps_new(int64_t p, int c, int64_t k2, double vp2_re, double vp2_im,
                     double vp1_re, double vp1_im);
void wlab_ps_free(wlab_ps* ps);

/* cell: 0, 1, 2 (paper coordinates at conductor p^2); y = p^vy * unit */
int wlab_w_closed(const wlab_ps* ps, int cell, int vy, int64_t unit, double* re, double* im,
                  int* nonzero);
/* provenance: 0 closed form, 1 oracle, 2 oracle (general-c extrapolation) */
int wlab_w_oracle(const wlab_ps* ps, int cell, int vy, int64_t unit, double* re, double* im,
                  int* nonzero, int* provenance);
/* W0(a(y) R) for the general representative R = [[p^a, 0],[p^g, 1]];
 * g < 0 selects gamma = 0 (the diagonal) */
int wlab_w_oracle_general(const wlab_ps* ps, int a, int g, int vy, int64_t unit, double* re,
                          double* im);
/* method: 0 closed form, 1 exhaustive oracle search (they must agree) */
int wlab_h_invariant(const wlab_ps* ps, int method, int jobs, double* h);
int wlab_twist_invariance(const wlab_ps* ps, double eta_re, double eta_im, int jobs,
                          int* invariant);

/* ---- archimedean table ---- */

/* kind: 0 discrete (param = even weight k), 1 principal series with trivial
 * central character (param = r), 2 nontrivial central character (param = r) */
int wlab_arch_ratio(int kind, double param, double* ratio);
int wlab_kbessel_max(double r, double* value, double* location);
int wlab_kbessel_fit(double r_lo, double r_hi, int npts, int jobs, double* slope);
int wlab_nt_fits(double r_lo, double r_hi, int npts, int jobs, double* max_slope,
                 double* norm_slope, double* net_exponent);

/* ---- newform data ---- */

typedef struct wlab_form wlab_form;

wlab_form* wlab_form_load(const char* path);
void wlab_form_free(wlab_form* f);

int wlab_form_info(const wlab_form* f, int64_t* level, int64_t* count, int* empty_space,
                   int* primitive_neben);
/* validation summary written into buf; blocked = 1 when a MUST check fails */
int wlab_form_validation(const wlab_form* f, char* buf, size_t bufsize, int* blocked);

/* literal truncated q-expansion at z = x + iy with certified tail <= tol */
int wlab_form_eval(const wlab_form* f, int64_t x_num, int64_t x_den, int64_t y_num,
                   int64_t y_den, double tol, double* re, double* im, double* tail_bound,
                   int64_t* terms);
/* congruence-restricted horocycle sum y p^{1/2} sum_{n=1(p)} a_n n^{1/2} e(nz) */
int wlab_form_eval_twisted(const wlab_form* f, int64_t x_num, int64_t x_den, int64_t y_num,
                           int64_t y_den, double tol, double* re, double* im,
                           double* tail_bound);
/* |f| after reduction to a maximal-height representative */
int wlab_form_abs(const wlab_form* f, int64_t x_num, int64_t x_den, int64_t y_num,
                  int64_t y_den, double tol, double* value);

/* z_chi = a/p + i/p^3 for the form's nebentypus (primitive even mod p^2) */
int wlab_special_point(const wlab_form* f, int64_t* b, int64_t* a, int64_t* zx_num,
                       int64_t* zx_den, int64_t* zy_num, int64_t* zy_den);

int wlab_supnorm_scan(const wlab_form* f, int nx, int ny, double y_min, double y_max,
                      int include_special, int64_t dilate, int jobs, double* max_abs,
                      double* exponent);
/* (2 pi e)^{-1} prod p^{floor(c/2)/2}; fails when the nebentypus is not
 * primitive (WLAB_EUNSUPPORTED) */
int wlab_certificate(const wlab_form* f, double* value);
int wlab_hecke_coeff_bound(const wlab_form* f, double* worst_ratio);

int wlab_wilton(const wlab_form* f, int64_t M, int64_t x_num, int64_t x_den, double* re,
                double* im);
int wlab_wilton_lower(const wlab_form* f, int64_t x_num, int64_t x_den, int64_t m_max,
                      double* best_ratio, int64_t* best_m);
int wlab_wilton_upper_fit(const wlab_form* f, int64_t m_max, int n_sample, uint64_t seed,
                          double* slope);

/* have_lvalue = 0 when the file carries no L-value; band is then 0 */
int wlab_hecke_integral(const wlab_form* f, double* re, double* im, double* band,
                        int* have_lvalue);

int wlab_petersson(const wlab_form* f, int order, int jobs, double* value, double* error);
int wlab_lr_norm(const wlab_form* f, double r, int order, int jobs, double* value);
int wlab_neighborhood(const wlab_form* f, double delta, double* area, double* target);

/* ---- orthogonal bases and mean values ---- */

typedef struct wlab_basis wlab_basis;

wlab_basis* wlab_basis_new(const wlab_form* const* forms, int n, int order, int jobs);
void wlab_basis_free(wlab_basis* b);
int wlab_basis_info(const wlab_basis* b, int64_t* expected_dim, int* complete);
int wlab_mchi(const wlab_basis* b, int64_t x_num, int64_t x_den, int64_t y_num,
              int64_t y_den, double* value, int* partial);
int wlab_mchi_average(const wlab_basis* b, int order, int jobs, double* value, double* error);

/* ---- remote database client ---- */

/* base_url may be NULL (env WLAB_DB_URL). On success fills paths_buf with
 * newline-separated cached .wform paths. empty_space = 1 reports a
 * dimension-zero space (data, not failure). */
int wlab_fetch(const char* base_url, int64_t level, int weight, int64_t p, int c, int64_t k,
               int64_t min_coeffs, const char* cache_dir, int offline, char* paths_buf,
               size_t bufsize, int* from_cache, int* empty_space);

/* ---- misc ---- */

int wlab_coset_index(int64_t n_level, int64_t* index, int64_t* n_cusps);
int wlab_measured_volume(int64_t n_level, int order, double* value, double* deviation);
int wlab_sha256_file(const char* path, char* hex65);
int wlab_sha256_str(const char* data, size_t len, char* hex65);

#ifdef __cplusplus
}
#endif

#endif /* WLAB_H */
