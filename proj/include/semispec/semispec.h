#ifndef SEMISPEC_H
#define SEMISPEC_H

#include <stddef.h>

#if defined(SEMISPEC_BUILDING) && defined(__GNUC__)
#define SEMISPEC_API __attribute__((visibility("default")))
#else
#define SEMISPEC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Opaque handles. */
typedef struct semispec_potential semispec_potential;
typedef struct semispec_table semispec_table;

typedef enum {
  SEMISPEC_OK = 0,
  SEMISPEC_ERR_INVALID_ARGUMENT = 1,
  SEMISPEC_ERR_IO = 2,
  SEMISPEC_ERR_DATA_CORRUPTION = 3,
  SEMISPEC_ERR_TRUNCATION = 4,
  SEMISPEC_ERR_DEGENERATE_WELL = 5,
  SEMISPEC_ERR_NON_CONVERGENCE = 6,
  SEMISPEC_ERR_NOT_AN_ORACLE = 7,
  SEMISPEC_ERR_INTERNAL = 99
} semispec_status;

typedef enum { SEMISPEC_KINETIC_CONTINUOUS = 0, SEMISPEC_KINETIC_DISCRETE = 1 } semispec_kinetic;

/* Spec(P_d(h)) at theta2 = 0, or the hull Sigma_h. */
typedef enum { SEMISPEC_MODE_PD = 0, SEMISPEC_MODE_SIGMA = 1 } semispec_mode;

typedef struct {
  int n1;            /* theta1 points per period 2 pi / q */
  int n2;            /* theta2 points per period (sigma mode) */
  int coarse1;       /* seed grid of the minimum search */
  int coarse2;
  double min_tol;    /* Floquet minimum refinement */
  double hill_tol;   /* Galerkin doubling */
  double gap_tol;    /* band merging; <= 0 selects twice the grid error bound */
  unsigned workers;  /* 0 selects SEMISPEC_WORKERS, else 1 */
} semispec_options;

typedef struct {
  double x0;
  double v_min;
  double a[4];
  int degenerate;
} semispec_well;

typedef struct {
  double beta[4];
  double b[4];
  double c[4];
  double alpha1;
  double alpha2;
} semispec_bs_model;

typedef struct {
  double slope;
  double intercept;
  double r2;
  int points_used;
} semispec_fit;

typedef struct {
  double max;
  double median;
  int flagged;
} semispec_hoelder_summary;

typedef struct {
  double min_pd;
  double min_sigma;
  double expected_pd;
  double expected_sigma;
  double max_error;
  int pass;
} semispec_disc;

typedef void (*semispec_warning_fn)(const char* message, void* user);

SEMISPEC_API const char* semispec_version(void);

/* Message of the last failed call on this thread ("" if none). */
SEMISPEC_API const char* semispec_last_error(void);

/* NULL restores the default handler (stderr). */
SEMISPEC_API void semispec_set_warning_handler(semispec_warning_fn fn, void* user);

SEMISPEC_API void semispec_options_default(semispec_options* opts);

/* Reduces p/q, warning when it was not in lowest terms. */
SEMISPEC_API int semispec_reduce(long p, long q, long* p_out, long* q_out);

/* p/q with q <= max_den reproducing h to 1e-12. */
SEMISPEC_API int semispec_rational_approx(double h, long max_den, long* p_out, long* q_out);

/* Potentials */
SEMISPEC_API int semispec_potential_builtin(const char* name, semispec_potential** out);
/* Builtin name or path to a definition file. */
SEMISPEC_API int semispec_potential_load(const char* spec, semispec_potential** out);
/* im may be NULL; a frequency given without its negative gets the conjugate. */
SEMISPEC_API int semispec_potential_from_coeffs(const char* name, size_t n, const int* betas, const double* re,
                                                const double* im, double truncation_tol,
                                                semispec_potential** out);
SEMISPEC_API void semispec_potential_free(semispec_potential* pot);
SEMISPEC_API const char* semispec_potential_name(const semispec_potential* pot);
SEMISPEC_API int semispec_potential_bandwidth(const semispec_potential* pot);
SEMISPEC_API int semispec_potential_eval(const semispec_potential* pot, double x, int order, double* out);
SEMISPEC_API int semispec_potential_well(const semispec_potential* pot, semispec_well* out);

/* Floquet fibers. re/im receive q*q entries, row-major; eigenvalues receive q. */
SEMISPEC_API int semispec_floquet_matrix(const semispec_potential* pot, long p, long q, double theta1,
                                         double theta2, double* re, double* im);
SEMISPEC_API int semispec_floquet_eigenvalues(const semispec_potential* pot, long p, long q, double theta1,
                                              double theta2, double* eigenvalues);
SEMISPEC_API int semispec_min_spec(const semispec_potential* pot, long p, long q, semispec_mode mode,
                                   const semispec_options* opts, double* out);
/* Refined band union, table p, q, h, band_lo, band_hi. */
SEMISPEC_API int semispec_band_union(const semispec_potential* pot, long p, long q, semispec_mode mode,
                                     const semispec_options* opts, semispec_table** out);
/* One slice per p[i]/q[i]: long-format samples and merged bands. */
SEMISPEC_API int semispec_butterfly(const semispec_potential* pot, const long* p, const long* q, size_t n,
                                    semispec_mode mode, const semispec_options* opts, semispec_table** samples,
                                    semispec_table** bands);

/* Continuous / discrete-symbol Galerkin solver */
SEMISPEC_API int semispec_hill_min(const semispec_potential* pot, double h, semispec_kinetic kinetic, double tol,
                                   double* min_eig, int* n_final);
SEMISPEC_API int semispec_hill_table(const semispec_potential* pot, const double* h, size_t n,
                                     semispec_kinetic kinetic, const semispec_options* opts, semispec_table** out);
/* kappa and minima receive n_k values. */
SEMISPEC_API int semispec_bloch_sweep(const semispec_potential* pot, double h, semispec_kinetic kinetic, int n_k,
                                      int n_modes, double* kappa, double* minima);

/* Bohr-Sommerfeld. a holds a0..a3. */
SEMISPEC_API int semispec_taylor_well(const semispec_potential* pot, double a[4]);
SEMISPEC_API int semispec_bs_model_make(const double a[4], semispec_kinetic kinetic, semispec_bs_model* out);
SEMISPEC_API int semispec_bs_alphas_closed_form(const double a[4], semispec_kinetic kinetic, double* alpha1,
                                                double* alpha2);
SEMISPEC_API int semispec_bs_e0(const double a[4], semispec_kinetic kinetic, double h, double* out);
SEMISPEC_API int semispec_d_leading(double a0, double h, double* out);
/* potential, kinetic, a0..a3, alpha1, alpha2, h, E0, d_leading. */
SEMISPEC_API int semispec_bs_table(const char* name, const double a[4], semispec_kinetic kinetic, const double* h,
                                   size_t n, semispec_table** out);

/* Experiments */
/* p, q, h, min_pd, min_sigma, min_pc, d, D, status. */
SEMISPEC_API int semispec_compare(const semispec_potential* pot, const long* p, const long* q, size_t n,
                                  const semispec_options* opts, semispec_table** out);
SEMISPEC_API int semispec_loglog_fit(const double* x, const double* y, size_t n, semispec_fit* out);
/* 16 hex digits plus terminator. */
SEMISPEC_API int semispec_inputs_digest(const double* x, const double* y, size_t n, char out[17]);
SEMISPEC_API int semispec_geometric_grid(double lo, double hi, int n, double* out);
/* Fit of log min_spec_pc against log h; table as semispec_hill_table. */
SEMISPEC_API int semispec_scaling(const semispec_potential* pot, semispec_kinetic kinetic, const double* h, size_t n,
                                  const semispec_options* opts, semispec_fit* fit, semispec_table** out);
/* h, E_spec, E_bs, abs_diff. */
SEMISPEC_API int semispec_bs_vs_spec(const semispec_potential* pot, semispec_kinetic kinetic, const double* h,
                                     size_t n, const semispec_options* opts, semispec_table** out);
/* p, q, r. */
SEMISPEC_API int semispec_hoelder(const semispec_potential* pot, long q, const semispec_options* opts,
                                  semispec_hoelder_summary* summary, semispec_table** out);
/* Table mode, source, band_lo, band_hi with source "computed" or "expected". */
SEMISPEC_API int semispec_discontinuity(const semispec_potential* pot, long p, long q, const semispec_options* opts,
                                        semispec_disc* report, semispec_table** bands);

/* Spectra */
SEMISPEC_API int semispec_hausdorff(const double* a, size_t na, const double* b, size_t nb, double* out);
/* band_lo, band_hi. */
SEMISPEC_API int semispec_merge(const double* values, size_t n, double gap_tol, semispec_table** out);

/* Tables */
SEMISPEC_API void semispec_table_free(semispec_table* table);
SEMISPEC_API size_t semispec_table_rows(const semispec_table* table);
SEMISPEC_API size_t semispec_table_cols(const semispec_table* table);
SEMISPEC_API const char* semispec_table_column(const semispec_table* table, size_t col);
SEMISPEC_API int semispec_table_number(const semispec_table* table, size_t row, size_t col, double* out);
/* Valid until the next call on the same table. */
SEMISPEC_API const char* semispec_table_text(semispec_table* table, size_t row, size_t col);
SEMISPEC_API const char* semispec_table_csv(semispec_table* table);
/* Appends the rows of src; columns must match. */
SEMISPEC_API int semispec_table_append(semispec_table* dst, const semispec_table* src);
SEMISPEC_API int semispec_table_write_csv(const semispec_table* table, const char* path);

#ifdef __cplusplus
}
#endif

#endif
