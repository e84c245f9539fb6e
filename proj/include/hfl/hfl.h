/* Power-law short-rate models on (0, L) with an absorbing cap: boundary
 * classification, spectral transition densities, bond prices and a Monte
 * Carlo cross-check.
 *
 * Every function returns an hfl_status. On failure the message of the most
 * recent error on the calling thread is available from hfl_last_error().
 * Handles are immutable once created and may be shared between threads. */
#ifndef HFL_HFL_H
#define HFL_HFL_H

#include <stddef.h>
#include <stdint.h>

#if defined(HFL_BUILDING_LIBRARY)
#define HFL_API __attribute__((visibility("default")))
#else
#define HFL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hfl_status {
  HFL_OK = 0,
  HFL_ERR_INVALID_ARGUMENT = 1,
  HFL_ERR_OUT_OF_DOMAIN = 2,
  HFL_ERR_DEPTH_EXCEEDED = 3,
  HFL_ERR_INVALID_ENVELOPE = 4,
  HFL_ERR_BETA_POLE = 5,
  HFL_ERR_NO_CONVERGENCE = 6,
  HFL_ERR_NON_INTEGER_ONLY = 7,
  HFL_ERR_INCONCLUSIVE = 8,
  HFL_ERR_BRACKET_SCAN_EXHAUSTED = 9,
  HFL_ERR_INDEX_OUT_OF_RANGE = 10,
  HFL_ERR_HORIZON_TOO_SHORT = 11,
  HFL_ERR_SERIES_NOT_CONVERGED = 12,
  HFL_ERR_CONFIG_INVALID = 13,
  HFL_ERR_NULL_POINTER = 100,
  HFL_ERR_INTERNAL = 101
} hfl_status;

typedef enum hfl_boundary {
  HFL_BOUNDARY_REGULAR = 0,
  HFL_BOUNDARY_EXIT = 1,
  HFL_BOUNDARY_NATURAL = 2
} hfl_boundary;

typedef enum hfl_spectrum {
  HFL_SPECTRUM_DISCRETE = 0,
  HFL_SPECTRUM_CONTINUOUS = 1,
  HFL_SPECTRUM_MIXED = 2
} hfl_spectrum;

typedef enum hfl_payoff_kind {
  HFL_PAYOFF_ONE = 0,
  HFL_PAYOFF_LINEAR = 1,
  HFL_PAYOFF_PUT_ON_RATE = 2 /* (strike - x)^+ */
} hfl_payoff_kind;

typedef enum hfl_measure { HFL_MEASURE_P = 0, HFL_MEASURE_P_TILDE = 1 } hfl_measure;

typedef enum hfl_pricer { HFL_PRICER_ANALYTIC = 0, HFL_PRICER_DUHAMEL = 1 } hfl_pricer;

typedef struct hfl_model hfl_model;
typedef struct hfl_eigen hfl_eigen;
typedef struct hfl_density hfl_density;
typedef struct hfl_sim hfl_sim;

typedef struct hfl_payoff {
  hfl_payoff_kind kind;
  double strike;
} hfl_payoff;

typedef struct hfl_coefficients {
  double drift;
  double vol;
  double drift_tilde;
  double f;
  double f_prime;
  double f_second;
  double scale_density;
  double speed_density;
} hfl_coefficients;

typedef struct hfl_classification {
  hfl_boundary boundary;          /* closed-form rule */
  hfl_spectrum spectrum;
  double cutoff;                  /* -a^2/32 for the mixed spectrum, NaN otherwise */
  int numeric_status;             /* hfl_status of the numeric probe */
  hfl_boundary numeric_boundary;  /* valid when numeric_status == HFL_OK */
  int i0_finite;
  int j0_finite;
  double i0_estimate;             /* +inf when divergent */
  double j0_estimate;
} hfl_classification;

typedef struct hfl_duhamel {
  double value;
  double sliver;
  double sliver_bound;
} hfl_duhamel;

typedef struct hfl_sim_config {
  double x0;
  double dt;
  double horizon;
  int64_t n_paths;
  uint64_t seed;
  hfl_measure measure;
  int threads;   /* 0: hardware concurrency */
  int hist_bins;
  int bridge;    /* nonzero: Brownian-bridge crossing test between steps */
} hfl_sim_config;

typedef struct hfl_sim_summary {
  double time;
  double price_mean;
  double price_stderr;
  double absorbed_at_0;
  double absorbed_at_L;
} hfl_sim_summary;

typedef struct hfl_measure_report {
  double weighted_mean;
  double weighted_stderr;
  double tilde_mean;
  double tilde_stderr;
  double weight_mean;
  double weight_stderr;
  double combined_stderr;
} hfl_measure_report;

HFL_API const char* hfl_version(void);
HFL_API const char* hfl_status_name(hfl_status status);
/* Message of the last failure on this thread; empty when none. */
HFL_API const char* hfl_last_error(void);

HFL_API const char* hfl_boundary_name(hfl_boundary b);

/* Model ------------------------------------------------------------------ */

HFL_API hfl_status hfl_model_create(double k, double a, double L, hfl_model** out);
HFL_API void hfl_model_destroy(hfl_model* model);
HFL_API hfl_status hfl_model_params(const hfl_model* model, double* k, double* a, double* L);
HFL_API hfl_status hfl_model_coefficients(const hfl_model* model, double x, hfl_coefficients* out);
/* Closed-form classes plus the numeric I0/J0 probe on (0, eps]. A failing
 * probe is reported in numeric_status, not as the return value. */
HFL_API hfl_status hfl_classify(const hfl_model* model, double eps, hfl_classification* out);
/* Writes "discrete", "continuous" or "mixed; cutoff <value>" into buf. */
HFL_API hfl_status hfl_spectrum_text(const hfl_model* model, char* buf, size_t size);

/* Spectral --------------------------------------------------------------- */

HFL_API hfl_status hfl_eigen_solve(const hfl_model* model, int n_max, hfl_eigen** out);
HFL_API void hfl_eigen_destroy(hfl_eigen* eigen);
HFL_API hfl_status hfl_eigen_count(const hfl_eigen* eigen, int* n);
HFL_API hfl_status hfl_eigen_pair(const hfl_eigen* eigen, int n, double* lambda, double* c_n);
HFL_API hfl_status hfl_eigen_psi(const hfl_eigen* eigen, int n, double x, double* out);
/* M(1 - lambda/(a sqrt2), 2; -2 sqrt2 L / a), zero at eigenvalues. */
HFL_API hfl_status hfl_eigen_equation(const hfl_model* model, double lambda, double* out);

HFL_API hfl_status hfl_psi_rho(const hfl_model* model, double rho, double x, double* out);
HFL_API hfl_status hfl_greens_wronskian(const hfl_model* model, double lambda, double x,
                                        double* out);

/* k = 1/2 builds a discrete backend with n_max eigenpairs; k = -1/2 a
 * continuous one (n_max ignored). tau_min <= 0 selects the default 0.01. */
HFL_API hfl_status hfl_density_create(const hfl_model* model, int n_max, double tau_min,
                                      hfl_density** out);
HFL_API void hfl_density_destroy(hfl_density* density);
HFL_API hfl_status hfl_density_eval(const hfl_density* density, double t, double x, double T,
                                    double y, double* value, double* tail_bound);

/* Pricing ---------------------------------------------------------------- */

HFL_API hfl_status hfl_q_source(const hfl_model* model, hfl_payoff payoff, double t, double x,
                                double T, double f_offset, double* out);
HFL_API hfl_status hfl_price_general(const hfl_density* density, hfl_payoff payoff, double t,
                                     double x, double T, double f_offset, hfl_duhamel* out);
/* Analytic zero-coupon bond: eigen-series for k = 1/2 (uses the density's
 * eigen-system), double quadrature for k = -1/2. */
HFL_API hfl_status hfl_bond(const hfl_density* density, double t, double x, double T,
                            double* out);
HFL_API hfl_status hfl_yield_curve(const hfl_density* density, hfl_pricer pricer, double x,
                                   const double* maturities, size_t n, double* bonds,
                                   double* yields);

/* Monte Carlo ------------------------------------------------------------ */

HFL_API void hfl_sim_config_default(hfl_sim_config* cfg);
/* Observes the same paths at each of `times` (multiples of dt, at most the
 * horizon). keep_terminal retains per-path terminal states. */
HFL_API hfl_status hfl_simulate(const hfl_model* model, const hfl_sim_config* cfg,
                                hfl_payoff payoff, const double* times, size_t n_times,
                                int keep_terminal, hfl_sim** out);
HFL_API void hfl_sim_destroy(hfl_sim* sim);
HFL_API hfl_status hfl_sim_summary_at(const hfl_sim* sim, size_t index, hfl_sim_summary* out);
/* Borrowed pointers, valid until hfl_sim_destroy. edges has bins + 1 entries. */
HFL_API hfl_status hfl_sim_histogram(const hfl_sim* sim, size_t index, size_t* bins,
                                     const double** edges, const double** masses);
HFL_API hfl_status hfl_sim_terminal(const hfl_sim* sim, size_t index, size_t* n,
                                    const double** values);

/* zero_f_prime replaces f' by 0 in the weight (which is then identically 1). */
HFL_API hfl_status hfl_compare_measures(const hfl_model* model, const hfl_sim_config* cfg,
                                        double T, int zero_f_prime, hfl_measure_report* out);
/* Caller provides arrays of `bins` entries. */
HFL_API hfl_status hfl_density_histogram(const hfl_model* model, const hfl_sim_config* cfg,
                                         double T, int bins, double* centers, double* density,
                                         double* stderr_density, double* absorbed_at_0,
                                         double* absorbed_at_L);

#ifdef __cplusplus
}
#endif

#endif
