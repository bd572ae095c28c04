/* C interface for the tvdingarch library.
 *
 * Conventions:
 *   - Fallible functions return TvdStatus; TVD_OK is zero.
 *   - On failure, tvd_last_error_message() returns a thread-local message
 *     valid until the next failing call on the same thread.
 *   - Model parameters travel as double theta[6] in the order
 *     beta0, beta1, beta2, alpha0, alpha1, alpha2.
 *   - Handles returned by *_new functions must be released with the
 *     matching *_free.
 *
 * Kept in sync with crates/ffi/src/lib.rs by hand; tests/capi.rs checks
 * that every exported symbol is declared here.
 */

#ifndef TVDINGARCH_H
#define TVDINGARCH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum TvdStatus {
  TVD_OK = 0,
  TVD_INVALID_ARGUMENT = 1,
  TVD_DOMAIN_ERROR = 2,
  TVD_NUMERIC_ERROR = 3,
  TVD_SINGULAR_MATRIX = 4,
  TVD_DEGENERATE_DATA = 5,
  TVD_PANIC = 6,
} TvdStatus;

/* model codes */
#define TVD_MODEL_TV 0
#define TVD_MODEL_ORDINARY 1

/* bootstrap variants */
#define TVD_VARIANT_RESTRICTED 0
#define TVD_VARIANT_UNRESTRICTED 1

/* point forecast rules */
#define TVD_POINT_MEAN 0
#define TVD_POINT_MEDIAN 1
#define TVD_POINT_MODE 2

typedef struct TvdFit TvdFit;
typedef struct TvdTest TvdTest;

/* Static version string. */
const char *tvd_version(void);

/* Message for the most recent failure on this thread. */
const char *tvd_last_error_message(void);

/* Simulate n counts into out_counts[0..n). Nonpositive lambda1/phi1 select
 * the stationary-mean defaults. */
TvdStatus tvd_simulate(const double *theta, size_t n, uint64_t seed,
                       double lambda1, double phi1, uint64_t *out_counts);

/* Conditional maximum likelihood fit. model: TVD_MODEL_*. */
TvdStatus tvd_fit_new(const uint64_t *counts, size_t len, int32_t model,
                      uint64_t seed, TvdFit **out);
void tvd_fit_free(TvdFit *fit);

TvdStatus tvd_fit_theta(const TvdFit *fit, double *out_theta);
/* Standard errors (J1 inverse); NaN where fixed or unavailable. */
TvdStatus tvd_fit_standard_errors(const TvdFit *fit, double *out_se);
double tvd_fit_loglik(const TvdFit *fit);
double tvd_fit_aic(const TvdFit *fit);
double tvd_fit_bic(const TvdFit *fit);
int32_t tvd_fit_converged(const TvdFit *fit);

/* Bootstrap likelihood-ratio test of constant dispersion.
 * variant: TVD_VARIANT_*. replications >= 19. */
TvdStatus tvd_test_new(const uint64_t *counts, size_t len,
                       uint32_t replications, int32_t variant,
                       double significance, uint64_t seed, TvdTest **out);
void tvd_test_free(TvdTest *test);

double tvd_test_lr(const TvdTest *test);
double tvd_test_p_value(const TvdTest *test);
int32_t tvd_test_reject(const TvdTest *test);
uint32_t tvd_test_failed_replicates(const TvdTest *test);

/* Rolling one-step-ahead forecast: writes len - n0 predictions and RMSFE
 * values. point: TVD_POINT_*; model: TVD_MODEL_*. */
TvdStatus tvd_forecast(const uint64_t *counts, size_t len, size_t n0,
                       int32_t point, int32_t model, size_t refit_every,
                       double *out_predictions, double *out_rmsfe);

/* Fit the chosen model and write the PIT histogram masses into
 * out_masses[0..bins). */
TvdStatus tvd_pit_histogram(const uint64_t *counts, size_t len, int32_t model,
                            size_t bins, double *out_masses);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TVDINGARCH_H */
