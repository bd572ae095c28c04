//! C ABI for the tvdingarch library.
//!
//! Conventions:
//! - Every fallible function returns a [`TvdStatus`] code; `TVD_OK` is zero.
//! - On failure, a thread-local message is retrievable via
//!   [`tvd_last_error_message`] until the next failing call on that thread.
//! - Fit and test results live behind opaque handles allocated by
//!   `tvd_fit_new` / `tvd_test_new` and released by the matching `_free`.
//! - Model parameters travel as `double theta[6]` in the order
//!   `beta0, beta1, beta2, alpha0, alpha1, alpha2`.
//!
//! The matching declarations are maintained by hand in
//! `include/tvdingarch.h`; `tests/capi.rs` checks the two stay in sync.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use tvdingarch::dispersion_test::{bootstrap_test, BootstrapVariant, TestConfig, TestReport};
use tvdingarch::estimate::{fit, FitConfig, FitResult, ModelKind};
use tvdingarch::forecast::{rolling_forecast, ForecastConfig, PointForecast};
use tvdingarch::model::{latent_path, simulate, CountSeries, ModelParams};
use tvdingarch::rng::stream_rng;
use tvdingarch::Error;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TvdStatus {
    Ok = 0,
    /// Null pointer, bad flag value, malformed input.
    InvalidArgument = 1,
    /// Parameters outside their mathematical domain.
    DomainError = 2,
    /// Numerical failure (degenerate path, overflow, non-convergence).
    NumericError = 3,
    /// Information matrix singular beyond the condition limit.
    SingularMatrix = 4,
    /// Data unusable for estimation.
    DegenerateData = 5,
    /// Internal panic captured at the boundary.
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> TvdStatus {
    match err {
        Error::Invalid(_) | Error::Csv { .. } | Error::Io(_) => TvdStatus::InvalidArgument,
        Error::Domain(_) => TvdStatus::DomainError,
        Error::Numeric(_) | Error::TruncationCap(_) => TvdStatus::NumericError,
        Error::Singular { .. } => TvdStatus::SingularMatrix,
        Error::Degenerate(_) => TvdStatus::DegenerateData,
    }
}

fn fail(err: &Error) -> TvdStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn guard<F: FnOnce() -> TvdStatus>(f: F) -> TvdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            TvdStatus::Panic
        }
    }
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tvd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Static version string, NUL-terminated.
#[no_mangle]
pub extern "C" fn tvd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn params_from(theta: *const c_double) -> Result<ModelParams, Error> {
    if theta.is_null() {
        return Err(Error::Invalid("theta is NULL".into()));
    }
    let t = slice::from_raw_parts(theta, 6);
    ModelParams::new(t[0], t[1], t[2], t[3], t[4], t[5])
}

unsafe fn series_from(counts: *const u64, len: usize) -> Result<CountSeries, Error> {
    if counts.is_null() {
        return Err(Error::Invalid("counts is NULL".into()));
    }
    Ok(CountSeries::new(slice::from_raw_parts(counts, len).to_vec()))
}

/// Simulate `n` counts into a caller-allocated buffer of length `n`.
/// Nonpositive `lambda1`/`phi1` select the stationary-mean defaults.
///
/// # Safety
/// `theta` must point to 6 readable doubles and `out_counts` to `n`
/// writable u64 slots.
#[no_mangle]
pub unsafe extern "C" fn tvd_simulate(
    theta: *const c_double,
    n: usize,
    seed: u64,
    lambda1: c_double,
    phi1: c_double,
    out_counts: *mut u64,
) -> TvdStatus {
    guard(|| {
        if out_counts.is_null() {
            set_error("out_counts is NULL");
            return TvdStatus::InvalidArgument;
        }
        let params = match params_from(theta) {
            Ok(p) => p,
            Err(e) => return fail(&e),
        };
        let (stat_l, stat_f) = params.stationary_init();
        let l1 = if lambda1 > 0.0 { lambda1 } else { stat_l };
        let f1 = if phi1 > 0.0 { phi1 } else { stat_f };
        let mut rng = stream_rng(seed, 0);
        match simulate(&params, n, l1, f1, &mut rng) {
            Ok((y, _)) => {
                ptr::copy_nonoverlapping(y.counts().as_ptr(), out_counts, n);
                TvdStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Opaque fit handle.
pub struct TvdFit {
    inner: FitResult,
}

/// Fit the model (`model`: 0 = tv, 1 = ordinary) to `counts[0..len]`.
/// On success `*out` owns a new handle; release it with `tvd_fit_free`.
///
/// # Safety
/// `counts` must point to `len` readable u64 values; `out` must be a valid
/// destination pointer.
#[no_mangle]
pub unsafe extern "C" fn tvd_fit_new(
    counts: *const u64,
    len: usize,
    model: c_int,
    seed: u64,
    out: *mut *mut TvdFit,
) -> TvdStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is NULL");
            return TvdStatus::InvalidArgument;
        }
        let y = match series_from(counts, len) {
            Ok(y) => y,
            Err(e) => return fail(&e),
        };
        let mode = match model {
            0 => ModelKind::Tv,
            1 => ModelKind::Ordinary,
            other => {
                set_error(&format!("unknown model code {other}"));
                return TvdStatus::InvalidArgument;
            }
        };
        let cfg = FitConfig {
            mode,
            seed,
            ..FitConfig::default()
        };
        match fit(&y, &cfg) {
            Ok(res) => {
                *out = Box::into_raw(Box::new(TvdFit { inner: res }));
                TvdStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `fit` must be a live handle from `tvd_fit_new` (or NULL).
#[no_mangle]
pub unsafe extern "C" fn tvd_fit_free(fit: *mut TvdFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

unsafe fn fit_ref<'a>(fit: *const TvdFit) -> Option<&'a FitResult> {
    fit.as_ref().map(|f| &f.inner)
}

/// Write the six estimated parameters (fixed rates are zero in ordinary
/// mode) into `out_theta[0..6]`.
///
/// # Safety
/// `fit` must be a live handle; `out_theta` must hold 6 doubles.
#[no_mangle]
pub unsafe extern "C" fn tvd_fit_theta(fit: *const TvdFit, out_theta: *mut c_double) -> TvdStatus {
    guard(|| {
        let (Some(res), false) = (fit_ref(fit), out_theta.is_null()) else {
            set_error("NULL handle or buffer");
            return TvdStatus::InvalidArgument;
        };
        let theta = res.theta_hat.as_array();
        ptr::copy_nonoverlapping(theta.as_ptr(), out_theta, 6);
        TvdStatus::Ok
    })
}

/// Write the six standard errors (J1-inverse); entries for parameters that
/// are fixed or unavailable are NaN.
///
/// # Safety
/// `fit` must be a live handle; `out_se` must hold 6 doubles.
#[no_mangle]
pub unsafe extern "C" fn tvd_fit_standard_errors(
    fit: *const TvdFit,
    out_se: *mut c_double,
) -> TvdStatus {
    guard(|| {
        let (Some(res), false) = (fit_ref(fit), out_se.is_null()) else {
            set_error("NULL handle or buffer");
            return TvdStatus::InvalidArgument;
        };
        let mut ses = [f64::NAN; 6];
        if let Some(cov) = &res.covariances.j1 {
            for (j, &i) in cov.indices.iter().enumerate() {
                ses[i] = cov.standard_errors[j];
            }
        }
        ptr::copy_nonoverlapping(ses.as_ptr(), out_se, 6);
        TvdStatus::Ok
    })
}

/// # Safety
/// `fit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tvd_fit_loglik(fit: *const TvdFit) -> c_double {
    fit_ref(fit).map_or(f64::NAN, |r| r.loglik)
}

/// # Safety
/// `fit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tvd_fit_aic(fit: *const TvdFit) -> c_double {
    fit_ref(fit).map_or(f64::NAN, |r| r.aic)
}

/// # Safety
/// `fit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tvd_fit_bic(fit: *const TvdFit) -> c_double {
    fit_ref(fit).map_or(f64::NAN, |r| r.bic)
}

/// 1 when the optimizer met its gradient tolerance, else 0.
///
/// # Safety
/// `fit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tvd_fit_converged(fit: *const TvdFit) -> c_int {
    fit_ref(fit).map_or(0, |r| r.converged as c_int)
}

/// Opaque test-report handle.
pub struct TvdTest {
    inner: TestReport,
}

/// Bootstrap LR test of constant dispersion on `counts[0..len]`.
/// `variant`: 0 = restricted, 1 = unrestricted.
///
/// # Safety
/// `counts` must point to `len` readable u64 values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvd_test_new(
    counts: *const u64,
    len: usize,
    replications: u32,
    variant: c_int,
    significance: c_double,
    seed: u64,
    out: *mut *mut TvdTest,
) -> TvdStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is NULL");
            return TvdStatus::InvalidArgument;
        }
        let y = match series_from(counts, len) {
            Ok(y) => y,
            Err(e) => return fail(&e),
        };
        let var = match variant {
            0 => BootstrapVariant::Restricted,
            1 => BootstrapVariant::Unrestricted,
            other => {
                set_error(&format!("unknown variant code {other}"));
                return TvdStatus::InvalidArgument;
            }
        };
        let cfg = TestConfig::new(replications as usize, var, significance, seed);
        match bootstrap_test(&y, &cfg) {
            Ok(rep) => {
                *out = Box::into_raw(Box::new(TvdTest { inner: rep }));
                TvdStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `test` must be a live handle from `tvd_test_new` (or NULL).
#[no_mangle]
pub unsafe extern "C" fn tvd_test_free(test: *mut TvdTest) {
    if !test.is_null() {
        drop(Box::from_raw(test));
    }
}

/// # Safety
/// `test` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tvd_test_lr(test: *const TvdTest) -> c_double {
    test.as_ref().map_or(f64::NAN, |t| t.inner.lr_observed)
}

/// # Safety
/// `test` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tvd_test_p_value(test: *const TvdTest) -> c_double {
    test.as_ref().map_or(f64::NAN, |t| t.inner.p_value)
}

/// # Safety
/// `test` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tvd_test_reject(test: *const TvdTest) -> c_int {
    test.as_ref().map_or(0, |t| t.inner.reject as c_int)
}

/// # Safety
/// `test` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tvd_test_failed_replicates(test: *const TvdTest) -> u32 {
    test.as_ref().map_or(0, |t| t.inner.failed_replicates as u32)
}

/// Rolling one-step-ahead forecast. `point`: 0 = mean, 1 = median, 2 = mode;
/// `model`: 0 = tv, 1 = ordinary. Writes `len - n0` predictions and the
/// matching cumulative RMSFE values into the caller's buffers.
///
/// # Safety
/// `counts` must point to `len` readable values; `out_predictions` and
/// `out_rmsfe` must each hold `len - n0` doubles.
#[no_mangle]
pub unsafe extern "C" fn tvd_forecast(
    counts: *const u64,
    len: usize,
    n0: usize,
    point: c_int,
    model: c_int,
    refit_every: usize,
    out_predictions: *mut c_double,
    out_rmsfe: *mut c_double,
) -> TvdStatus {
    guard(|| {
        if out_predictions.is_null() || out_rmsfe.is_null() {
            set_error("output buffer is NULL");
            return TvdStatus::InvalidArgument;
        }
        let y = match series_from(counts, len) {
            Ok(y) => y,
            Err(e) => return fail(&e),
        };
        let point = match point {
            0 => PointForecast::Mean,
            1 => PointForecast::Median,
            2 => PointForecast::Mode,
            other => {
                set_error(&format!("unknown point code {other}"));
                return TvdStatus::InvalidArgument;
            }
        };
        let kind = match model {
            0 => ModelKind::Tv,
            1 => ModelKind::Ordinary,
            other => {
                set_error(&format!("unknown model code {other}"));
                return TvdStatus::InvalidArgument;
            }
        };
        let mut cfg = ForecastConfig::new(n0, point, kind);
        cfg.refit_every = refit_every.max(1);
        match rolling_forecast(&y, &cfg) {
            Ok(trace) => {
                ptr::copy_nonoverlapping(
                    trace.predictions.as_ptr(),
                    out_predictions,
                    trace.predictions.len(),
                );
                ptr::copy_nonoverlapping(trace.rmsfe.as_ptr(), out_rmsfe, trace.rmsfe.len());
                TvdStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Fit the chosen model and write its PIT histogram masses into
/// `out_masses[0..bins]`.
///
/// # Safety
/// `counts` must point to `len` readable values; `out_masses` must hold
/// `bins` doubles.
#[no_mangle]
pub unsafe extern "C" fn tvd_pit_histogram(
    counts: *const u64,
    len: usize,
    model: c_int,
    bins: usize,
    out_masses: *mut c_double,
) -> TvdStatus {
    guard(|| {
        if out_masses.is_null() {
            set_error("out_masses is NULL");
            return TvdStatus::InvalidArgument;
        }
        let y = match series_from(counts, len) {
            Ok(y) => y,
            Err(e) => return fail(&e),
        };
        let mode = match model {
            0 => ModelKind::Tv,
            1 => ModelKind::Ordinary,
            other => {
                set_error(&format!("unknown model code {other}"));
                return TvdStatus::InvalidArgument;
            }
        };
        let cfg = FitConfig {
            mode,
            compute_covariances: false,
            ..FitConfig::default()
        };
        let run = || -> Result<Vec<f64>, Error> {
            let res = fit(&y, &cfg)?;
            let path = latent_path(
                &res.theta_hat,
                &y,
                res.init_used.0,
                res.init_used.1,
                false,
            )?;
            Ok(tvdingarch::diagnostics::pit(&y, &path, bins)?.bin_masses)
        };
        match run() {
            Ok(masses) => {
                ptr::copy_nonoverlapping(masses.as_ptr(), out_masses, masses.len());
                TvdStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
