//! Recursive one-step-ahead forecasting with refitting and cumulative RMSFE.
//!
//! Starting from a training cut `n0`, the model is (re)fitted to the growing
//! window `y[1..s]`, the one-step predictive parameters advance through the
//! fitted recursion, and a point forecast (mean, median or mode of the NB
//! predictive law) is scored against the realized count:
//!
//! ```text
//! RMSFE_t = sqrt( (1/(t-n0)) * sum_{s=n0+1..t} (Y_s - Yhat_s)^2 )
//! ```

use serde::{Deserialize, Serialize};

use crate::estimate::{fit, FitConfig, FitResult, ModelKind};
use crate::model::{latent_path, update_state, CountSeries};
use crate::nbdist::NbParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointForecast {
    Mean,
    Median,
    Mode,
}

#[derive(Debug, Clone)]
pub struct ForecastConfig {
    /// Prediction starts after this many observations (at least 20).
    pub n0: usize,
    pub point: PointForecast,
    pub model: ModelKind,
    /// Refit cadence: 1 refits at every step, k reuses each fit for k steps.
    pub refit_every: usize,
    /// Optimizer settings for the rolling fits.
    pub fit: FitConfig,
}

impl ForecastConfig {
    pub fn new(n0: usize, point: PointForecast, model: ModelKind) -> Self {
        Self {
            n0,
            point,
            model,
            refit_every: 1,
            fit: FitConfig::default(),
        }
    }
}

/// Fit metadata for one rolling step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefitEntry {
    /// Step `s`: the fit used data `y[1..=s]`.
    pub step: usize,
    pub refitted: bool,
    pub converged: bool,
    pub loglik: f64,
}

#[derive(Debug, Clone)]
pub struct ForecastTrace {
    /// Point forecasts for `t = n0+1 .. n`.
    pub predictions: Vec<f64>,
    /// One-step predictive `(lambda, phi)` aligned with `predictions`.
    pub predictive_params: Vec<(f64, f64)>,
    /// Realized counts over the forecast horizon.
    pub actuals: Vec<u64>,
    /// Cumulative RMSFE after each forecast step.
    pub rmsfe: Vec<f64>,
    pub refit_log: Vec<RefitEntry>,
}

impl ForecastTrace {
    pub fn terminal_rmsfe(&self) -> f64 {
        *self.rmsfe.last().expect("at least one prediction")
    }
}

/// One-step-ahead predictive parameters from a fitted model, the series
/// through time `s`, and the fitted latent state at `s`.
pub fn osa_step(
    fit: &FitResult,
    y_last: u64,
    lambda_s: f64,
    phi_s: f64,
) -> (f64, f64) {
    let (lambda_next, phi_next) = update_state(&fit.theta_hat, y_last, lambda_s, phi_s);
    match fit.kind {
        ModelKind::Tv => (lambda_next, phi_next),
        // constant dispersion: phi stays at the fitted alpha0
        ModelKind::Ordinary => (lambda_next, fit.theta_hat.alpha0),
    }
}

/// Point forecast from the NB predictive law.
pub fn point_forecast(lambda: f64, phi: f64, method: PointForecast) -> Result<f64> {
    match method {
        PointForecast::Mean => Ok(lambda),
        PointForecast::Median => Ok(NbParams::new(lambda, phi)?.quantile(0.5)? as f64),
        PointForecast::Mode => Ok(NbParams::new(lambda, phi)?.mode() as f64),
    }
}

/// Run the recursive forecast exercise over `y`, producing `n - n0`
/// one-step-ahead predictions.
///
/// Fits are warm-started at the previous estimate; steps where the refit
/// fails fall back to the previous fit and are logged. Predictions at step
/// `s` depend only on `y[1..=s]`.
pub fn rolling_forecast(y: &CountSeries, cfg: &ForecastConfig) -> Result<ForecastTrace> {
    let n = y.len();
    if cfg.n0 < 20 || cfg.n0 >= n {
        return Err(Error::Invalid(format!(
            "training cut must satisfy 20 <= n0 < n, got n0={}, n={n}",
            cfg.n0
        )));
    }
    if cfg.refit_every == 0 {
        return Err(Error::Invalid("refit_every must be positive".into()));
    }

    let mut predictions = Vec::with_capacity(n - cfg.n0);
    let mut predictive_params = Vec::with_capacity(n - cfg.n0);
    let mut actuals = Vec::with_capacity(n - cfg.n0);
    let mut rmsfe = Vec::with_capacity(n - cfg.n0);
    let mut refit_log = Vec::with_capacity(n - cfg.n0);

    let mut current: Option<FitResult> = None;
    // fitted latent state at the end of the current training window
    let mut state: (f64, f64) = (0.0, 0.0);
    let mut sse = 0.0f64;

    for s in cfg.n0..n {
        let due = (s - cfg.n0) % cfg.refit_every == 0;
        let mut refitted = false;
        if due || current.is_none() {
            let train = y.prefix(s);
            let fit_cfg = FitConfig {
                mode: cfg.model,
                warm_start: current.as_ref().map(|f| f.theta_hat),
                warm_start_only: true,
                compute_covariances: false,
                ..cfg.fit.clone()
            };
            match fit(&train, &fit_cfg) {
                Ok(res) => {
                    // fitted latent path over the training window
                    let path = latent_path(
                        &res.theta_hat,
                        &train,
                        res.init_used.0,
                        res.init_used.1,
                        false,
                    )?;
                    state = (path.lambda[s - 1], path.phi[s - 1]);
                    current = Some(res);
                    refitted = true;
                }
                Err(e) => {
                    if current.is_none() {
                        return Err(e);
                    }
                    log::warn!("refit at step {s} failed ({e}); reusing previous fit");
                }
            }
        }
        let fit_res = current.as_ref().expect("fit available");
        refit_log.push(RefitEntry {
            step: s,
            refitted,
            converged: fit_res.converged,
            loglik: fit_res.loglik,
        });

        let y_last = y.counts()[s - 1];
        let (lambda_next, phi_next) = osa_step(fit_res, y_last, state.0, state.1);
        let yhat = point_forecast(lambda_next, phi_next, cfg.point)?;
        let actual = y.counts()[s];
        sse += (actual as f64 - yhat).powi(2);
        rmsfe.push((sse / (s + 1 - cfg.n0) as f64).sqrt());
        predictions.push(yhat);
        predictive_params.push((lambda_next, phi_next));
        actuals.push(actual);

        // advance the fitted latent state through the realized observation
        state = (lambda_next, phi_next);
        if matches!(fit_res.kind, ModelKind::Ordinary) {
            // the recursion for phi is inert in the ordinary model
            state.1 = fit_res.theta_hat.alpha0;
        }
    }

    Ok(ForecastTrace {
        predictions,
        predictive_params,
        actuals,
        rmsfe,
        refit_log,
    })
}

/// RMSFE sequence for externally supplied predictions (used by tests and
/// for scoring alternative point rules on a fixed trace).
pub fn rmsfe_sequence(actuals: &[u64], predictions: &[f64]) -> Result<Vec<f64>> {
    if actuals.len() != predictions.len() || actuals.is_empty() {
        return Err(Error::Invalid(
            "actuals and predictions must have equal positive length".into(),
        ));
    }
    let mut sse = 0.0;
    let mut out = Vec::with_capacity(actuals.len());
    for (i, (&a, &p)) in actuals.iter().zip(predictions).enumerate() {
        sse += (a as f64 - p).powi(2);
        out.push((sse / (i + 1) as f64).sqrt());
    }
    Ok(out)
}
