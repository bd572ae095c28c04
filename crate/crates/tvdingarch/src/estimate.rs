//! Constrained conditional maximum likelihood estimation.
//!
//! The constrained problem (positive intercepts, nonnegative rates, and
//! optionally `beta1 + beta2 + alpha1 + alpha2 <= 1 - eps`) is mapped to an
//! unconstrained one: intercepts through `exp`, the rate vector through a
//! scaled softmax with a slack coordinate. A quasi-Newton (BFGS) iteration
//! on the transformed space uses the analytic score pushed through the
//! transform Jacobian.

use serde::{Deserialize, Serialize};

use crate::likelihood::{
    self, covariance_for, CovMethod, CovarianceEstimate, InfoMatrices, DIM,
};
use crate::model::{init_state, CountSeries, ModelParams};
use crate::rng::stream_rng;
use crate::{Error, Result};

/// Margin keeping the practical-sum constraint strict: the rates satisfy
/// `sum < 1 - EPS_SUM`.
pub const EPS_SUM: f64 = 1e-6;

/// Rates below this are clamped before entering the log-simplex map.
const RATE_CLAMP: f64 = 1e-10;

/// Rate estimates below this raise a boundary flag.
pub const BOUNDARY_TOL: f64 = 1e-6;

/// Which model is being estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Full tv-DINGARCH: six free parameters.
    Tv,
    /// Constant dispersion (`alpha1 = alpha2 = 0`): four free parameters.
    Ordinary,
}

impl ModelKind {
    pub fn free_indices(&self) -> &'static [usize] {
        match self {
            ModelKind::Tv => &[0, 1, 2, 3, 4, 5],
            ModelKind::Ordinary => &[0, 1, 2, 3],
        }
    }

    pub fn k(&self) -> usize {
        self.free_indices().len()
    }
}

/// Constraint applied to the four rate coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    /// `beta1 + beta2 + alpha1 + alpha2 < 1` (the practical stationarity check).
    PracticalSum,
    /// Nonnegativity only.
    None,
}

#[derive(Debug, Clone)]
pub struct FitConfig {
    pub mode: ModelKind,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub constraint: ConstraintKind,
    /// Number of optimizer starts; extra starts perturb multiplicatively.
    pub multistart: usize,
    /// Seed for the multistart perturbations.
    pub seed: u64,
    /// Skip the (comparatively expensive) information matrices; used by
    /// bootstrap replicates where only the maximized likelihood matters.
    pub compute_covariances: bool,
    /// Optional additional starting point, tried before the default.
    pub warm_start: Option<ModelParams>,
    /// With a warm start present, skip the default start entirely. Used by
    /// the rolling forecast, where the previous estimate on nearly the same
    /// data is an excellent start and the cold start would dominate cost.
    pub warm_start_only: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            mode: ModelKind::Tv,
            max_iterations: 300,
            gradient_tolerance: 1e-5,
            constraint: ConstraintKind::PracticalSum,
            multistart: 1,
            seed: 0,
            compute_covariances: true,
            warm_start: None,
            warm_start_only: false,
        }
    }
}

/// The three covariance estimates; entries absent when the corresponding
/// matrix was singular or covariances were not requested.
#[derive(Debug, Clone, Default)]
pub struct CovarianceSet {
    pub j1: Option<CovarianceEstimate>,
    pub opg: Option<CovarianceEstimate>,
    pub hessian: Option<CovarianceEstimate>,
    /// Messages explaining any missing entry.
    pub notes: Vec<String>,
}

impl CovarianceSet {
    /// Standard errors from the default (J1 inverse) estimator.
    pub fn default_standard_errors(&self) -> Option<&[f64]> {
        self.j1.as_ref().map(|c| c.standard_errors.as_slice())
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub theta_hat: ModelParams,
    pub kind: ModelKind,
    pub loglik: f64,
    /// Log-likelihood at the starting point of the winning optimizer run.
    pub loglik_at_start: f64,
    pub covariances: CovarianceSet,
    pub aic: f64,
    pub bic: f64,
    pub converged: bool,
    pub iterations: usize,
    pub grad_norm: f64,
    /// Per-parameter boundary flags (rate estimate below [`BOUNDARY_TOL`]).
    pub boundary_flags: [bool; DIM],
    /// Fixed `(lambda1, phi1)` used by the likelihood.
    pub init_used: (f64, f64),
    /// Series length.
    pub n: usize,
}

impl FitResult {
    /// Estimates over the free parameter indices.
    pub fn free_estimates(&self) -> Vec<f64> {
        let theta = self.theta_hat.as_array();
        self.kind.free_indices().iter().map(|&i| theta[i]).collect()
    }
}

/// `(aic, bic) = (-2 l + 2k, -2 l + k log(n_effective))`.
pub fn information_criteria(loglik: f64, k: usize, n_effective: usize) -> (f64, f64) {
    let aic = -2.0 * loglik + 2.0 * k as f64;
    let bic = -2.0 * loglik + k as f64 * (n_effective as f64).ln();
    (aic, bic)
}

// ---------------------------------------------------------------------------
// Parameter transform
// ---------------------------------------------------------------------------

/// Bijection between the constrained parameter space and R^k.
#[derive(Debug, Clone, Copy)]
pub struct ParamTransform {
    pub mode: ModelKind,
    pub constraint: ConstraintKind,
}

impl ParamTransform {
    pub fn new(mode: ModelKind, constraint: ConstraintKind) -> Self {
        Self { mode, constraint }
    }

    pub fn dim(&self) -> usize {
        self.mode.k()
    }

    fn rate_positions(&self) -> &'static [usize] {
        // positions of the free rates within the full 6-vector
        match self.mode {
            ModelKind::Tv => &[1, 2, 4, 5],
            ModelKind::Ordinary => &[1, 2],
        }
    }

    /// Map an unconstrained vector to the full 6-parameter vector
    /// (fixed coordinates set to zero in ordinary mode).
    pub fn to_theta(&self, u: &[f64]) -> [f64; 6] {
        debug_assert_eq!(u.len(), self.dim());
        let mut theta = [0.0f64; 6];
        theta[0] = u[0].exp();
        theta[3] = u[3].exp();
        let rates = self.rate_positions();
        match self.constraint {
            ConstraintKind::PracticalSum => {
                // softmax with an implicit slack coordinate exp(0) = 1
                let mut denom = 1.0f64;
                for (k, _) in rates.iter().enumerate() {
                    denom += u[self.u_index(k)].exp();
                }
                for (k, &pos) in rates.iter().enumerate() {
                    theta[pos] = (1.0 - EPS_SUM) * u[self.u_index(k)].exp() / denom;
                }
            }
            ConstraintKind::None => {
                for (k, &pos) in rates.iter().enumerate() {
                    theta[pos] = u[self.u_index(k)].exp();
                }
            }
        }
        theta
    }

    /// Inverse map. Rates at (or numerically below) zero are clamped to
    /// 1e-10 so boundary points remain representable.
    pub fn to_u(&self, theta: &[f64; 6]) -> Vec<f64> {
        let mut u = vec![0.0f64; self.dim()];
        u[0] = theta[0].ln();
        u[3] = theta[3].ln();
        let rates = self.rate_positions();
        match self.constraint {
            ConstraintKind::PracticalSum => {
                let mut sum_g = 0.0f64;
                let gs: Vec<f64> = rates
                    .iter()
                    .map(|&pos| {
                        let g = theta[pos].max(RATE_CLAMP) / (1.0 - EPS_SUM);
                        sum_g += g;
                        g
                    })
                    .collect();
                let slack = (1.0 - sum_g).max(1e-12);
                for (k, g) in gs.iter().enumerate() {
                    u[self.u_index(k)] = (g / slack).ln();
                }
            }
            ConstraintKind::None => {
                for (k, &pos) in rates.iter().enumerate() {
                    u[self.u_index(k)] = theta[pos].max(RATE_CLAMP).ln();
                }
            }
        }
        u
    }

    /// Position in `u` of the `k`-th free rate.
    fn u_index(&self, k: usize) -> usize {
        match self.mode {
            ModelKind::Tv => [1usize, 2, 4, 5][k],
            ModelKind::Ordinary => [1usize, 2][k],
        }
    }

    /// Pull a gradient in theta back to the unconstrained space:
    /// `g_u = (d theta / d u)^T g_theta`.
    pub fn pull_back_gradient(&self, grad_theta: &[f64; 6], theta: &[f64; 6]) -> Vec<f64> {
        let mut gu = vec![0.0f64; self.dim()];
        gu[0] = grad_theta[0] * theta[0];
        gu[3] = grad_theta[3] * theta[3];
        let rates = self.rate_positions();
        match self.constraint {
            ConstraintKind::PracticalSum => {
                // d r_i / d u_j = delta_ij r_i - r_i r_j / (1 - eps)
                let dot: f64 = rates.iter().map(|&pos| grad_theta[pos] * theta[pos]).sum();
                for (k, &pos) in rates.iter().enumerate() {
                    let r = theta[pos];
                    gu[self.u_index(k)] = grad_theta[pos] * r - r * dot / (1.0 - EPS_SUM);
                }
            }
            ConstraintKind::None => {
                for (k, &pos) in rates.iter().enumerate() {
                    gu[self.u_index(k)] = grad_theta[pos] * theta[pos];
                }
            }
        }
        gu
    }

    /// Project a parameter vector strictly inside the constraint set so it
    /// can serve as an optimizer start.
    pub fn project_inside(&self, p: &ModelParams) -> [f64; 6] {
        let mut theta = p.as_array();
        theta[0] = theta[0].max(1e-8);
        theta[3] = theta[3].max(1e-8);
        let rates = self.rate_positions();
        for &pos in rates {
            theta[pos] = theta[pos].max(RATE_CLAMP);
        }
        if matches!(self.constraint, ConstraintKind::PracticalSum) {
            let sum: f64 = rates.iter().map(|&pos| theta[pos]).sum();
            let limit = 1.0 - 10.0 * EPS_SUM;
            if sum >= limit {
                for &pos in rates {
                    theta[pos] *= limit / sum;
                }
            }
        }
        // zero out fixed coordinates in ordinary mode
        if matches!(self.mode, ModelKind::Ordinary) {
            theta[4] = 0.0;
            theta[5] = 0.0;
        }
        theta
    }
}

// ---------------------------------------------------------------------------
// BFGS driver
// ---------------------------------------------------------------------------

struct OptimOutcome {
    u: Vec<f64>,
    value: f64,
    value_at_start: f64,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
}

/// Minimize `f` (negative log-likelihood in u-space) by BFGS with Armijo
/// backtracking. `eval` returns `None` where the objective is undefined.
fn bfgs<F>(eval: F, u0: &[f64], tol: f64, max_iter: usize) -> Option<OptimOutcome>
where
    F: Fn(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    let d = u0.len();
    let mut u = u0.to_vec();
    let (mut fval, mut grad) = eval(&u)?;
    let f_start = fval;
    let mut h = vec![0.0f64; d * d];
    for i in 0..d {
        h[i * d + i] = 1.0;
    }
    let mut first_update = true;
    let mut iterations = 0;
    let mut converged = inf_norm(&grad) <= tol;

    while !converged && iterations < max_iter {
        iterations += 1;
        // direction = -H g
        let mut dir = vec![0.0f64; d];
        for i in 0..d {
            let mut s = 0.0;
            for j in 0..d {
                s += h[i * d + j] * grad[j];
            }
            dir[i] = -s;
        }
        let mut slope: f64 = dir.iter().zip(&grad).map(|(a, b)| a * b).sum();
        if slope >= 0.0 {
            // reset to steepest descent on a bad direction
            for i in 0..d {
                dir[i] = -grad[i];
                for j in 0..d {
                    h[i * d + j] = if i == j { 1.0 } else { 0.0 };
                }
            }
            slope = -grad.iter().map(|g| g * g).sum::<f64>();
            first_update = true;
        }

        // Armijo backtracking
        let mut alpha = 1.0f64;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = u.iter().zip(&dir).map(|(x, d)| x + alpha * d).collect();
            if let Some((ft, gt)) = eval(&trial) {
                if ft <= fval + 1e-4 * alpha * slope {
                    accepted = Some((trial, ft, gt));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((u_new, f_new, g_new)) = accepted else {
            break; // no progress possible along this direction
        };

        let s: Vec<f64> = u_new.iter().zip(&u).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = g_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&yv).map(|(a, b)| a * b).sum();
        let ss = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        let yy = yv.iter().map(|v| v * v).sum::<f64>().sqrt();
        if sy > 1e-12 * ss * yy {
            if first_update {
                // scale the initial inverse Hessian (Nocedal & Wright eq. 6.20)
                let scale = sy / yv.iter().map(|v| v * v).sum::<f64>();
                for i in 0..d {
                    for j in 0..d {
                        h[i * d + j] = if i == j { scale } else { 0.0 };
                    }
                }
                first_update = false;
            }
            bfgs_update(&mut h, &s, &yv, sy, d);
        }
        u = u_new;
        fval = f_new;
        grad = g_new;
        converged = inf_norm(&grad) <= tol;
        if ss < 1e-14 * (1.0 + u.iter().map(|v| v * v).sum::<f64>().sqrt()) {
            break;
        }
    }
    Some(OptimOutcome {
        u,
        value: fval,
        value_at_start: f_start,
        grad_norm: inf_norm(&grad),
        iterations,
        converged,
    })
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

/// `H <- (I - rho s y') H (I - rho y s') + rho s s'`
fn bfgs_update(h: &mut [f64], s: &[f64], yv: &[f64], sy: f64, d: usize) {
    let rho = 1.0 / sy;
    // hy = H y
    let mut hy = vec![0.0f64; d];
    for i in 0..d {
        for j in 0..d {
            hy[i] += h[i * d + j] * yv[j];
        }
    }
    let yhy: f64 = yv.iter().zip(&hy).map(|(a, b)| a * b).sum();
    for i in 0..d {
        for j in 0..d {
            h[i * d + j] += -rho * (s[i] * hy[j] + hy[i] * s[j])
                + rho * rho * yhy * s[i] * s[j]
                + rho * s[i] * s[j];
        }
    }
}

// ---------------------------------------------------------------------------
// Fit
// ---------------------------------------------------------------------------

/// Maximize the conditional log-likelihood under the configured constraints.
pub fn fit(y: &CountSeries, cfg: &FitConfig) -> Result<FitResult> {
    if y.len() < 20 {
        return Err(Error::Degenerate(format!(
            "need at least 20 observations to fit, got {}",
            y.len()
        )));
    }
    let first = y.counts()[0];
    if y.counts().iter().all(|&c| c == first) {
        return Err(Error::Degenerate(
            "constant series carries no information about the dynamics".into(),
        ));
    }
    let init = init_state(y)?;
    let transform = ParamTransform::new(cfg.mode, cfg.constraint);

    // Starting points: optional warm start, then a method-of-moments default,
    // then multiplicative perturbations of the default.
    let mut starts: Vec<[f64; 6]> = Vec::new();
    if let Some(w) = &cfg.warm_start {
        starts.push(transform.project_inside(w));
    }
    if starts.is_empty() || !cfg.warm_start_only {
        let default_start = ModelParams::new_unchecked([
            (0.3 * y.mean()).max(1e-3),
            0.1,
            0.1,
            init.1.clamp(1e-3, 1e4),
            0.1,
            0.1,
        ]);
        starts.push(transform.project_inside(&default_start));
    }
    for k in 1..cfg.multistart {
        use rand::Rng;
        let mut rng = stream_rng(cfg.seed, k as u64);
        let base = starts[starts.len() - 1];
        let mut pert = [0.0f64; 6];
        for i in 0..6 {
            let z: f64 = rng.random_range(-1.0..1.0);
            pert[i] = base[i] * (0.7 * z).exp();
        }
        starts.push(transform.project_inside(&ModelParams::new_unchecked(pert)));
    }

    let eval = |u: &[f64]| -> Option<(f64, Vec<f64>)> {
        let theta = transform.to_theta(u);
        let p = ModelParams::new_unchecked(theta);
        match likelihood::loglik_and_score(&p, y, init) {
            Ok((ll, st)) => {
                let gu = transform.pull_back_gradient(&st.score, &theta);
                Some((-ll, gu.iter().map(|g| -g).collect()))
            }
            Err(_) => None,
        }
    };

    let mut best: Option<OptimOutcome> = None;
    for start in &starts {
        let u0 = transform.to_u(start);
        if let Some(out) = bfgs(&eval, &u0, cfg.gradient_tolerance, cfg.max_iterations) {
            let better = match &best {
                None => true,
                Some(b) => out.value < b.value - 1e-12,
            };
            if better {
                best = Some(out);
            }
        }
    }
    let mut best = best.ok_or_else(|| {
        Error::Numeric("likelihood undefined at every starting point".into())
    })?;

    // Boundary polish: near the boundary the pulled-back gradient is damped
    // by the rate itself, so the iteration can stall with rates around 1e-4
    // and a small likelihood deficit left on the table. Jump any crawling
    // rate to the clamp floor, reconverge, and keep the better optimum.
    let theta_best = transform.to_theta(&best.u);
    let mut floored = theta_best;
    let mut any_floored = false;
    for &pos in match cfg.mode {
        ModelKind::Tv => &[1usize, 2, 4, 5][..],
        ModelKind::Ordinary => &[1usize, 2][..],
    } {
        if floored[pos] > RATE_CLAMP && floored[pos] < 1e-4 {
            floored[pos] = RATE_CLAMP;
            any_floored = true;
        }
    }
    if any_floored {
        let u0 = transform.to_u(&floored);
        if let Some(out) = bfgs(&eval, &u0, cfg.gradient_tolerance, cfg.max_iterations) {
            if out.value < best.value {
                best = OptimOutcome {
                    value_at_start: best.value_at_start,
                    ..out
                };
            }
        }
    }

    let theta_hat_arr = transform.to_theta(&best.u);
    let theta_hat = ModelParams::from_array(theta_hat_arr)?;
    let loglik = -best.value;
    let n = y.len();
    let (aic, bic) = information_criteria(loglik, cfg.mode.k(), n - 1);

    let mut boundary_flags = [false; DIM];
    for &i in cfg.mode.free_indices() {
        if i != 0 && i != 3 {
            boundary_flags[i] = theta_hat_arr[i] < BOUNDARY_TOL;
        }
    }

    let covariances = if cfg.compute_covariances {
        compute_covariances(&theta_hat, y, init, n, cfg.mode)
    } else {
        CovarianceSet::default()
    };

    Ok(FitResult {
        theta_hat,
        kind: cfg.mode,
        loglik,
        loglik_at_start: -best.value_at_start,
        covariances,
        aic,
        bic,
        converged: best.converged,
        iterations: best.iterations,
        grad_norm: best.grad_norm,
        boundary_flags,
        init_used: init,
        n,
    })
}

/// Parametric bootstrap standard errors and percentile confidence
/// intervals, simulating replicate series from the fitted model.
#[derive(Debug, Clone)]
pub struct BootstrapUncertainty {
    /// Over the free parameter indices of the fitted model.
    pub standard_errors: Vec<f64>,
    pub percentile_cis: Vec<(f64, f64)>,
    pub replicates_used: usize,
    pub failed: usize,
}

pub fn bootstrap_uncertainty(
    base: &FitResult,
    replications: usize,
    level: f64,
    seed: u64,
) -> Result<BootstrapUncertainty> {
    use rayon::prelude::*;
    if replications < 19 {
        return Err(Error::Invalid(format!(
            "need at least 19 bootstrap replications, got {replications}"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Invalid(format!(
            "confidence level must lie in (0,1), got {level}"
        )));
    }
    let idx = base.kind.free_indices();
    let cfg = FitConfig {
        mode: base.kind,
        compute_covariances: false,
        ..FitConfig::default()
    };
    let draws: Vec<Option<Vec<f64>>> = (0..replications)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b as u64);
            let (yb, _) = crate::model::simulate(
                &base.theta_hat,
                base.n,
                base.init_used.0,
                base.init_used.1,
                &mut rng,
            )
            .ok()?;
            let res = fit(&yb, &cfg).ok()?;
            Some(res.free_estimates())
        })
        .collect();
    let kept: Vec<Vec<f64>> = draws.into_iter().flatten().collect();
    let failed = replications - kept.len();
    if kept.len() < 19 {
        return Err(Error::Numeric(format!(
            "only {} bootstrap replicates refitted",
            kept.len()
        )));
    }
    let m = kept.len() as f64;
    let alpha = (1.0 - level) / 2.0;
    let mut standard_errors = Vec::with_capacity(idx.len());
    let mut percentile_cis = Vec::with_capacity(idx.len());
    for j in 0..idx.len() {
        let mut col: Vec<f64> = kept.iter().map(|row| row[j]).collect();
        let mean = col.iter().sum::<f64>() / m;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
        standard_errors.push(var.sqrt());
        col.sort_by(|a, b| a.partial_cmp(b).unwrap());
        percentile_cis.push((quantile_sorted(&col, alpha), quantile_sorted(&col, 1.0 - alpha)));
    }
    Ok(BootstrapUncertainty {
        standard_errors,
        percentile_cis,
        replicates_used: kept.len(),
        failed,
    })
}

/// Linear-interpolation quantile of a sorted sample.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

fn compute_covariances(
    theta_hat: &ModelParams,
    y: &CountSeries,
    init: (f64, f64),
    n: usize,
    mode: ModelKind,
) -> CovarianceSet {
    let mut set = CovarianceSet::default();
    let im: InfoMatrices = match likelihood::info_matrices(theta_hat, y, init) {
        Ok(im) => im,
        Err(e) => {
            set.notes.push(format!("information matrices failed: {e}"));
            return set;
        }
    };
    let idx = mode.free_indices();
    for (slot, method) in [
        CovMethod::J1Inverse,
        CovMethod::OpgInverse,
        CovMethod::HessianInverse,
    ]
    .into_iter()
    .enumerate()
    {
        match covariance_for(&im, n, method, idx) {
            Ok(c) => match slot {
                0 => set.j1 = Some(c),
                1 => set.opg = Some(c),
                _ => set.hessian = Some(c),
            },
            Err(e) => set.notes.push(format!("{}: {e}", method.label())),
        }
    }
    set
}
