//! Conditional log-likelihood, analytic score and the three information /
//! covariance estimators for the NB tv-DINGARCH model.
//!
//! The likelihood conditions on the first observation and on fixed initial
//! latent values, so all sums run over `t = 2..n`. Scores decompose into a
//! mean part and a dispersion part,
//!
//! ```text
//! S1_t = phi_t (y_t - lambda_t) / (lambda_t (lambda_t + phi_t))
//! S2_t = -(y_t - lambda_t)/(lambda_t + phi_t) + log(phi_t/(lambda_t + phi_t))
//!        + psi(y_t + phi_t) - psi(phi_t)
//! ```
//!
//! and the conditional information matrix is block diagonal between the
//! beta block and the alpha block.

use crate::linalg::sym_inverse;
use crate::model::{latent_path, CountSeries, ModelParams};
use crate::specfun::{digamma_pos, log_gamma_pos, trigamma_pos};
use crate::{Error, Result};

/// Dimension of the full parameter vector.
pub const DIM: usize = 6;

/// Condition-number limit beyond which a matrix is declared singular.
pub const COND_LIMIT: f64 = 1e12;

/// Tail mass threshold for the truncated conditional expectation series.
const TRUNC_TAIL: f64 = 1e-12;
/// Term cap for the truncated series.
const TRUNC_CAP: usize = 1_000_000;

/// Per-observation score pieces and their total.
#[derive(Debug, Clone)]
pub struct ScoreTerms {
    /// `S1_t` for `t = 2..n`.
    pub s1: Vec<f64>,
    /// `S2_t` for `t = 2..n`.
    pub s2: Vec<f64>,
    /// Total score `U(theta)`.
    pub score: [f64; DIM],
    /// `U_t(theta)` for `t = 2..n`.
    pub per_t_scores: Vec<[f64; DIM]>,
}

/// Conditional information matrix and the two plug-in estimators, all 6x6
/// row-major, all scaled by `1/n`.
#[derive(Debug, Clone)]
pub struct InfoMatrices {
    /// `J_1 = n^{-1} sum_t Var(U_t | F_{t-1})`, built from `b_t` and `d_t`.
    pub j1: Vec<f64>,
    /// Outer-product-of-gradients estimator `n^{-1} sum_t U_t U_t'`.
    pub s1_opg: Vec<f64>,
    /// Observed-information estimator `-n^{-1} sum_t grad U_t`, via central
    /// finite differences of the analytic score.
    pub s2_hess: Vec<f64>,
    /// `b_t = phi_t / (lambda_t (lambda_t + phi_t))` for `t = 2..n`.
    pub b_t: Vec<f64>,
    /// `d_t = psi'(phi_t) - E(psi'(Y_t+phi_t) | F_{t-1}) - lambda_t/(phi_t (lambda_t+phi_t))`.
    pub d_t: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CovMethod {
    J1Inverse,
    OpgInverse,
    HessianInverse,
}

impl CovMethod {
    pub fn label(&self) -> &'static str {
        match self {
            CovMethod::J1Inverse => "J1_inverse",
            CovMethod::OpgInverse => "OPG_inverse",
            CovMethod::HessianInverse => "Hessian_inverse",
        }
    }
}

/// Inverse information matrix with the standard errors it implies.
#[derive(Debug, Clone)]
pub struct CovarianceEstimate {
    /// `Sigma` for `sqrt(n)(theta_hat - theta) -> N(0, Sigma)`, row-major,
    /// over the parameter indices in `indices`.
    pub sigma: Vec<f64>,
    pub method: CovMethod,
    /// `sqrt(diag(Sigma) / n)`.
    pub standard_errors: Vec<f64>,
    /// Parameter indices (into the 6-vector) the matrix covers.
    pub indices: Vec<usize>,
    /// Condition number of the inverted matrix.
    pub condition: f64,
}

/// NB log pmf at `(lambda, phi, y)` including the `log y!` term.
fn nb_log_pmf_term(lambda: f64, phi: f64, y: f64) -> f64 {
    y * (lambda.ln() - (lambda + phi).ln()) + phi * (phi.ln() - (lambda + phi).ln())
        + log_gamma_pos(y + phi)
        - log_gamma_pos(phi)
        - log_gamma_pos(y + 1.0)
}

fn check_series(y: &CountSeries) -> Result<()> {
    if y.len() < 2 {
        return Err(Error::Degenerate(format!(
            "likelihood needs at least 2 observations, got {}",
            y.len()
        )));
    }
    Ok(())
}

/// Conditional log-likelihood `sum_{t=2}^n l_t(theta)`.
pub fn loglik(p: &ModelParams, y: &CountSeries, init: (f64, f64)) -> Result<f64> {
    check_series(y)?;
    let path = latent_path(p, y, init.0, init.1, false)?;
    let counts = y.counts();
    let mut total = 0.0;
    for t in 1..y.len() {
        total += nb_log_pmf_term(path.lambda[t], path.phi[t], counts[t] as f64);
    }
    if !total.is_finite() {
        return Err(Error::Numeric("log-likelihood is not finite".into()));
    }
    Ok(total)
}

/// Analytic score `U(theta)` with its per-observation terms.
pub fn score(p: &ModelParams, y: &CountSeries, init: (f64, f64)) -> Result<ScoreTerms> {
    Ok(loglik_and_score(p, y, init)?.1)
}

/// Log-likelihood and score in a single pass over the latent path.
pub fn loglik_and_score(
    p: &ModelParams,
    y: &CountSeries,
    init: (f64, f64),
) -> Result<(f64, ScoreTerms)> {
    check_series(y)?;
    let path = latent_path(p, y, init.0, init.1, true)?;
    let dl = path.dlambda.as_ref().expect("derivatives requested");
    let dp = path.dphi.as_ref().expect("derivatives requested");
    let counts = y.counts();
    let n = y.len();

    let mut total = 0.0;
    let mut s1 = Vec::with_capacity(n - 1);
    let mut s2 = Vec::with_capacity(n - 1);
    let mut per_t = Vec::with_capacity(n - 1);
    let mut score = [0.0f64; DIM];
    for t in 1..n {
        let lam = path.lambda[t];
        let phi = path.phi[t];
        let yt = counts[t] as f64;
        total += nb_log_pmf_term(lam, phi, yt);
        let s1t = phi * (yt - lam) / (lam * (lam + phi));
        let s2t = -(yt - lam) / (lam + phi) + (phi / (lam + phi)).ln() + digamma_pos(yt + phi)
            - digamma_pos(phi);
        let ut = [
            s1t * dl[0][t],
            s1t * dl[1][t],
            s1t * dl[2][t],
            s2t * dp[0][t],
            s2t * dp[1][t],
            s2t * dp[2][t],
        ];
        for i in 0..DIM {
            score[i] += ut[i];
        }
        s1.push(s1t);
        s2.push(s2t);
        per_t.push(ut);
    }
    if !total.is_finite() || score.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(
            "log-likelihood or score is not finite".into(),
        ));
    }
    Ok((
        total,
        ScoreTerms {
            s1,
            s2,
            score,
            per_t_scores: per_t,
        },
    ))
}

/// `E(psi'(Y + phi) | F)` for `Y ~ NB(lambda, phi)`, by direct truncated
/// summation with the pmf accumulated recursively. Stops once the remaining
/// tail mass falls below 1e-12; errors out at the 1e6-term cap.
pub fn conditional_trigamma_expectation(lambda: f64, phi: f64) -> Result<f64> {
    if !(lambda > 0.0 && phi > 0.0) {
        return Err(Error::Domain(format!(
            "conditional expectation needs positive parameters, got ({lambda}, {phi})"
        )));
    }
    let log_ratio = (lambda / (lambda + phi)).ln();
    let mut log_pmf = phi * (phi / (lambda + phi)).ln();
    let mut cum = 0.0f64;
    let mut acc = 0.0f64;
    for y in 0..TRUNC_CAP {
        let w = log_pmf.exp();
        cum += w;
        acc += w * trigamma_pos(y as f64 + phi);
        if 1.0 - cum < TRUNC_TAIL {
            return Ok(acc);
        }
        log_pmf += ((y as f64 + phi) / (y as f64 + 1.0)).ln() + log_ratio;
    }
    Err(Error::TruncationCap(format!(
        "E(psi'(Y+phi)) tail bound {TRUNC_TAIL} unmet after {TRUNC_CAP} terms (lambda={lambda}, phi={phi})"
    )))
}

/// Conditional information matrix `J_1` plus the OPG and observed-Hessian
/// estimators. All three are scaled by the series length `n`.
pub fn info_matrices(p: &ModelParams, y: &CountSeries, init: (f64, f64)) -> Result<InfoMatrices> {
    check_series(y)?;
    let n = y.len();
    let path = latent_path(p, y, init.0, init.1, true)?;
    let dl = path.dlambda.as_ref().expect("derivatives requested");
    let dp = path.dphi.as_ref().expect("derivatives requested");

    let mut j1 = vec![0.0f64; DIM * DIM];
    let mut b_t = Vec::with_capacity(n - 1);
    let mut d_t = Vec::with_capacity(n - 1);
    for t in 1..n {
        let lam = path.lambda[t];
        let phi = path.phi[t];
        let bt = phi / (lam * (lam + phi));
        let dt = trigamma_pos(phi) - conditional_trigamma_expectation(lam, phi)?
            - lam / (phi * (lam + phi));
        b_t.push(bt);
        d_t.push(dt);
        let gl = [dl[0][t], dl[1][t], dl[2][t]];
        let gp = [dp[0][t], dp[1][t], dp[2][t]];
        for i in 0..3 {
            for j in 0..3 {
                j1[i * DIM + j] += bt * gl[i] * gl[j];
                j1[(i + 3) * DIM + (j + 3)] += dt * gp[i] * gp[j];
            }
        }
    }
    for v in j1.iter_mut() {
        *v /= n as f64;
    }

    // OPG estimator from the per-observation scores.
    let st = score(p, y, init)?;
    let mut opg = vec![0.0f64; DIM * DIM];
    for ut in &st.per_t_scores {
        for i in 0..DIM {
            for j in 0..DIM {
                opg[i * DIM + j] += ut[i] * ut[j];
            }
        }
    }
    for v in opg.iter_mut() {
        *v /= n as f64;
    }

    let s2_hess = observed_information(p, y, init, n)?;

    Ok(InfoMatrices {
        j1,
        s1_opg: opg,
        s2_hess,
        b_t,
        d_t,
    })
}

/// `-n^{-1}` times the Hessian of the log-likelihood, from central finite
/// differences of the analytic score. Falls back to a one-sided difference
/// for components sitting too close to the boundary of the parameter space.
fn observed_information(
    p: &ModelParams,
    y: &CountSeries,
    init: (f64, f64),
    n: usize,
) -> Result<Vec<f64>> {
    let theta = p.as_array();
    let mut hess = vec![0.0f64; DIM * DIM];
    for i in 0..DIM {
        let h = 6e-6 * theta[i].abs().max(1e-3);
        let mut up = theta;
        up[i] += h;
        let u_plus = score(&ModelParams::new_unchecked(up), y, init)?.score;
        let col: [f64; DIM];
        if theta[i] - h > 0.0 {
            let mut dn = theta;
            dn[i] -= h;
            // a small negative probe can still yield a valid latent path;
            // if not, fall back to the one-sided difference
            match score(&ModelParams::new_unchecked(dn), y, init) {
                Ok(s_minus) => {
                    let mut c = [0.0; DIM];
                    for r in 0..DIM {
                        c[r] = (u_plus[r] - s_minus.score[r]) / (2.0 * h);
                    }
                    col = c;
                }
                Err(_) => col = one_sided(&theta, i, h, &u_plus, y, init)?,
            }
        } else {
            col = one_sided(&theta, i, h, &u_plus, y, init)?;
        }
        for r in 0..DIM {
            hess[r * DIM + i] = col[r];
        }
    }
    // symmetrize and flip sign
    let mut s2 = vec![0.0f64; DIM * DIM];
    for r in 0..DIM {
        for c in 0..DIM {
            s2[r * DIM + c] = -(hess[r * DIM + c] + hess[c * DIM + r]) / (2.0 * n as f64);
        }
    }
    Ok(s2)
}

fn one_sided(
    theta: &[f64; DIM],
    i: usize,
    h: f64,
    u_plus: &[f64; DIM],
    y: &CountSeries,
    init: (f64, f64),
) -> Result<[f64; DIM]> {
    let u0 = score(&ModelParams::new_unchecked(*theta), y, init)?.score;
    let mut c = [0.0; DIM];
    for r in 0..DIM {
        c[r] = (u_plus[r] - u0[r]) / h;
    }
    let _ = i;
    Ok(c)
}

/// Invert the selected information matrix over the full parameter vector.
pub fn covariance(im: &InfoMatrices, n: usize, method: CovMethod) -> Result<CovarianceEstimate> {
    covariance_for(im, n, method, &[0, 1, 2, 3, 4, 5])
}

/// Invert the selected information matrix restricted to a subset of
/// parameter indices (used for the ordinary, 4-parameter model).
pub fn covariance_for(
    im: &InfoMatrices,
    n: usize,
    method: CovMethod,
    indices: &[usize],
) -> Result<CovarianceEstimate> {
    if n < 2 {
        return Err(Error::Invalid("covariance needs n >= 2".into()));
    }
    let source = match method {
        CovMethod::J1Inverse => &im.j1,
        CovMethod::OpgInverse => &im.s1_opg,
        CovMethod::HessianInverse => &im.s2_hess,
    };
    let k = indices.len();
    let mut sub = vec![0.0f64; k * k];
    for (r, &i) in indices.iter().enumerate() {
        for (c, &j) in indices.iter().enumerate() {
            sub[r * k + c] = source[i * DIM + j];
        }
    }
    let (sigma, condition) = sym_inverse(&sub, k, COND_LIMIT)?;
    let standard_errors = (0..k)
        .map(|i| (sigma[i * k + i] / n as f64).sqrt())
        .collect();
    Ok(CovarianceEstimate {
        sigma,
        method,
        standard_errors,
        indices: indices.to_vec(),
        condition,
    })
}
