//! Model parameters, latent mean/dispersion recursions, stationarity checks
//! and forward simulation.

use serde::{Deserialize, Serialize};

use crate::nbdist::NbParams;
use crate::{Error, Result};

/// Dispersion cap used when a series shows no overdispersion and the
/// method-of-moments estimate of `phi` would be infinite.
pub const EQUIDISPERSION_PHI_CAP: f64 = 1e4;

/// The six-parameter vector `theta = (beta0, beta1, beta2, alpha0, alpha1, alpha2)`.
///
/// `beta0` and `alpha0` are strictly positive intercepts; the four rate
/// coefficients are nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl ModelParams {
    pub fn new(
        beta0: f64,
        beta1: f64,
        beta2: f64,
        alpha0: f64,
        alpha1: f64,
        alpha2: f64,
    ) -> Result<Self> {
        let p = Self {
            beta0,
            beta1,
            beta2,
            alpha0,
            alpha1,
            alpha2,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let all = self.as_array();
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("model parameters must be finite".into()));
        }
        if self.beta0 <= 0.0 || self.alpha0 <= 0.0 {
            return Err(Error::Domain(format!(
                "intercepts must be positive: beta0={}, alpha0={}",
                self.beta0, self.alpha0
            )));
        }
        if self.beta1 < 0.0 || self.beta2 < 0.0 || self.alpha1 < 0.0 || self.alpha2 < 0.0 {
            return Err(Error::Domain(
                "rate coefficients must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Construct without domain checks. Only used internally for finite
    /// difference probes that step slightly outside the parameter space.
    pub(crate) fn new_unchecked(theta: [f64; 6]) -> Self {
        Self {
            beta0: theta[0],
            beta1: theta[1],
            beta2: theta[2],
            alpha0: theta[3],
            alpha1: theta[4],
            alpha2: theta[5],
        }
    }

    /// Components in the conventional ordering.
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.beta0,
            self.beta1,
            self.beta2,
            self.alpha0,
            self.alpha1,
            self.alpha2,
        ]
    }

    pub fn from_array(theta: [f64; 6]) -> Result<Self> {
        let p = Self::new_unchecked(theta);
        p.validate()?;
        Ok(p)
    }

    /// True when the dispersion dynamics are switched off (ordinary
    /// NB-INGARCH special case).
    pub fn is_ordinary(&self) -> bool {
        self.alpha1 == 0.0 && self.alpha2 == 0.0
    }

    /// Marginal means of the latent processes under stationarity, used as
    /// default simulation starting values.
    pub fn stationary_init(&self) -> (f64, f64) {
        let mean_rate = self.beta1 + self.beta2;
        let lambda = if mean_rate < 1.0 {
            self.beta0 / (1.0 - mean_rate)
        } else {
            self.beta0
        };
        let phi = if self.alpha2 < 1.0 {
            (self.alpha0 + self.alpha1 * lambda) / (1.0 - self.alpha2)
        } else {
            self.alpha0
        };
        (lambda, phi)
    }
}

/// Observed nonnegative counts with optional time labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountSeries {
    counts: Vec<u64>,
    labels: Option<Vec<String>>,
}

impl CountSeries {
    pub fn new(counts: Vec<u64>) -> Self {
        Self {
            counts,
            labels: None,
        }
    }

    pub fn with_labels(counts: Vec<u64>, labels: Vec<String>) -> Result<Self> {
        if counts.len() != labels.len() {
            return Err(Error::Invalid(format!(
                "{} labels for {} counts",
                labels.len(),
                counts.len()
            )));
        }
        Ok(Self {
            counts,
            labels: Some(labels),
        })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Prefix of the first `n` observations (labels carried along).
    pub fn prefix(&self, n: usize) -> Self {
        Self {
            counts: self.counts[..n].to_vec(),
            labels: self.labels.as_ref().map(|l| l[..n].to_vec()),
        }
    }

    pub fn mean(&self) -> f64 {
        if self.counts.is_empty() {
            return f64::NAN;
        }
        self.counts.iter().map(|&c| c as f64).sum::<f64>() / self.counts.len() as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let n = self.counts.len();
        if n < 2 {
            return f64::NAN;
        }
        let mean = self.mean();
        self.counts
            .iter()
            .map(|&c| (c as f64 - mean).powi(2))
            .sum::<f64>()
            / (n - 1) as f64
    }
}

/// Latent mean/dispersion paths aligned with a count series, with optional
/// derivative recursions for the score.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentPath {
    pub lambda: Vec<f64>,
    pub phi: Vec<f64>,
    /// `d lambda_t / d(beta0, beta1, beta2)` when requested.
    pub dlambda: Option<[Vec<f64>; 3]>,
    /// `d phi_t / d(alpha0, alpha1, alpha2)` when requested.
    pub dphi: Option<[Vec<f64>; 3]>,
}

/// Outcome of the stationarity checks.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StationarityReport {
    /// `beta1 + beta2 + alpha1 + alpha2`.
    pub practical_sum: f64,
    /// `min_p ||A||_p + 2^{1-1/p} ||B||_p` over `p` in {1, 2, inf}, with
    /// `A = diag(beta2, alpha2)` and `B = diag(beta1, alpha1)`.
    pub norm_bound: f64,
    pub is_stationary_practical: bool,
    pub is_stationary_theorem: bool,
    /// Diagonal of `A` (feedback matrix on the latent pair).
    pub a_diag: [f64; 2],
    /// Diagonal of `B` (loading matrix on the lagged count).
    pub b_diag: [f64; 2],
}

/// One step of the latent recursions.
pub fn update_state(p: &ModelParams, y_prev: u64, lambda_prev: f64, phi_prev: f64) -> (f64, f64) {
    let y = y_prev as f64;
    (
        p.beta0 + p.beta1 * y + p.beta2 * lambda_prev,
        p.alpha0 + p.alpha1 * y + p.alpha2 * phi_prev,
    )
}

/// Evaluate both the practical sum condition and the induced-norm condition.
///
/// For diagonal nonnegative matrices every induced p-norm is the largest
/// diagonal entry, so the norm bound reduces to
/// `max(beta2, alpha2) + 2^{1-1/p} max(beta1, alpha1)`, minimized over p.
pub fn check_stationarity(p: &ModelParams) -> StationarityReport {
    let practical_sum = p.beta1 + p.beta2 + p.alpha1 + p.alpha2;
    let a_norm = p.beta2.max(p.alpha2);
    let b_norm = p.beta1.max(p.alpha1);
    let norm_bound = [1.0f64, 2.0, f64::INFINITY]
        .iter()
        .map(|&pn| a_norm + 2.0f64.powf(1.0 - 1.0 / pn) * b_norm)
        .fold(f64::INFINITY, f64::min);
    StationarityReport {
        practical_sum,
        norm_bound,
        is_stationary_practical: practical_sum < 1.0,
        is_stationary_theorem: norm_bound < 1.0,
        a_diag: [p.beta2, p.alpha2],
        b_diag: [p.beta1, p.alpha1],
    }
}

/// Run the latent recursions over an observed series.
///
/// The initial values `(lambda1, phi1)` are treated as fixed constants, so
/// all derivative sequences start at zero at `t = 1` and follow
/// `d lambda_t / d beta0 = 1 + beta2 d lambda_{t-1} / d beta0`,
/// `d lambda_t / d beta1 = y_{t-1} + beta2 d lambda_{t-1} / d beta1`,
/// `d lambda_t / d beta2 = lambda_{t-1} + beta2 d lambda_{t-1} / d beta2`,
/// and analogously for `phi` with `alpha2`.
pub fn latent_path(
    p: &ModelParams,
    y: &CountSeries,
    lambda1: f64,
    phi1: f64,
    with_derivatives: bool,
) -> Result<LatentPath> {
    if y.is_empty() {
        return Err(Error::Invalid("empty series".into()));
    }
    if !(lambda1.is_finite() && phi1.is_finite()) || lambda1 <= 0.0 || phi1 <= 0.0 {
        return Err(Error::Domain(format!(
            "initial latent values must be positive, got ({lambda1}, {phi1})"
        )));
    }
    let n = y.len();
    let counts = y.counts();
    let mut lambda = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    lambda.push(lambda1);
    phi.push(phi1);
    let mut dlambda = with_derivatives.then(|| [vec![0.0f64], vec![0.0], vec![0.0]]);
    let mut dphi = with_derivatives.then(|| [vec![0.0f64], vec![0.0], vec![0.0]]);

    for t in 1..n {
        let y_prev = counts[t - 1] as f64;
        let lam_prev = lambda[t - 1];
        let phi_prev = phi[t - 1];
        let lam = p.beta0 + p.beta1 * y_prev + p.beta2 * lam_prev;
        let ph = p.alpha0 + p.alpha1 * y_prev + p.alpha2 * phi_prev;
        if !lam.is_finite() || !ph.is_finite() || lam <= 0.0 || ph <= 0.0 {
            return Err(Error::Numeric(format!(
                "latent path degenerated at t={}: lambda={lam}, phi={ph}",
                t + 1
            )));
        }
        lambda.push(lam);
        phi.push(ph);
        if let Some(d) = dlambda.as_mut() {
            let prev = [d[0][t - 1], d[1][t - 1], d[2][t - 1]];
            d[0].push(1.0 + p.beta2 * prev[0]);
            d[1].push(y_prev + p.beta2 * prev[1]);
            d[2].push(lam_prev + p.beta2 * prev[2]);
        }
        if let Some(d) = dphi.as_mut() {
            let prev = [d[0][t - 1], d[1][t - 1], d[2][t - 1]];
            d[0].push(1.0 + p.alpha2 * prev[0]);
            d[1].push(y_prev + p.alpha2 * prev[1]);
            d[2].push(phi_prev + p.alpha2 * prev[2]);
        }
    }
    Ok(LatentPath {
        lambda,
        phi,
        dlambda,
        dphi,
    })
}

/// Simulate a trajectory of length `n` starting from fixed `(lambda1, phi1)`.
///
/// A non-stationary parameter vector (practical sum >= 1) only triggers a
/// warning so that explosive behaviour can be studied deliberately.
pub fn simulate<R: rand::Rng + ?Sized>(
    p: &ModelParams,
    n: usize,
    lambda1: f64,
    phi1: f64,
    rng: &mut R,
) -> Result<(CountSeries, LatentPath)> {
    if n < 2 {
        return Err(Error::Invalid(format!(
            "simulation length must be at least 2, got {n}"
        )));
    }
    if !check_stationarity(p).is_stationary_practical {
        log::warn!(
            "simulating with beta1+beta2+alpha1+alpha2 = {} >= 1; process may be non-stationary",
            p.beta1 + p.beta2 + p.alpha1 + p.alpha2
        );
    }
    if !(lambda1.is_finite() && phi1.is_finite()) || lambda1 <= 0.0 || phi1 <= 0.0 {
        return Err(Error::Domain(format!(
            "initial latent values must be positive, got ({lambda1}, {phi1})"
        )));
    }
    let mut counts = Vec::with_capacity(n);
    let mut lambda = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    let mut lam = lambda1;
    let mut ph = phi1;
    for t in 0..n {
        if !lam.is_finite() || !ph.is_finite() || lam <= 0.0 || ph <= 0.0 {
            return Err(Error::Numeric(format!(
                "latent state degenerated at t={}: lambda={lam}, phi={ph}",
                t + 1
            )));
        }
        let dist = NbParams::new(lam, ph)?;
        let y = dist.sample(rng);
        counts.push(y);
        lambda.push(lam);
        phi.push(ph);
        let (next_lam, next_ph) = update_state(p, y, lam, ph);
        lam = next_lam;
        ph = next_ph;
    }
    Ok((
        CountSeries::new(counts),
        LatentPath {
            lambda,
            phi,
            dlambda: None,
            dphi: None,
        },
    ))
}

/// Method-of-moments starting values `(lambda1, phi1)` from the first two
/// empirical moments: `lambda1 = ybar`, `phi1 = ybar^2 / (s^2 - ybar)` when
/// the series is overdispersed, otherwise the near-Poisson cap.
pub fn init_state(y: &CountSeries) -> Result<(f64, f64)> {
    if y.len() < 2 {
        return Err(Error::Degenerate(
            "need at least 2 observations for initial values".into(),
        ));
    }
    let mean = y.mean();
    if mean <= 0.0 {
        return Err(Error::Degenerate(
            "all-zero series has no usable initial mean".into(),
        ));
    }
    let var = y.variance();
    let phi1 = if var > mean {
        mean * mean / (var - mean)
    } else {
        EQUIDISPERSION_PHI_CAP
    };
    Ok((mean, phi1.min(EQUIDISPERSION_PHI_CAP)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    /// Table-style Setting I parameters.
    pub(crate) fn setting_i() -> ModelParams {
        ModelParams::new(15.0, 0.2, 0.25, 0.5, 0.1, 0.3).unwrap()
    }

    /// Table-style Setting II parameters.
    pub(crate) fn setting_ii() -> ModelParams {
        ModelParams::new(3.0, 0.3, 0.15, 0.1, 0.2, 0.3).unwrap()
    }

    #[test]
    fn update_state_direct_substitution() {
        let p = setting_i();
        let (lam, ph) = update_state(&p, 10, 12.0, 2.0);
        assert!((lam - 20.0).abs() < 1e-12); // 15 + 2 + 3
        assert!((ph - 2.1).abs() < 1e-12); // 0.5 + 1 + 0.6

        let p2 = setting_ii();
        let (lam, ph) = update_state(&p2, 0, 3.0, 0.1);
        assert!((lam - 3.45).abs() < 1e-12);
        assert!((ph - 0.13).abs() < 1e-12);

        let iid = ModelParams::new(2.0, 0.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        let (lam, ph) = update_state(&iid, 7, 9.0, 4.0);
        assert_eq!((lam, ph), (2.0, 1.0));
    }

    #[test]
    fn stationarity_flags() {
        let r = check_stationarity(&setting_i());
        assert!((r.practical_sum - 0.85).abs() < 1e-12);
        assert!(r.is_stationary_practical);

        let p = ModelParams::new(1.0, 0.5, 0.3, 1.0, 0.2, 0.1).unwrap();
        let r = check_stationarity(&p);
        assert!((r.practical_sum - 1.1).abs() < 1e-12);
        assert!(!r.is_stationary_practical);
        // theorem bound at p=1: max(0.3, 0.1) + max(0.5, 0.2) = 0.8 < 1
        assert!((r.norm_bound - 0.8).abs() < 1e-12);
        assert!(r.is_stationary_theorem);

        let iid = ModelParams::new(2.0, 0.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        let r = check_stationarity(&iid);
        assert!(r.is_stationary_practical && r.is_stationary_theorem);
        assert_eq!(r.norm_bound, 0.0);
    }

    #[test]
    fn latent_path_constant_case() {
        let p = ModelParams::new(2.0, 0.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        let y = CountSeries::new(vec![3, 1, 4, 1, 5]);
        let path = latent_path(&p, &y, 7.0, 9.0, false).unwrap();
        assert_eq!(path.lambda[0], 7.0);
        assert!(path.lambda[1..].iter().all(|&l| (l - 2.0).abs() < 1e-15));
        assert!(path.phi[1..].iter().all(|&f| (f - 1.0).abs() < 1e-15));
    }

    #[test]
    fn latent_path_matches_hand_iteration() {
        // Setting II on a fixed 10-count series, init (3, 0.2); oracle path
        // iterated independently at high precision.
        let p = setting_ii();
        let y = CountSeries::new(vec![4, 2, 7, 0, 3, 5, 1, 2, 6, 3]);
        let path = latent_path(&p, &y, 3.0, 0.2, false).unwrap();
        let lambda_oracle = [
            3.0,
            4.65,
            4.2975,
            5.744625,
            3.86169375,
            4.4792540625,
            5.171888109375,
            4.07578321640625,
            4.2113674824609375,
            5.431705122369140625,
        ];
        let phi_oracle = [
            0.2, 0.96, 0.788, 1.7364, 0.62092, 0.886276, 1.3658828, 0.70976484, 0.712929452,
            1.5138788356,
        ];
        for t in 0..10 {
            assert!((path.lambda[t] - lambda_oracle[t]).abs() < 1e-12, "t={t}");
            assert!((path.phi[t] - phi_oracle[t]).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn derivative_recursion_collapses_without_feedback() {
        // with beta2 = 0, d lambda_t / d beta1 = y_{t-1}
        let p = ModelParams::new(2.0, 0.3, 0.0, 1.0, 0.1, 0.0).unwrap();
        let y = CountSeries::new(vec![4, 2, 7, 0, 3]);
        let path = latent_path(&p, &y, 2.0, 1.0, true).unwrap();
        let d = path.dlambda.unwrap();
        for t in 1..y.len() {
            assert!((d[1][t] - y.counts()[t - 1] as f64).abs() < 1e-15);
        }
        assert_eq!(d[1][0], 0.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = setting_ii();
        let mut rng = stream_rng(5, 0);
        let (y, _) = simulate(&p, 60, 5.0, 0.5, &mut rng).unwrap();
        let path = latent_path(&p, &y, 5.0, 0.5, true).unwrap();
        let dl = path.dlambda.as_ref().unwrap();
        let dp = path.dphi.as_ref().unwrap();
        let theta = p.as_array();
        for i in 0..6 {
            let h = 1e-6 * theta[i].max(0.1);
            let mut up = theta;
            up[i] += h;
            let mut dn = theta;
            dn[i] -= h;
            let pu = ModelParams::new_unchecked(up);
            let pd = ModelParams::new_unchecked(dn);
            let path_u = latent_path(&pu, &y, 5.0, 0.5, false).unwrap();
            let path_d = latent_path(&pd, &y, 5.0, 0.5, false).unwrap();
            for t in 0..y.len() {
                let (analytic, fd) = if i < 3 {
                    (
                        dl[i][t],
                        (path_u.lambda[t] - path_d.lambda[t]) / (2.0 * h),
                    )
                } else {
                    (dp[i - 3][t], (path_u.phi[t] - path_d.phi[t]) / (2.0 * h))
                };
                assert!(
                    (analytic - fd).abs() <= 1e-6 * analytic.abs().max(1.0),
                    "param {i}, t {t}: {analytic} vs {fd}"
                );
            }
        }
    }

    #[test]
    fn path_lower_bounds_hold() {
        let p = setting_ii();
        let mut rng = stream_rng(5, 1);
        let (y, path) = simulate(&p, 500, 5.0, 0.5, &mut rng).unwrap();
        assert!(path.lambda.iter().all(|&l| l >= p.beta0 || l == 5.0));
        assert!(path.phi.iter().all(|&f| f >= p.alpha0 || f == 0.5));
        let refit_path = latent_path(&p, &y, 5.0, 0.5, false).unwrap();
        assert!(refit_path.lambda[1..].iter().all(|&l| l >= p.beta0));
        assert!(refit_path.phi[1..].iter().all(|&f| f >= p.alpha0));
    }

    #[test]
    fn simulate_iid_case_moments() {
        // beta1=beta2=alpha1=alpha2=0 gives iid NB(2, 1): mean 2, var 6
        let p = ModelParams::new(2.0, 0.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        let n = 100_000;
        let mut rng = stream_rng(23, 0);
        let (y, _) = simulate(&p, n, 2.0, 1.0, &mut rng).unwrap();
        let mean = y.mean();
        let var = y.variance();
        // 5 MC standard errors; Var(mean) = var/n, Var(s^2) ~ (mu4 - var^2)/n
        let dist = NbParams::new(2.0, 1.0).unwrap();
        let m2 = dist.raw_moment(2).unwrap();
        let m4 = dist.raw_moment(4).unwrap();
        let mu4 = m4 - 4.0 * 2.0 * dist.raw_moment(3).unwrap() + 6.0 * 4.0 * m2 - 3.0 * 16.0;
        assert!((mean - 2.0).abs() < 5.0 * (6.0f64 / n as f64).sqrt());
        assert!((var - 6.0).abs() < 5.0 * ((mu4 - 36.0) / n as f64).sqrt());
    }

    #[test]
    fn simulate_positive_lag1_autocorrelation() {
        let p = setting_i();
        let (l1, f1) = p.stationary_init();
        let mut rng = stream_rng(29, 0);
        let (y, _) = simulate(&p, 100_000, l1, f1, &mut rng).unwrap();
        let c = y.counts();
        let mean = y.mean();
        let n = c.len();
        let mut num = 0.0;
        let mut den = 0.0;
        for t in 0..n {
            let d = c[t] as f64 - mean;
            den += d * d;
            if t + 1 < n {
                num += d * (c[t + 1] as f64 - mean);
            }
        }
        let acf1 = num / den;
        assert!(acf1 > 0.05, "lag-1 ACF {acf1} should be clearly positive");
    }

    #[test]
    fn simulate_is_deterministic() {
        let p = setting_ii();
        let mut r1 = stream_rng(31, 4);
        let mut r2 = stream_rng(31, 4);
        let (a, _) = simulate(&p, 20, 3.0, 0.2, &mut r1).unwrap();
        let (b, _) = simulate(&p, 20, 3.0, 0.2, &mut r2).unwrap();
        assert_eq!(a.counts(), b.counts());
    }

    #[test]
    fn simulate_rejects_tiny_n() {
        let p = setting_ii();
        let mut rng = stream_rng(1, 0);
        assert!(simulate(&p, 1, 3.0, 0.2, &mut rng).is_err());
    }

    #[test]
    fn init_state_cases() {
        // ybar=2, s^2=4 -> (2, 4/(4-2)) = (2, 2)
        let y = CountSeries::new(vec![4, 0, 4, 0, 2]);
        assert!((y.mean() - 2.0).abs() < 1e-15);
        assert!((y.variance() - 4.0).abs() < 1e-15);
        let (l, f) = init_state(&y).unwrap();
        assert!((l - 2.0).abs() < 1e-12);
        assert!((f - 2.0).abs() < 1e-12);

        // equidispersed series falls back to the cap
        let y = CountSeries::new(vec![3, 3, 3, 3]);
        let (l, f) = init_state(&y).unwrap();
        assert_eq!(l, 3.0);
        assert_eq!(f, EQUIDISPERSION_PHI_CAP);

        // all-zero series rejected
        let y = CountSeries::new(vec![0, 0, 0]);
        assert!(matches!(init_state(&y), Err(Error::Degenerate(_))));
    }

    #[test]
    fn init_state_on_overdispersed_sample() {
        let p = setting_i();
        let (l1, f1) = p.stationary_init();
        let mut rng = stream_rng(37, 0);
        let (y, _) = simulate(&p, 2000, l1, f1, &mut rng).unwrap();
        let (l, f) = init_state(&y).unwrap();
        assert!(l > 0.0 && f > 0.0 && f < EQUIDISPERSION_PHI_CAP);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ModelParams::new(0.0, 0.1, 0.1, 1.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, -0.1, 0.1, 1.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 0.1, 0.1, 0.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 0.1, 0.1, f64::NAN, 0.0, 0.0).is_err());
    }
}
