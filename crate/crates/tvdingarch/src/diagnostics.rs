//! Predictive-distribution diagnostics: non-randomized PIT histograms,
//! Pearson residuals, and the chi-square tail helper backing the PIT
//! uniformity statistic.

use serde::{Deserialize, Serialize};

use crate::model::{CountSeries, LatentPath};
use crate::nbdist::NbParams;
use crate::specfun::log_gamma_pos;
use crate::{Error, Result};

/// Non-randomized PIT histogram over `J` equal-width probability bins.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PitHistogram {
    /// `J + 1` bin edges spanning `[0, 1]`.
    pub bin_edges: Vec<f64>,
    /// Bin masses, summing to one.
    pub bin_masses: Vec<f64>,
    /// Chi-square statistic against the uniform reference.
    pub uniformity_stat: f64,
    /// Upper-tail p-value of the statistic at `J - 1` degrees of freedom.
    pub p_value: f64,
}

/// Mean non-randomized PIT of the one-step predictive distributions.
///
/// For each `t = 2..n` the conditional PIT is zero up to `F_t(y_t - 1)`,
/// linear between `F_t(y_t - 1)` and `F_t(y_t)`, and one above. Averaging
/// over `t` and differencing at the bin edges yields the histogram; a
/// calibrated model leaves it near uniform.
pub fn pit(y: &CountSeries, path: &LatentPath, bins: usize) -> Result<PitHistogram> {
    if bins < 2 {
        return Err(Error::Invalid(format!("need at least 2 bins, got {bins}")));
    }
    let n = y.len();
    if path.lambda.len() != n || path.phi.len() != n {
        return Err(Error::Invalid(
            "latent path not aligned with the series".into(),
        ));
    }
    if n < 2 {
        return Err(Error::Degenerate("PIT needs at least 2 observations".into()));
    }
    let counts = y.counts();
    let edges: Vec<f64> = (0..=bins).map(|j| j as f64 / bins as f64).collect();
    // mean PIT evaluated at the bin edges
    let mut mean_f = vec![0.0f64; bins + 1];
    let used = (n - 1) as f64;
    for t in 1..n {
        let dist = NbParams::new(path.lambda[t], path.phi[t])?;
        let yt = counts[t];
        let lower = if yt == 0 { 0.0 } else { dist.cdf(yt as i64 - 1) };
        let upper = dist.cdf(yt as i64);
        let width = (upper - lower).max(1e-300);
        for (j, &u) in edges.iter().enumerate() {
            let f = if u <= lower {
                0.0
            } else if u >= upper {
                1.0
            } else {
                (u - lower) / width
            };
            mean_f[j] += f / used;
        }
    }
    let mut masses: Vec<f64> = (0..bins).map(|j| mean_f[j + 1] - mean_f[j]).collect();
    // guard against tiny negative rounding
    for m in masses.iter_mut() {
        if *m < 0.0 && *m > -1e-12 {
            *m = 0.0;
        }
    }
    let expected = 1.0 / bins as f64;
    let stat = masses
        .iter()
        .map(|&m| {
            let diff = m * used - expected * used;
            diff * diff / (expected * used)
        })
        .sum::<f64>();
    let p_value = chi_square_sf(stat, (bins - 1) as f64);
    Ok(PitHistogram {
        bin_edges: edges,
        bin_masses: masses,
        uniformity_stat: stat,
        p_value,
    })
}

/// Pearson residuals `(y_t - lambda_t) / sqrt(lambda_t + lambda_t^2 / phi_t)`
/// for `t = 2..n`, matching the likelihood's conditioning.
pub fn pearson_residuals(y: &CountSeries, path: &LatentPath) -> Result<Vec<f64>> {
    let n = y.len();
    if path.lambda.len() != n || path.phi.len() != n {
        return Err(Error::Invalid(
            "latent path not aligned with the series".into(),
        ));
    }
    let counts = y.counts();
    Ok((1..n)
        .map(|t| {
            let lam = path.lambda[t];
            let phi = path.phi[t];
            (counts[t] as f64 - lam) / (lam + lam * lam / phi).sqrt()
        })
        .collect())
}

/// Upper tail `P(X > x)` of a chi-square distribution with `k` degrees of
/// freedom, via the regularized incomplete gamma function.
pub fn chi_square_sf(x: f64, k: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    1.0 - regularized_gamma_p(k / 2.0, x / 2.0)
}

/// Regularized lower incomplete gamma `P(a, x)`: series expansion for
/// `x < a + 1`, continued fraction otherwise.
pub fn regularized_gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // series: P(a,x) = x^a e^-x / Gamma(a) * sum x^n / (a)_{n+1}
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..500 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-15 {
                break;
            }
        }
        (sum.ln() + a * x.ln() - x - log_gamma_pos(a)).exp().clamp(0.0, 1.0)
    } else {
        // Lentz continued fraction for Q(a,x)
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / 1e-300;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < 1e-300 {
                d = 1e-300;
            }
            c = b + an / c;
            if c.abs() < 1e-300 {
                c = 1e-300;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-15 {
                break;
            }
        }
        let q = (a * x.ln() - x - log_gamma_pos(a)).exp() * h;
        (1.0 - q).clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::{fit, FitConfig};
    use crate::model::{latent_path, simulate, ModelParams};
    use crate::rng::stream_rng;

    #[test]
    fn chi_square_sf_reference_values() {
        // checked against standard chi-square tables
        assert!((chi_square_sf(3.841, 1.0) - 0.05).abs() < 1e-3);
        assert!((chi_square_sf(16.919, 9.0) - 0.05).abs() < 1e-3);
        assert!((chi_square_sf(21.666, 9.0) - 0.01).abs() < 1e-3);
        assert!(chi_square_sf(0.0, 5.0) == 1.0);
        assert!(chi_square_sf(1e3, 5.0) < 1e-10);
    }

    #[test]
    fn pit_degenerate_predictive_spreads_uniformly() {
        // cdf(y-1) = 0 and cdf(y) = 1 makes F_t(u) = u: every bin gets 1/J.
        // Approximated by an extremely concentrated predictive law around an
        // impossible-to-miss value is not available for counts, so check the
        // linear interpolation directly through a wide-open bracket: y = 0
        // with cdf(0) ~ 1 gives F(u) = u / cdf(0) ~ u.
        let p = NbParams::new(1e-8, 10.0).unwrap();
        assert!(p.cdf(0) > 1.0 - 1e-6);
        let y = CountSeries::new(vec![0, 0, 0]);
        let path = LatentPath {
            lambda: vec![1e-8; 3],
            phi: vec![10.0; 3],
            dlambda: None,
            dphi: None,
        };
        let hist = pit(&y, &path, 10).unwrap();
        for &m in &hist.bin_masses {
            assert!((m - 0.1).abs() < 1e-5, "mass {m}");
        }
    }

    #[test]
    fn pit_masses_normalized_and_monotone() {
        let p = ModelParams::new(3.0, 0.3, 0.15, 0.1, 0.2, 0.3).unwrap();
        let (l1, f1) = p.stationary_init();
        let mut rng = stream_rng(113, 0);
        let (y, _) = simulate(&p, 400, l1, f1, &mut rng).unwrap();
        let path = latent_path(&p, &y, l1, f1, false).unwrap();
        let hist = pit(&y, &path, 10).unwrap();
        let total: f64 = hist.bin_masses.iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
        assert!(hist.bin_masses.iter().all(|&m| m >= 0.0));
        assert_eq!(hist.bin_edges.len(), 11);
    }

    #[test]
    fn pit_calibrated_under_correct_model() {
        let p = ModelParams::new(3.0, 0.3, 0.15, 0.1, 0.2, 0.3).unwrap();
        let (l1, f1) = p.stationary_init();
        let mut passes = 0;
        let trials = 20u64;
        let mut mean_max_dev = 0.0f64;
        for trial in 0..trials {
            let mut rng = stream_rng(127, trial);
            let (y, _) = simulate(&p, 2000, l1, f1, &mut rng).unwrap();
            let res = fit(
                &y,
                &FitConfig {
                    compute_covariances: false,
                    ..FitConfig::default()
                },
            )
            .unwrap();
            let path = latent_path(
                &res.theta_hat,
                &y,
                res.init_used.0,
                res.init_used.1,
                false,
            )
            .unwrap();
            let hist = pit(&y, &path, 10).unwrap();
            if hist.p_value > 0.01 {
                passes += 1;
            }
            mean_max_dev += hist
                .bin_masses
                .iter()
                .map(|m| (m - 0.1).abs())
                .fold(0.0, f64::max)
                / trials as f64;
        }
        assert!(passes >= 19, "PIT calibration: {passes}/20 trials passed");
        // mean maximal bin deviation stays within the binomial-scale band
        let bound = 3.0 * (0.1f64 * 0.9 / 1999.0).sqrt();
        assert!(
            mean_max_dev <= bound,
            "mean max bin deviation {mean_max_dev:.4} exceeds {bound:.4}"
        );
    }

    #[test]
    fn pearson_residuals_values() {
        let y = CountSeries::new(vec![0, 10]);
        let path = LatentPath {
            lambda: vec![4.0, 4.0],
            phi: vec![2.0, 2.0],
            dlambda: None,
            dphi: None,
        };
        let r = pearson_residuals(&y, &path).unwrap();
        // (10 - 4)/sqrt(4 + 16/2) = 6/sqrt(12)
        assert!((r[0] - 6.0 / 12.0f64.sqrt()).abs() < 1e-12);
        assert!((r[0] - 1.732_050_807_568_877).abs() < 1e-10);

        let y = CountSeries::new(vec![0, 4]);
        let r = pearson_residuals(&y, &path).unwrap();
        assert_eq!(r[0], 0.0);
    }

    #[test]
    fn pearson_residual_variance_near_one() {
        let p = ModelParams::new(3.0, 0.3, 0.15, 0.1, 0.2, 0.3).unwrap();
        let (l1, f1) = p.stationary_init();
        let mut rng = stream_rng(131, 0);
        let (y, _) = simulate(&p, 5000, l1, f1, &mut rng).unwrap();
        let path = latent_path(&p, &y, l1, f1, false).unwrap();
        let r = pearson_residuals(&y, &path).unwrap();
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        let var = r.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r.len() - 1) as f64;
        assert!((var - 1.0).abs() < 0.1, "residual variance {var}");
    }
}
