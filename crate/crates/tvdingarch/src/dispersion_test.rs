//! Parametric bootstrap likelihood-ratio test of constant dispersion:
//! `H0: alpha1 = alpha2 = 0` against the full tv-DINGARCH alternative.
//!
//! The null sits on the boundary of the parameter space, so the LR statistic
//! is calibrated by simulation rather than a chi-square reference. The
//! restricted variant simulates replicates from the null fit, the
//! unrestricted variant from the full-model fit; each replicate is refitted
//! under both hypotheses and the p-value is the fraction of replicate
//! statistics exceeding the observed one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::estimate::{fit, FitConfig, FitResult, ModelKind};
use crate::model::{simulate, CountSeries, ModelParams};
use crate::rng::stream_rng;
use crate::{Error, Result};

/// Largest observed-vs-null likelihood deficit tolerated before the
/// optimizer is assumed to have failed.
const LR_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BootstrapVariant {
    /// Simulate replicates from the null-hypothesis fit.
    Restricted,
    /// Simulate replicates from the unrestricted (full-model) fit.
    Unrestricted,
}

#[derive(Debug, Clone)]
pub struct TestConfig {
    /// Number of bootstrap replications `B` (at least 19).
    pub replications: usize,
    pub variant: BootstrapVariant,
    /// Significance level for the reject decision.
    pub significance: f64,
    pub seed: u64,
    /// Optimizer settings for the observed-data fits.
    pub fit: FitConfig,
}

impl TestConfig {
    pub fn new(replications: usize, variant: BootstrapVariant, significance: f64, seed: u64) -> Self {
        Self {
            replications,
            variant,
            significance,
            seed,
            fit: FitConfig::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.replications < 19 {
            return Err(Error::Invalid(format!(
                "need at least 19 bootstrap replications, got {}",
                self.replications
            )));
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(Error::Invalid(format!(
                "significance level must lie in (0,1), got {}",
                self.significance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TestReport {
    pub lr_observed: f64,
    /// Replicate statistics from successful refits, in replicate order.
    pub lr_replicates: Vec<f64>,
    pub p_value: f64,
    pub reject: bool,
    pub variant: BootstrapVariant,
    pub null_fit: FitResult,
    pub alt_fit: FitResult,
    pub failed_replicates: usize,
    /// False when more than 10% of replicates failed to refit.
    pub reliable: bool,
}

/// `LR = -2 (l_0 - l_1)`, clamped at zero for tiny negative values.
/// A null fit beating the alternative by more than [`LR_SLACK`] in
/// log-likelihood signals an optimizer failure.
pub fn lr_statistic(null_fit: &FitResult, alt_fit: &FitResult) -> Result<f64> {
    let deficit = null_fit.loglik - alt_fit.loglik;
    if deficit > LR_SLACK {
        return Err(Error::Numeric(format!(
            "alternative fit lost to the null by {deficit:.3e}; optimizer failure"
        )));
    }
    Ok((-2.0 * deficit).max(0.0))
}

/// Fit both hypotheses to the observed data. The alternative fit gets a
/// warm start anchored at the null solution (tiny dispersion rates), which
/// protects the nesting `l_0 <= l_1` against bad local maxima.
pub fn fit_both(y: &CountSeries, cfg: &FitConfig) -> Result<(FitResult, FitResult)> {
    let null_cfg = FitConfig {
        mode: ModelKind::Ordinary,
        warm_start: None,
        ..cfg.clone()
    };
    let null_fit = fit(y, &null_cfg)?;
    let anchor = ModelParams::new(
        null_fit.theta_hat.beta0,
        null_fit.theta_hat.beta1,
        null_fit.theta_hat.beta2,
        null_fit.theta_hat.alpha0,
        1e-3,
        1e-3,
    )?;
    let alt_cfg = FitConfig {
        mode: ModelKind::Tv,
        warm_start: Some(anchor),
        ..cfg.clone()
    };
    let mut alt_fit = fit(y, &alt_cfg)?;
    if alt_fit.loglik < null_fit.loglik {
        // The boundary crawl stalled short of the null optimum. Restart from
        // the null solution with all rates at the clamp floor, where the
        // likelihood matches the null one to O(1e-9); monotone line search
        // then keeps the refit within the nesting slack.
        let floor = 1e-10;
        let anchor2 = ModelParams::new(
            null_fit.theta_hat.beta0,
            null_fit.theta_hat.beta1.max(floor),
            null_fit.theta_hat.beta2.max(floor),
            null_fit.theta_hat.alpha0,
            floor,
            floor,
        )?;
        let retry_cfg = FitConfig {
            mode: ModelKind::Tv,
            warm_start: Some(anchor2),
            multistart: 1,
            ..cfg.clone()
        };
        let retry = fit(y, &retry_cfg)?;
        if retry.loglik > alt_fit.loglik {
            alt_fit = retry;
        }
    }
    Ok((null_fit, alt_fit))
}

/// Algorithm: fit both hypotheses, simulate `B` replicate series from the
/// variant-appropriate fitted model, refit both hypotheses per replicate,
/// and estimate the p-value as `#(LR_b > LR) / B_effective`.
///
/// Replicates whose refits fail are excluded from numerator and denominator;
/// more than 10% failures marks the report unreliable. Each replicate uses
/// its own RNG stream, so the result is identical for any worker count.
pub fn bootstrap_test(y: &CountSeries, cfg: &TestConfig) -> Result<TestReport> {
    cfg.validate()?;
    let (null_fit, alt_fit) = fit_both(y, &cfg.fit)?;
    let lr_observed = lr_statistic(&null_fit, &alt_fit)?;

    let sim_params = match cfg.variant {
        BootstrapVariant::Restricted => null_fit.theta_hat,
        BootstrapVariant::Unrestricted => alt_fit.theta_hat,
    };
    // Replicate series reuse the observed fit's fixed initial latent values.
    let sim_init = match cfg.variant {
        BootstrapVariant::Restricted => null_fit.init_used,
        BootstrapVariant::Unrestricted => alt_fit.init_used,
    };
    let n = y.len();

    let replicate_cfg = FitConfig {
        compute_covariances: false,
        ..cfg.fit.clone()
    };
    let outcomes: Vec<Option<f64>> = (0..cfg.replications)
        .into_par_iter()
        .map(|b| replicate_lr(&sim_params, sim_init, n, cfg.seed, b as u64, &replicate_cfg))
        .collect();

    let lr_replicates: Vec<f64> = outcomes.iter().filter_map(|o| *o).collect();
    let failed_replicates = cfg.replications - lr_replicates.len();
    let effective = lr_replicates.len();
    if effective == 0 {
        return Err(Error::Numeric(
            "every bootstrap replicate failed to refit".into(),
        ));
    }
    let exceed = lr_replicates.iter().filter(|&&lr| lr > lr_observed).count();
    let p_value = exceed as f64 / effective as f64;
    let reliable = failed_replicates * 10 <= cfg.replications;

    Ok(TestReport {
        lr_observed,
        lr_replicates,
        p_value,
        reject: p_value < cfg.significance,
        variant: cfg.variant,
        null_fit,
        alt_fit,
        failed_replicates,
        reliable,
    })
}

fn replicate_lr(
    sim_params: &ModelParams,
    sim_init: (f64, f64),
    n: usize,
    seed: u64,
    replicate: u64,
    cfg: &FitConfig,
) -> Option<f64> {
    let mut rng = stream_rng(seed, replicate);
    let (yb, _) = simulate(sim_params, n, sim_init.0, sim_init.1, &mut rng).ok()?;
    let (null_fit, alt_fit) = fit_both(&yb, cfg).ok()?;
    lr_statistic(&null_fit, &alt_fit).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dummy_fit(loglik: f64) -> FitResult {
        FitResult {
            theta_hat: ModelParams::new(1.0, 0.1, 0.1, 1.0, 0.1, 0.1).unwrap(),
            kind: ModelKind::Tv,
            loglik,
            loglik_at_start: loglik,
            covariances: Default::default(),
            aic: 0.0,
            bic: 0.0,
            converged: true,
            iterations: 0,
            grad_norm: 0.0,
            boundary_flags: [false; 6],
            init_used: (1.0, 1.0),
            n: 100,
        }
    }

    #[test]
    fn lr_statistic_values() {
        assert_eq!(lr_statistic(&dummy_fit(-5.0), &dummy_fit(-5.0)).unwrap(), 0.0);
        // magnitude anchor backed out of the reported AIC pair
        let lr = lr_statistic(&dummy_fit(-1398.608), &dummy_fit(-1329.284)).unwrap();
        assert!((lr - 138.648).abs() < 1e-9);
        assert_eq!(lr_statistic(&dummy_fit(-100.0), &dummy_fit(-99.0)).unwrap(), 2.0);
        // optimizer failure signal
        assert!(lr_statistic(&dummy_fit(-99.0), &dummy_fit(-100.0)).is_err());
    }

    #[test]
    fn config_validation() {
        let y = CountSeries::new(vec![1; 30]);
        let cfg = TestConfig::new(10, BootstrapVariant::Restricted, 0.05, 1);
        assert!(matches!(bootstrap_test(&y, &cfg), Err(Error::Invalid(_))));
        let cfg = TestConfig::new(20, BootstrapVariant::Restricted, 1.5, 1);
        assert!(matches!(bootstrap_test(&y, &cfg), Err(Error::Invalid(_))));
    }

    #[test]
    fn deterministic_report() {
        let p = ModelParams::new(2.0, 0.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        let mut rng = stream_rng(97, 0);
        let (y, _) = simulate(&p, 120, 2.0, 1.0, &mut rng).unwrap();
        let cfg = TestConfig::new(19, BootstrapVariant::Restricted, 0.05, 5);
        let a = bootstrap_test(&y, &cfg).unwrap();
        let b = bootstrap_test(&y, &cfg).unwrap();
        assert_eq!(a.lr_observed, b.lr_observed);
        assert_eq!(a.lr_replicates, b.lr_replicates);
        assert_eq!(a.p_value, b.p_value);
    }

    #[test]
    fn p_value_within_bounds_and_granularity() {
        let p = ModelParams::new(2.0, 0.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        let mut rng = stream_rng(101, 0);
        let (y, _) = simulate(&p, 150, 2.0, 1.0, &mut rng).unwrap();
        let cfg = TestConfig::new(25, BootstrapVariant::Restricted, 0.05, 7);
        let rep = bootstrap_test(&y, &cfg).unwrap();
        assert!((0.0..=1.0).contains(&rep.p_value));
        let effective = (cfg.replications - rep.failed_replicates) as f64;
        let scaled = rep.p_value * effective;
        assert!((scaled - scaled.round()).abs() < 1e-9, "granularity 1/B");
        assert_eq!(rep.reject, rep.p_value < 0.05);
    }

    #[test]
    fn p_values_approximately_uniform_under_h0() {
        // Repeated tests on fresh null data should spread their p-values
        // over the unit interval rather than piling up anywhere.
        let p = ModelParams::new(2.0, 0.3, 0.2, 1.0, 0.0, 0.0).unwrap();
        let (l1, f1) = p.stationary_init();
        let seeds = 50u64;
        let mut pvals = Vec::new();
        for t in 0..seeds {
            let mut rng = stream_rng(173, t);
            let (y, _) = simulate(&p, 150, l1, f1, &mut rng).unwrap();
            let cfg = TestConfig::new(39, BootstrapVariant::Restricted, 0.05, 400 + t);
            pvals.push(bootstrap_test(&y, &cfg).unwrap().p_value);
        }
        let mean = pvals.iter().sum::<f64>() / pvals.len() as f64;
        let below = pvals.iter().filter(|&&v| v < 0.4).count();
        let above = pvals.iter().filter(|&&v| v > 0.6).count();
        assert!(
            (0.35..=0.65).contains(&mean),
            "mean p-value {mean:.3} far from 0.5: {pvals:?}"
        );
        assert!(
            below >= 10 && above >= 10,
            "p-values not spread out: {below} below 0.4, {above} above 0.6"
        );
    }

    #[test]
    fn strong_dispersion_dynamics_reject_h0() {
        // Setting-I style data carries obvious dispersion dynamics; the test
        // should reject in at least 95% of desk-scale trials.
        let p = ModelParams::new(15.0, 0.2, 0.25, 0.5, 0.1, 0.3).unwrap();
        let (l1, f1) = p.stationary_init();
        let mut rejected = 0;
        let trials = 50;
        for t in 0..trials {
            let mut rng = stream_rng(103, t);
            let (y, _) = simulate(&p, 400, l1, f1, &mut rng).unwrap();
            let cfg = TestConfig::new(39, BootstrapVariant::Restricted, 0.05, 200 + t);
            let rep = bootstrap_test(&y, &cfg).unwrap();
            if rep.reject {
                rejected += 1;
            }
        }
        assert!(
            rejected >= 48,
            "power too low: rejected {rejected}/{trials} at Setting I"
        );
    }
}
