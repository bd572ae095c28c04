//! Negative binomial distribution parameterized by mean `lambda` and
//! dispersion `phi`, so that `Var(Y) = lambda + lambda^2 / phi`.
//!
//! The distribution arises as a gamma-Poisson mixture: `Z ~ Gamma(phi, phi)`
//! (unit mean) and `Y | Z ~ Poisson(lambda Z)`. Sampling uses exactly that
//! representation; everything else is computed in log space through
//! [`crate::specfun`].

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use crate::specfun::log_gamma_pos;
use crate::{Error, Result};

/// Relative tail mass below which cdf summation stops early.
const CDF_TAIL_EPS: f64 = 1e-15;

/// Mean/dispersion parameter pair, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NbParams {
    lambda: f64,
    phi: f64,
}

impl NbParams {
    pub fn new(lambda: f64, phi: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::Domain(format!(
                "negative binomial mean must be positive, got {lambda}"
            )));
        }
        if !phi.is_finite() || phi <= 0.0 {
            return Err(Error::Domain(format!(
                "negative binomial dispersion must be positive, got {phi}"
            )));
        }
        Ok(Self { lambda, phi })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `lambda + lambda^2 / phi`.
    pub fn variance(&self) -> f64 {
        self.lambda + self.lambda * self.lambda / self.phi
    }

    /// Log probability mass at `y`.
    pub fn log_pmf(&self, y: u64) -> f64 {
        log_pmf_raw(self.lambda, self.phi, y)
    }

    /// Cumulative distribution at `y`; 0 for negative arguments.
    pub fn cdf(&self, y: i64) -> f64 {
        if y < 0 {
            return 0.0;
        }
        let y = y as u64;
        let (lambda, phi) = (self.lambda, self.phi);
        // Stable forward accumulation of pmf terms with early exit once the
        // remaining tail cannot matter.
        let log_ratio = (lambda / (lambda + phi)).ln();
        let mut log_term = phi * (phi / (lambda + phi)).ln(); // log pmf(0)
        let mut acc = log_term.exp();
        let mut k = 0u64;
        while k < y {
            // pmf(k+1)/pmf(k) = (k + phi) / (k + 1) * lambda / (lambda + phi)
            log_term += ((k as f64 + phi) / (k as f64 + 1.0)).ln() + log_ratio;
            acc += log_term.exp();
            k += 1;
            if 1.0 - acc < CDF_TAIL_EPS {
                return 1.0_f64.min(acc.max(1.0 - CDF_TAIL_EPS));
            }
        }
        acc.min(1.0)
    }

    /// Smallest `y` with `cdf(y) >= q`, for `q` in the open unit interval.
    ///
    /// Brackets by exponential doubling, then bisects; avoids a linear scan
    /// when the mean is large.
    pub fn quantile(&self, q: f64) -> Result<u64> {
        if !q.is_finite() || q <= 0.0 || q >= 1.0 {
            return Err(Error::Domain(format!(
                "quantile level must lie in (0, 1), got {q}"
            )));
        }
        if self.cdf(0) >= q {
            return Ok(0);
        }
        let mut lo = 0u64; // cdf(lo) < q
        let mut hi = 1u64;
        while self.cdf(hi as i64) < q {
            lo = hi;
            hi = hi.saturating_mul(2);
            if hi > u64::MAX / 2 {
                return Err(Error::Numeric("quantile bracket overflow".into()));
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.cdf(mid as i64) >= q {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Mode of the pmf; ties broken toward the smaller support point.
    pub fn mode(&self) -> u64 {
        // Walk up while the pmf strictly increases. The walk is bounded by
        // lambda (phi - 1) / phi, so it terminates quickly.
        let mut y = 0u64;
        let mut cur = self.log_pmf(0);
        loop {
            let next = self.log_pmf(y + 1);
            if next > cur {
                y += 1;
                cur = next;
            } else {
                return y;
            }
        }
    }

    /// Draw one variate through the gamma-Poisson mixture.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let gamma = Gamma::new(self.phi, 1.0 / self.phi).expect("validated dispersion");
        let z: f64 = gamma.sample(rng);
        let mean = self.lambda * z;
        if mean < 1e-300 {
            return 0;
        }
        let pois = Poisson::new(mean).expect("positive Poisson mean");
        pois.sample(rng) as u64
    }

    /// `d`-th raw moment `E(Y^d)` from the recursion
    /// `E(Y^d) = lambda {1 + sum_j [C(d-1,j) + C(d-1,j-1)/phi] E(Y^j)}`
    /// seeded with `E(Y) = lambda`.
    pub fn raw_moment(&self, d: u32) -> Result<f64> {
        if d == 0 {
            return Ok(1.0);
        }
        let mut moments = vec![self.lambda];
        for dd in 2..=d as usize {
            let mut sum = 1.0f64;
            for j in 1..dd {
                let coeff = binomial(dd - 1, j) + binomial(dd - 1, j - 1) / self.phi;
                sum += coeff * moments[j - 1];
            }
            let m = self.lambda * sum;
            if !m.is_finite() {
                return Err(Error::Numeric(format!(
                    "moment of order {dd} overflows f64 at lambda={}, phi={}",
                    self.lambda, self.phi
                )));
            }
            moments.push(m);
        }
        Ok(moments[d as usize - 1])
    }
}

fn log_pmf_raw(lambda: f64, phi: f64, y: u64) -> f64 {
    let yf = y as f64;
    log_gamma_pos(yf + phi) - log_gamma_pos(phi) - log_gamma_pos(yf + 1.0)
        + yf * (lambda / (lambda + phi)).ln()
        + phi * (phi / (lambda + phi)).ln()
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}
