//! Real special functions used by the negative binomial likelihood:
//! log-gamma, digamma and trigamma on the positive half line.
//!
//! All three use the same scheme: shift the argument above a threshold with
//! the recurrences `Gamma(x+1) = x Gamma(x)`, `psi(x+1) = psi(x) + 1/x`,
//! `psi'(x+1) = psi'(x) - 1/x^2`, then evaluate the Stirling-type asymptotic
//! expansion. No arguments outside `(0, inf)` are accepted; the model only
//! ever evaluates at `phi_t > 0` and `y_t + phi_t > 0`.

use crate::{Error, Result};

/// Arguments are shifted above this value before the asymptotic series.
const SHIFT_THRESHOLD: f64 = 10.0;

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_74;

fn check_positive(x: f64, name: &str) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("{name} requires x > 0, got {x}")));
    }
    Ok(())
}

/// Natural logarithm of the gamma function, `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive(x, "log_gamma")?;
    Ok(log_gamma_pos(x))
}

/// Digamma function `psi(x) = d log Gamma(x) / dx`, `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive(x, "digamma")?;
    Ok(digamma_pos(x))
}

/// Trigamma function `psi'(x)`, `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    check_positive(x, "trigamma")?;
    Ok(trigamma_pos(x))
}

/// `log Gamma` assuming `x > 0`. Hot path for the likelihood loops.
pub(crate) fn log_gamma_pos(x: f64) -> f64 {
    // Stirling coefficients B_{2n} / (2n (2n-1)).
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let mut shift = 0.0f64;
    let mut z = x;
    while z < SHIFT_THRESHOLD {
        shift += z.ln();
        z += 1.0;
    }
    let zinv2 = 1.0 / (z * z);
    let mut series = 0.0;
    let mut pow = 1.0 / z;
    for c in C {
        series += c * pow;
        pow *= zinv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_TWO_PI + series - shift
}

/// Digamma assuming `x > 0`.
pub(crate) fn digamma_pos(x: f64) -> f64 {
    // B_{2n} / (2n) for the asymptotic tail.
    const C: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32_760.0,
        1.0 / 12.0,
    ];
    let mut acc = 0.0f64;
    let mut z = x;
    while z < SHIFT_THRESHOLD {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let zinv2 = 1.0 / (z * z);
    let mut series = 0.0;
    let mut pow = zinv2;
    for c in C {
        series += c * pow;
        pow *= zinv2;
    }
    acc + z.ln() - 0.5 / z - series
}

/// Trigamma assuming `x > 0`.
pub(crate) fn trigamma_pos(x: f64) -> f64 {
    // B_{2n} coefficients of z^{-(2n+1)}.
    const C: [f64; 7] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
    ];
    let mut acc = 0.0f64;
    let mut z = x;
    while z < SHIFT_THRESHOLD {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let zinv = 1.0 / z;
    let zinv2 = zinv * zinv;
    let mut series = 0.0;
    let mut pow = zinv * zinv2;
    for c in C {
        series += c * pow;
        pow *= zinv2;
    }
    acc + zinv + 0.5 * zinv2 + series
}
