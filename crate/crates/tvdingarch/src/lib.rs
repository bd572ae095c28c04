//! Time-varying-dispersion negative binomial INGARCH (tv-DINGARCH) models.
//!
//! The observed count process `Y_t` is conditionally negative binomial with
//! mean `lambda_t` and dispersion `phi_t`, both following first-order
//! GARCH-type feedback recursions:
//!
//! ```text
//! lambda_t = beta0 + beta1 * Y_{t-1} + beta2 * lambda_{t-1}
//! phi_t    = alpha0 + alpha1 * Y_{t-1} + alpha2 * phi_{t-1}
//! ```
//!
//! The crate provides simulation, constrained conditional maximum likelihood
//! estimation with analytic scores and information matrices, a parametric
//! bootstrap likelihood-ratio test of constant dispersion, recursive
//! one-step-ahead forecasting with RMSFE tracking, PIT/AIC/BIC diagnostics,
//! and a Monte Carlo experiment harness. The `tvd` binary exposes all of it
//! on the command line.

pub mod cli;
pub mod diagnostics;
pub mod dispersion_test;
mod error;
pub mod estimate;
pub mod forecast;
pub mod io;
pub mod likelihood;
pub(crate) mod linalg;
pub mod model;
pub mod montecarlo;
pub mod nbdist;
pub mod rng;
pub mod specfun;

pub use error::{Error, Result};
