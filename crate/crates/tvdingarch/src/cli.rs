//! Command-line surface: `simulate`, `fit`, `test`, `forecast`, `pit`, `mc`.
//!
//! Every subcommand is deterministic given its flags, the master seed and
//! the input bytes. JSON results embed a manifest and a `schema_version`
//! and validate against the schemas shipped under `schemas/`. Exit codes:
//! 0 success, 2 usage/validation failure, 3 numerical failure.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::diagnostics::pit;
use crate::dispersion_test::{bootstrap_test, BootstrapVariant, TestConfig};
use crate::estimate::{
    bootstrap_uncertainty, fit, ConstraintKind, FitConfig, FitResult, ModelKind,
};
use crate::forecast::{rolling_forecast, ForecastConfig, PointForecast};
use crate::io::{
    read_counts_csv, write_counts_csv, write_forecast_csv, write_latent_csv, write_pit_csv,
    RunManifest,
};
use crate::model::{latent_path, simulate, CountSeries, ModelParams};
use crate::montecarlo::{
    anderson_darling_normal, run_estimation_study, run_level_study, McDesign, McExperiment,
};
use crate::rng::stream_rng;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "tvd",
    version,
    about = "Time-varying-dispersion negative binomial INGARCH modeling"
)]
pub struct Cli {
    /// Worker threads for test/mc replication (default: TVD_THREADS or all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate a tv-DINGARCH trajectory to counts + latent-path CSV files
    Simulate(SimulateArgs),
    /// Fit the tv or ordinary model by conditional maximum likelihood
    Fit(FitArgs),
    /// Bootstrap likelihood-ratio test of constant dispersion
    Test(TestArgs),
    /// Recursive one-step-ahead forecasting with cumulative RMSFE
    Forecast(ForecastArgs),
    /// PIT histogram of the fitted one-step predictive distributions
    Pit(PitArgs),
    /// Monte Carlo studies: estimator quality, test level/power
    Mc(McArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelFlag {
    Tv,
    Ordinary,
}

impl From<ModelFlag> for ModelKind {
    fn from(m: ModelFlag) -> Self {
        match m {
            ModelFlag::Tv => ModelKind::Tv,
            ModelFlag::Ordinary => ModelKind::Ordinary,
        }
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub beta0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta2: f64,
    #[arg(long)]
    pub alpha0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha2: f64,
    /// Series length
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    /// Initial latent mean (default: stationary mean)
    #[arg(long)]
    pub lambda1: Option<f64>,
    /// Initial latent dispersion (default: stationary mean)
    #[arg(long)]
    pub phi1: Option<f64>,
    /// Discard this many initial draws
    #[arg(long, default_value_t = 0)]
    pub burnin: usize,
    /// Counts CSV destination
    #[arg(long, default_value = "counts.csv")]
    pub out: PathBuf,
    /// Latent-path CSV destination (default: <out stem>_latent.csv)
    #[arg(long)]
    pub latent_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Counts CSV file
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelFlag::Tv)]
    pub model: ModelFlag,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub multistart: usize,
    #[arg(long, default_value_t = 300)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    /// Drop the practical-sum stationarity constraint
    #[arg(long)]
    pub unconstrained: bool,
    /// Replications for bootstrap SEs/CIs (omit for normal-approximation CIs)
    #[arg(long)]
    pub bootstrap_ci: Option<usize>,
    /// Write the JSON result here as well as to stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = VariantFlag::Restricted)]
    pub variant: VariantFlag,
    /// Bootstrap replications B
    #[arg(long, short = 'B', default_value_t = 500)]
    pub replications: usize,
    #[arg(long, default_value_t = 0.05)]
    pub significance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantFlag {
    Restricted,
    Unrestricted,
}

impl From<VariantFlag> for BootstrapVariant {
    fn from(v: VariantFlag) -> Self {
        match v {
            VariantFlag::Restricted => BootstrapVariant::Restricted,
            VariantFlag::Unrestricted => BootstrapVariant::Unrestricted,
        }
    }
}

#[derive(Args, Debug)]
pub struct ForecastArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Training cut: predictions start at t = n0 + 1
    #[arg(long)]
    pub n0: usize,
    #[arg(long, value_enum, default_value_t = PointFlag::Median)]
    pub point: PointFlag,
    #[arg(long, value_enum, default_value_t = ModelFlag::Tv)]
    pub model: ModelFlag,
    #[arg(long, default_value_t = 1)]
    pub refit_every: usize,
    /// Per-step trace CSV destination
    #[arg(long, default_value = "forecast_trace.csv")]
    pub trace_out: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PointFlag {
    Mean,
    Median,
    Mode,
}

impl From<PointFlag> for PointForecast {
    fn from(p: PointFlag) -> Self {
        match p {
            PointFlag::Mean => PointForecast::Mean,
            PointFlag::Median => PointForecast::Median,
            PointFlag::Mode => PointForecast::Mode,
        }
    }
}

#[derive(Args, Debug)]
pub struct PitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelFlag::Tv)]
    pub model: ModelFlag,
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Histogram CSV destination
    #[arg(long)]
    pub hist_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ExperimentFlag {
    Estimation,
    Level,
    Power,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SettingFlag {
    /// Estimation Setting I
    I,
    /// Estimation Setting II
    Ii,
    /// Test configuration C1
    C1,
    /// Test configuration C2
    C2,
    /// Test configuration C3
    C3,
    /// Test configuration C4
    C4,
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[arg(long, value_enum)]
    pub experiment: ExperimentFlag,
    /// Named parameter setting; overridden by explicit --beta0 etc.
    #[arg(long, value_enum)]
    pub setting: Option<SettingFlag>,
    #[arg(long)]
    pub beta0: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    #[arg(long)]
    pub alpha0: Option<f64>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    /// Replicate series length (paper: 500/1000 estimation, 200 testing)
    #[arg(long)]
    pub n: Option<usize>,
    /// Monte Carlo replications (desk defaults: 200 estimation, 100 testing)
    #[arg(long)]
    pub replications: Option<usize>,
    /// Bootstrap replications within each test replicate (desk default 199)
    #[arg(long, short = 'B')]
    pub bootstrap_b: Option<usize>,
    /// Paper-scale defaults: 1000 estimation replications, 500 x B=500 testing
    #[arg(long)]
    pub full_scale: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-parameter summary CSV (estimation experiments)
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
}

/// Run the parsed command, returning the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(threads) = cli
        .threads
        .or_else(|| std::env::var("TVD_THREADS").ok().and_then(|v| v.parse().ok()))
    {
        // fails harmlessly if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }
    let outcome = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Test(args) => cmd_test(args),
        Command::Forecast(args) => cmd_forecast(args),
        Command::Pit(args) => cmd_pit(args),
        Command::Mc(args) => cmd_mc(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit_json(doc: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(doc).expect("serializable");
    println!("{text}");
    if let Some(path) = out {
        std::fs::write(path, format!("{text}\n"))?;
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    let params = ModelParams::new(
        args.beta0, args.beta1, args.beta2, args.alpha0, args.alpha1, args.alpha2,
    )?;
    let (stat_l1, stat_f1) = params.stationary_init();
    let lambda1 = args.lambda1.unwrap_or(stat_l1);
    let phi1 = args.phi1.unwrap_or(stat_f1);
    let total = args
        .n
        .checked_add(args.burnin)
        .ok_or_else(|| Error::Invalid("n + burnin overflows".into()))?;
    let mut rng = stream_rng(args.seed, 0);
    let (y_full, path_full) = simulate(&params, total, lambda1, phi1, &mut rng)?;
    let y = CountSeries::new(y_full.counts()[args.burnin..].to_vec());
    let latent = crate::model::LatentPath {
        lambda: path_full.lambda[args.burnin..].to_vec(),
        phi: path_full.phi[args.burnin..].to_vec(),
        dlambda: None,
        dphi: None,
    };

    let manifest = RunManifest::new("simulate")
        .flag("beta0", args.beta0)
        .flag("beta1", args.beta1)
        .flag("beta2", args.beta2)
        .flag("alpha0", args.alpha0)
        .flag("alpha1", args.alpha1)
        .flag("alpha2", args.alpha2)
        .flag("n", args.n)
        .flag("burnin", args.burnin)
        .flag("lambda1", lambda1)
        .flag("phi1", phi1)
        .seed(args.seed);
    write_counts_csv(&args.out, &y, &manifest)?;
    let latent_path_out = args.latent_out.unwrap_or_else(|| {
        let stem = args.out.file_stem().unwrap_or_default().to_string_lossy();
        args.out.with_file_name(format!("{stem}_latent.csv"))
    });
    write_latent_csv(&latent_path_out, &y, &latent, &manifest)?;
    eprintln!(
        "wrote {} counts to {} (latent path: {})",
        y.len(),
        args.out.display(),
        latent_path_out.display()
    );
    Ok(0)
}

fn param_json(fit: &FitResult) -> Value {
    let idx = fit.kind.free_indices();
    let theta = fit.theta_hat.as_array();
    let names = crate::montecarlo::PARAM_NAMES;
    let mut estimates = BTreeMap::new();
    for &i in idx {
        estimates.insert(names[i].to_string(), json!(theta[i]));
    }
    json!(estimates)
}

fn fit_document(
    fit: &FitResult,
    manifest: &RunManifest,
    ses: Option<&[f64]>,
    cis: Option<&[(f64, f64)]>,
    ci_method: &str,
) -> Value {
    let idx = fit.kind.free_indices();
    let names = crate::montecarlo::PARAM_NAMES;
    let mut se_map = BTreeMap::new();
    let mut ci_map = BTreeMap::new();
    for (j, &i) in idx.iter().enumerate() {
        se_map.insert(
            names[i].to_string(),
            ses.map_or(Value::Null, |s| json!(s[j])),
        );
        ci_map.insert(
            names[i].to_string(),
            cis.map_or(Value::Null, |c| json!([c[j].0, c[j].1])),
        );
    }
    let mut boundary = BTreeMap::new();
    for &i in idx {
        boundary.insert(names[i].to_string(), json!(fit.boundary_flags[i]));
    }
    json!({
        "schema_version": SCHEMA_VERSION,
        "manifest": manifest,
        "model": match fit.kind { ModelKind::Tv => "tv", ModelKind::Ordinary => "ordinary" },
        "n": fit.n,
        "estimates": param_json(fit),
        "standard_errors": se_map,
        "confidence_intervals": ci_map,
        "ci_method": ci_method,
        "loglik": fit.loglik,
        "aic": fit.aic,
        "bic": fit.bic,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "grad_norm": fit.grad_norm,
        "boundary_flags": boundary,
        "init": { "lambda1": fit.init_used.0, "phi1": fit.init_used.1 },
        "covariance_notes": fit.covariances.notes,
    })
}

fn cmd_fit(args: FitArgs) -> Result<i32> {
    let (y, digest) = read_counts_csv(&args.input)?;
    let cfg = FitConfig {
        mode: args.model.into(),
        max_iterations: args.max_iter,
        gradient_tolerance: args.tol,
        constraint: if args.unconstrained {
            ConstraintKind::None
        } else {
            ConstraintKind::PracticalSum
        },
        multistart: args.multistart,
        seed: args.seed,
        compute_covariances: true,
        warm_start: None,
        warm_start_only: false,
    };
    let manifest = RunManifest::new("fit")
        .flag("input", args.input.display())
        .flag("model", format!("{:?}", args.model).to_lowercase())
        .flag("multistart", args.multistart)
        .flag("max_iter", args.max_iter)
        .flag("tol", args.tol)
        .seed(args.seed)
        .input_digest(Some(digest));

    let result = fit(&y, &cfg)?;
    let doc = match args.bootstrap_ci {
        Some(b) => {
            let boot = bootstrap_uncertainty(&result, b, 0.95, args.seed)?;
            fit_document(
                &result,
                &manifest,
                Some(&boot.standard_errors),
                Some(&boot.percentile_cis),
                "bootstrap_percentile",
            )
        }
        None => {
            let ses = result.covariances.default_standard_errors();
            let cis = ses.map(|s| {
                let theta = result.free_estimates();
                theta
                    .iter()
                    .zip(s)
                    .map(|(&est, &se)| ((est - 1.96 * se).max(0.0), est + 1.96 * se))
                    .collect::<Vec<_>>()
            });
            fit_document(&result, &manifest, ses, cis.as_deref(), "normal_approx")
        }
    };
    emit_json(&doc, args.out.as_deref())?;
    if !result.converged {
        eprintln!("warning: optimizer did not converge; estimates are the best iterate");
        return Ok(3);
    }
    Ok(0)
}

fn cmd_test(args: TestArgs) -> Result<i32> {
    let (y, digest) = read_counts_csv(&args.input)?;
    let cfg = TestConfig::new(
        args.replications,
        args.variant.into(),
        args.significance,
        args.seed,
    );
    let manifest = RunManifest::new("test")
        .flag("input", args.input.display())
        .flag("variant", format!("{:?}", args.variant).to_lowercase())
        .flag("replications", args.replications)
        .flag("significance", args.significance)
        .seed(args.seed)
        .input_digest(Some(digest));
    let report = bootstrap_test(&y, &cfg)?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "manifest": manifest,
        "variant": match report.variant {
            BootstrapVariant::Restricted => "restricted",
            BootstrapVariant::Unrestricted => "unrestricted",
        },
        "replications": args.replications,
        "lr_observed": report.lr_observed,
        "p_value": report.p_value,
        "reject": report.reject,
        "significance": args.significance,
        "failed_replicates": report.failed_replicates,
        "reliable": report.reliable,
        "null_fit": { "estimates": param_json(&report.null_fit), "loglik": report.null_fit.loglik,
                      "aic": report.null_fit.aic, "bic": report.null_fit.bic,
                      "converged": report.null_fit.converged },
        "alt_fit": { "estimates": param_json(&report.alt_fit), "loglik": report.alt_fit.loglik,
                     "aic": report.alt_fit.aic, "bic": report.alt_fit.bic,
                     "converged": report.alt_fit.converged },
        "lr_replicates": report.lr_replicates,
    });
    emit_json(&doc, args.out.as_deref())?;
    if !report.reliable {
        eprintln!(
            "warning: {} of {} replicates failed; report unreliable",
            report.failed_replicates, args.replications
        );
        return Ok(3);
    }
    Ok(0)
}

fn cmd_forecast(args: ForecastArgs) -> Result<i32> {
    let (y, digest) = read_counts_csv(&args.input)?;
    let mut cfg = ForecastConfig::new(args.n0, args.point.into(), args.model.into());
    cfg.refit_every = args.refit_every;
    let manifest = RunManifest::new("forecast")
        .flag("input", args.input.display())
        .flag("n0", args.n0)
        .flag("point", format!("{:?}", args.point).to_lowercase())
        .flag("model", format!("{:?}", args.model).to_lowercase())
        .flag("refit_every", args.refit_every)
        .input_digest(Some(digest));
    let trace = rolling_forecast(&y, &cfg)?;
    write_forecast_csv(&args.trace_out, &trace, args.n0, &manifest)?;
    let failures = trace.refit_log.iter().filter(|r| !r.converged).count();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "manifest": manifest,
        "n": y.len(),
        "n0": args.n0,
        "predictions": trace.predictions.len(),
        "point": format!("{:?}", args.point).to_lowercase(),
        "model": format!("{:?}", args.model).to_lowercase(),
        "terminal_rmsfe": trace.terminal_rmsfe(),
        "nonconverged_steps": failures,
        "trace_csv": args.trace_out.display().to_string(),
    });
    emit_json(&doc, args.out.as_deref())?;
    Ok(0)
}

fn cmd_pit(args: PitArgs) -> Result<i32> {
    let (y, digest) = read_counts_csv(&args.input)?;
    let cfg = FitConfig {
        mode: args.model.into(),
        seed: args.seed,
        compute_covariances: false,
        ..FitConfig::default()
    };
    let result = fit(&y, &cfg)?;
    let path = latent_path(
        &result.theta_hat,
        &y,
        result.init_used.0,
        result.init_used.1,
        false,
    )?;
    let hist = pit(&y, &path, args.bins)?;
    let manifest = RunManifest::new("pit")
        .flag("input", args.input.display())
        .flag("model", format!("{:?}", args.model).to_lowercase())
        .flag("bins", args.bins)
        .seed(args.seed)
        .input_digest(Some(digest));
    if let Some(hist_path) = &args.hist_out {
        write_pit_csv(hist_path, &hist, &manifest)?;
    }
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "manifest": manifest,
        "model": format!("{:?}", args.model).to_lowercase(),
        "bins": args.bins,
        "bin_edges": hist.bin_edges,
        "bin_masses": hist.bin_masses,
        "uniformity_stat": hist.uniformity_stat,
        "p_value": hist.p_value,
        "fit": { "estimates": param_json(&result), "loglik": result.loglik,
                 "aic": result.aic, "bic": result.bic, "converged": result.converged },
    });
    emit_json(&doc, args.out.as_deref())?;
    Ok(0)
}

fn mc_theta(args: &McArgs) -> Result<ModelParams> {
    let base = match args.setting {
        Some(SettingFlag::I) => Some((15.0, 0.2, 0.25, 0.5, 0.1, 0.3)),
        Some(SettingFlag::Ii) => Some((3.0, 0.3, 0.15, 0.1, 0.2, 0.3)),
        Some(SettingFlag::C1) => Some((2.0, 0.4, 0.3, 1.0, 0.0, 0.0)),
        Some(SettingFlag::C2) => Some((2.0, 0.0, 0.0, 1.0, 0.0, 0.0)),
        Some(SettingFlag::C3) => Some((3.0, 0.3, 0.4, 0.5, 0.0, 0.0)),
        Some(SettingFlag::C4) => Some((3.0, 0.0, 0.0, 0.5, 0.0, 0.0)),
        None => None,
    };
    let (b0, b1, b2, a0, a1, a2) = base.unwrap_or((f64::NAN, 0.0, 0.0, f64::NAN, 0.0, 0.0));
    let beta0 = args.beta0.unwrap_or(b0);
    let alpha0 = args.alpha0.unwrap_or(a0);
    if !beta0.is_finite() || !alpha0.is_finite() {
        return Err(Error::Invalid(
            "provide --setting or explicit --beta0/--alpha0".into(),
        ));
    }
    ModelParams::new(
        beta0,
        args.beta1.unwrap_or(b1),
        args.beta2.unwrap_or(b2),
        alpha0,
        args.alpha1.unwrap_or(a1),
        args.alpha2.unwrap_or(a2),
    )
}

fn cmd_mc(args: McArgs) -> Result<i32> {
    let theta = mc_theta(&args)?;
    let experiment = match args.experiment {
        ExperimentFlag::Estimation => McExperiment::Estimation,
        ExperimentFlag::Level => McExperiment::TestLevel,
        ExperimentFlag::Power => McExperiment::TestPower,
    };
    let (default_reps, default_n, default_b) = match experiment {
        McExperiment::Estimation if args.full_scale => (1000, 1000, 0),
        McExperiment::Estimation => (200, 1000, 0),
        _ if args.full_scale => (500, 200, 500),
        _ => (100, 200, 199),
    };
    let design = McDesign {
        theta_true: theta,
        n: args.n.unwrap_or(default_n),
        replications: args.replications.unwrap_or(default_reps),
        seed: args.seed,
        experiment,
    };
    let manifest = RunManifest::new("mc")
        .flag("experiment", format!("{:?}", args.experiment).to_lowercase())
        .flag("n", design.n)
        .flag("replications", design.replications)
        .flag("theta", format!("{:?}", theta.as_array()))
        .flag("full_scale", args.full_scale)
        .seed(args.seed);

    let summary = match experiment {
        McExperiment::Estimation => run_estimation_study(&design)?,
        McExperiment::TestLevel | McExperiment::TestPower => {
            run_level_study(&design, args.bootstrap_b.unwrap_or(default_b))?
        }
    };

    // pooled normality summary of the standardized estimates
    let normality = if summary.standardized.is_empty() {
        Value::Null
    } else {
        let pooled: Vec<f64> = summary.standardized.iter().flatten().copied().collect();
        match anderson_darling_normal(&pooled) {
            Ok((a2, p)) => json!({ "anderson_darling": a2, "p_value": p }),
            Err(_) => Value::Null,
        }
    };

    if let Some(csv_path) = &args.csv_out {
        let mut out = String::new();
        out.push_str(&manifest.comment_line());
        out.push('\n');
        if summary.parameters.is_empty() {
            out.push_str("variant,nominal,rate\n");
            for r in &summary.rejection_rates {
                out.push_str(&format!("{},{},{}\n", r.variant, r.nominal, r.rate));
            }
        } else {
            out.push_str("parameter,truth,mean,sd,bias\n");
            for p in &summary.parameters {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    p.name, p.truth, p.mean, p.sd, p.bias
                ));
            }
        }
        std::fs::write(csv_path, out)?;
    }

    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "manifest": manifest,
        "design": design,
        "summary": summary,
        "normality": normality,
    });
    emit_json(&doc, args.out.as_deref())?;
    Ok(0)
}
