//! File formats: counts CSV in/out, latent-path and forecast traces, PIT
//! histograms, and the run manifest embedded in every output.
//!
//! Counts files are a single column of nonnegative integers or two columns
//! `label,count`, with an optional header line. Lines starting with `#` are
//! comments; outputs written by this crate carry their manifest in one such
//! comment, so they round-trip through the reader.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::forecast::ForecastTrace;
use crate::model::{CountSeries, LatentPath};
use crate::{Error, Result};

/// Provenance block embedded in every output file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Parsed flag values, keyed by flag name.
    pub flags: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// SHA-256 of the input file bytes, when an input file was read.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        Self {
            tool: "tvd".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            flags: BTreeMap::new(),
            seed: None,
            input_digest: None,
        }
    }

    pub fn flag(mut self, key: &str, value: impl ToString) -> Self {
        self.flags.insert(key.into(), value.to_string());
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn input_digest(mut self, digest: impl Into<Option<String>>) -> Self {
        self.input_digest = digest.into();
        self
    }

    /// Single-line comment form for CSV outputs.
    pub fn comment_line(&self) -> String {
        format!(
            "# manifest: {}",
            serde_json::to_string(self).expect("manifest serializes")
        )
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Read a counts CSV file, returning the series and the file digest.
pub fn read_counts_csv(path: &Path) -> Result<(CountSeries, String)> {
    let bytes = fs::read(path)?;
    let digest = sha256_hex(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::Invalid(format!("{} is not UTF-8", path.display())))?;
    Ok((parse_counts_csv(&text)?, digest))
}

/// Parse counts CSV text. See the module docs for the accepted shapes.
pub fn parse_counts_csv(text: &str) -> Result<CountSeries> {
    let mut counts = Vec::new();
    let mut labels = Vec::new();
    let mut saw_data = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let (label, value) = match fields.len() {
            1 => (None, fields[0]),
            2 => (Some(fields[0]), fields[1]),
            n => {
                return Err(Error::Csv {
                    line: line_no,
                    msg: format!("expected 1 or 2 columns, found {n}"),
                })
            }
        };
        match value.parse::<u64>() {
            Ok(v) => {
                if let Some(l) = label {
                    labels.push(l.to_string());
                }
                counts.push(v);
                saw_data = true;
            }
            Err(_) => {
                // a non-numeric first record is a header; anywhere else it
                // is malformed data
                if !saw_data && counts.is_empty() {
                    continue;
                }
                return Err(Error::Csv {
                    line: line_no,
                    msg: format!("`{value}` is not a nonnegative integer"),
                });
            }
        }
    }
    if counts.is_empty() {
        return Err(Error::Invalid("no count records found".into()));
    }
    if !labels.is_empty() && labels.len() != counts.len() {
        return Err(Error::Invalid(
            "mixed one- and two-column rows in counts file".into(),
        ));
    }
    if labels.is_empty() {
        Ok(CountSeries::new(counts))
    } else {
        CountSeries::with_labels(counts, labels)
    }
}

pub fn write_counts_csv(path: &Path, y: &CountSeries, manifest: &RunManifest) -> Result<()> {
    let mut out = String::new();
    out.push_str(&manifest.comment_line());
    out.push('\n');
    out.push_str("t,count\n");
    for (i, &c) in y.counts().iter().enumerate() {
        match y.labels() {
            Some(labels) => out.push_str(&format!("{},{}\n", labels[i], c)),
            None => out.push_str(&format!("{},{}\n", i + 1, c)),
        }
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_latent_csv(
    path: &Path,
    y: &CountSeries,
    latent: &LatentPath,
    manifest: &RunManifest,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&manifest.comment_line());
    out.push('\n');
    out.push_str("t,count,lambda,phi\n");
    for (i, &c) in y.counts().iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i + 1,
            c,
            latent.lambda[i],
            latent.phi[i]
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Per-step forecast trace: `t, y, yhat, lambda, phi, rmsfe`.
pub fn write_forecast_csv(
    path: &Path,
    trace: &ForecastTrace,
    n0: usize,
    manifest: &RunManifest,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&manifest.comment_line());
    out.push('\n');
    out.push_str("t,y,yhat,lambda,phi,rmsfe\n");
    for (k, &yhat) in trace.predictions.iter().enumerate() {
        let (lam, phi) = trace.predictive_params[k];
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            n0 + k + 1,
            trace.actuals[k],
            yhat,
            lam,
            phi,
            trace.rmsfe[k]
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// PIT histogram rows: `bin_low, bin_high, mass`.
pub fn write_pit_csv(
    path: &Path,
    hist: &crate::diagnostics::PitHistogram,
    manifest: &RunManifest,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&manifest.comment_line());
    out.push('\n');
    out.push_str("bin_low,bin_high,mass\n");
    for (j, &m) in hist.bin_masses.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            hist.bin_edges[j],
            hist.bin_edges[j + 1],
            m
        ));
    }
    fs::write(path, out)?;
    Ok(())
}
