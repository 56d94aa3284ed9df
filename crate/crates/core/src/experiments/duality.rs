use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use super::{derive_seed, fmt_f64, positive, Status, Table};
use crate::basis::ModelSpec;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_rho, QuadOptions};
use crate::region::Region;
use crate::sampling::{mc_expected_zeros, CountOptions, McOptions, MIN_SAMPLES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualityCase {
    pub model: ModelSpec,
    pub n: usize,
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualityConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub cases: Vec<DualityCase>,
    pub samples: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub quadrature: QuadOptions,
    #[serde(default)]
    pub count: CountOptions,
    /// Directory for per-case JSON-lines sample logs.
    #[serde(default)]
    pub audit_dir: Option<PathBuf>,
}

fn default_name() -> String {
    "duality".into()
}

/// Smallest sample count accepted for a duality run.
pub const MIN_DUALITY_SAMPLES: usize = 1000;
/// `|z|` above which a row is flagged as a failure.
pub const FLAG_Z: f64 = 4.0;

impl DualityConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cases.is_empty() {
            return Err(Error::Config("cases must not be empty".into()));
        }
        if self.samples < MIN_DUALITY_SAMPLES.max(MIN_SAMPLES) {
            return Err(Error::Config(format!(
                "duality needs at least {MIN_DUALITY_SAMPLES} samples, got {}",
                self.samples
            )));
        }
        for (k, case) in self.cases.iter().enumerate() {
            case.model.build().map_err(|e| Error::Config(format!("case {k}: {e}")))?;
            case.region.validate().map_err(|e| Error::Config(format!("case {k}: {e}")))?;
        }
        positive("quadrature.tol", self.quadrature.tol)?;
        self.quadrature.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.count.validate().map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityRow {
    pub case: usize,
    pub family: String,
    pub n: usize,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub mc_exhausted: usize,
    pub quad_value: f64,
    pub quad_error: f64,
    /// `(mc_mean - quad_value) / mc_stderr`, 0 when both agree exactly.
    pub z_score: f64,
    /// `|mc_mean - quad_value| <= 3 mc_stderr + tol`.
    pub agrees: bool,
    /// `|z_score| > 4`.
    pub flagged: bool,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub rows: Vec<DualityRow>,
}

impl DualityReport {
    pub fn agreeing(&self) -> usize {
        self.rows.iter().filter(|r| r.agrees).count()
    }
}

impl Table for DualityReport {
    type Row = DualityRow;
    const KIND: &'static str = "duality";
    const COLUMNS: &'static [&'static str] = &[
        "case",
        "family",
        "n",
        "mc_mean",
        "mc_stderr",
        "mc_exhausted",
        "quad_value",
        "quad_error",
        "z_score",
        "agrees",
        "flagged",
        "error",
    ];

    fn rows(&self) -> &[DualityRow] {
        &self.rows
    }

    fn record(r: &DualityRow) -> Vec<String> {
        vec![
            r.case.to_string(),
            r.family.clone(),
            r.n.to_string(),
            fmt_f64(r.mc_mean),
            fmt_f64(r.mc_stderr),
            r.mc_exhausted.to_string(),
            fmt_f64(r.quad_value),
            fmt_f64(r.quad_error),
            fmt_f64(r.z_score),
            r.agrees.to_string(),
            r.flagged.to_string(),
            r.error.clone(),
        ]
    }

    fn status(&self) -> Status {
        if self
            .rows
            .iter()
            .any(|r| !r.error.is_empty() || r.mc_exhausted > 0)
        {
            Status::Incomplete
        } else {
            Status::Complete
        }
    }
}

/// Monte Carlo zero counts against quadrature of `ρ_n` for each case.
/// Case `k` uses the master seed `derive_seed(master_seed, k)`.
pub fn run_duality(cfg: &DualityConfig) -> Result<DualityReport> {
    cfg.validate()?;
    if let Some(dir) = &cfg.audit_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut rows = Vec::with_capacity(cfg.cases.len());
    for (k, case) in cfg.cases.iter().enumerate() {
        let model = case.model.build()?;
        let mut row = DualityRow {
            case: k,
            family: case.model.name().to_string(),
            n: case.n,
            mc_mean: f64::NAN,
            mc_stderr: f64::NAN,
            mc_exhausted: 0,
            quad_value: f64::NAN,
            quad_error: f64::NAN,
            z_score: f64::NAN,
            agrees: false,
            flagged: true,
            error: String::new(),
        };
        let mut errors = Vec::new();
        match integrate_rho(&model, case.n, &case.region, &cfg.quadrature) {
            Ok(q) => {
                row.quad_value = q.value;
                row.quad_error = q.error_estimate;
            }
            Err(Error::BudgetExceeded { best }) => {
                row.quad_value = best.value;
                row.quad_error = best.error_estimate;
                errors.push(format!("quadrature budget exceeded after {} cells", best.cells));
            }
            Err(e) if e.is_numerical() => errors.push(e.to_string()),
            Err(e) => return Err(e),
        }
        let opts = McOptions {
            count: cfg.count,
            audit_log: cfg
                .audit_dir
                .as_ref()
                .map(|d| d.join(format!("{}-case{k}.jsonl", cfg.name))),
            ..Default::default()
        };
        let seed = derive_seed(cfg.master_seed, k as u64);
        match mc_expected_zeros(&model, case.n, &case.region, cfg.samples, seed, &opts) {
            Ok(est) => {
                row.mc_mean = est.mean;
                row.mc_stderr = est.stderr;
                row.mc_exhausted = est.exhausted;
            }
            Err(e) if e.is_numerical() => errors.push(e.to_string()),
            Err(e) => return Err(e),
        }
        let diff = row.mc_mean - row.quad_value;
        row.z_score = if row.mc_stderr > 0.0 {
            diff / row.mc_stderr
        } else if diff.abs() <= cfg.quadrature.tol {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        };
        row.agrees = diff.abs() <= 3.0 * row.mc_stderr + cfg.quadrature.tol;
        row.flagged = !(row.z_score.abs() <= FLAG_Z);
        row.error = errors.join("; ");
        rows.push(row);
    }
    Ok(DualityReport { rows })
}
