use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{derive_seed, fmt_f64, positive, Status, Table};
use crate::basis::{ust_regularity_diagnostic, Model, ModelSpec, VerblunskySequence};
use crate::error::{Error, Result};
use crate::intensity::band_limit_rhs;
use crate::quadrature::{band_mass, QuadOptions};
use crate::region::Region;
use crate::sampling::{mc_expected_zeros, CountOptions, McOptions, MIN_SAMPLES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_model")]
    pub model: ModelSpec,
    pub degrees: Vec<usize>,
    /// Arc `S = {e^{iθ} : theta[0] <= θ <= theta[1]}`.
    pub theta: [f64; 2],
    pub tau: [f64; 2],
    pub samples: usize,
    pub master_seed: u64,
    /// Minimum angular distance of `S` from `±1`.
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub quadrature: QuadOptions,
    #[serde(default)]
    pub count: CountOptions,
}

fn default_name() -> String {
    "band".into()
}

fn default_model() -> ModelSpec {
    ModelSpec::Lebesgue {}
}

fn default_margin() -> f64 {
    0.1
}

impl BandConfig {
    /// Check the arc and tail hypotheses; returns the circle family.
    pub fn validate(&self) -> Result<VerblunskySequence> {
        let v = match self.model.build()? {
            Model::Opuc(v) => v,
            Model::Oprl(_) => {
                return Err(Error::Config(
                    "band experiments need a unit-circle family".into(),
                ))
            }
        };
        if !v.is_nevai() {
            return Err(Error::Config(
                "band experiments need Verblunsky coefficients tending to 0".into(),
            ));
        }
        if self.degrees.is_empty() || self.degrees.contains(&0) {
            return Err(Error::Config("degrees must be nonempty and positive".into()));
        }
        let [t1, t2] = self.theta;
        let m = self.margin;
        positive("margin", m)?;
        let upper = t1 >= PI + m && t2 <= 2.0 * PI - m;
        let lower = t1 >= m && t2 <= PI - m;
        if !(t1 < t2 && (upper || lower)) {
            return Err(Error::Config(format!(
                "arc [{t1}, {t2}] must lie in [{m}, π-{m}] or [π+{m}, 2π-{m}], away from ±1"
            )));
        }
        let [a, b] = self.tau;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Config(format!("tau must satisfy tau1 < tau2, got {:?}", self.tau)));
        }
        for &n in &self.degrees {
            if a <= -2.0 * n as f64 {
                return Err(Error::Config(format!(
                    "tau1 = {a} reaches the origin at n = {n}"
                )));
            }
        }
        if self.samples < MIN_SAMPLES {
            return Err(Error::Config(format!(
                "band experiments need at least {MIN_SAMPLES} samples, got {}",
                self.samples
            )));
        }
        self.quadrature.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.count.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandRow {
    pub n: usize,
    /// `E[N]/n` by Monte Carlo.
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub mc_exhausted: usize,
    /// `E[N]/n` by quadrature.
    pub quad_value: f64,
    pub quad_error: f64,
    pub rhs_limit: f64,
    pub ust_diagnostic: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    pub rows: Vec<BandRow>,
}

impl Table for BandReport {
    type Row = BandRow;
    const KIND: &'static str = "band";
    const COLUMNS: &'static [&'static str] = &[
        "n",
        "mc_mean",
        "mc_stderr",
        "mc_exhausted",
        "quad_value",
        "quad_error",
        "rhs_limit",
        "ust_diagnostic",
        "error",
    ];

    fn rows(&self) -> &[BandRow] {
        &self.rows
    }

    fn record(r: &BandRow) -> Vec<String> {
        vec![
            r.n.to_string(),
            fmt_f64(r.mc_mean),
            fmt_f64(r.mc_stderr),
            r.mc_exhausted.to_string(),
            fmt_f64(r.quad_value),
            fmt_f64(r.quad_error),
            fmt_f64(r.rhs_limit),
            fmt_f64(r.ust_diagnostic),
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

/// Per-degree zero counts in `Ω(S, τ1, τ2)` by Monte Carlo and quadrature,
/// beside the limiting value. Degree `k` in the list uses the master seed
/// `derive_seed(master_seed, k)`.
pub fn run_band_experiment(cfg: &BandConfig) -> Result<BandReport> {
    let v = cfg.validate()?;
    let model = Model::Opuc(v.clone());
    let [t1, t2] = cfg.theta;
    let [tau1, tau2] = cfg.tau;
    let rhs = band_limit_rhs(t2 - t1, tau1, tau2)?;
    let mut rows = Vec::with_capacity(cfg.degrees.len());
    for (k, &n) in cfg.degrees.iter().enumerate() {
        let per_n = n as f64;
        let mut row = BandRow {
            n,
            mc_mean: f64::NAN,
            mc_stderr: f64::NAN,
            mc_exhausted: 0,
            quad_value: f64::NAN,
            quad_error: f64::NAN,
            rhs_limit: rhs,
            ust_diagnostic: ust_regularity_diagnostic(&v, n)?,
            error: String::new(),
        };
        let mut errors = Vec::new();
        match band_mass(&v, n, (t1, t2), (tau1, tau2), &cfg.quadrature) {
            Ok(b) => {
                row.quad_value = b.per_degree;
                row.quad_error = b.mass.error_estimate / per_n;
            }
            Err(Error::BudgetExceeded { best }) => {
                row.quad_value = best.value / per_n;
                row.quad_error = best.error_estimate / per_n;
                errors.push(format!("quadrature budget exceeded after {} cells", best.cells));
            }
            Err(e) if e.is_numerical() => errors.push(e.to_string()),
            Err(e) => return Err(e),
        }
        let region = Region::band(t1, t2, tau1, tau2, n);
        let opts = McOptions {
            count: cfg.count,
            ..Default::default()
        };
        let seed = derive_seed(cfg.master_seed, k as u64);
        match mc_expected_zeros(&model, n, &region, cfg.samples, seed, &opts) {
            Ok(est) => {
                row.mc_mean = est.mean / per_n;
                row.mc_stderr = est.stderr / per_n;
                row.mc_exhausted = est.exhausted;
            }
            Err(e) if e.is_numerical() => errors.push(e.to_string()),
            Err(e) => return Err(e),
        }
        row.error = errors.join("; ");
        rows.push(row);
    }
    Ok(BandReport { rows })
}
