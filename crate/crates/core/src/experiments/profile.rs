use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{default_exclusion, fmt_f64, fmt_opt, Status, Table};
use crate::basis::{Exclusion, Model, ModelSpec};
use crate::error::{Error, Result};
use crate::intensity::{rho, rho_limit_opuc, rho_limit_oprl};

/// Rectangular evaluation grid including its edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    fn axis(lo: f64, hi: f64, k: usize, count: usize) -> f64 {
        if count == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * k as f64 / (count - 1) as f64
        }
    }

    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for j in 0..self.ny {
            for i in 0..self.nx {
                out.push(Complex64::new(
                    Self::axis(self.x[0], self.x[1], i, self.nx),
                    Self::axis(self.y[0], self.y[1], j, self.ny),
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub model: ModelSpec,
    pub degrees: Vec<usize>,
    pub grid: Grid,
    #[serde(default = "default_exclusion")]
    pub exclusion: Exclusion,
}

fn default_name() -> String {
    "profile".into()
}

impl ProfileConfig {
    pub fn validate(&self) -> Result<Model> {
        let model = self.model.build()?;
        if self.degrees.is_empty() {
            return Err(Error::Config("degrees must not be empty".into()));
        }
        let g = &self.grid;
        if g.nx == 0 || g.ny == 0 || g.nx * g.ny > 10_000_000 {
            return Err(Error::Config(format!(
                "grid needs 1 <= nx*ny <= 1e7 points, got {} x {}",
                g.nx, g.ny
            )));
        }
        if !(g.x.iter().chain(&g.y).all(|v| v.is_finite()) && g.x[0] <= g.x[1] && g.y[0] <= g.y[1]) {
            return Err(Error::Config(format!("grid ranges are invalid: {:?}, {:?}", g.x, g.y)));
        }
        self.exclusion.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub n: usize,
    pub x: f64,
    pub y: f64,
    pub rho: Option<f64>,
    /// Limiting density where the family has one and it is defined at `z`.
    pub rho_limit: Option<f64>,
    pub abs_diff: Option<f64>,
    /// Empty when the row is complete; otherwise why `rho` is missing.
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub rows: Vec<ProfileRow>,
}

impl ProfileReport {
    /// Largest `|ρ_n - ρ_limit|` over the grid for degree `n`.
    pub fn max_abs_diff(&self, n: usize) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.n == n)
            .filter_map(|r| r.abs_diff)
            .reduce(f64::max)
    }

    pub fn aborted(&self) -> impl Iterator<Item = &ProfileRow> {
        self.rows.iter().filter(|r| !r.error.is_empty())
    }
}

impl Table for ProfileReport {
    type Row = ProfileRow;
    const KIND: &'static str = "profile";
    const COLUMNS: &'static [&'static str] =
        &["n", "x", "y", "rho", "rho_limit", "abs_diff", "error"];

    fn rows(&self) -> &[ProfileRow] {
        &self.rows
    }

    fn record(r: &ProfileRow) -> Vec<String> {
        vec![
            r.n.to_string(),
            fmt_f64(r.x),
            fmt_f64(r.y),
            fmt_opt(r.rho),
            fmt_opt(r.rho_limit),
            fmt_opt(r.abs_diff),
            r.error.clone(),
        ]
    }

    fn status(&self) -> Status {
        if self.aborted().next().is_some() {
            Status::Incomplete
        } else {
            Status::Complete
        }
    }
}

fn limit_at(model: &Model, z: Complex64) -> Option<f64> {
    match model {
        Model::Oprl(rec) => rho_limit_oprl(&rec.limit(), z).ok(),
        Model::Opuc(v) if v.is_nevai() => rho_limit_opuc(z).ok(),
        Model::Opuc(_) => None,
    }
}

/// `ρ_n` and its Nevai-class limit on a grid, for every requested degree.
/// A failing point aborts its row only.
pub fn run_density_profile(cfg: &ProfileConfig) -> Result<ProfileReport> {
    let model = cfg.validate()?;
    let points = cfg.grid.points();
    let limits: Vec<Option<f64>> = points.par_iter().map(|&z| limit_at(&model, z)).collect();
    let mut rows = Vec::with_capacity(points.len() * cfg.degrees.len());
    for &n in &cfg.degrees {
        let block: Vec<ProfileRow> = points
            .par_iter()
            .zip(&limits)
            .map(|(&z, &rho_limit)| match rho(&model, n, z, &cfg.exclusion) {
                Ok(value) => ProfileRow {
                    n,
                    x: z.re,
                    y: z.im,
                    rho: Some(value),
                    rho_limit,
                    abs_diff: rho_limit.map(|l| (value - l).abs()),
                    error: String::new(),
                },
                Err(e) => ProfileRow {
                    n,
                    x: z.re,
                    y: z.im,
                    rho: None,
                    rho_limit,
                    abs_diff: None,
                    error: e.to_string(),
                },
            })
            .collect();
        rows.extend(block);
    }
    Ok(ProfileReport { rows })
}
