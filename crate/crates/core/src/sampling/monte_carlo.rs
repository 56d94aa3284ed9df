use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use super::{count_zeros, sample_instance, CountOptions, StreamSeed};
use crate::basis::Model;
use crate::error::{Error, Result};
use crate::region::Region;

/// Mean and standard error of a zero count over independent instances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`.
    pub stderr: f64,
    /// Samples that produced a count.
    pub samples: usize,
    pub master_seed: u64,
    /// Jittered re-walks over all samples.
    pub retries: usize,
    /// Samples whose boundary could not be cleared of zeros; excluded from
    /// the mean. Nonzero only with probability zero.
    pub exhausted: usize,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McOptions {
    pub count: CountOptions,
    pub max_degree: usize,
    /// Optional JSON-lines log with one record per sample.
    pub audit_log: Option<PathBuf>,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            count: CountOptions::default(),
            max_degree: 1000,
            audit_log: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct AuditRecord {
    index: u64,
    count: Option<usize>,
    retries: usize,
    evals: usize,
    error: Option<String>,
}

/// Minimum sample count for a meaningful standard error.
pub const MIN_SAMPLES: usize = 100;

/// `E[N_n(region)]` by counting zeros of `samples` independent instances.
/// Sample `i` always uses stream `(master_seed, i)`, and the sums are over
/// integers, so the result does not depend on the thread pool.
pub fn mc_expected_zeros(
    model: &Model,
    n: usize,
    region: &Region,
    samples: usize,
    master_seed: u64,
    opts: &McOptions,
) -> Result<MCEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "Monte Carlo needs at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    if n > opts.max_degree {
        return Err(Error::InvalidArgument(format!(
            "degree {n} exceeds the Monte Carlo limit {}",
            opts.max_degree
        )));
    }
    opts.count.validate()?;
    region.validate()?;
    let model = Arc::new(model.clone());
    let outcomes: Vec<Result<super::ZeroCount>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let inst = sample_instance(Arc::clone(&model), n, StreamSeed::new(master_seed, i));
            count_zeros(&inst, region, &opts.count)
        })
        .collect();

    if let Some(path) = &opts.audit_log {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        for (i, o) in outcomes.iter().enumerate() {
            let rec = match o {
                Ok(c) => AuditRecord {
                    index: i as u64,
                    count: Some(c.count),
                    retries: c.retries,
                    evals: c.evals,
                    error: None,
                },
                Err(e) => AuditRecord {
                    index: i as u64,
                    count: None,
                    retries: opts.count.max_retries,
                    evals: 0,
                    error: Some(e.to_string()),
                },
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
    }

    let mut sum: u128 = 0;
    let mut sum_sq: u128 = 0;
    let mut ok = 0usize;
    let mut retries = 0usize;
    let mut exhausted = 0usize;
    let mut evaluations = 0u64;
    for o in outcomes {
        match o {
            Ok(c) => {
                sum += c.count as u128;
                sum_sq += (c.count as u128).pow(2);
                ok += 1;
                retries += c.retries;
                evaluations += c.evals as u64;
            }
            Err(Error::BoundaryZero { retries: r }) => {
                exhausted += 1;
                retries += r;
            }
            Err(e) => return Err(e),
        }
    }
    let (mean, stderr) = moments(sum, sum_sq, ok);
    Ok(MCEstimate {
        mean,
        stderr,
        samples: ok,
        master_seed,
        retries,
        exhausted,
        evaluations,
    })
}

/// Mean and standard error from exact integer power sums.
fn moments(sum: u128, sum_sq: u128, count: usize) -> (f64, f64) {
    if count == 0 {
        return (f64::NAN, f64::NAN);
    }
    let n = count as f64;
    let mean = sum as f64 / n;
    if count < 2 {
        return (mean, f64::NAN);
    }
    // count * Σc² - (Σc)² is exact and nonnegative.
    let spread = (count as u128) * sum_sq - sum * sum;
    let var = spread as f64 / (n * (n - 1.0));
    (mean, (var / n).sqrt())
}

/// Expected zeros in the strip `|Im z| < eps`, `|Re z| <= half_length`.
pub fn real_axis_mass_probe(
    model: &Model,
    n: usize,
    samples: usize,
    eps: f64,
    half_length: f64,
    master_seed: u64,
    opts: &McOptions,
) -> Result<MCEstimate> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "strip half-width must be positive, got {eps}"
        )));
    }
    let strip = Region::rectangle(Complex64::new(0.0, 0.0), half_length, eps);
    mc_expected_zeros(model, n, &strip, samples, master_seed, opts)
}
