//! Reproducible studies built on the core modules, each producing a table
//! written as CSV with a JSON mirror.
//!
//! Every artifact starts with the fully resolved configuration and the
//! master seed, so it can be regenerated from its own header. Numerical
//! failures inside a row mark that row (and the artifact) instead of
//! aborting the run.

mod band;
mod duality;
mod profile;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sampling::StreamSeed;

pub use band::{run_band_experiment, BandConfig, BandReport, BandRow};
pub use duality::{run_duality, DualityCase, DualityConfig, DualityReport, DualityRow};
pub use profile::{run_density_profile, Grid, ProfileConfig, ProfileReport, ProfileRow};

/// Whether every row of an artifact was computed in full.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Complete,
    /// At least one row hit a numerical failure; those rows carry the reason.
    Incomplete,
}

/// A table that can be written as an artifact.
pub trait Table {
    type Row: Serialize;
    const KIND: &'static str;
    const COLUMNS: &'static [&'static str];

    fn rows(&self) -> &[Self::Row];
    fn record(row: &Self::Row) -> Vec<String>;
    fn status(&self) -> Status;
}

/// A 64-bit seed for sub-experiment `k`, independent across `k`.
pub fn derive_seed(master_seed: u64, k: u64) -> u64 {
    StreamSeed::new(master_seed, k).rng().next_u64()
}

/// Fixed 17-significant-digit rendering; lossless for every finite double.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Paths of the files written for one artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtifactPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
}

/// Render the CSV form: `#` comment lines with the configuration, then an
/// RFC 4180 table.
pub fn render_csv<T: Table, C: Serialize>(table: &T, config: &C, master_seed: Option<u64>) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let config_json = serde_json::to_string(config)?;
    write!(out, "# ropz {}\r\n", T::KIND)?;
    write!(out, "# config: {config_json}\r\n")?;
    if let Some(seed) = master_seed {
        write!(out, "# master_seed: {seed}\r\n")?;
    }
    write!(out, "# status: {}\r\n", status_str(table.status()))?;
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(&mut out);
        w.write_record(T::COLUMNS).map_err(csv_err)?;
        for row in table.rows() {
            w.write_record(T::record(row)).map_err(csv_err)?;
        }
        w.flush()?;
    }
    Ok(out)
}

/// Render the JSON mirror `{kind, config, master_seed, status, rows}`.
pub fn render_json<T: Table, C: Serialize>(table: &T, config: &C, master_seed: Option<u64>) -> Result<Vec<u8>> {
    #[derive(Serialize)]
    struct Mirror<'a, C, R> {
        kind: &'static str,
        config: &'a C,
        #[serde(skip_serializing_if = "Option::is_none")]
        master_seed: Option<u64>,
        status: Status,
        rows: &'a [R],
    }
    let mut out = serde_json::to_vec_pretty(&Mirror {
        kind: T::KIND,
        config,
        master_seed,
        status: table.status(),
        rows: table.rows(),
    })?;
    out.push(b'\n');
    Ok(out)
}

/// Write `<dir>/<name>.csv` and `<dir>/<name>.json`, creating `dir`.
pub fn write_artifacts<T: Table, C: Serialize>(
    dir: &Path,
    name: &str,
    table: &T,
    config: &C,
    master_seed: Option<u64>,
) -> Result<ArtifactPaths> {
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(Error::Config(format!("artifact name {name:?} must be a plain file stem")));
    }
    fs::create_dir_all(dir)?;
    let paths = ArtifactPaths {
        csv: dir.join(format!("{name}.csv")),
        json: dir.join(format!("{name}.json")),
    };
    fs::write(&paths.csv, render_csv(table, config, master_seed)?)?;
    fs::write(&paths.json, render_json(table, config, master_seed)?)?;
    Ok(paths)
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Complete => "complete",
        Status::Incomplete => "incomplete",
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Apply `key.sub=value` overrides to a JSON config. Values are parsed as
/// JSON when possible and taken as strings otherwise; intermediate objects
/// are created as needed.
pub fn apply_overrides(config: &mut Value, overrides: &[String]) -> Result<()> {
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {item:?} is not key=value")))?;
        if key.is_empty() || key.split('.').any(str::is_empty) {
            return Err(Error::Config(format!("override key {key:?} is malformed")));
        }
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut node = &mut *config;
        let parts: Vec<&str> = key.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            let obj = match node {
                Value::Object(map) => map,
                other if other.is_null() => {
                    *other = Value::Object(Default::default());
                    other.as_object_mut().expect("just created")
                }
                _ => {
                    return Err(Error::Config(format!(
                        "override {key:?}: {:?} is not an object",
                        parts[..i].join(".")
                    )))
                }
            };
            if i + 1 == parts.len() {
                obj.insert(part.to_string(), value.clone());
                break;
            }
            node = obj.entry(part.to_string()).or_insert(Value::Null);
        }
    }
    Ok(())
}

/// Parse a config from JSON text, accepting either a bare config or an
/// artifact's JSON mirror (whose `config` field is used).
pub fn parse_config<C: for<'de> Deserialize<'de>>(text: &str, overrides: &[String]) -> Result<C> {
    let mut value: Value = serde_json::from_str(text)?;
    if let Value::Object(map) = &value {
        if map.contains_key("rows") && map.contains_key("kind") {
            value = map.get("config").cloned().unwrap_or(Value::Null);
        }
    }
    apply_overrides(&mut value, overrides)?;
    Ok(serde_json::from_value(value)?)
}

fn default_exclusion() -> crate::basis::Exclusion {
    crate::basis::Exclusion::default()
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}
