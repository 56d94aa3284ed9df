//! Command-line front end: point evaluations, diagnostics and the three
//! experiments.
//!
//! Exit status is 0 on success, 1 for configuration or usage errors and 2
//! when a numerical failure left a result incomplete. Artifacts of an
//! incomplete run are still written and carry `status: incomplete`.

mod complex;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

use ropz::basis::{leading_coeff_opuc, ust_regularity_diagnostic, Exclusion, Model, ModelSpec};
use ropz::experiments::{
    parse_config, run_band_experiment, run_density_profile, run_duality, write_artifacts,
    ArtifactPaths, BandConfig, DualityConfig, ProfileConfig, Status, Table,
};
use ropz::intensity::{rho, rho_direct, rho_general, rho_limit_opuc, rho_limit_oprl};
use ropz::kernels::{kernel_cd_opuc, kernel_cd_oprl};
use ropz::quadrature::{total_mass_parts, QuadOptions};

pub use complex::{format_complex, parse_complex, ParseComplexError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<ropz::Error> for CliError {
    fn from(e: ropz::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

fn families_help() -> String {
    format!("Model families: {}", ModelSpec::FAMILIES.join(", "))
}

#[derive(Debug, Parser)]
#[command(
    name = "ropz",
    version,
    about = "Zero intensity of random orthogonal polynomials with complex Gaussian coefficients",
    after_help = families_help()
)]
pub struct Cli {
    /// Worker threads for Monte Carlo and quadrature; results do not depend on it.
    #[arg(long, global = true, env = "ROPZ_WORKERS", value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate ρ_n at one point by every available form.
    Rho(RhoArgs),
    /// Grid of ρ_n against its limiting density.
    Profile(ExperimentArgs),
    /// Monte Carlo zero counts against quadrature of ρ_n.
    Duality(ExperimentArgs),
    /// Zero counts in thin bands around an arc of the unit circle.
    Band(ExperimentArgs),
    /// Integral of ρ_n over the whole plane (equals n).
    TotalMass(TotalMassArgs),
    /// Leading coefficient and regularity diagnostics of a basis.
    Diag(DiagArgs),
}

/// Selects a basis family from flags or a JSON object.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Named family.
    #[arg(long, value_parser = PossibleValuesParser::new(ModelSpec::FAMILIES), required_unless_present = "model_json")]
    pub model: Option<String>,
    /// Off-diagonal limit `a` (nevai-ab).
    #[arg(long)]
    pub a: Option<f64>,
    /// Diagonal limit `b` (nevai-ab).
    #[arg(long)]
    pub b: Option<f64>,
    /// Coefficient scale `c` (geometric-alpha, constant-alpha).
    #[arg(long)]
    pub c: Option<f64>,
    /// Geometric ratio `r` (geometric-alpha).
    #[arg(long)]
    pub r: Option<f64>,
    /// Full family object, e.g. '{"family":"jacobi","a":[1.0],"b":[0.0],"tail_a":0.5,"tail_b":0.0}'.
    #[arg(long, conflicts_with_all = ["model", "a", "b", "c", "r"])]
    pub model_json: Option<String>,
}

impl ModelArgs {
    pub fn spec(&self) -> Result<ModelSpec, CliError> {
        let value = match (&self.model_json, &self.model) {
            (Some(text), _) => serde_json::from_str(text)
                .map_err(|e| CliError::Config(format!("--model-json: {e}")))?,
            (None, Some(name)) => {
                let mut obj = json!({ "family": name });
                for (key, v) in [("a", self.a), ("b", self.b), ("c", self.c), ("r", self.r)] {
                    if let Some(v) = v {
                        obj[key] = json!(v);
                    }
                }
                obj
            }
            (None, None) => return Err(CliError::Config("a model is required".into())),
        };
        serde_json::from_value::<ModelSpec>(value)
            .map_err(|e| CliError::Config(format!("model: {e}")))
    }
}

#[derive(Debug, Args)]
pub struct RhoArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Degree bound n.
    #[arg(long)]
    pub n: usize,
    /// Evaluation point, e.g. 0.5+1e-3i.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex_arg)]
    pub z: Complex64,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

fn parse_complex_arg(s: &str) -> Result<Complex64, String> {
    parse_complex(s).map_err(|e| format!("\n{e}"))
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON config file (a previous artifact's JSON mirror also works).
    #[arg(long)]
    pub config: PathBuf,
    /// Override a config key, e.g. --set samples=4000 --set model.c=0.2.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Override the master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for the CSV and JSON artifacts.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TotalMassArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Degree bound n.
    #[arg(long)]
    pub n: usize,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct DiagArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Degree bound n.
    #[arg(long)]
    pub n: usize,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

/// Ten significant digits, fixed-point when the magnitude allows.
pub fn sig10(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..10).contains(&mag) {
        format!("{:.*}", (9 - mag).max(0) as usize, x)
    } else {
        format!("{x:.9e}")
    }
}

/// Run a parsed invocation, writing human-readable output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(k) = cli.workers {
            b = b.num_threads(k as usize);
        }
        b.build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
    };
    // Output is buffered inside the pool and flushed afterwards, also on error.
    let mut buf = Vec::new();
    let result = pool.install(|| {
        let out = &mut buf;
        match cli.command {
            Command::Rho(args) => cmd_rho(args, out),
            Command::Profile(args) => cmd_profile(args, out),
            Command::Duality(args) => cmd_duality(args, out),
            Command::Band(args) => cmd_band(args, out),
            Command::TotalMass(args) => cmd_total_mass(args, out),
            Command::Diag(args) => cmd_diag(args, out),
        }
    });
    out.write_all(&buf)?;
    result
}

/// Parse `argv`, run, and map the outcome to an exit status. Help and
/// version requests exit 0; usage errors exit 1.
pub fn main_with_args<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    1
                }
            };
        }
    };
    match run(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[derive(Debug, Serialize)]
struct RhoReport {
    model: ModelSpec,
    n: usize,
    z: String,
    rho: f64,
    direct: f64,
    closed_form_kernels: Result<f64, String>,
    ratio_form: Result<f64, String>,
    limit: Option<Result<f64, String>>,
}

fn cmd_rho(args: RhoArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = args.model.spec()?;
    let model = spec.build()?;
    let z = args.z;
    let n = args.n;
    let excl = Exclusion::default();
    let preferred = rho(&model, n, z, &excl)?;
    let direct = rho_direct(&model, n, z)?;
    let cd = match &model {
        Model::Oprl(rec) => kernel_cd_oprl(rec, n, z, excl.axis),
        Model::Opuc(v) => kernel_cd_opuc(v, n, z, excl.circle),
    }
    .and_then(|kd| rho_general(&kd))
    .map_err(|e| e.to_string());
    let ratio = ratio_only(&model, n, z, &excl);
    let limit = match &model {
        Model::Oprl(rec) => Some(rho_limit_oprl(&rec.limit(), z)),
        Model::Opuc(v) if v.is_nevai() => Some(rho_limit_opuc(z)),
        Model::Opuc(_) => None,
    }
    .map(|r| r.map_err(|e| e.to_string()));

    let report = RhoReport {
        model: spec,
        n,
        z: format_complex(z),
        rho: preferred,
        direct,
        closed_form_kernels: cd,
        ratio_form: ratio,
        limit,
    };
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report).map_err(io_json)?)?;
        return Ok(());
    }
    let show = |r: &Result<f64, String>| match r {
        Ok(v) => sig10(*v),
        Err(e) => format!("n/a ({e})"),
    };
    writeln!(out, "model = {}, n = {n}, z = {}", report.model.name(), report.z)?;
    writeln!(out, "rho = {}", sig10(report.rho))?;
    writeln!(out, "rho_direct = {}", sig10(report.direct))?;
    writeln!(out, "rho_cd = {}", show(&report.closed_form_kernels))?;
    writeln!(out, "rho_ratio = {}", show(&report.ratio_form))?;
    if let Some(l) = &report.limit {
        writeln!(out, "rho_limit = {}", show(l))?;
    }
    Ok(())
}

/// The single-ratio form, reported as unavailable inside its exclusion band
/// where `rho` would fall back to direct summation.
fn ratio_only(model: &Model, n: usize, z: Complex64, excl: &Exclusion) -> Result<f64, String> {
    let outside = match model {
        Model::Oprl(_) => z.im.abs() > excl.ratio_axis,
        Model::Opuc(_) => (z.norm() - 1.0).abs() > excl.circle,
    };
    if !outside {
        return Err("inside the exclusion band".into());
    }
    rho(model, n, z, excl).map_err(|e| e.to_string())
}

fn io_json(e: serde_json::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn load<C: for<'de> serde::Deserialize<'de>>(
    args: &ExperimentArgs,
    seed_key: Option<&str>,
) -> Result<C, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    let mut overrides = args.overrides.clone();
    match (args.seed, seed_key) {
        (Some(seed), Some(key)) => overrides.push(format!("{key}={seed}")),
        (Some(_), None) => {
            return Err(CliError::Config("this experiment takes no seed".into()));
        }
        _ => {}
    }
    parse_config(&text, &overrides).map_err(|e| {
        CliError::Config(format!("{}: {e}", args.config.display()))
    })
}

fn finish<T: Table, C: Serialize>(
    out: &mut dyn Write,
    dir: &Path,
    name: &str,
    table: &T,
    config: &C,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let ArtifactPaths { csv, json } = write_artifacts(dir, name, table, config, seed)?;
    writeln!(out, "wrote {}", csv.display())?;
    writeln!(out, "wrote {}", json.display())?;
    match table.status() {
        Status::Complete => Ok(()),
        Status::Incomplete => Err(CliError::Numerical(format!(
            "some rows failed numerically; see the error column of {}",
            csv.display()
        ))),
    }
}

fn cmd_profile(args: ExperimentArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg: ProfileConfig = load(&args, None)?;
    let report = run_density_profile(&cfg)?;
    for &n in &cfg.degrees {
        let diff = report
            .max_abs_diff(n)
            .map_or_else(|| "n/a".to_string(), sig10);
        writeln!(out, "n = {n}: max |rho - rho_limit| = {diff}")?;
    }
    for row in report.aborted() {
        writeln!(out, "aborted row n = {}, z = {}+{}i: {}", row.n, row.x, row.y, row.error)?;
    }
    finish(out, &args.out, &cfg.name, &report, &cfg, None)
}

fn cmd_duality(args: ExperimentArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg: DualityConfig = load(&args, Some("master_seed"))?;
    let report = run_duality(&cfg)?;
    for r in &report.rows {
        writeln!(
            out,
            "case {} ({}, n = {}): mc = {} ± {}, quad = {}, z = {:.2}{}",
            r.case,
            r.family,
            r.n,
            sig10(r.mc_mean),
            sig10(r.mc_stderr),
            sig10(r.quad_value),
            r.z_score,
            if r.flagged { "  FLAGGED" } else { "" }
        )?;
    }
    writeln!(out, "{} of {} cases agree within 3 sigma + tol", report.agreeing(), report.rows.len())?;
    finish(out, &args.out, &cfg.name, &report, &cfg, Some(cfg.master_seed))
}

fn cmd_band(args: ExperimentArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg: BandConfig = load(&args, Some("master_seed"))?;
    let report = run_band_experiment(&cfg)?;
    for r in &report.rows {
        writeln!(
            out,
            "n = {}: mc/n = {} ± {}, quad/n = {}, limit = {}",
            r.n,
            sig10(r.mc_mean),
            sig10(r.mc_stderr),
            sig10(r.quad_value),
            sig10(r.rhs_limit)
        )?;
    }
    finish(out, &args.out, &cfg.name, &report, &cfg, Some(cfg.master_seed))
}

fn cmd_total_mass(args: TotalMassArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = args.model.spec()?;
    let model = spec.build()?;
    let parts = total_mass_parts(&model, args.n, &QuadOptions::with_tol(args.tol))?;
    let total = parts.total();
    if args.json {
        let v = json!({"model": spec, "n": args.n, "parts": parts, "total": total});
        writeln!(out, "{}", serde_json::to_string_pretty(&v).map_err(io_json)?)?;
        return Ok(());
    }
    writeln!(out, "model = {}, n = {}", spec.name(), args.n)?;
    writeln!(out, "interior (|z| < {}) = {}", parts.radius, sig10(parts.interior.value))?;
    writeln!(out, "exterior = {}", sig10(parts.exterior.value))?;
    writeln!(out, "total = {}", sig10(total.value))?;
    writeln!(out, "error estimate = {:.3e}, cells = {}", total.error_estimate, total.cells)?;
    Ok(())
}

fn cmd_diag(args: DiagArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = args.model.spec()?;
    let model = spec.build()?;
    let n = args.n;
    if n == 0 {
        return Err(CliError::Config("diag needs n >= 1".into()));
    }
    let (ln_kappa, extra): (f64, Value) = match &model {
        Model::Opuc(v) => (
            leading_coeff_opuc(v, n).ln(),
            json!({"nevai": v.is_nevai(), "alpha_n": v.alpha(n)}),
        ),
        Model::Oprl(rec) => {
            // Leading coefficient of p_n is 1 / (a_0 ... a_{n-1}).
            let ln_k = -(0..n).map(|j| rec.a(j).ln()).sum::<f64>();
            let lim = rec.limit();
            (
                ln_k,
                json!({"limit_a": lim.a, "limit_b": lim.b, "support_radius": rec.support_radius()}),
            )
        }
    };
    let ust = match &model {
        Model::Opuc(v) => ust_regularity_diagnostic(v, n)?,
        Model::Oprl(_) => ln_kappa / n as f64,
    };
    if args.json {
        let v = json!({"model": spec, "n": n, "ln_kappa": ln_kappa, "ust_diagnostic": ust, "details": extra});
        writeln!(out, "{}", serde_json::to_string_pretty(&v).map_err(io_json)?)?;
        return Ok(());
    }
    writeln!(out, "model = {}, n = {n}", spec.name())?;
    writeln!(out, "ln kappa_n = {}", sig10(ln_kappa))?;
    writeln!(out, "kappa_n = {}", sig10(ln_kappa.exp()))?;
    writeln!(out, "ust diagnostic (ln kappa_n)/n = {}", sig10(ust))?;
    if let Value::Object(map) = extra {
        for (k, v) in map {
            writeln!(out, "{k} = {v}")?;
        }
    }
    Ok(())
}
