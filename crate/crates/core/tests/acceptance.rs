//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion with its
//! runtime against the budget. Exits nonzero only when a criterion fails
//! that is not listed in `KNOWN_FAILURES`.
//!
//! Run alone with `cargo test --release -p ropz --test acceptance`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::f64::consts::{E, PI};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use ropz::basis::{Exclusion, JacobiRecurrence, Model, ModelSpec, VerblunskySequence};
use ropz::experiments::{
    parse_config, run_band_experiment, run_density_profile, run_duality, write_artifacts,
    BandConfig, DualityConfig, ProfileConfig,
};
use ropz::intensity::{h_ratio, rho, rho_general, rho_opuc};
use ropz::kernels::{kernel_cd_opuc, kernel_cd_oprl, kernel_direct};
use ropz::quadrature::{band_mass, integrate_rho, total_mass, QuadOptions};
use ropz::sampling::{mc_expected_zeros, real_axis_mass_probe, McOptions, Region};

/// Criteria that cannot hold as stated; each has a ledger entry explaining
/// the measured value.
const KNOWN_FAILURES: &[&str] = &["AC8a"];

/// Printed value of the band limit for S = [π/4, 3π/4], τ = [-2, 2].
const BAND_RHS_PRINTED: f64 = 0.078254;

struct Check {
    id: &'static str,
    title: &'static str,
    budget: Duration,
    run: fn() -> Vec<Verdict>,
}

struct Verdict {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn verdict(id: &'static str, pass: bool, detail: String) -> Verdict {
    Verdict { id, pass, detail }
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load<C: for<'de> serde::Deserialize<'de>>(file: &str, overrides: &[&str]) -> C {
    let text = std::fs::read_to_string(configs().join(file)).expect("shipped config");
    let overrides: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    parse_config(&text, &overrides).expect("valid config")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn families() -> Vec<ModelSpec> {
    vec![
        ModelSpec::Chebyshev {},
        ModelSpec::NevaiAb { a: 0.8, b: 0.3 },
        ModelSpec::Jacobi {
            a: vec![0.9, 0.6, 1.1, 0.7],
            b: vec![0.2, -0.4, 0.1, 0.0],
            tail_a: 0.5,
            tail_b: 0.1,
        },
        ModelSpec::Lebesgue {},
        ModelSpec::GeometricAlpha { c: 0.3, r: 0.5 },
        ModelSpec::ConstantAlpha { c: 0.4 },
        ModelSpec::Verblunsky {
            alpha: vec![0.5, -0.3, 0.2, 0.6],
            tail: 0.1,
        },
    ]
}

fn ac1() -> Vec<Verdict> {
    let excl = Exclusion::default();
    let mut rng = ChaCha12Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut total = 0;
    for spec in families() {
        let model = spec.build().unwrap();
        let mut done = 0;
        while done < 100 {
            let n = rng.random_range(1..=50usize);
            let z = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            // The closed forms are only claimed outside their exclusion bands.
            let cd = match &model {
                Model::Oprl(r) if z.im.abs() > excl.axis => kernel_cd_oprl(r, n, z, excl.axis),
                Model::Opuc(v) if (z.norm() - 1.0).abs() > excl.circle => {
                    kernel_cd_opuc(v, n, z, excl.circle)
                }
                _ => continue,
            };
            done += 1;
            total += 1;
            let direct = rho_general(&kernel_direct(&model, n, z).unwrap()).unwrap();
            let cd = rho_general(&cd.unwrap()).unwrap();
            let ratio = rho(&model, n, z, &excl).unwrap();
            let e = rel(direct, cd).max(rel(direct, ratio));
            worst = worst.max(e);
            if !(e <= 1e-8) {
                failures += 1;
            }
        }
    }
    vec![verdict(
        "AC1",
        failures == 0,
        format!("{total} triples, worst relative gap {worst:.2e} (limit 1e-8)"),
    )]
}

fn ac2() -> Vec<Verdict> {
    let v = VerblunskySequence::lebesgue();
    let excl = Exclusion::default();
    let mut worst = 0.0f64;
    for i in 0..41 {
        for j in 0..41 {
            let z = Complex64::new(-2.0 + 0.1 * i as f64, -2.0 + 0.1 * j as f64);
            let exact = 1.0 / (PI * (1.0 + z.norm_sqr()).powi(2));
            worst = worst.max((rho_opuc(&v, 1, z, &excl).unwrap() - exact).abs());
        }
    }
    let model = Model::Opuc(v);
    let disk = Region::disk(Complex64::new(0.0, 0.0), 1.0);
    let q = integrate_rho(&model, 1, &disk, &QuadOptions::with_tol(1e-10)).unwrap();
    let mc = mc_expected_zeros(&model, 1, &disk, 10_000, 2, &McOptions::default()).unwrap();
    vec![
        verdict("AC2a", worst <= 1e-12, format!("41x41 grid, max |ρ - exact| = {worst:.2e}")),
        verdict(
            "AC2b",
            (q.value - 0.5).abs() <= 1e-8,
            format!("quadrature {:.12} (±{:.1e})", q.value, q.error_estimate),
        ),
        verdict(
            "AC2c",
            (mc.mean - 0.5).abs() <= 3.0 * mc.stderr,
            format!("MC {:.4} ± {:.4} over 1e4 samples", mc.mean, mc.stderr),
        ),
    ]
}

fn ac3() -> Vec<Verdict> {
    let opts = QuadOptions::with_tol(1e-6);
    [
        ("lebesgue n=5", Model::Opuc(VerblunskySequence::lebesgue()), 5usize),
        ("chebyshev n=10", Model::Oprl(JacobiRecurrence::chebyshev()), 10),
    ]
    .into_iter()
    .zip(["AC3a", "AC3b"])
    .map(|((name, model, n), id)| {
        let t = total_mass(&model, n, &opts).unwrap();
        verdict(
            id,
            (t.value - n as f64).abs() <= 1e-5,
            format!("{name}: total mass {:.9}", t.value),
        )
    })
    .collect()
}

fn ac4() -> Vec<Verdict> {
    let excl = Exclusion::default();
    let cheb = Model::Oprl(JacobiRecurrence::chebyshev());
    let z = Complex64::new(0.0, 2.0);
    let r = rho(&cheb, 200, z, &excl).unwrap();
    let target = 1.0 / (80.0 * PI);
    let e1 = (r - target).abs() / r;

    let geo = Model::Opuc(VerblunskySequence::geometric(0.3, 0.5).unwrap());
    let mut worst = 0.0f64;
    for i in 0..37 {
        for j in 0..37 {
            let z = Complex64::new(-0.9 + 0.05 * i as f64, -0.9 + 0.05 * j as f64);
            if z.norm() > 0.9 {
                continue;
            }
            let limit = 1.0 / (PI * (1.0 - z.norm_sqr()).powi(2));
            worst = worst.max(rel(rho(&geo, 200, z, &excl).unwrap(), limit));
        }
    }
    vec![
        verdict("AC4a", e1 < 0.01, format!("chebyshev ρ_200(2i) relative gap {e1:.2e}")),
        verdict("AC4b", worst < 0.01, format!("α_j = 0.3·2^-j, sup relative gap on |z| ≤ 0.9: {worst:.2e}")),
    ]
}

fn ac5() -> Vec<Verdict> {
    let taus: Vec<f64> = (0..=64).map(|k| -8.0 + 0.25 * k as f64).collect();
    let sym = taus
        .iter()
        .map(|&t| (h_ratio(t) + h_ratio(-t) - 1.0).abs())
        .fold(0.0, f64::max);
    let increasing = taus.windows(2).all(|w| h_ratio(w[1]) > h_ratio(w[0]));
    let at_one = (h_ratio(1.0) - 1.0 / (E - 1.0)).abs();
    vec![
        verdict("AC5a", sym <= 1e-12, format!("max |h(τ)+h(-τ)-1| = {sym:.1e}")),
        verdict("AC5b", increasing, "strictly increasing on the grid".into()),
        verdict("AC5c", at_one <= 1e-12, format!("|h(1) - 1/(e-1)| = {at_one:.1e}")),
    ]
}

fn ac6() -> Vec<Verdict> {
    let cfg: BandConfig = load("band.json", &["degrees=[100,400]", "samples=2000"]);
    let v = VerblunskySequence::lebesgue();
    let (t, tau) = ((cfg.theta[0], cfg.theta[1]), (cfg.tau[0], cfg.tau[1]));
    let quad = band_mass(&v, 400, t, tau, &cfg.quadrature).unwrap().per_degree;
    let qgap = rel(quad, BAND_RHS_PRINTED);

    let report = run_band_experiment(&cfg).unwrap();
    let row = |n| report.rows.iter().find(|r| r.n == n).unwrap();
    let (r100, r400) = (row(100), row(400));
    let within = |r: &ropz::experiments::BandRow| {
        let gap = (r.mc_mean - BAND_RHS_PRINTED).abs();
        gap <= (0.1 * BAND_RHS_PRINTED).max(3.0 * r.mc_stderr)
    };
    let d100 = (r100.mc_mean - BAND_RHS_PRINTED).abs();
    let d400 = (r400.mc_mean - BAND_RHS_PRINTED).abs();
    vec![
        verdict("AC6a", qgap <= 0.05, format!("quadrature/n at n=400 = {quad:.6}, relative gap {qgap:.2e}")),
        verdict(
            "AC6b",
            within(r100) && within(r400) && d400 <= d100,
            format!(
                "MC/n: n=100 {:.5} ± {:.5}, n=400 {:.5} ± {:.5}; gaps {d100:.2e} then {d400:.2e}",
                r100.mc_mean, r100.mc_stderr, r400.mc_mean, r400.mc_stderr
            ),
        ),
    ]
}

fn ac7() -> Vec<Verdict> {
    let first: DualityConfig = load("duality.json", &[]);
    let second: DualityConfig = load("duality.json", &["master_seed=987654321"]);
    [("AC7a", first), ("AC7b", second)]
        .into_iter()
        .map(|(id, cfg)| {
            let rep = run_duality(&cfg).unwrap();
            let z: Vec<String> = rep.rows.iter().map(|r| format!("{:.2}", r.z_score)).collect();
            verdict(
                id,
                rep.agreeing() >= 5,
                format!(
                    "seed {}: {}/{} agree, z = [{}]",
                    cfg.master_seed,
                    rep.agreeing(),
                    rep.rows.len(),
                    z.join(", ")
                ),
            )
        })
        .collect()
}

fn ac8() -> Vec<Verdict> {
    let cheb = Model::Oprl(JacobiRecurrence::chebyshev());
    let opts = McOptions::default();
    let wide = real_axis_mass_probe(&cheb, 10, 10_000, 1e-3, 3.0, 8, &opts).unwrap();
    let narrow = real_axis_mass_probe(&cheb, 10, 10_000, 5e-4, 3.0, 9, &opts).unwrap();
    let ratio = narrow.mean / wide.mean;
    vec![
        verdict(
            "AC8a",
            wide.mean < 0.02,
            format!("ε = 1e-3 strip holds {:.4} ± {:.4} zeros (threshold 0.02)", wide.mean, wide.stderr),
        ),
        verdict(
            "AC8b",
            (0.3..=0.7).contains(&ratio),
            format!("halving ε: {:.4} / {:.4} = {ratio:.3}", narrow.mean, wide.mean),
        ),
    ]
}

/// Every artifact file written in `dir`, sorted by name, as bytes.
fn artifacts_in(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

fn write_all(dir: &Path) {
    let profile: ProfileConfig = load("profile.json", &[]);
    let rep = run_density_profile(&profile).unwrap();
    write_artifacts(dir, &profile.name, &rep, &profile, None).unwrap();

    let duality: DualityConfig = load("duality.json", &["samples=1000"]);
    let rep = run_duality(&duality).unwrap();
    write_artifacts(dir, &duality.name, &rep, &duality, Some(duality.master_seed)).unwrap();

    let band: BandConfig = load("band.json", &["degrees=[20,40]", "samples=300"]);
    let rep = run_band_experiment(&band).unwrap();
    write_artifacts(dir, &band.name, &rep, &band, Some(band.master_seed)).unwrap();
}

fn ac9() -> Vec<Verdict> {
    let root = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for (k, workers) in [1usize, 1, 4, 16].into_iter().enumerate() {
        let dir = root.path().join(format!("run{k}"));
        std::fs::create_dir(&dir).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().unwrap();
        pool.install(|| write_all(&dir));
        runs.push(artifacts_in(&dir));
    }
    let identical = runs.windows(2).all(|w| w[0] == w[1]);
    vec![verdict(
        "AC9",
        identical && runs[0].len() == 6,
        format!(
            "{} files per run, 2 runs on 1 worker then 4 and 16 workers: {}",
            runs[0].len(),
            if identical { "byte-identical" } else { "DIFFER" }
        ),
    )]
}

fn main() {
    let checks = [
        Check { id: "AC1", title: "cross-form intensity equality", budget: Duration::from_secs(10), run: ac1 },
        Check { id: "AC2", title: "spherical ensemble", budget: Duration::from_secs(120), run: ac2 },
        Check { id: "AC3", title: "total mass equals degree", budget: Duration::from_secs(60), run: ac3 },
        Check { id: "AC4", title: "Nevai-class limits", budget: Duration::from_secs(60), run: ac4 },
        Check { id: "AC5", title: "H-ratio identities", budget: Duration::from_secs(1), run: ac5 },
        Check { id: "AC6", title: "band law", budget: Duration::from_secs(1800), run: ac6 },
        Check { id: "AC7", title: "MC/quadrature duality", budget: Duration::from_secs(600), run: ac7 },
        Check { id: "AC8", title: "real-axis mass", budget: Duration::from_secs(300), run: ac8 },
        Check { id: "AC9", title: "artifact reproducibility", budget: Duration::from_secs(600), run: ac9 },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut unexpected = Vec::new();
    let mut known = Vec::new();
    for check in &checks {
        if !filter.is_empty() && !filter.iter().any(|f| check.id.eq_ignore_ascii_case(f)) {
            continue;
        }
        let start = Instant::now();
        let verdicts = (check.run)();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= check.budget;
        for v in verdicts {
            let tag = if v.pass { "PASS" } else { "FAIL" };
            println!("[{tag}] {:<5} {}: {}", v.id, check.title, v.detail);
            if !v.pass {
                if KNOWN_FAILURES.contains(&v.id) {
                    known.push(v.id);
                } else {
                    unexpected.push(v.id.to_string());
                }
            }
        }
        let tag = if in_budget { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {:<5} runtime {:.2} s (budget {} s)",
            check.id,
            elapsed.as_secs_f64(),
            check.budget.as_secs()
        );
        if !in_budget {
            unexpected.push(format!("{} runtime", check.id));
        }
    }
    if !known.is_empty() {
        println!("known failures (see the decisions ledger): {}", known.join(", "));
    }
    if unexpected.is_empty() {
        println!("acceptance: no unexpected failures");
    } else {
        println!("acceptance: unexpected failures: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
