use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ropz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ropz"))
        .args(args)
        .env_remove("ROPZ_WORKERS")
        .output()
        .expect("spawn ropz")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn rho_spherical_origin() {
    let o = ropz(&["rho", "--model", "lebesgue", "--n", "1", "--z", "0+0i"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "rho = 0.3183098862"), "{out}");
}

#[test]
fn rho_far_from_support_is_finite() {
    let o = ropz(&["rho", "--model", "chebyshev", "--n", "50", "--z", "1e9+0i", "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rho = v["rho"].as_f64().unwrap();
    assert!(rho.is_finite() && rho >= 0.0);
    assert!(v["direct"].as_f64().unwrap().is_finite());
}

#[test]
fn negative_imaginary_arguments_parse() {
    let o = ropz(&["rho", "--model", "nevai-ab", "--a", "1", "--b", "0.5", "--n", "7", "--z", "-0.3-2i"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn exit_codes() {
    let missing = ropz(&["band", "--config", "/nonexistent/band.json"]);
    assert_eq!(missing.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let bad_override = ropz(&[
        "band",
        "--config",
        &config("band.json"),
        "--set",
        "samples=5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(bad_override.status.code(), Some(1));

    let seeded_profile = ropz(&["profile", "--config", &config("profile.json"), "--seed", "3"]);
    assert_eq!(seeded_profile.status.code(), Some(1));

    let help = ropz(&["--help"]);
    assert_eq!(help.status.code(), Some(0));

    // A point on the real-line support has no limiting density, but rho itself
    // is finite there; the limit is shown as unavailable, not as an error.
    let on_support = ropz(&["rho", "--model", "chebyshev", "--n", "5", "--z", "0.5"]);
    assert_eq!(on_support.status.code(), Some(0));
    assert!(stdout(&on_support).contains("rho_limit = n/a"));
}

fn band_run(dir: &Path, workers: &str) -> Vec<(String, Vec<u8>)> {
    let o = Command::new(env!("CARGO_BIN_EXE_ropz"))
        .args([
            "band",
            "--config",
            &config("band.json"),
            "--set",
            "degrees=[16,32]",
            "--set",
            "samples=200",
            "--seed",
            "77",
            "--out",
            dir.to_str().unwrap(),
        ])
        .env("ROPZ_WORKERS", workers)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    ["band.csv", "band.json"]
        .iter()
        .map(|f| (f.to_string(), std::fs::read(dir.join(f)).unwrap()))
        .collect()
}

#[test]
fn band_artifacts_are_reproducible() {
    let root = tempfile::tempdir().unwrap();
    let runs: Vec<_> = ["1", "1", "4", "16"]
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let d: PathBuf = root.path().join(k.to_string());
            std::fs::create_dir(&d).unwrap();
            band_run(&d, w)
        })
        .collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
    let csv = String::from_utf8(runs[0][0].1.clone()).unwrap();
    assert!(csv.starts_with("# ropz band\r\n"));
    assert!(csv.contains("# master_seed: 77\r\n"));
    assert!(!csv.contains("workers"));
}

#[test]
fn artifact_json_reloads_as_config() {
    let root = tempfile::tempdir().unwrap();
    let first = root.path().join("a");
    let second = root.path().join("b");
    std::fs::create_dir(&first).unwrap();
    std::fs::create_dir(&second).unwrap();
    let o = ropz(&["profile", "--config", &config("profile.json"), "--out", first.to_str().unwrap()]);
    assert!(o.status.success());
    let mirror = first.join("profile.json");
    let o = ropz(&["profile", "--config", mirror.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(
        std::fs::read(first.join("profile.csv")).unwrap(),
        std::fs::read(second.join("profile.csv")).unwrap()
    );
}

#[test]
fn help_documents_every_family_and_flag() {
    let top = stdout(&ropz(&["--help"]));
    for fam in ropz::basis::ModelSpec::FAMILIES {
        assert!(top.contains(fam), "missing {fam}");
    }
    for (sub, flags) in [
        ("rho", &["--model", "--a", "--b", "--c", "--r", "--model-json", "--n", "--z", "--json", "--workers"][..]),
        ("profile", &["--config", "--set", "--seed", "--out"][..]),
        ("duality", &["--config", "--set", "--seed", "--out"][..]),
        ("band", &["--config", "--set", "--seed", "--out"][..]),
        ("total-mass", &["--model", "--n", "--tol", "--json"][..]),
        ("diag", &["--model", "--n", "--json"][..]),
    ] {
        assert!(top.contains(sub), "top-level help misses {sub}");
        let help = stdout(&ropz(&[sub, "--help"]));
        for flag in flags {
            assert!(help.contains(flag), "{sub} --help misses {flag}");
        }
    }
}
