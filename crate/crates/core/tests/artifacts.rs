use ropz::experiments::{
    parse_config, render_csv, render_json, run_density_profile, run_duality, write_artifacts,
    DualityConfig, ProfileConfig, Status, Table,
};
use serde_json::Value;

const PROFILE: &str = r#"{
  "model": {"family": "geometric-alpha", "c": 0.3, "r": 0.5},
  "degrees": [4, 16],
  "grid": {"x": [-0.5, 0.5], "y": [-0.5, 0.5], "nx": 3, "ny": 3}
}"#;

fn profile() -> ProfileConfig {
    parse_config(PROFILE, &[]).unwrap()
}

#[test]
fn csv_layout() {
    let cfg = profile();
    let rep = run_density_profile(&cfg).unwrap();
    let text = String::from_utf8(render_csv(&rep, &cfg, None).unwrap()).unwrap();
    let lines: Vec<&str> = text.split("\r\n").collect();
    assert_eq!(lines[0], "# ropz profile");
    assert!(lines[1].starts_with("# config: {"));
    assert_eq!(lines[2], "# status: complete");
    assert_eq!(lines[3], ropz::experiments::ProfileReport::COLUMNS.join(","));
    assert_eq!(lines.len(), 4 + 18 + 1);
    assert_eq!(*lines.last().unwrap(), "");
    // Values survive a text round trip bit for bit.
    let first: Vec<&str> = lines[4].split(',').collect();
    let rho: f64 = first[3].parse().unwrap();
    assert_eq!(rho, rep.rows[0].rho.unwrap());
}

#[test]
fn json_mirror_matches_rows_and_reloads() {
    let cfg = profile();
    let rep = run_density_profile(&cfg).unwrap();
    let json: Value = serde_json::from_slice(&render_json(&rep, &cfg, None).unwrap()).unwrap();
    assert_eq!(json["kind"], "profile");
    assert_eq!(json["status"], "complete");
    assert_eq!(json["rows"].as_array().unwrap().len(), rep.rows.len());
    let back: ProfileConfig = parse_config(&json.to_string(), &[]).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn overrides_reach_nested_keys() {
    let cfg: ProfileConfig =
        parse_config(PROFILE, &["model.c=0.1".into(), "grid.nx=5".into()]).unwrap();
    assert_eq!(cfg.grid.nx, 5);
    assert_eq!(
        cfg.model,
        ropz::basis::ModelSpec::GeometricAlpha { c: 0.1, r: 0.5 }
    );
    assert!(parse_config::<ProfileConfig>(PROFILE, &["grid.bogus=1".into()]).is_err());
    assert!(parse_config::<ProfileConfig>(PROFILE, &["nokey".into()]).is_err());
}

#[test]
fn duality_artifacts_carry_seed_and_rerun_identically() {
    let text = r#"{
      "samples": 1000,
      "master_seed": 5,
      "cases": [
        {"model": {"family": "lebesgue"}, "n": 1,
         "region": {"kind": "disk", "center": [0.0, 0.0], "radius": 1.0}},
        {"model": {"family": "chebyshev"}, "n": 6,
         "region": {"kind": "rectangle", "center": [0.0, 0.5], "half_widths": [1.0, 0.25]}}
      ]
    }"#;
    let cfg: DualityConfig = parse_config(text, &[]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let rep = run_duality(&cfg).unwrap();
    assert_eq!(rep.status(), Status::Complete);
    let paths = write_artifacts(dir.path(), "d", &rep, &cfg, Some(cfg.master_seed)).unwrap();
    let csv = std::fs::read_to_string(&paths.csv).unwrap();
    assert!(csv.contains("# master_seed: 5\r\n"));

    let again = run_duality(&cfg).unwrap();
    assert_eq!(
        render_csv(&again, &cfg, Some(5)).unwrap(),
        std::fs::read(&paths.csv).unwrap()
    );
}
