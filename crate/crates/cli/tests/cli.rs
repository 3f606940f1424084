//! End-to-end tests of the command-line surface: flags, exit codes, CSV
//! schemas, and determinism of emitted artifacts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ballmap")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

#[test]
fn bounds_classical_row() {
    let out = run(&[
        "bounds",
        "--kernel",
        "mobius:-1,1",
        "--alpha",
        "0",
        "--beta",
        "0",
        "--radii",
        "0.1:0.9:9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10, "header plus nine rows");
    assert_eq!(
        lines[0],
        "r,phi1,phi2,B1,B2,B3,B4,T,F1,F2,det_upper,det_lower,tangent_upper,tangent_lower,unitvec_upper"
    );
    // row r = 0.5 has phi2 = 2.0
    let row: Vec<f64> = lines[5].split(',').map(|v| v.parse().unwrap()).collect();
    assert!((row[0] - 0.5).abs() < 1e-15);
    assert!((row[2] - 2.0).abs() < 1e-13);
}

#[test]
fn bounds_zero_radius_single_row() {
    let out = run(&["bounds", "--radii", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(row[0], 0.0);
    assert_eq!((row[1], row[2]), (0.0, 0.0));
}

#[test]
fn bounds_rejects_alpha_one() {
    let out = run(&["bounds", "--alpha", "1.0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bounds_quadrature_comparison_summary() {
    let out = run(&[
        "bounds",
        "--kernel",
        "mobius:-0.5,0.5",
        "--alpha",
        "0.5",
        "--radii",
        "0.1:0.7:4",
        "--compare-quadrature",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text
        .lines()
        .next()
        .unwrap()
        .ends_with("phi1_quad,phi2_quad"));
    let summary = text.lines().last().unwrap();
    assert!(summary.starts_with("# max_rel_discrepancy="));
    let v: f64 = summary
        .trim_start_matches("# max_rel_discrepancy=")
        .parse()
        .unwrap();
    assert!(v <= 1e-8, "discrepancy {v}");
}

#[test]
fn check_exit_codes() {
    let out = run(&[
        "check",
        "--map",
        "koebe",
        "--mode",
        "s_g_star",
        "--kernel",
        "mobius:-1,1",
        "--radii-count",
        "8",
        "--dirs",
        "24",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let verdict: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(verdict["member"], serde_json::json!(true));

    let out = run(&[
        "check",
        "--map",
        "identity",
        "--mode",
        "m_tilde",
        "--alpha",
        "0.3",
        "--beta",
        "0.4",
        "--radii-count",
        "4",
        "--dirs",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&[
        "check",
        "--map",
        "neg",
        "--mode",
        "m",
        "--radii-count",
        "4",
        "--dirs",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["check", "--map", "koebe", "--mode", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn extend_square_root_equals_modified_at_half() {
    let rs = run(&[
        "extend",
        "--f",
        "koebe",
        "--op",
        "roper-suffridge",
        "--n",
        "2",
        "--samples",
        "8",
        "--radii",
        "0.2:0.8:4",
    ]);
    let md = run(&[
        "extend",
        "--f",
        "koebe",
        "--op",
        "modified",
        "--ahat",
        "0",
        "--bhat",
        "0.5",
        "--n",
        "2",
        "--samples",
        "8",
        "--radii",
        "0.2:0.8:4",
    ]);
    assert_eq!(rs.status.code(), Some(0));
    assert_eq!(md.status.code(), Some(0));
    assert_eq!(
        stdout(&rs),
        stdout(&md),
        "the two operator spellings coincide"
    );
}

#[test]
fn extend_pfaltzgraff_metadata_flag() {
    let dir = tempfile::tempdir().unwrap();
    let meta_path = dir.path().join("meta.json");
    let out = run(&[
        "extend",
        "--op",
        "pfaltzgraff",
        "--map",
        "identity",
        "--ahat",
        "0.3333333333333333",
        "--n",
        "2",
        "--samples",
        "2",
        "--radii",
        "0.5",
        "--meta",
        meta_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&meta_path).unwrap()).unwrap();
    assert_eq!(
        meta["pfaltzgraff_suffridge_coincidence"],
        serde_json::json!(true)
    );
    assert_eq!(meta["n_out"], serde_json::json!(3));
}

#[test]
fn chain_flow_matches_linear_closed_form() {
    let beta = std::f64::consts::FRAC_PI_4;
    let out = run(&[
        "chain",
        "--flow",
        "--map",
        "identity",
        "--beta",
        "0.7853981633974483",
        "--z",
        "0.3,0;0.2,0.1",
        "--t-end",
        "1",
        "--steps",
        "200",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let last_row = text.lines().rev().find(|l| !l.starts_with('#')).unwrap();
    let cols: Vec<&str> = last_row.split(',').collect();
    let t: f64 = cols[0].parse().unwrap();
    assert!((t - 1.0).abs() < 1e-12);
    // z(t) = exp(-e^{-i beta} t) z0
    let rot = ballmap::C64::from_polar(1.0, -beta);
    let factor = (-rot).exp();
    let z00 = ballmap::C64::new(0.3, 0.0) * factor;
    let got = ballmap::C64::new(
        cols[1].parse::<f64>().unwrap(),
        cols[2].parse::<f64>().unwrap(),
    );
    assert!((got - z00).norm() < 1e-9, "got {got}, expected {z00}");
    assert!(text
        .lines()
        .last()
        .unwrap()
        .starts_with("# norm_strictly_decreasing=true"));
}

#[test]
fn chain_one_dimensional_residual_column() {
    let out = run(&["chain", "--f", "koebe", "--n", "1", "--z", "0.4,0.1", "--times", "0.2:1:3", "--dt", "1e-4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), "t,F_re,F_im,norm_F,pde_residual");
    for line in text.lines().skip(1) {
        let res: f64 = line.split(',').last().unwrap().parse().unwrap();
        assert!(res <= 1e-6, "evolution residual {res}");
    }
}

#[test]
fn chain_rows_are_seed_stable() {
    let a = run(&[
        "chain",
        "--f",
        "koebe",
        "--ahat",
        "0.25",
        "--bhat",
        "0.5",
        "--n",
        "2",
        "--z",
        "0.3,0;0.2,0.1",
        "--times",
        "0:1:5",
    ]);
    let b = run(&[
        "chain",
        "--f",
        "koebe",
        "--ahat",
        "0.25",
        "--bhat",
        "0.5",
        "--n",
        "2",
        "--z",
        "0.3,0;0.2,0.1",
        "--times",
        "0:1:5",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn suite_default_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let json1 = dir.path().join("r1.json");
    let csv1 = dir.path().join("r1.csv");
    let json2 = dir.path().join("r2.json");
    let csv2 = dir.path().join("r2.csv");
    let out = run_in(
        dir.path(),
        &[
            "suite",
            "--config",
            "default",
            "--out",
            json1.to_str().unwrap(),
            "--csv",
            csv1.to_str().unwrap(),
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    // a different worker count must produce byte-identical CSV
    let out = Command::new(bin())
        .current_dir(dir.path())
        .env("BALLMAP_THREADS", "1")
        .args([
            "suite",
            "--config",
            "default",
            "--out",
            json2.to_str().unwrap(),
            "--csv",
            csv2.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&csv1).unwrap(), std::fs::read(&csv2).unwrap());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json1).unwrap()).unwrap();
    assert_eq!(report["pass"], serde_json::json!(true));
    assert!(report["records"].as_array().unwrap().len() > 50);
}

#[test]
fn shipped_config_is_the_builtin_default() {
    let text = std::fs::read_to_string(repo_root().join("config/suite.json")).unwrap();
    let shipped: serde_json::Value = serde_json::from_str(&text).unwrap();
    let builtin = ballmap::suite::SuiteConfig::default_config().to_json();
    assert_eq!(
        shipped, builtin,
        "config/suite.json drifted from the builtin default"
    );
}

#[test]
fn suite_reads_the_shipped_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = repo_root().join("config/suite.json");
    let out = run_in(
        dir.path(),
        &[
            "suite",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            "r.json",
            "--csv",
            "r.csv",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let out = run_in(dir.path(), &["suite", "--config", "no-such-file.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn map_json_round_trip_through_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.json");
    // F(z) = (z1 + (3 sqrt 3 / 2) z2^2, z2) as a coefficient table
    let q = 1.5 * 3.0f64.sqrt();
    std::fs::write(
        &path,
        format!(
            "{{\"n\": 2, \"terms\": [\
             {{\"out\": 0, \"idx\": [1, 0], \"re\": 1.0, \"im\": 0.0}},\
             {{\"out\": 0, \"idx\": [0, 2], \"re\": {q}, \"im\": 0.0}},\
             {{\"out\": 1, \"idx\": [0, 1], \"re\": 1.0, \"im\": 0.0}}]}}"
        ),
    )
    .unwrap();
    let out = run(&[
        "check",
        "--map",
        path.to_str().unwrap(),
        "--mode",
        "m_g",
        "--kernel",
        "mobius:-1,1",
        "--radii-count",
        "6",
        "--dirs",
        "16",
    ]);
    // the support-point field is a boundary member: margins can dip to ~0 but
    // the command itself must parse the file and produce a verdict
    assert!(matches!(out.status.code(), Some(0) | Some(1)));
    let verdict: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(verdict.get("worst_margin").is_some());
}
