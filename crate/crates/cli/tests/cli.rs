use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nsgate_core::optimizer::linspace;
use nsgate_core::{sweep_over_delay, sweep_over_duration, AtomParams, GridPolicy};
use tempfile::TempDir;

fn nsgate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsgate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = nsgate(args);
    assert!(out.status.success(), "{args:?}: {}", stderr(&out));
    stdout(&out)
}

/// Header and numeric rows of a CSV, skipping `#` comments.
fn csv(text: &str) -> (String, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().expect("header row").to_string();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

/// `key=value` pairs from a report line.
fn field(line: &str, key: &str) -> f64 {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing in `{line}`"))
        .parse()
        .unwrap()
}

fn optimum_line(report: &str) -> String {
    report
        .lines()
        .find(|l| l.starts_with("OPTIMUM "))
        .expect("OPTIMUM line")
        .to_string()
}

fn value_of(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("{key} missing"))
        .parse()
        .unwrap()
}

fn nine_digits(v: f64) -> String {
    format!("{v:.8e}")
}

#[test]
fn sweep_t_reproduces_the_duration_curve() {
    let text = ok(&[
        "sweep-t", "--l", "0.9", "--tmin", "0.1", "--tmax", "5", "--steps", "99",
    ]);
    let (header, rows) = csv(&text);
    assert_eq!(header, "T,eta1_sq,eta2");
    assert_eq!(rows.len(), 99);
    let near = rows
        .iter()
        .min_by(|a, b| (a[0] - 1.3).abs().total_cmp(&(b[0] - 1.3).abs()))
        .unwrap();
    assert!((near[2] - 0.78).abs() <= 0.01, "eta2 = {}", near[2]);
    assert!((near[1] - 0.78).abs() <= 0.01, "eta1_sq = {}", near[1]);
}

#[test]
fn single_step_matches_direct_evaluation() {
    let (_, rows) = csv(&ok(&[
        "sweep-t", "--l", "0.9", "--tmin", "1.3", "--tmax", "2", "--steps", "1",
    ]));
    assert_eq!(rows.len(), 1);
    let direct = sweep_over_duration(0.9, &[1.3], &AtomParams::default(), &GridPolicy::default())
        .unwrap()
        .points[0];
    assert_eq!(rows[0][0], 1.3);
    assert_eq!(nine_digits(rows[0][1]), nine_digits(direct.eta1_sq));
    assert_eq!(nine_digits(rows[0][2]), nine_digits(direct.eta2));
}

#[test]
fn negative_tmin_is_a_usage_error() {
    let out = nsgate(&["sweep-t", "--tmin", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--tmin"));
}

#[test]
fn sweep_l_peaks_one_unit_apart() {
    let (header, rows) = csv(&ok(&[
        "sweep-l", "--t", "1.3", "--lmin", "0", "--lmax", "4", "--steps", "200",
    ]));
    assert_eq!(header, "l,eta1_sq,eta2");
    assert_eq!(rows.len(), 200);
    let argmax = |col: usize| {
        rows.iter()
            .max_by(|a, b| a[col].total_cmp(&b[col]))
            .unwrap()[0]
    };
    let gap = argmax(1) - argmax(2);
    assert!((gap - 1.0).abs() <= 0.3, "gap {gap}");
}

#[test]
fn degenerate_delay_range_is_a_usage_error() {
    let out = nsgate(&["sweep-l", "--lmin", "1", "--lmax", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_l_matches_library_at_nine_digits() {
    let (_, rows) = csv(&ok(&[
        "sweep-l", "--t", "1.3", "--lmin", "0", "--lmax", "4", "--steps", "41",
    ]));
    let curve = sweep_over_delay(
        1.3,
        &linspace(0.0, 4.0, 41),
        &AtomParams::default(),
        &GridPolicy::default(),
    )
    .unwrap();
    for (row, p) in rows.iter().zip(&curve.points) {
        assert_eq!(nine_digits(row[0]), nine_digits(p.value));
        assert_eq!(nine_digits(row[1]), nine_digits(p.eta1_sq));
        assert_eq!(nine_digits(row[2]), nine_digits(p.eta2));
    }
}

#[test]
fn optimize_defaults() {
    let report = ok(&["optimize"]);
    let line = optimum_line(&report);
    assert!(
        (field(&line, "transmittance") - 0.78).abs() <= 0.01,
        "{line}"
    );
    assert!((field(&line, "l") - 0.9).abs() <= 0.1, "{line}");
    assert!((field(&line, "T") - 1.3).abs() <= 0.1, "{line}");
}

#[test]
fn optimize_report_lists_residual_and_plateau() {
    let dir = TempDir::new().unwrap();
    let locus = dir.path().join("locus.csv");
    let report = ok(&["optimize", "--locus", locus.to_str().unwrap()]);
    assert!(report.contains("residual"));
    assert!(report.contains("plateau"));
    let (header, rows) = csv(&fs::read_to_string(&locus).unwrap());
    assert_eq!(header, "T,l,eta1_sq,eta2");
    assert!(rows.len() > 10);
    for r in &rows {
        assert!((r[2] - r[3]).abs() <= 1e-5 && r[3] > 0.0, "{r:?}");
    }
}

#[test]
fn optimum_scales_with_gamma() {
    let one = optimum_line(&ok(&["optimize"]));
    let two = optimum_line(&ok(&["optimize", "--gamma", "2"]));
    assert!((field(&one, "transmittance") - field(&two, "transmittance")).abs() < 1e-8);
    assert!((field(&one, "T") - 2.0 * field(&two, "T")).abs() < 1e-8);
    assert!((field(&one, "l") - 2.0 * field(&two, "l")).abs() < 1e-8);
}

#[test]
fn short_duration_range_has_no_crossing() {
    let out = nsgate(&["optimize", "--tmax", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("no gate-valid crossing"), "{err}");
    assert!(err.contains("scanned T"), "{err}");
}

#[test]
fn vacuum_always_succeeds() {
    let report = ok(&["state", "--c0", "1", "--c1", "0", "--c2", "0"]);
    assert_eq!(value_of(&report, "P_success"), 1.0);
}

#[test]
fn two_photon_state_at_optimum() {
    let report = ok(&[
        "state",
        "--c0",
        "0",
        "--c1",
        "0",
        "--c2",
        "1",
        "--at-optimum",
    ]);
    let p = value_of(&report, "P_success");
    assert!((p - 0.6084).abs() <= 0.02, "P_success = {p}");
    // both printed at 9 significant digits
    assert!((p - value_of(&report, "eta2").powi(2)).abs() < 1e-8);
    assert!(report.contains("ns_valid = true"));
}

#[test]
fn unnormalized_state_rejected() {
    let out = nsgate(&["state", "--c0", "0.6", "--c1", "0.8", "--c2", "0.3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn nearly_normalized_state_rescaled_with_warning() {
    let out = nsgate(&["state", "--c0", "1.0000002", "--c1", "0", "--c2", "0"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("warning"));
    assert!((value_of(&stdout(&out), "P_success") - 1.0).abs() < 1e-12);
}

fn dump_in(dir: &Path, extra: &[&str]) -> (String, String) {
    let out = dir.join("wave.csv");
    let mut args = vec!["dump", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    ok(&args);
    (
        fs::read_to_string(&out).unwrap(),
        fs::read_to_string(dir.join("wave_2photon.csv")).unwrap(),
    )
}

#[test]
fn dump_without_coupling_is_identity() {
    let dir = TempDir::new().unwrap();
    let (one, _) = dump_in(dir.path(), &["--gamma", "0", "--t", "1"]);
    let (header, rows) = csv(&one);
    assert_eq!(header, "x,psi_in,psi_out_1photon");
    for line in one.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let cells: Vec<_> = line.split(',').collect();
        assert_eq!(cells[1], cells[2]);
    }
    assert!(rows.len() > 100);
}

#[test]
fn dump_origin_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let (one, _) = dump_in(dir.path(), &["--t", "1"]);
    let (_, rows) = csv(&one);
    let origin = rows
        .iter()
        .min_by(|a, b| a[0].abs().total_cmp(&b[0].abs()))
        .unwrap();
    assert!(origin[0].abs() < 1e-9);
    assert!(
        (origin[2] + 0.082).abs() < 5e-4,
        "psi_out(0) = {}",
        origin[2]
    );
}

#[test]
fn dumped_two_photon_samples_are_symmetric() {
    let dir = TempDir::new().unwrap();
    let (_, two) = dump_in(dir.path(), &["--t", "1", "--stride", "40"]);
    let (header, rows) = csv(&two);
    assert_eq!(header, "x1,x2,psi_out_2photon");
    let n = (rows.len() as f64).sqrt() as usize;
    assert_eq!(n * n, rows.len());
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (&rows[i * n + j], &rows[j * n + i]);
            assert_eq!((a[0], a[1]), (b[1], b[0]));
            assert_eq!(a[2], b[2]);
        }
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# sweep settings\nl = 0.5\ntmin=1\ntmax=2\nsteps=3\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file = ok(&["sweep-t", "--config", cfg]);
    assert!(from_file.lines().any(|l| l == "# l=0.5"));
    assert!(from_file.lines().any(|l| l == "# steps=3"));
    assert_eq!(csv(&from_file).1.len(), 3);

    let overridden = ok(&["sweep-t", "--config", cfg, "--l", "0.9", "--steps", "2"]);
    assert!(overridden.lines().any(|l| l == "# l=0.9"));
    assert_eq!(csv(&overridden).1.len(), 2);
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "gama=2\n").unwrap();
    let out = nsgate(&["sweep-t", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["sweep-t", "--tmin", "0.5", "--tmax", "3", "--steps", "26"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn csv_written_to_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("curve.csv");
    let out = nsgate(&["sweep-t", "--steps", "4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.ends_with('\n') && !text.contains('\r'));
    assert_eq!(csv(&text).1.len(), 4);
}

#[test]
fn unwritable_path_fails_cleanly() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("missing").join("curve.csv");
    let out = nsgate(&["sweep-t", "--steps", "2", "--out", path.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
    assert!(!path.exists());
}

#[test]
fn numeric_failure_leaves_no_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("curve.csv");
    // too little tail room for the scattered pulse
    let out = nsgate(&[
        "sweep-t",
        "--extent-margin",
        "0.5",
        "--tmin",
        "0.5",
        "--tmax",
        "1",
        "--steps",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(!path.exists());
}

#[test]
fn points_per_unit_is_bounded() {
    assert_eq!(
        nsgate(&["sweep-t", "--points-per-unit", "5"]).status.code(),
        Some(1)
    );
    assert_eq!(
        nsgate(&["sweep-t", "--points-per-unit", "3000"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn bad_flag_is_a_usage_error() {
    assert_eq!(nsgate(&["sweep-t", "--bogus"]).status.code(), Some(1));
    assert_eq!(nsgate(&["frobnicate"]).status.code(), Some(1));
}
