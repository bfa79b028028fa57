use std::path::Path;
use std::process::{Command, Output};

fn funkradon(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_funkradon"))
        .args(args)
        .current_dir(dir)
        .env_remove("FUNKRADON_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn forward_reports_range_and_peak() {
    let dir = tempfile::tempdir().unwrap();
    let o = funkradon(
        &[
            "forward", "--geometry", "radon:support=1", "--phantom", "gauss:0,0,0.2,1",
            "--nlambda", "129", "--nphi", "16", "--out", "s.fkr",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("lambda range [-1, 1]"), "{out}");
    // The peak is the central line integral sigma * sqrt(2 pi).
    let peak: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("max |entry| = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((peak - 0.2 * (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-8, "{peak}");
    let text = std::fs::read_to_string(dir.path().join("s.fkr")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("FKR1"));
    assert_eq!(lines.next(), Some("radon:support=1"));
    assert_eq!(lines.next(), Some("mphi 129 16 -1 1 full"));
    assert_eq!(lines.count(), 16);
}

#[test]
fn forward_header_echoes_descriptor() {
    let dir = tempfile::tempdir().unwrap();
    let o = funkradon(
        &[
            "forward", "--geometry", "ellipse:support=0.7,e2=1,e1=1", "--phantom", "gauss:0,0,0.1,1",
            "--nlambda", "33", "--nphi", "8", "--out", "e.fkr",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("e.fkr")).unwrap();
    assert_eq!(text.lines().nth(1), Some("ellipse:e1=1,e2=1,support=0.7"));
}

#[test]
fn bad_geometry_tag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = funkradon(
        &["forward", "--geometry", "elipse:e1=1,e2=1", "--phantom", "gauss:0,0,0.1,1", "--out", "x.fkr"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("'elipse'"), "{}", stderr(&o));
    assert!(!dir.path().join("x.fkr").exists());
}

#[test]
fn bad_phantom_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let o = funkradon(
        &["forward", "--geometry", "radon", "--phantom", "gauss:0,0,0.1,1;gauss:0,x,1,1", "--out", "x.fkr"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("byte 24"), "{}", stderr(&o));
}

#[test]
fn missing_arguments_and_low_resolution_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(funkradon(&["forward", "--geometry", "radon"], dir.path()).status.code(), Some(2));
    let o = funkradon(
        &["forward", "--geometry", "radon", "--phantom", "gauss:0,0,0.1,1", "--nphi", "4", "--out", "x.fkr"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(funkradon(&["frobnicate"], dir.path()).status.code(), Some(2));
}

fn round_trip(geometry: &str, phantom: &str, riemann: bool, limit: f64) {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "forward", "--geometry", geometry, "--phantom", phantom, "--nlambda", "129", "--nphi", "90", "--out",
        "s.fkr",
    ];
    if riemann {
        args.push("--riemann");
    }
    let o = funkradon(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut args = vec!["invert", "--input", "s.fkr", "--out", "r.f64", "--grid", "33", "--phantom", phantom];
    if riemann {
        args.push("--riemann");
    }
    let o = funkradon(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let err: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("rel_l2 = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(err < limit, "{geometry}: rel_l2 {err}");
    let grid = std::fs::read_to_string(dir.path().join("r.f64")).unwrap();
    assert!(grid.starts_with("F64GRID 33 33 "));
    assert_eq!(grid.lines().count(), 34);
    let pgm = std::fs::read(dir.path().join("r.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n33 33\n255\n"));
    assert_eq!(pgm.len(), b"P5\n33 33\n255\n".len() + 33 * 33);
}

#[test]
fn invert_radon_through_files() {
    round_trip("radon:support=1", "gauss:0,0,0.15,1", false, 0.02);
}

#[test]
fn invert_ellipse_through_files() {
    round_trip("ellipse:e1=1,e2=1,support=0.7", "gauss:0,0,0.105,1", false, 0.02);
}

#[test]
fn invert_riemann_data_through_files() {
    round_trip("hgeodesic:support=0.7", "gauss:0.1,0,0.1,1", true, 0.05);
}

#[test]
fn invert_rejects_kind_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let o = funkradon(
        &[
            "forward", "--geometry", "radon", "--phantom", "gauss:0,0,0.15,1", "--nlambda", "33", "--nphi", "8",
            "--out", "s.fkr",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let o = funkradon(&["invert", "--input", "s.fkr", "--out", "r.f64", "--riemann"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn invert_reports_numerical_failures_with_code_3() {
    // The phantom reaches the edge of the lambda window.
    let dir = tempfile::tempdir().unwrap();
    let o = funkradon(
        &[
            "forward", "--geometry", "radon:support=1", "--phantom", "gauss:0,0,0.4,1", "--nlambda", "65", "--nphi",
            "16", "--out", "s.fkr",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let o = funkradon(&["invert", "--input", "s.fkr", "--out", "r.f64", "--grid", "17"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("lambda window"), "{}", stderr(&o));
}

#[test]
fn invert_rejects_malformed_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.fkr"), "FKR1\nradon\nmphi 4 1 -1 1 full\n1 2 3\n").unwrap();
    let o = funkradon(&["invert", "--input", "bad.fkr", "--out", "r.f64"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn kernel_check_passes_for_radon() {
    let o = funkradon(&["kernel-check", "--geometry", "radon:support=1"], Path::new("."));
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("pair ")).count(), 100);
    assert!(out.lines().any(|l| l == "PASS"));
}

#[test]
fn kernel_check_passes_inside_ellipse_support() {
    let o = funkradon(&["kernel-check", "--geometry", "ellipse:e1=1.2,e2=0.8,support=0.7", "--pairs", "30"], Path::new("."));
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn kernel_check_names_violated_support_condition() {
    let o = funkradon(&["kernel-check", "--geometry", "ellipse:e1=1,e2=1,support=3", "--pairs", "20"], Path::new("."));
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("‖y+x‖*ₑ<2"), "{out}");
    assert!(out.lines().any(|l| l == "FAIL"));
}

#[test]
fn dcoef_table() {
    let o = funkradon(
        &["dcoef", "--geometry", "hyperbola:eps=1.4142135623730951,support=1", "--point", "0.3,-0.2", "--point", "-0.5,0.1"],
        Path::new("."),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("PASS"));
    let row = out.lines().find(|l| l.trim_start().starts_with("0.3")).unwrap();
    let closed: f64 = row.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((closed - 1.0).abs() < 1e-12, "{row}");

    let o = funkradon(&["dcoef", "--geometry", "equidistant:support=0.5", "--point", "0,0"], Path::new("."));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0.25"));
    let o = funkradon(&["dcoef", "--geometry", "radon", "--point", "1;2"], Path::new("."));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dcoef_outside_domain_is_numerical_error() {
    let o = funkradon(&["dcoef", "--geometry", "hgeodesic:support=0.5", "--point", "1.5,0"], Path::new("."));
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn selftest_fast_passes_and_detects_sign_flip() {
    let o = funkradon(&["selftest", "--fast"], Path::new("."));
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count() >= 7);

    let o = funkradon(&["selftest", "--fast", "--inject-sign-flip"], Path::new("."));
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL [5]"));
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str, out: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_funkradon"))
            .args([
                "forward", "--geometry", "cormack:k=2,support=1", "--phantom", "gauss:0.4,0.1,0.1,1", "--nlambda",
                "65", "--nphi", "24", "--out", out,
            ])
            .env("FUNKRADON_WORKERS", workers)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(dir.path().join(out)).unwrap()
    };
    assert_eq!(run("1", "a.fkr"), run("3", "b.fkr"));
}
