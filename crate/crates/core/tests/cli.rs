use std::fs;
use std::process::{Command, Output};

fn erbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_erbm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value_of(report: &str, key: &str) -> f64 {
    let line = report.lines().find(|l| l.starts_with(&format!("{key} = "))).unwrap_or_else(|| panic!("no {key} in\n{report}"));
    line.split(" = ").nth(1).unwrap().split(" #").next().unwrap().trim().parse().unwrap()
}

#[test]
fn validate_the_annulus() {
    let o = erbm(&["validate", "--domain", "bundled/annulus.dom", "--paths", "20000", "--no-timestamp"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}{}", stderr(&o));
    assert!(text.contains("failures = 0"));
    for suite in ["geometry", "kernels", "erbm", "slitmap", "sampler"] {
        assert!(text.contains(&format!("{suite} = annulus:pass")), "{suite}\n{text}");
    }
    assert!(!text.contains("FAIL"));
}

#[test]
fn overlapping_holes_are_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.dom");
    fs::write(&path, "outer circle 0 0 1\nhole circle -0.3 0 0.2\n# comment\nhole circle -0.1 0 0.2\n").unwrap();
    let o = erbm(&["pk", "--domain", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("HolesIntersect") && err.contains("line(s) 2, 4"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn syntax_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("typo.dom");
    fs::write(&path, "outer circle 0 0 1\nhole cirle 0 0 0.2\n").unwrap();
    let o = erbm(&["chain", "--domain", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn bilateral_annulus_radius() {
    let o = erbm(&["map-bilateral", "--domain", "bundled/annulus.dom", "--hole", "1", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!((value_of(&text, "inner_radius") - 0.25).abs() < 1e-5);
    assert!(text.contains("inner_radius = 0.25 # tol"));
    assert!((value_of(&text, "conjugate_period") + std::f64::consts::TAU).abs() < 1e-4);
}

#[test]
fn reruns_are_byte_identical() {
    let base = ["sample", "--domain", "bundled/mirror.dom", "--hole", "2", "--paths", "4000", "--seed", "7", "--no-timestamp"];
    let a = erbm(&base);
    let b = erbm(&base);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let mut threaded = base.to_vec();
    threaded.extend(["--workers", "3"]);
    assert_eq!(a.stdout, erbm(&threaded).stdout);
    let mut reseeded = base.to_vec();
    reseeded[7] = "8";
    assert_ne!(a.stdout, erbm(&reseeded).stdout);

    let chain = ["chain", "--domain", "bundled/mirror.dom", "--no-timestamp"];
    assert_eq!(erbm(&chain).stdout, erbm(&chain).stdout);
}

#[test]
fn timestamps_appear_by_default() {
    let o = erbm(&["chain", "--domain", "bundled/annulus.dom"]);
    let text = stdout(&o);
    assert!(text.contains("timestamp_unix = ") && text.contains("elapsed_s = "));
}

#[test]
fn outputs_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("figs");
    let o = erbm(&["map-chordal", "--domain", "bundled/mirror.dom", "--w", "0.5", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svg = fs::read_to_string(out.join("chordal.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.matches("<polyline").count() >= 3);
    let csv = fs::read_to_string(out.join("chordal.csv")).unwrap();
    assert!(csv.starts_with("x,y,u,v\n") && csv.lines().count() > 1000);

    let o = erbm(&["trace", "--domain", "bundled/disk.dom", "--level", "0.3", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(fs::read_to_string(out.join("level.csv")).unwrap().lines().count() > 50);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(erbm(&["--help"]).status.code(), Some(0));
    assert_eq!(erbm(&["pk", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(erbm(&["pk"]).status.code(), Some(2));
    assert_eq!(erbm(&["pk", "--domain", "nowhere.dom"]).status.code(), Some(2));
    assert_eq!(erbm(&["pk", "--domain", "bundled/disk.dom", "--z", "3,0"]).status.code(), Some(2));
    assert_eq!(erbm(&["pk", "--domain", "bundled/disk.dom", "--z", "0.1"]).status.code(), Some(2));
    assert_eq!(erbm(&["map-bilateral", "--domain", "bundled/disk.dom"]).status.code(), Some(2));
    assert_eq!(erbm(&["chain", "--domain", "bundled/disk.dom", "--collar", "1.5"]).status.code(), Some(2));
}

#[test]
fn computation_failures_exit_1() {
    // A level equal to the hole plateau of H^ER cannot be traced.
    let o = erbm(&["er-pk", "--domain", "bundled/annulus.dom", "--no-timestamp"]);
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("constants = ")).unwrap();
    let plateau = line.split('[').nth(1).unwrap().split(']').next().unwrap().trim();
    let o = erbm(&["trace", "--domain", "bundled/annulus.dom", "--level", plateau]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("PlateauLevel"), "{}", stderr(&o));
}
