//! End-to-end runs of the `ktrans` binary: reports, exit codes and
//! determinism.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use ktransversal::engines::verify_transversal;
use ktransversal::geometry::{AffineFlat, Vector};
use ktransversal::instances::parse_scene;
use ktransversal::solvers::polytopes_intersect;
use serde_json::Value;
use tempfile::TempDir;

fn ktrans(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ktrans")).args(args).current_dir(dir).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn gen(dir: &Path, file: &str, args: &[&str]) {
    let mut full = vec!["gen", "--out", file];
    full.extend_from_slice(args);
    let out = ktrans(&full, dir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bound_for_lines_in_three_space() {
    let dir = TempDir::new().unwrap();
    let out = ktrans(&["bound", "--k", "1", "--d", "3", "--field", "R"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["bound"], 5);
}

#[test]
fn common_point_of_an_intersecting_family() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "scene.json", &["--kind", "planted", "--seed", "3", "--d", "3", "--k", "0", "--n", "5"]);
    let out = ktrans(&["find-transversal", "--k", "0", "--seed", "1", "scene.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep["verdict"], "found");

    let scene = parse_scene(&std::fs::read_to_string(dir.path().join("scene.json")).unwrap()).unwrap();
    assert!(polytopes_intersect(&scene.sets).unwrap().is_feasible());
    let base: Vec<f64> =
        rep["certificate"]["flat"]["base"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let point = AffineFlat::point(Vector::real(base));
    assert!(verify_transversal(&point, &scene.sets, 1e-6).unwrap().passes);
}

#[test]
fn singletons_without_a_line_are_inconsistent() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "scene.json", &["--kind", "singletons", "--seed", "7", "--d", "2", "--k", "1", "--n", "4"]);
    let scene = parse_scene(&std::fs::read_to_string(dir.path().join("scene.json")).unwrap()).unwrap();
    assert_eq!(scene.label.unwrap().value, ktransversal::instances::Label::NoTransversal);
    let out = ktrans(&["check-consistency", "scene.json", "--seed", "7", "--samples", "4096"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep["verdict"], "inconsistent");
    assert!(rep["certificate"]["violation"]["farkas"].is_array());
}

#[test]
fn engine_failure_is_inconclusive() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "scene.json", &["--kind", "singletons", "--seed", "7", "--d", "2", "--k", "1", "--n", "4"]);
    let out = ktrans(&["find-transversal", "--k", "1", "--seed", "1", "scene.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["verdict"], "not-found");
}

#[test]
fn usage_and_input_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(ktrans(&["bound", "--k", "1", "--d", "3"], dir.path()).status.code(), Some(1));
    assert_eq!(ktrans(&["bound", "--k", "5", "--d", "3", "--field", "R"], dir.path()).status.code(), Some(1));
    assert_eq!(ktrans(&["no-such-command"], dir.path()).status.code(), Some(1));
    std::fs::write(dir.path().join("bad.json"), "{\"field\": \"R\",\n \"d\": }").unwrap();
    let out = ktrans(&["find-transversal", "--k", "0", "--seed", "1", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn reports_repeat_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "scene.json", &["--kind", "planted", "--seed", "11", "--d", "3", "--k", "1", "--n", "5"]);
    for args in [
        &["find-transversal", "--k", "1", "--seed", "4", "scene.json"][..],
        &["check-consistency", "scene.json", "--seed", "4", "--samples", "256"][..],
        &["gen", "--kind", "planted", "--seed", "11", "--d", "3", "--k", "1", "--n", "5"][..],
    ] {
        let (a, b) = (ktrans(args, dir.path()), ktrans(args, dir.path()));
        assert_eq!(a.status.code(), b.status.code());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn scene_from_standard_input() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "scene.json", &["--kind", "planted", "--seed", "5", "--d", "2", "--k", "0", "--n", "3"]);
    let text = std::fs::read(dir.path().join("scene.json")).unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_ktrans"))
        .args(["find-transversal", "--k", "0", "--seed", "1"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&text).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let from_file = ktrans(&["find-transversal", "--k", "0", "--seed", "1", "scene.json"], dir.path());
    assert_eq!(out.stdout, from_file.stdout);
}

#[test]
fn reports_verify_offline_and_tampering_is_caught() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "scene.json", &["--kind", "planted", "--seed", "8", "--d", "2", "--k", "1", "--n", "4"]);
    let out = ktrans(&["find-transversal", "--k", "1", "--seed", "2", "scene.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    std::fs::write(dir.path().join("report.json"), &out.stdout).unwrap();
    let ok = ktrans(&["verify", "--report", "report.json", "scene.json"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(report(&ok)["verdict"], "valid");

    let mut rep = report(&out);
    let base = &mut rep["certificate"]["flat"]["base"][0];
    *base = Value::from(base.as_f64().unwrap() + 100.0);
    std::fs::write(dir.path().join("moved.json"), serde_json::to_vec(&rep).unwrap()).unwrap();
    let bad = ktrans(&["verify", "--report", "moved.json", "scene.json"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn plot_is_deterministic() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "scene.json", &["--kind", "planted", "--seed", "9", "--d", "2", "--k", "1", "--n", "4"]);
    let mut svgs = Vec::new();
    for name in ["a.svg", "b.svg"] {
        let out = ktrans(&["plot", "scene.json", "--out", name], dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        svgs.push(std::fs::read(dir.path().join(name)).unwrap());
    }
    assert!(svgs[0].starts_with(b"<svg"));
    assert_eq!(svgs[0], svgs[1]);
}
