use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cassinian::io::read_cloud;
use serde_json::Value;

fn cassinian(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cassinian"))
        .args(args)
        .env_remove("CASSINIAN_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const FOUR_POINT: &str = r#"{"n":4,"entries":[[0,2,1,1],[2,0,1,1],[1,1,0,2],[1,1,2,0]]}"#;

#[test]
fn gen_is_seeded_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.json");
    assert!(
        cassinian(&["gen", "--n", "40", "--seed", "5", "--out", a.to_str().unwrap()])
            .status
            .success()
    );
    assert!(
        cassinian(&["gen", "--n", "40", "--seed", "5", "--out", b.to_str().unwrap()])
            .status
            .success()
    );
    let (ca, cb) = (read_cloud(&a).unwrap(), read_cloud(&b).unwrap());
    assert_eq!(ca.len(), 40);
    assert_eq!(ca.points(), cb.points());

    let small = cassinian(&["gen", "--n", "4", "--seed", "1"]);
    let text = String::from_utf8(small.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("label,x1,x2"));
}

#[test]
fn gen_rejects_zero_points() {
    assert_eq!(cassinian(&["gen", "--n", "0"]).status.code(), Some(2));
}

#[test]
fn dist_avg_with_one_puncture_equals_tau_p() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = write(dir.path(), "c.csv", "x1,x2\n0,0\n1,0\n0,2\n3,3\n-1,4\n");
    let tau = cassinian(&["dist", "--cloud", &cloud, "--punctures", "2", "--variant", "tau_p"]);
    let avg = cassinian(&["dist", "--cloud", &cloud, "--punctures", "2", "--variant", "avg_tau"]);
    assert!(tau.status.success());
    assert_eq!(tau.stdout, avg.stdout);
    assert_eq!(json(&tau)["n"], 4);
}

#[test]
fn dist_reports_point_on_puncture() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.csv", "x1,x2\n0,0\n1,1\n");
    let spec = write(
        dir.path(),
        "s.json",
        r#"{"base":"c.csv","punctures":[[1,1]],"variant":"tau_p"}"#,
    );
    let out = cassinian(&["dist", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("point on puncture"));
}

#[test]
fn delta_collinear_is_zero_and_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = write(dir.path(), "line.csv", "x1\n0\n1\n2.5\n7\n9\n");
    let out = cassinian(&["delta", "--cloud", &cloud]);
    assert!(out.status.success());
    assert_eq!(json(&out)["delta"], 0.0);

    let gen = dir.path().join("g.csv");
    cassinian(&["gen", "--n", "30", "--seed", "2", "--out", gen.to_str().unwrap()]);
    let g = gen.to_str().unwrap();
    let one = json(&cassinian(&["delta", "--cloud", g, "--workers", "1"]));
    let eight = json(&cassinian(&["delta", "--cloud", g, "--workers", "8"]));
    assert_eq!(one["delta"], eight["delta"]);
    assert_eq!(one["witness"], eight["witness"]);
    let sampled = json(&cassinian(&[
        "delta",
        "--cloud",
        g,
        "--mode",
        "sampled",
        "--samples",
        "500",
    ]));
    assert_eq!(sampled["mode"], "sampled");
    assert!(sampled["delta"].as_f64().unwrap() <= one["delta"].as_f64().unwrap());
}

#[test]
fn delta_needs_four_points() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = write(dir.path(), "c.csv", "x1\n0\n1\n2\n");
    assert_eq!(cassinian(&["delta", "--cloud", &cloud]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let gen = dir.path().join("g.csv");
    cassinian(&["gen", "--n", "25", "--seed", "3", "--out", gen.to_str().unwrap()]);
    let g = gen.to_str().unwrap();
    assert_eq!(cassinian(&["verify", "axioms", "--cloud", g]).status.code(), Some(0));
    assert_eq!(cassinian(&["verify", "ptolemy", "--cloud", g]).status.code(), Some(0));
    assert_eq!(
        cassinian(&["verify", "sandwich", "--cloud", g, "--k", "2"])
            .status
            .code(),
        Some(0)
    );
    let lemmas = cassinian(&["verify", "lemmas", "--cloud", g, "--k", "8", "--samples", "20000"]);
    assert_eq!(lemmas.status.code(), Some(0));
    assert_eq!(json(&lemmas)["passed"], true);

    let fp = write(dir.path(), "fp.json", FOUR_POINT);
    let bad = cassinian(&[
        "verify",
        "axioms",
        "--matrix",
        &fp,
        "--punctures",
        "0",
        "--variant",
        "tilde_tau_p",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let report = json(&bad);
    let violations = report["reports"][0]["violations"].as_array().unwrap();
    assert_eq!(violations.len(), 1);
    assert_eq!(violations[0]["tuple"], serde_json::json!([1, 2, 0]));

    let ptolemy = cassinian(&["verify", "ptolemy", "--matrix", &fp]);
    assert_eq!(ptolemy.status.code(), Some(1));

    assert_eq!(cassinian(&["verify", "bogus", "--cloud", g]).status.code(), Some(2));
    assert_eq!(cassinian(&["verify", "sandwich", "--cloud", g]).status.code(), Some(2));
    assert_eq!(
        cassinian(&["verify", "axioms", "--cloud", g, "--tol", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn repro_exit_codes_and_output_dir() {
    let out = cassinian(&["repro", "four-point"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["pass"], true);
    assert_eq!(
        cassinian(&["repro", "arctan", "--t-grid", "1,-1"]).status.code(),
        Some(2)
    );
    assert_eq!(cassinian(&["repro", "sweep", "--n", "3"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_cassinian"))
        .args(["repro", "all", "--trials", "2", "--samples", "5000"])
        .env("CASSINIAN_OUT_DIR", dir.path())
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    for name in ["repro-four-point.json", "repro-arctan.json", "repro-sweep.json"] {
        let v: Value = serde_json::from_slice(&fs::read(dir.path().join(name)).unwrap()).unwrap();
        assert_eq!(v["pass"], true, "{name}");
    }
}
