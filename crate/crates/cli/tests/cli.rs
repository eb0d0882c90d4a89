//! Golden outputs of every subcommand. Set `UPDATE_GOLDEN=1` to rewrite them.

use std::path::PathBuf;
use std::process::{Command, Output};

fn dir(sub: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join(sub)
}

fn fixture(name: &str) -> String {
    dir("fixtures").join(name).display().to_string()
}

fn ncprob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncprob")).args(args).output().unwrap()
}

fn golden(name: &str, args: &[&str]) {
    let out = ncprob(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let got = String::from_utf8(out.stdout).unwrap();
    let path = dir("golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(got, want, "{name}");
}

#[test]
fn nc_enumerate() {
    golden("nc_enumerate_3.json", &["nc", "enumerate", "--n", "3"]);
    golden("nc_enumerate_4.txt", &["nc", "enumerate", "--n", "4", "--format", "text"]);
    let out = String::from_utf8(ncprob(&["nc", "enumerate", "--n", "5", "--format", "text"]).stdout).unwrap();
    assert_eq!(out.lines().count(), 42);
}

#[test]
fn nc_kreweras() {
    golden("nc_kreweras.json", &["nc", "kreweras", "--partition", "[[1,2],[3]]"]);
    golden("nc_kreweras_within.json", &["nc", "kreweras", "--partition", "[[1],[2],[3,4]]", "--within", "[[1,2],[3,4]]"]);
}

#[test]
fn cumulants() {
    golden("cumulants_semicircle.json", &["cumulants", "--moments", &fixture("semicircle.json"), "--order", "8"]);
    golden("cumulants_inf.json", &["cumulants", "--moments", &fixture("bernoulli_inf.json"), "--order", "4"]);
}

#[test]
fn conv() {
    let (sc, be) = (fixture("semicircle.json"), fixture("bernoulli.json"));
    for op in ["free", "boolean", "monotone", "boxtimes"] {
        golden(&format!("conv_{op}.json"), &["conv", op, "--a", &sc, "--b", &be, "--order", "6"]);
    }
    golden("conv_cfree.json", &["conv", "cfree", "--a", &sc, "--psi-a", &be, "--b", &be, "--psi-b", &sc, "--order", "6"]);
    golden("conv_inf.json", &["conv", "inf", "--a", &fixture("semicircle_inf.json"), "--b", &fixture("bernoulli_inf.json"), "--order", "4"]);
    golden("conv_cam.json", &["conv", "cam", "--a", &sc, "--b", &fixture("nu.json"), "--order", "4"]);
}

#[test]
fn mk_inverse_of_the_semicircle() {
    golden("mk_inverse_semicircle.json", &["mk", "inverse", "--moments", &fixture("semicircle.json"), "--order", "6"]);
    let v: serde_json::Value = serde_json::from_slice(&ncprob(&["mk", "inverse", "--moments", &fixture("semicircle.json"), "--order", "4"]).stdout).unwrap();
    assert_eq!(v["moments"][2], "2");
    assert_eq!(v["moments"][4], "6");
}

#[test]
fn verify_suites_pass() {
    let out = ncprob(&["verify", "--suite", "all", "--max-n", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
    golden("verify_lattice.txt", &["verify", "--suite", "lattice", "--max-n", "4"]);
    golden("verify_scenario.json", &["verify", "--scenario", &fixture("bprime_scenario.json"), "--format", "json"]);
}

#[test]
fn rmt_csv() {
    golden("rmt_minor.csv", &["rmt", "--config", &fixture("minor.json")]);
    let out = tempfile("rmt_out.csv");
    let run = ncprob(&["rmt", "--config", &fixture("minor.json"), "--out", &out]);
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), std::fs::read_to_string(dir("golden").join("rmt_minor.csv")).unwrap());
    let single = Command::new(env!("CARGO_BIN_EXE_ncprob"))
        .args(["rmt", "--config", &fixture("minor.json")])
        .env("NCPROB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(single.stdout, std::fs::read(dir("golden").join("rmt_minor.csv")).unwrap());
    let reseeded = ncprob(&["rmt", "--config", &fixture("minor.json"), "--seed", "6"]);
    assert_ne!(reseeded.stdout, single.stdout);
}

fn tempfile(name: &str) -> String {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    d.join(name).display().to_string()
}

#[test]
fn exit_codes() {
    // a check that fails at the requested tolerance
    assert_eq!(ncprob(&["rmt", "--config", &fixture("minor.json"), "--tolerance", "0"]).status.code(), Some(1));
    // usage and input errors
    assert_eq!(ncprob(&["nc", "enumerate", "--n", "3", "--bogus"]).status.code(), Some(2));
    assert_eq!(ncprob(&["cumulants", "--moments", &fixture("broken.json"), "--order", "4"]).status.code(), Some(2));
    assert_eq!(ncprob(&["cumulants", "--moments", &fixture("missing.json"), "--order", "4"]).status.code(), Some(2));
    assert_eq!(ncprob(&["cumulants", "--moments", &fixture("semicircle.json"), "--order", "12"]).status.code(), Some(2));
    assert_eq!(ncprob(&["nc", "kreweras", "--partition", "[[1,3],[2,4]]"]).status.code(), Some(2));
    assert_eq!(ncprob(&["conv", "cfree", "--a", &fixture("semicircle.json"), "--b", &fixture("semicircle.json"), "--order", "4"]).status.code(), Some(2));
    assert_eq!(ncprob(&["verify", "--suite", "nope"]).status.code(), Some(2));
}
