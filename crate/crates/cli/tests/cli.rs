use std::fs;
use std::path::PathBuf;
use std::process::{Command as Proc, Output};

use proptest::prelude::*;

use segre_cli::corpus::corpus;
use segre_cli::Manifest;

fn segre(args: &[&str]) -> Output {
    Proc::new(env!("CARGO_BIN_EXE_segre")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("segre-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn corpus_path(name: &str) -> String {
    format!("{}/corpus/{name}.tomlish", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn reality_violation_exits_1_with_monomial() {
    let p = scratch("bad.tomlish", "m = 1\nd = 1\ntheta_bar_1 = w1*zeta1 + w1^2*zeta1\n");
    let out = segre(&["validate", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("w1*zeta1^2"), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(segre(&["frobnicate"]).status.code(), Some(2));
    let p = scratch("badkey.tomlish", "m = 1\nd = x\n");
    let out = segre(&["validate", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
    let p = scratch("dup.tomlish", "m = 1\nm = 1\nd = 1\ntheta_bar_1 = w1*zeta1\n");
    assert_eq!(segre(&["validate", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn machine_reports_are_byte_identical() {
    for (cmd, name) in [("multitype", "ex8_6"), ("hormander", "c3_cubic"), ("orbit", "orbit_pair5"), ("witness", "ex7_8")] {
        let path = corpus_path(name);
        let a = segre(&["--format", "machine", cmd, &path]);
        let b = segre(&["--format", "machine", cmd, &path]);
        assert_eq!(a.status.code(), Some(0), "{cmd} {name}");
        assert_eq!(a.stdout, b.stdout, "{cmd} {name}");
        let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
        assert_eq!(v["command"], cmd);
        assert_eq!(v["provenance"]["seed"], 0);
    }
}

#[test]
fn human_format_is_default() {
    let out = segre(&["multitype", &corpus_path("heisenberg")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(serde_json::from_slice::<serde_json::Value>(&out.stdout).is_err());
    assert!(String::from_utf8_lossy(&out.stdout).contains("multitype"));
}

#[test]
fn bundled_corpus_passes() {
    let out = segre(&["checkall"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn checkall_reports_a_wrong_expectation() {
    let dir = std::env::temp_dir().join(format!("segre-cli-wrong-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join("h.tomlish"), "m = 1\nd = 1\ntheta_bar_1 = w1*zeta1\n").unwrap();
    fs::write(dir.join("h.expect"), "mu = 4\n").unwrap();
    let out = segre(&["checkall", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn corpus_manifests_round_trip() {
    for e in corpus() {
        let m = Manifest::parse(e.manifest).unwrap();
        let again = Manifest::parse(&m.serialize()).unwrap();
        assert!(m.same_content(&again), "{}", e.name);
        assert_eq!(again.serialize(), m.serialize());
    }
}

fn monomial() -> impl Strategy<Value = String> {
    (1i32..5, 0u32..3, 0u32..3, 0u32..2).prop_map(|(c, a, b, x)| format!("{c}*w1^{a}*zeta1^{b}*xi1^{x}"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn manifold_manifests_round_trip(
        terms in prop::collection::vec(monomial(), 1..4),
        order in prop::option::of(0u32..9),
        named in any::<bool>(),
    ) {
        let mut src = String::new();
        if named {
            src.push_str("name = sample\n");
        }
        src.push_str("m = 1\nd = 1\n");
        if let Some(o) = order {
            src.push_str(&format!("order = {o}\n"));
        }
        src.push_str(&format!("theta_bar_1 = {}\n", terms.join(" + ")));
        let m = Manifest::parse(&src).unwrap();
        let text = m.serialize();
        let again = Manifest::parse(&text).unwrap();
        prop_assert!(m.same_content(&again));
        prop_assert_eq!(again.serialize(), text);
    }
}
