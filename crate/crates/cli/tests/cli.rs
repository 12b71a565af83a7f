use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use beurling_cli::output::csv_body;
use serde_json::Value;

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("beurling-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn beurling(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beurling")).args(args).env("BEURLING_OUT_DIR", dir).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn carleson_of_one_point_is_two() {
    let dir = scratch("carleson");
    let o = beurling(&dir, &["carleson", "--set", r#"{"points":[0]}"#, "--expect", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("carleson.json")).unwrap()).unwrap();
    assert!((doc["report"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert_eq!(doc["config"]["command"], "carleson");
    assert_eq!(doc["config"]["params"]["expect"], 2.0);
    assert!(doc["version"].as_str().unwrap().starts_with("beurling "));
}

#[test]
fn verify_prefix_and_failed_assertion_exit_one() {
    let dir = scratch("verify");
    let o = beurling(&dir, &["verify", "carleson", "--expect", "3"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("FAIL carleson"));
}

#[test]
fn unknown_config_key_is_named() {
    let dir = scratch("unknown");
    let cfg = dir.join("cfg.json");
    std::fs::write(&cfg, r#"{"params": {"grid": "default", "bogus": 1}}"#).unwrap();
    let o = beurling(&dir, &["lemma-tail", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"), "{}", stderr(&o));

    std::fs::write(&cfg, r#"{"command": "atw", "params": {}}"#).unwrap();
    let o = beurling(&dir, &["lemma-tail", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("command"), "{}", stderr(&o));

    std::fs::write(&cfg, r#"{"params": {}, "output": "x"}"#).unwrap();
    let o = beurling(&dir, &["lemma-tail", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("output"), "{}", stderr(&o));
}

#[test]
fn bad_values_are_config_errors() {
    let dir = scratch("bad");
    for args in [
        &["lemma-tail", "--grid", "huge"][..],
        &["approx-unit", "--n", "0..3"],
        &["carleson", "--set", r#"{"points":[1,1]}"#],
        &["quotient", "--s", "1.5"],
        &["no-such-command"],
    ] {
        let o = beurling(&dir, args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = scratch("override");
    let cfg = dir.join("cfg.json");
    std::fs::write(&cfg, r#"{"command": "gap-sum", "params": {"width": 0.5, "levels": 10}}"#).unwrap();
    let out = dir.join("g.csv");
    let o = beurling(
        &dir,
        &["gap-sum", "--config", cfg.to_str().unwrap(), "--levels", "60", "--out", out.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains(r#""width":0.5"#) && text.contains(r#""levels":60"#), "{text}");
    assert_eq!(csv_body(&text).lines().filter(|l| !l.starts_with('#')).count(), 61);
}

#[test]
fn reruns_give_identical_csv_bodies() {
    let dir = scratch("rerun");
    let args = ["norm-compare", "--count", "30", "--seed", "11"];
    let read = |name: &str| {
        let o = beurling(&dir, &[&args[..], &["--out", dir.join(name).to_str().unwrap()]].concat());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read_to_string(dir.join(name)).unwrap()
    };
    let (a, b) = (read("a.csv"), read("b.csv"));
    assert_eq!(csv_body(&a), csv_body(&b));
    assert!(csv_body(&a).starts_with("# version=beurling "));
}

#[test]
fn growth_reads_model_op_output() {
    let dir = scratch("growth");
    let o = beurling(&dir, &["model-op", "--sizes", "64", "--n-max", "80"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let input = dir.join("model-op.csv");
    let o = beurling(&dir, &["growth", "--input", input.to_str().unwrap(), "--size", "64", "--expect", "subexp_sqrt"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn interpolation_and_hull_reports() {
    let dir = scratch("misc");
    let o = beurling(&dir, &["interp-const", "--depth", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = beurling(&dir, &["ideal-hull"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("ideal-hull.json")).unwrap()).unwrap();
    let hulls = doc["report"]["hulls"].as_array().unwrap();
    assert_eq!(hulls[0]["points"].as_array().unwrap().len(), 1);
    assert_eq!(hulls[1]["points"].as_array().unwrap().len(), 1);
}
