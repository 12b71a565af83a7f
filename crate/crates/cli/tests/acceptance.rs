//! Runs `beurling all` twice and prints one PASS/FAIL line per acceptance criterion.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use beurling_cli::output::csv_body;
use serde_json::Value;

const FULL_SUITE_BUDGET: f64 = 900.0;

fn run_suite(dir: &Path) -> f64 {
    let start = Instant::now();
    let status =
        Command::new(env!("CARGO_BIN_EXE_beurling")).arg("all").arg("--out").arg(dir).status().expect("runner starts");
    // Exit code 1 only means some criterion failed; the lines below say which.
    assert!(matches!(status.code(), Some(0 | 1)), "suite aborted with {status}");
    start.elapsed().as_secs_f64()
}

fn csv_files(dir: &Path) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn main() {
    let root = std::env::temp_dir().join(format!("beurling-acceptance-{}", std::process::id()));
    let (first, second) = (root.join("first"), root.join("second"));
    let t1 = run_suite(&first);
    let t2 = run_suite(&second);

    let doc: Value = serde_json::from_str(&std::fs::read_to_string(first.join("all.json")).unwrap()).unwrap();
    let mut failed = 0;
    for c in doc["report"]["criteria"].as_array().unwrap() {
        let ok = c["pass"].as_bool().unwrap() && c["within_budget"].as_bool().unwrap();
        failed += usize::from(!ok);
        let summaries: Vec<&str> =
            c["reports"].as_array().unwrap().iter().map(|r| r["summary"].as_str().unwrap()).collect();
        println!(
            "{} criterion {:2} {} ({:.2} s of {} s): {}",
            if ok { "PASS" } else { "FAIL" },
            c["criterion"],
            c["title"].as_str().unwrap(),
            c["seconds"].as_f64().unwrap(),
            c["budget_seconds"],
            summaries.join(" | ")
        );
    }

    let (a, b) = (csv_files(&first), csv_files(&second));
    let same_names = a.iter().map(|f| &f.0).eq(b.iter().map(|f| &f.0));
    let differing: Vec<&str> =
        a.iter().zip(&b).filter(|(x, y)| csv_body(&x.1) != csv_body(&y.1)).map(|(x, _)| x.0.as_str()).collect();
    let ok = same_names && differing.is_empty() && t1 < FULL_SUITE_BUDGET && t2 < FULL_SUITE_BUDGET;
    failed += usize::from(!ok);
    println!(
        "{} criterion 13 determinism ({} CSV files, {} differing; runs took {t1:.1} s and {t2:.1} s of {FULL_SUITE_BUDGET} s)",
        if ok { "PASS" } else { "FAIL" },
        a.len(),
        if same_names { differing.len().to_string() } else { "file sets differ,".into() },
    );
    println!("{failed} of 13 criteria fail");
    let _ = std::fs::remove_dir_all(&root);
}
