//! The acceptance suite behind `beurling all`.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::time::Instant;

use beurling::circle_sets::CircleSet;
use beurling::spectral::Verdict;
use serde_json::{json, Value};

use crate::commands::*;
use crate::output::{Report, RunError};

pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    /// Seconds.
    pub budget: f64,
    pub elapsed: f64,
    pub reports: Vec<(String, Report)>,
}

impl Criterion {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.1.pass)
    }

    pub fn detail(&self) -> String {
        self.reports.iter().map(|(label, r)| format!("{label}: {}", r.summary)).collect::<Vec<_>>().join(" | ")
    }
}

fn set(points: &[f64]) -> CircleSet {
    CircleSet::from_angles(points.iter().copied()).expect("suite sets are valid")
}

fn go<E: Experiment>(label: &str, e: E) -> Result<(String, Report), RunError> {
    Ok((label.to_string(), execute(&e, None)?))
}

type Runner = fn() -> Result<Vec<(String, Report)>, RunError>;

const CRITERIA: [(u32, &str, f64, Runner); 12] = [
    (1, "tail inequality grid", 10.0, || Ok(vec![go("lemma-tail", LemmaTail::default())?])),
    (2, "approximate unit bound and decay", 60.0, || Ok(vec![go("approx-unit", ApproxUnit::default())?])),
    (3, "derivative norm comparison", 5.0, || Ok(vec![go("norm-compare", NormCompare::default())?])),
    (4, "Ditkin convergence", 120.0, || Ok(vec![go("ditkin", Ditkin::default())?])),
    (5, "divide by root round trip", 1.0, || Ok(vec![go("divide-root", DivideRoot::default())?])),
    (6, "Carleson closed form and gap-sum limit", 5.0, || {
        Ok(vec![
            go("carleson", Carleson { set: Some(set(&[0.0])), expect: Some(2.0), ..Default::default() })?,
            go("gap-sum", GapSum::default())?,
        ])
    }),
    (7, "ATW fit for a single point", 10.0, || {
        Ok(vec![go("atw", Atw { set: Some(set(&[0.0])), max_c1: Some(1.1), max_c2: Some(1.1), ..Default::default() })?])
    }),
    (8, "perfect subset scheme", 10.0, || Ok(vec![go("build-carleson-set", BuildCarlesonSet::default())?])),
    (9, "inner function evaluation", 5.0, || Ok(vec![go("inner-eval", InnerEval::default())?])),
    (10, "model operator growth", 300.0, || {
        Ok(vec![go("model-op", ModelOp { max_c: Some(0.6), expect: Some(Verdict::SubexpSqrt), ..Default::default() })?])
    }),
    (11, "quotient duality", 180.0, || {
        let eight: Vec<f64> = (0..8).map(|k| TAU * k as f64 / 8.0).collect();
        Ok(vec![
            go("quotient-one-point", Quotient { set: Some(set(&[0.0])), expect: Some(1.0), ..Default::default() })?,
            go("quotient-two-points", Quotient { set: Some(set(&[0.0, PI])), ..Default::default() })?,
            go("quotient-eight-points", Quotient { set: Some(set(&eight)), ..Default::default() })?,
        ])
    }),
    (12, "planted growth recovery", 1.0, || {
        Ok(vec![
            go(
                "growth-power",
                Growth {
                    planted: Some("power:2".into()),
                    expect: Some(Verdict::Polynomial),
                    expect_coef: Some(2.0),
                    ..Default::default()
                },
            )?,
            go(
                "growth-sqrt",
                Growth {
                    planted: Some("sqrt:0.4".into()),
                    expect: Some(Verdict::SubexpSqrt),
                    expect_coef: Some(0.4),
                    ..Default::default()
                },
            )?,
        ])
    }),
];

/// Total time budget of the suite in seconds.
pub const TOTAL_BUDGET: f64 = 900.0;

/// Runs criteria 1 to 12 in order. Numerical and config failures abort the suite.
pub fn run_all(mut progress: impl FnMut(&Criterion)) -> Result<Vec<Criterion>, RunError> {
    let mut out = Vec::new();
    for (id, title, budget, runner) in CRITERIA {
        let start = Instant::now();
        let reports = runner()?;
        let c = Criterion { id, title, budget, elapsed: start.elapsed().as_secs_f64(), reports };
        progress(&c);
        out.push(c);
    }
    Ok(out)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Writes every report plus `all.csv` (deterministic) and `all.json` (with timings).
pub fn write_all(dir: &Path, criteria: &[Criterion], total: f64) -> Result<(), RunError> {
    for c in criteria {
        for (label, r) in &c.reports {
            r.write(&dir.join(format!("c{:02}-{label}.{}", c.id, r.extension())))?;
        }
    }
    let rows = criteria
        .iter()
        .map(|c| vec![c.id.to_string(), quote(c.title), c.pass().to_string(), quote(&c.detail())])
        .collect();
    let config = json!({ "command": "all", "params": {} });
    let pass = criteria.iter().all(Criterion::pass);
    let table = Report {
        command: "all".into(),
        config: config.clone(),
        pass,
        summary: String::new(),
        body: crate::output::Body::Table { header: vec!["criterion", "title", "pass", "detail"], rows },
    };
    table.write(&dir.join("all.csv"))?;
    let entries: Vec<Value> = criteria
        .iter()
        .map(|c| {
            json!({
                "criterion": c.id,
                "title": c.title,
                "pass": c.pass(),
                "seconds": c.elapsed,
                "budget_seconds": c.budget,
                "within_budget": c.elapsed < c.budget,
                "reports": c.reports.iter().map(|(label, r)| json!({
                    "label": label,
                    "file": format!("c{:02}-{label}.{}", c.id, r.extension()),
                    "pass": r.pass,
                    "summary": r.summary,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let doc = Report {
        command: "all".into(),
        config,
        pass,
        summary: format!("{}/{} criteria pass", criteria.iter().filter(|c| c.pass()).count(), criteria.len()),
        body: crate::output::Body::Json(json!({
            "criteria": entries,
            "total_seconds": total,
            "total_budget_seconds": TOTAL_BUDGET,
        })),
    };
    doc.write(&dir.join("all.json"))
}
