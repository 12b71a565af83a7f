//! One parameter struct per subcommand. Every field is optional so that flags can be overlaid on
//! a config file; `resolve` fills in defaults and `run` produces the report.

use std::f64::consts::{PI, TAU};
use std::path::PathBuf;

use beurling::approx_unit::{ditkin_sequence_with, en_monomial_norm, make_units, Truncation};
use beurling::circle_sets::{
    atw_check, build_carleson_perfect_subset, carleson_gap_sum, carleson_integral, perfect_subset_gap_bound,
    perfect_subset_gap_total, CircleSet, GapLevels, IntervalSet, MiddleThirdsCantor, PerfectSet,
};
use beurling::ideals::{hull, jet_membership, JetSpec};
use beurling::series::{compare_derivative_norms, tail_bound, LaurentSeries};
use beurling::spectral::{
    growth_fit, inner_taylor, interpolation_constant, model_section, power_norms, quotient_inverse_norms,
    AtomicMeasure, GrowthReport, Verdict,
};
use beurling::weights::{asym_weight, power_weight};
use beurling::Complex64;
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::oracle;
use crate::output::{num, Body, Report, RunError};
use crate::params::{json as parse_json, merge, Ints};

pub trait Experiment: Serialize + DeserializeOwned {
    const NAME: &'static str;

    fn resolve(self) -> Result<Self, RunError>;

    /// Builds the report; the caller attaches the resolved config.
    fn run(&self) -> Result<Report, RunError>;
}

/// Merges `flags` over `file`, resolves defaults and runs.
pub fn execute<E: Experiment>(flags: &E, file: Option<Value>) -> Result<Report, RunError> {
    let resolved = merge(file, flags).map_err(RunError::config)?.resolve()?;
    let mut report = resolved.run()?;
    report.config = json!({ "command": E::NAME, "params": resolved });
    Ok(report)
}

fn table(name: &str, header: Vec<&'static str>, rows: Vec<Vec<String>>, pass: bool, summary: String) -> Report {
    Report { command: name.into(), config: Value::Null, pass, summary, body: Body::Table { header, rows } }
}

fn document(name: &str, body: Value, pass: bool, summary: String) -> Report {
    Report { command: name.into(), config: Value::Null, pass, summary, body: Body::Json(body) }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn positive(key: &str, v: f64) -> Result<f64, RunError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(RunError::config(format!("{key}: must be positive and finite, got {v}")))
    }
}

fn verdict(s: &str) -> Result<Verdict, String> {
    serde_json::from_value(Value::String(s.into())).map_err(|_| format!("unknown verdict `{s}`"))
}

fn default_set(points: &[f64]) -> CircleSet {
    CircleSet::from_angles(points.iter().copied()).expect("default sets are valid")
}

fn unit() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Tail inequality `Σ_{k≥j}(1+k)^β x^k ≤ bound` on a grid, against a term-by-term oracle.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaTail {
    /// Named grid: `default` (β ∈ {0,0.25,0.5,0.75,0.99}, j ∈ 0..50, x ∈ 0.01..0.99) or `coarse`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Overrides the grid's β values.
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    /// Overrides the grid's j values.
    #[arg(long)]
    pub j: Option<Ints>,
    /// Overrides the grid's x values.
    #[arg(long, value_delimiter = ',')]
    pub x: Option<Vec<f64>>,
    /// Smallest accepted `bound − oracle`.
    #[arg(long, allow_hyphen_values = true)]
    pub margin: Option<f64>,
}

impl Experiment for LemmaTail {
    const NAME: &'static str = "lemma-tail";

    fn resolve(mut self) -> Result<Self, RunError> {
        let grid = self.grid.get_or_insert_with(|| "default".into()).clone();
        let (betas, js, xs): (Vec<f64>, &str, Vec<f64>) = match grid.as_str() {
            "default" => (vec![0.0, 0.25, 0.5, 0.75, 0.99], "0..50", (1..=99).map(|k| k as f64 / 100.0).collect()),
            "coarse" => (vec![0.0, 0.5, 0.99], "0..10", (1..=9).map(|k| k as f64 / 10.0).collect()),
            other => {
                return Err(RunError::config(format!("grid: unknown grid `{other}` (expected default or coarse)")))
            }
        };
        self.beta.get_or_insert(betas);
        self.j.get_or_insert_with(|| js.parse().unwrap());
        self.x.get_or_insert(xs);
        self.margin.get_or_insert(-1e-12);
        if self.j.as_ref().unwrap().values().iter().any(|&j| j < 0) {
            return Err(RunError::config("j: must be nonnegative"));
        }
        Ok(self)
    }

    fn run(&self) -> Result<Report, RunError> {
        let margin_floor = self.margin.unwrap();
        let cells: Vec<(f64, u64, f64)> = self
            .beta
            .iter()
            .flatten()
            .flat_map(|&b| {
                self.j
                    .as_ref()
                    .unwrap()
                    .values()
                    .iter()
                    .flat_map(move |&j| self.x.iter().flatten().map(move |&x| (b, j as u64, x)))
            })
            .collect();
        let rows: Vec<(Vec<String>, bool)> = cells
            .par_iter()
            .map(|&(b, j, x)| {
                let bound = tail_bound(b, j, x)?;
                let oracle = oracle::tail_sum(b, j, x);
                let margin = bound - oracle;
                let pass = margin >= margin_floor;
                Ok((vec![num(b), j.to_string(), num(x), num(bound), num(oracle), num(margin), pass.to_string()], pass))
            })
            .collect::<Result<_, beurling::Error>>()?;
        let passed = rows.iter().filter(|r| r.1).count();
        let pass = passed == rows.len();
        Ok(table(
            Self::NAME,
            vec!["beta", "j", "x", "bound", "oracle", "margin", "pass"],
            rows.into_iter().map(|r| r.0).collect(),
            pass,
            format!("{passed}/{} cells with bound >= oracle {margin_floor:e}", cells.len()),
        ))
    }
}

/// `A‖f'‖ ≤ ‖f‖ ≤ |f̂(0)|ω(0) + 3B‖f'‖` on random finitely supported series.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormCompare {
    /// Number of random series.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Exponent of the weight on the positive side, `(1+n)^s`.
    #[arg(long)]
    pub s: Option<f64>,
    /// Exponent of the weight on the negative side, `(1+|n|)^t`.
    #[arg(long)]
    pub t: Option<f64>,
    /// Largest number of nonzero coefficients.
    #[arg(long)]
    pub terms: Option<usize>,
    /// Largest `|n|` in the support.
    #[arg(long)]
    pub radius: Option<i64>,
}

impl Experiment for NormCompare {
    const NAME: &'static str = "norm-compare";

    fn resolve(mut self) -> Result<Self, RunError> {
        self.count.get_or_insert(200);
        self.seed.get_or_insert(2);
        self.s.get_or_insert(0.5);
        self.t.get_or_insert(2.0);
        self.terms.get_or_insert(8);
        self.radius.get_or_insert(20);
        if self.terms == Some(0) || self.radius.unwrap() < 0 {
            return Err(RunError::config("terms: must be >= 1 and radius >= 0"));
        }
        Ok(self)
    }

    fn run(&self) -> Result<Report, RunError> {
        let w = asym_weight(self.s.unwrap(), self.t.unwrap())?;
        let r = self.radius.unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.unwrap());
        let mut rows = Vec::new();
        let mut failures = 0;
        for idx in 0..self.count.unwrap() {
            let k = rng.gen_range(1..=self.terms.unwrap());
            let f = LaurentSeries::from_coeffs((0..k).map(|_| (rng.gen_range(-r..=r), random_complex(&mut rng))));
            let c = compare_derivative_norms(&f, &w)?;
            let (lo, hi) = f.support().unwrap_or((0, 0));
            failures += usize::from(!c.holds);
            rows.push(vec![
                idx.to_string(),
                lo.to_string(),
                hi.to_string(),
                num(c.a),
                num(c.b),
                num(c.lower),
                num(c.norm),
                num(c.upper),
                c.holds.to_string(),
            ]);
        }
        Ok(table(
            Self::NAME,
            vec!["index", "support_lo", "support_hi", "a", "b", "lower", "norm", "upper", "holds"],
            rows,
            failures == 0,
            format!("{failures} violations in {} series", self.count.unwrap()),
        ))
    }
}

/// Certified `‖(e_n − 1)(α^j − 1)‖_ω` against `3ω(j)`, plus its size at one large `n`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxUnit {
    #[arg(long)]
    pub n: Option<Ints>,
    #[arg(long, allow_hyphen_values = true)]
    pub j: Option<Ints>,
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    /// Tolerance for the certified tail of each norm.
    #[arg(long)]
    pub tol: Option<f64>,
    /// The `n` at which the norm must have dropped below `decay_factor·ω(j)`.
    #[arg(long)]
    pub decay_n: Option<u64>,
    #[arg(long)]
    pub decay_factor: Option<f64>,
}

impl Experiment for ApproxUnit {
    const NAME: &'static str = "approx-unit";

    fn resolve(mut self) -> Result<Self, RunError> {
        self.n.get_or_insert_with(|| "1..100".parse().unwrap());
        self.j.get_or_insert_with(|| "-50..50".parse().unwrap());
        self.beta.get_or_insert_with(|| vec![0.0, 0.3, 0.7]);
        positive("tol", *self.tol.get_or_insert(1e-12))?;
        self.decay_n.get_or_insert(1024);
        positive("decay_factor", *self.decay_factor.get_or_insert(1e-2))?;
        self.n.as_ref().unwrap().positive("n").map_err(RunError::config)?;
        Ok(self)
    }

    fn run(&self) -> Result<Report, RunError> {
        let ns = self.n.as_ref().unwrap().positive("n").map_err(RunError::config)?;
        let js = self.j.as_ref().unwrap().values();
        let tol = self.tol.unwrap();
        let (decay_n, factor) = (self.decay_n.unwrap(), self.decay_factor.unwrap());
        let mut cells: Vec<(&str, f64, u64, i64)> = Vec::new();
        for &b in self.beta.iter().flatten() {
            for &n in &ns {
                cells.extend(js.iter().map(|&j| ("bound", b, n, j)));
            }
        }
        for &b in self.beta.iter().flatten() {
            cells.extend(js.iter().map(|&j| ("decay", b, decay_n, j)));
        }
        let rows: Vec<(Vec<String>, &str, bool)> = cells
            .par_iter()
            .map(|&(check, b, n, j)| {
                let w = power_weight(b)?;
                let v = en_monomial_norm(n, j, &w, tol)?;
                let wj = w.value(j)?;
                let (limit, pass) = match check {
                    "bound" => (3.0 * wj + 1e-9, v.upper() <= 3.0 * wj + 1e-9),
                    _ => (factor * wj, v.upper() < factor * wj),
                };
                let row = vec![
                    check.to_string(),
                    num(b),
                    n.to_string(),
                    j.to_string(),
                    num(v.value),
                    num(v.tail_bound),
                    num(limit),
                    pass.to_string(),
                ];
                Ok((row, check, pass))
            })
            .collect::<Result<_, beurling::Error>>()?;
        let fails = |kind: &str| rows.iter().filter(|r| r.1 == kind && !r.2).count();
        let (bound_fails, decay_fails) = (fails("bound"), fails("decay"));
        Ok(table(
            Self::NAME,
            vec!["check", "beta", "n", "j", "value", "tail_bound", "limit", "pass"],
            rows.into_iter().map(|r| r.0).collect(),
            bound_fails == 0 && decay_fails == 0,
            format!(
                "{bound_fails} cells above 3 w(j); {decay_fails} of {} cells at n = {decay_n} not below {factor:e} w(j)",
                js.len() * self.beta.as_ref().unwrap().len()
            ),
        ))
    }
}

/// `‖(u_n − 1)f‖_ω` for `f = (α−1)^{[s]+1}g` with random polynomials `g`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ditkin {
    #[arg(long, value_delimiter = ',')]
    pub s: Option<Vec<f64>>,
    /// Number of random polynomials per `s`.
    #[arg(long)]
    pub count: Option<usize>,
    /// Degree of the random polynomials.
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n: Option<Ints>,
    /// Certified tail tolerance of each `u_n`.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Required ratio between the first and last values.
    #[arg(long)]
    pub factor: Option<f64>,
}

impl Experiment for Ditkin {
    const NAME: &'static str = "ditkin";

    fn resolve(mut self) -> Result<Self, RunError> {
        self.s.get_or_insert_with(|| vec![0.5, 1.5]);
        self.count.get_or_insert(20);
        self.degree.get_or_insert(3);
        self.seed.get_or_insert(4);
        self.n.get_or_insert_with(|| "1,4,16,64,256".parse().unwrap());
        positive("tol", *self.tol.get_or_insert(1e-10))?;
        positive("factor", *self.factor.get_or_insert(100.0))?;
        if self.n.as_ref().unwrap().positive("n").map_err(RunError::config)?.len() < 2 {
            return Err(RunError::config("n: need at least two values"));
        }
        Ok(self)
    }

    fn run(&self) -> Result<Report, RunError> {
        let ns = self.n.as_ref().unwrap().positive("n").map_err(RunError::config)?;
        let factor = self.factor.unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.unwrap());
        let mut rows = Vec::new();
        let (mut total, mut failures) = (0, 0);
        for &s in self.s.iter().flatten() {
            let w = power_weight(s)?;
            let units = make_units(&ns, s, Truncation::Tolerance(self.tol.unwrap()), &w)?;
            let base = LaurentSeries::alpha_minus(unit()).pow(s.floor() as u32 + 1);
            for g in 0..self.count.unwrap() {
                let coeffs: Vec<Complex64> = (0..=self.degree.unwrap()).map(|_| random_complex(&mut rng)).collect();
                let f = &base * &LaurentSeries::polynomial(&coeffs);
                let seq = ditkin_sequence_with(&f, &w, s, &units)?;
                let first = seq[0].norm.value;
                let last = seq.last().unwrap().norm.value;
                let pass = last < first / factor;
                total += 1;
                failures += usize::from(!pass);
                for p in &seq {
                    rows.push(vec![
                        num(s),
                        g.to_string(),
                        p.n.to_string(),
                        p.degree.to_string(),
                        num(p.norm.value),
                        num(p.norm.tail_bound),
                        num(p.norm.value / first),
                        pass.to_string(),
                    ]);
                }
            }
        }
        Ok(table(
            Self::NAME,
            vec!["s", "g", "n", "degree", "value", "tail_bound", "ratio_to_first", "pass"],
            rows,
            failures == 0,
            format!(
                "{failures}/{total} functions with value(n={}) not below value(n={}) / {factor}",
                ns.last().unwrap(),
                ns[0]
            ),
        ))
    }
}

/// Hulls of orders `0..=k` and membership of each generator in the resulting jet ideal.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealHull {
    /// Generators as JSON, each a list of `[n, re, im]` coefficients.
    #[arg(long, value_parser = parse_json::<Vec<LaurentSeries>>)]
    pub generators: Option<Vec<LaurentSeries>>,
    /// Highest jet order.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Expected hull of order `k`, as angles.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub expect: Option<Vec<f64>>,
}

impl Experiment for IdealHull {
    const NAME: &'static str = "ideal-hull";

    fn resolve(mut self) -> Result<Self, RunError> {
        let gens = self.generators.get_or_insert_with(|| {
            let double = LaurentSeries::alpha_minus(unit()).pow(2);
            vec![
                &double * &LaurentSeries::alpha_minus(Complex64::new(-1.0, 0.0)),
                &double * &LaurentSeries::alpha_minus(Complex64::new(0.0, 1.0)),
            ]
        });
        if gens.is_empty() {
            return Err(RunError::config("generators: need at least one generator"));
        }
        self.k.get_or_insert(1);
        self.grid.get_or_insert(beurling::ideals::DEFAULT_GRID);
        positive("tol", *self.tol.get_or_insert(beurling::ideals::DEFAULT_HULL_TOL))?;
        Ok(self)
    }

    fn run(&self) -> Result<Report, RunError> {
        let gens = self.generators.as_ref().unwrap();
        let k = self.k.unwrap();
        let hulls =
            (0..=k).map(|j| hull(gens, j, self.grid.unwrap(), self.tol.unwrap())).collect::<Result<Vec<_>, _>>()?;
        let mut problems = Vec::new();
        let membership: Vec<Value> = match JetSpec::new(hulls.clone(), k as f64) {
            Ok(spec) => gens
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let r = jet_membership(g, &spec, beurling::ideals::DEFAULT_MEMBERSHIP_TOL)?;
                    if !r.pass {
                        problems.push(format!("generator {i} fails its own jets"));
                    }
                    Ok(json!({ "generator": i, "report": to_value(&r) }))
                })
                .collect::<Result<_, beurling::Error>>()?,
            Err(e) => {
                problems.push(format!("hulls are not nested: {e}"));
                Vec::new()
            }
        };
        if let Some(expect) = &self.expect {
            let want = CircleSet::from_angles(expect.iter().copied())?;
            let got = &hulls[k];
            if !(got.len() == want.len() && got.is_subset_of(&want, 1e-6) && want.is_subset_of(got, 1e-6)) {
                problems.push(format!("hull of order {k} is {:?}, expected {:?}", got.points(), want.points()));
            }
        }
        let body = json!({
            "hulls": hulls.iter().enumerate().map(|(j, h)| json!({"order": j, "points": h.points()})).collect::<Vec<_>>(),
            "membership": membership,
            "problems": problems,
        });
        let summary = format!(
            "hull sizes by order {:?}; {}",
            hulls.iter().map(CircleSet::len).collect::<Vec<_>>(),
            if problems.is_empty() { "consistent".into() } else { problems.join("; ") }
        );
        Ok(document(Self::NAME, body, problems.is_empty(), summary))
    }
}

/// Closed-form Carleson integral of a set, checked against quadrature.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Carleson {
    /// The set as JSON, e.g. `{"points":[0]}`.
    #[arg(long, value_parser = parse_json::<CircleSet>)]
    pub set: Option<CircleSet>,
    /// Extrapolation tolerance near declared limit points.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Expected value.
    #[arg(long)]
    pub expect: Option<f64>,
    /// Allowed error against the quadrature and the expected value.
    #[arg(long)]
    pub accuracy: Option<f64>,
}

impl Experiment for Carleson {
    const NAME: &'static str = "carleson";

    fn resolve(mut self) -> Result<Self, RunError> {
        self.set.get_or_insert_with(|| default_set(&[0.0]));
        positive("tol", *self.tol.get_or_insert(1e-12))?;
        positive("accuracy", *self.accuracy.get_or_insert(1e-8))?;
        Ok(self)
    }

    fn run(&self) -> Result<Report, RunError> {
        let set = self.set.as_ref().unwrap();
        let acc = self.accuracy.unwrap();
        let v = carleson_integral(set, self.tol.unwrap())?;
        let quad = oracle::carleson_quadrature(set, 1e-13);
        let mut pass = (v.value - quad).abs() <= acc;
        if let Some(e) = self.expect {
            pass &= (v.value - e).abs() <= acc && (quad - e).abs() <= acc;
        }
        let body = json!({
            "value": v.value,
            "tail_bound": v.tail_bound,
            "upper": v.upper(),
            "quadrature": quad,
            "points": set.len(),
            "declared_limits": set.limits(),
        });
        Ok(document(Self::NAME, body, pass, format!("integral {} (quadrature {quad}, tail {})", v.value, v.tail_bound)))
    }
}

/// Arc-average envelope and its `C₁ ln(1/|L|) + C₂` fit.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atw {
    #[arg(long, value_parser = parse_json::<CircleSet>)]
    pub set: Option<CircleSet>,
    #[arg(long)]
    pub scales: Option<u32>,
    #[arg(long)]
    pub arcs: Option<u32>,
    /// Largest acceptable fitted C₁.
    #[arg(long)]
    pub max_c1: Option<f64>,
    /// Largest acceptable fitted C₂.
    #[arg(long)]
    pub max_c2: Option<f64>,
}

impl Experiment for Atw {
    const NAME: &'static str = "atw";

    fn resolve(mut self) -> Result<Self, RunError> {
        self.set.get_or_insert_with(|| default_set(&[0.0]));
        self.scales.get_or_insert(12);
        self.arcs.get_or_insert(64);
        Ok(self)
    }

    fn run(&self) -> Result<Report, RunError> {
        let r = atw_check(self.set.as_ref().unwrap(), self.scales.unwrap(), self.arcs.unwrap())?;
        let pass = r.consistent && self.max_c1.is_none_or(|m| r.c1 <= m) && self.max_c2.is_none_or(|m| r.c2 <= m);
        let summary = format!(
            "C1 = {}, C2 = {}, dominating C2 = {}, {}",
            r.c1,
            r.c2,
            r.dominating_c2,
            if r.consistent { "consistent" } else { "steepening at fine scales" }
        );
        Ok(document(Self::NAME, to_value(&r), pass, summary))
    }
}

/// Nested scheme inside a perfect-set oracle, with its gap sums against the bound series.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildCarlesonSet {
    /// `cantor` (middle-thirds Cantor set on [a, b]) or `interval`.
    #[arg(long)]
    pub oracle: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long)]
    pub depth: Option<usize>,
}

impl Experiment for BuildCarlesonSet {
    const NAME: &'static str = "build-carleson-set";

    fn resolve(mut self) -> Result<Self, RunError> {
        let o = self.oracle.get_or_insert_with(|| "cantor".into());
        if o != "cantor" && o != "interval" {
            return Err(RunError::config(format!("oracle: unknown oracle `{o}` (expected cantor or interval)")));
        }
        self.a.get_or_insert(0.0);
        self.b.get_or_insert(1.0);
        self.depth.get_or_insert(12);
        Ok(self)
    }

    fn run(&self) -> Result<Report, RunError> {
        let (a, b) = (self.a.unwrap(), self.b.unwrap());
        let oracle: Box<dyn PerfectSet> = match self.oracle.as_deref() {
            Some("interval") => Box::new(IntervalSet::new(a, b)?),
            _ => Box::new(MiddleThirdsCantor::new(a, b)?),
        };
        let scheme = build_carleson_perfect_subset(oracle.as_ref(), self.depth.unwrap())?;
        let verified = scheme.verify();
        let width = scheme.base[1] - scheme.base[0];
        let sums = carleson_gap_sum(&GapLevels::from_scheme(&scheme));
        let terms = perfect_subset_gap_bound(width, scheme.depth());
        let total = perfect_subset_gap_total(width);
        let mut problems = Vec::new();
        if let Err(e) = &verified {
            problems.push(e.clone());
        }
        let mut level_sums = Vec::with_capacity(sums.len());
        let mut prev = 0.0;
        for (i, (&s, &t)) in sums.iter().zip(&terms).enumerate() {
            let n = i + 1;
            let level = s - prev;
            prev = s;
            // Per gap, |J| ln(1/|J|) is increasing while |J| ≤ 1/e; the level bound needs that.
            let applies = width * 3f64.powi(-(n as i32 - 1)) <= (-1.0f64).exp();
            if applies && level > t * (1.0 + 1e-12) {
                problems.push(format!("level {n}: gap sum {level} exceeds {t}"));
            }
            if s > total {
                problems.push(format!("partial sum at level {n} exceeds the series total {total}"));
            }
            level_sums.push(
                json!({"level": n, "level_sum": level, "partial_sum": s, "bound_term": t, "term_applies": applies}),
            );
        }
        let body = json!({
            "oracle": self.oracle,
            "base": scheme.base,
            "depth": scheme.depth(),
            "verify": verified.err().unwrap_or_else(|| "ok".into()),
            "series_total": total,
            "levels": level_sums,
            "scheme": to_value(&scheme),
            "problems": problems,
        });
        let summary = format!(
            "depth {} scheme; final gap sum {} vs series total {total}; {}",
            scheme.depth(),
            sums.last().copied().unwrap_or(0.0),
            if problems.is_empty() { "all checks hold".into() } else { problems.join("; ") }
        );
        Ok(document(Self::NAME, body, problems.is_empty(), summary))
    }
}

/// Cumulative `Σ |J| ln(1/|J|)` over gap levels.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapSum {
    /// Gaps of a circle set, one per level, largest first; otherwise the middle-thirds profile.
    #[arg(long, value_parser = parse_json::<CircleSet>)]
    pub set: Option<CircleSet>,
    /// Width of the middle-thirds profile.
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub levels: Option<usize>,
    /// Allowed distance from the limit `W(3 ln 3 − ln W)` at the last level.
    #[arg(long)]
    pub tol: Option<f64>,
}

impl Experiment for GapSum {
    const NAME: &'static str = "gap-sum";

    fn resolve(mut self) -> Result<Self, RunError> {
        if self.set.is_none() {
            positive("width", *self.width.get_or_insert(1.0))?;
            self.levels.get_or_insert(60);
            positive("tol", *self.tol.get_or_insert(1e-6))?;
        }
        Ok(self)
    }

    fn run(&self) -> Result<Report, RunError> {
        if let Some(set) = &self.set {
            let sums = carleson_gap_sum(&GapLevels::from_set(set));
            let pass = sums.iter().all(|s| s.is_finite());
            let rows = sums.iter().enumerate().map(|(i, &s)| vec![(i + 1).to_string(), num(s)]).collect();
            let last = sums.last().copied().unwrap_or(0.0);
            return Ok(table(Self::NAME, vec!["level", "partial_sum"], rows, pass, format!("gap sum {last}")));
        }
        let (w, levels) = (self.width.unwrap(), self.levels.unwrap());
        let sums = carleson_gap_sum(&GapLevels::middle_thirds(w, levels));
        let limit = w * (3.0 * 3f64.ln() - w.ln());
        let rows = sums.iter().enumerate().map(|(i, &s)| vec![(i + 1).to_string(), num(s), num(limit - s)]).collect();
        let last = sums.last().copied().unwrap_or(0.0);
        let pass = (last - limit).abs() <= self.tol.unwrap();
        Ok(table(
            Self::NAME,
            vec!["level", "partial_sum", "distance_to_limit"],
            rows,
            pass,
            format!("middle-thirds gap sum {last} after {levels} levels; limit {limit}"),
        ))
    }
}

/// Taylor against closed-form evaluation of a singular inner function, and its boundary modulus.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InnerEval {
    /// Measure as JSON, e.g. `{"atoms":[[0, 0.06]]}`.
    #[arg(long, value_parser = parse_json::<AtomicMeasure>)]
    pub measure: Option<AtomicMeasure>,
    /// Taylor degree.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Random interior points.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest radius of the interior points.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Boundary angles checked, uniformly spaced.
    #[arg(long)]
    pub boundary_points: Option<usize>,
    /// Boundary angles closer than this to an atom are skipped.
    #[arg(long)]
    pub boundary_gap: Option<f64>,
    #[arg(long)]
    pub boundary_tol: Option<f64>,
}

impl Experiment for InnerEval {
    const NAME: &'static str = "inner-eval";

    fn resolve(mut self) -> Result<Self, RunError> {
        self.measure.get_or_insert_with(|| AtomicMeasure::new(vec![(0.0, 0.2), (2.0, 0.3)]).unwrap());
        self.degree.get_or_insert(200);
        self.points.get_or_insert(100);
        self.seed.get_or_insert(9);
        let r = *self.radius.get_or_insert(0.8);
        if !(0.0..1.0).contains(&r) {
            return Err(RunError::config(format!("radius: must be in [0, 1), got {r}")));
        }
        positive("tol", *self.tol.get_or_insert(1e-10))?;
        self.boundary_points.get_or_insert(100);
        positive("boundary_gap", *self.boundary_gap.get_or_insert(0.1))?;
        positive("boundary_tol", *self.boundary_tol.get_or_insert(1e-8))?;
        Ok(self)
    }

    fn run(&self) -> Result<Report, RunError> {
        let mu = self.measure.as_ref().unwrap();
        let f = inner_taylor(mu, self.degree.unwrap())?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.unwrap());
        let (tol, btol) = (self.tol.unwrap(), self.boundary_tol.unwrap());
        let mut rows = Vec::new();
        let (mut worst_in, mut worst_bd) = (0.0f64, 0.0f64);
        for _ in 0..self.points.unwrap() {
            let (r, phi) = (rng.gen_range(0.0..self.radius.unwrap()), rng.gen_range(0.0..TAU));
            let z = Complex64::from_polar(r, phi);
            let err = (f.eval_taylor(z) - f.eval_direct(z)).norm();
            worst_in = worst_in.max(err);
            rows.push(vec!["interior".into(), num(r), num(phi), num(err), (err <= tol).to_string()]);
        }
        let m = self.boundary_points.unwrap();
        for k in 0..m {
            let phi = TAU * (k as f64 + 0.5) / m as f64;
            if mu.distance_to_atoms(phi) < self.boundary_gap.unwrap() {
                continue;
            }
            let on = (f.eval_direct(Complex64::from_polar(1.0, phi)).norm() - 1.0).abs();
            let radial = (f.eval_direct(Complex64::from_polar(1.0 - 1e-10, phi)).norm() - 1.0).abs();
            let err = on.max(radial);
            worst_bd = worst_bd.max(err);
            rows.push(vec!["boundary".into(), num(1.0), num(phi), num(err), (err <= btol).to_string()]);
        }
        Ok(table(
            Self::NAME,
            vec!["kind", "r", "phi", "error", "pass"],
            rows,
            worst_in <= tol && worst_bd <= btol,
            format!("max interior error {worst_in:e}; max boundary deviation {worst_bd:e}"),
        ))
    }
}

/// Section size, rank, norms of `T^{-n}` and their fit.
type SizeRun = (usize, usize, Vec<(usize, f64)>, GrowthReport);

/// `‖T^{-n}‖` for model-space sections at several sizes, with growth fits.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelOp {
    #[arg(long, value_parser = parse_json::<AtomicMeasure>)]
    pub measure: Option<AtomicMeasure>,
    /// Section sizes N.
    #[arg(long)]
    pub sizes: Option<Ints>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Tail fraction used by the growth fits.
    #[arg(long)]
    pub window: Option<f64>,
    /// Required verdict at every size.
    #[arg(long, value_parser = verdict)]
    pub expect: Option<Verdict>,
    /// Largest acceptable fitted √n coefficient.
    #[arg(long)]
    pub max_c: Option<f64>,
}

impl Experiment for ModelOp {
    const NAME: &'static str = "model-op";

    fn resolve(mut self) -> Result<Self, RunError> {
        self.measure.get_or_insert_with(|| AtomicMeasure::dirac(0.0, TAU * 0.01).unwrap());
        self.sizes.get_or_insert_with(|| "128,256".parse().unwrap());
        self.n_max.get_or_insert(200);
        positive("window", *self.window.get_or_insert(0.5))?;
        self.sizes.as_ref().unwrap().positive("sizes").map_err(RunError::config)?;
        Ok(self)
    }

    fn run(&self) -> Result<Report, RunError> {
        let mu = self.measure.as_ref().unwrap();
        let sizes = self.sizes.as_ref().unwrap().positive("sizes").map_err(RunError::config)?;
        let runs: Vec<SizeRun> = sizes
            .par_iter()
            .map(|&n| {
                let t = model_section(mu, n as usize)?;
                let p = power_norms(&t, self.n_max.unwrap(), true)?;
                if let Some(at) = p.overflow_at {
                    return Err(beurling::Error::Singular(p.norms[at - 1].1));
                }
                let g = growth_fit(&p.norms, self.window.unwrap())?;
                Ok((n as usize, t.dim(), p.norms, g))
            })
            .collect::<Result<_, beurling::Error>>()?;
        let mut rows = Vec::new();
        let mut problems = Vec::new();
        for (n, rank, norms, g) in &runs {
            if !norms.windows(2).all(|w| w[1].1 > w[0].1) {
                problems.push(format!("N = {n}: norms not strictly increasing"));
            }
            if g.verdict == Verdict::Inconclusive {
                problems.push(format!("N = {n}: inconclusive"));
            }
            if self.expect.is_some_and(|e| e != g.verdict) {
                problems.push(format!("N = {n}: verdict {}", g.verdict));
            }
            if let Some(m) = self.max_c {
                if !(g.sqrt_fit.coef > 0.0 && g.sqrt_fit.coef <= m) {
                    problems.push(format!("N = {n}: sqrt coefficient {} outside (0, {m}]", g.sqrt_fit.coef));
                }
            }
            rows.extend(norms.iter().map(|&(k, v)| vec![n.to_string(), rank.to_string(), k.to_string(), num(v)]));
        }
        if runs.windows(2).any(|w| w[0].3.verdict != w[1].3.verdict) {
            problems.push("verdicts disagree across N".into());
        }
        let fits: Vec<String> = runs
            .iter()
            .map(|(n, rank, _, g)| format!("N = {n} (rank {rank}): {} with c = {}", g.verdict, g.sqrt_fit.coef))
            .collect();
        let summary = format!(
            "{}{}",
            fits.join("; "),
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        );
        Ok(table(Self::NAME, vec!["N", "rank", "n", "norm"], rows, problems.is_empty(), summary))
    }
}

/// Growth-regime fit of a norm sequence read from a CSV file or planted synthetically.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Growth {
    /// CSV file with columns `n` and `norm` (or `estimate`), e.g. written by `model-op`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Keep only rows whose `N` column equals this.
    #[arg(long)]
    pub size: Option<u64>,
    /// Synthetic data `power:t`, `sqrt:c` or `exp:c` when no input is given.
    #[arg(long)]
    pub planted: Option<String>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long, value_parser = verdict)]
    pub expect: Option<Verdict>,
    /// Expected coefficient of the expected regime.
    #[arg(long)]
    pub expect_coef: Option<f64>,
    /// Relative tolerance on the coefficient.
    #[arg(long)]
    pub coef_tol: Option<f64>,
}

fn planted(spec: &str, n_max: usize) -> Result<Vec<(usize, f64)>, RunError> {
    let bad = || RunError::config(format!("planted: cannot read `{spec}` (expected power:t, sqrt:c or exp:c)"));
    let (kind, p) = spec.split_once(':').ok_or_else(bad)?;
    let p: f64 = p.parse().map_err(|_| bad())?;
    let f: Box<dyn Fn(f64) -> f64> = match kind {
        "power" => Box::new(move |n: f64| n.powf(p)),
        "sqrt" => Box::new(move |n: f64| (p * n.sqrt()).exp()),
        "exp" => Box::new(move |n: f64| (p * n).exp()),
        _ => return Err(bad()),
    };
    Ok((1..=n_max).map(|n| (n, f(n as f64))).collect())
}

fn read_norms(path: &PathBuf, size: Option<u64>) -> Result<Vec<(usize, f64)>, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::config(format!("input: cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| RunError::config("input: empty file"))?.split(',').collect();
    let col = |names: &[&str]| header.iter().position(|h| names.contains(h));
    let n_col = col(&["n"]).ok_or_else(|| RunError::config("input: no `n` column"))?;
    let v_col = col(&["norm", "estimate"]).ok_or_else(|| RunError::config("input: no `norm` or `estimate` column"))?;
    let size_col = col(&["N"]);
    let mut out = Vec::new();
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if let (Some(want), Some(c)) = (size, size_col) {
            if cells.get(c).and_then(|v| v.parse::<u64>().ok()) != Some(want) {
                continue;
            }
        }
        let parse_err = || RunError::config(format!("input: bad row `{line}`"));
        let n = cells.get(n_col).and_then(|v| v.parse().ok()).ok_or_else(parse_err)?;
        let v = cells.get(v_col).and_then(|v| v.parse().ok()).ok_or_else(parse_err)?;
        out.push((n, v));
    }
    Ok(out)
}

impl Experiment for Growth {
    const NAME: &'static str = "growth";

    fn resolve(mut self) -> Result<Self, RunError> {
        if self.input.is_none() {
            self.planted.get_or_insert_with(|| "sqrt:0.4".into());
            self.n_max.get_or_insert(200);
        }
        positive("window", *self.window.get_or_insert(0.5))?;
        positive("coef_tol", *self.coef_tol.get_or_insert(0.05))?;
        Ok(self)
    }

    fn run(&self) -> Result<Report, RunError> {
        let norms = match &self.input {
            Some(path) => read_norms(path, self.size)?,
            None => planted(self.planted.as_deref().unwrap(), self.n_max.unwrap())?,
        };
        let r = growth_fit(&norms, self.window.unwrap())?;
        let mut pass = self.expect.is_none_or(|e| e == r.verdict);
        let mut summary = format!(
            "verdict {}; sqrt fit c = {} (rms {:e}), power fit t = {} (rms {:e})",
            r.verdict, r.sqrt_fit.coef, r.sqrt_fit.residual, r.poly_fit.coef, r.poly_fit.residual
        );
        if let Some(want) = self.expect_coef {
            let got = match self.expect.unwrap_or(r.verdict) {
                Verdict::Polynomial => r.poly_fit.coef,
                _ => r.sqrt_fit.coef,
            };
            pass &= (got - want).abs() <= self.coef_tol.unwrap() * want.abs();
            summary.push_str(&format!("; coefficient {got} vs planted {want}"));
        }
        Ok(document(Self::NAME, to_value(&r), pass, summary))
    }
}

/// Upper estimates of the quotient norms of `α^{−n}` from the dual programs.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quotient {
    #[arg(long, value_parser = parse_json::<CircleSet>)]
    pub set: Option<CircleSet>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Constraint depth; defaults to max(10·n_max, 1000).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Expected constant value of every estimate.
    #[arg(long)]
    pub expect: Option<f64>,
    #[arg(long)]
    pub window: Option<f64>,
}

impl Experiment for Quotient {
    const NAME: &'static str = "quotient";

    fn resolve(mut self) -> Result<Self, RunError> {
        self.set.get_or_insert_with(|| default_set(&[0.0]));
        self.s.get_or_insert(0.0);
        let n_max = *self.n_max.get_or_insert(100);
        self.depth.get_or_insert((10 * n_max).max(beurling::spectral::DEFAULT_MIN_DEPTH));
        positive("window", *self.window.get_or_insert(0.5))?;
        Ok(self)
    }

    fn run(&self) -> Result<Report, RunError> {
        let q = quotient_inverse_norms(self.set.as_ref().unwrap(), self.s.unwrap(), self.n_max.unwrap(), self.depth)?;
        let mut problems = Vec::new();
        if let Some(r) = q.rows.iter().find(|r| r.gap < -1e-9) {
            problems.push(format!("n = {}: estimate grows with depth by {}", r.n, -r.gap));
        }
        if let Some(e) = self.expect {
            if let Some(r) = q.rows.iter().find(|r| (r.estimate - e).abs() > 1e-9) {
                problems.push(format!("n = {}: estimate {} differs from {e}", r.n, r.estimate));
            }
        }
        let fit = if q.rows.len() >= beurling::spectral::MIN_FIT_POINTS * 2 {
            let g = growth_fit(&q.norms(), self.window.unwrap())?;
            if g.is_exponential() {
                problems.push("estimates grow exponentially".into());
            }
            format!(
                "exponential fit rms {:e}, sqrt fit rms {:e}, exponential: {}",
                g.exp_fit.residual,
                g.sqrt_fit.residual,
                g.is_exponential()
            )
        } else {
            "too few points for a growth fit".into()
        };
        let rows =
            q.rows.iter().map(|r| vec![r.n.to_string(), num(r.estimate), num(r.estimate_half), num(r.gap)]).collect();
        let last = q.rows.last().unwrap();
        let summary = format!(
            "depth {} ({} phases, factor {}); estimate at n = {}: {}; {fit}{}",
            q.depth,
            q.phases,
            q.polygon_factor,
            last.n,
            last.estimate,
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        );
        Ok(table(Self::NAME, vec!["n", "estimate", "estimate_half", "gap"], rows, problems.is_empty(), summary))
    }
}

/// Interpolation constant over the annihilating functionals of a finite set.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpConst {
    #[arg(long, value_parser = parse_json::<CircleSet>)]
    pub set: Option<CircleSet>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub depth: Option<usize>,
}

impl Experiment for InterpConst {
    const NAME: &'static str = "interp-const";

    fn resolve(mut self) -> Result<Self, RunError> {
        self.set.get_or_insert_with(|| default_set(&[0.0, PI]));
        self.s.get_or_insert(0.0);
        self.t.get_or_insert(0.0);
        self.depth.get_or_insert(beurling::spectral::DEFAULT_MIN_DEPTH);
        Ok(self)
    }

    fn run(&self) -> Result<Report, RunError> {
        let r = interpolation_constant(self.set.as_ref().unwrap(), self.s.unwrap(), self.t.unwrap(), self.depth)?;
        let summary = format!(
            "C* = {} at n = {} (half depth {}); {}",
            r.c_star,
            r.argmax_n,
            r.c_star_half,
            if r.diverging {
                "diverging"
            } else if r.stable {
                "stable"
            } else {
                "not yet stable"
            }
        );
        Ok(document(Self::NAME, to_value(&r), !r.diverging, summary))
    }
}

/// Round trip `(g·(α − z₀)) / (α − z₀) = g` on random series.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivideRoot {
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

impl Experiment for DivideRoot {
    const NAME: &'static str = "divide-root";

    fn resolve(mut self) -> Result<Self, RunError> {
        self.count.get_or_insert(100);
        self.seed.get_or_insert(6);
        positive("tol", *self.tol.get_or_insert(1e-12))?;
        Ok(self)
    }

    fn run(&self) -> Result<Report, RunError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.unwrap());
        let tol = self.tol.unwrap();
        let mut rows = Vec::new();
        let mut worst = 0.0f64;
        for idx in 0..self.count.unwrap() {
            let k = rng.gen_range(1..=10);
            let g = LaurentSeries::from_coeffs((0..k).map(|_| (rng.gen_range(-15..=15), random_complex(&mut rng))));
            let theta = rng.gen_range(0.0..TAU);
            let z0 = Complex64::from_polar(1.0, theta);
            let f = &g * &LaurentSeries::alpha_minus(z0);
            let back = f.divide_by_root(z0, beurling::series::DEFAULT_ROOT_TOL)?;
            let err = back.max_coeff_diff(&g);
            worst = worst.max(err);
            rows.push(vec![idx.to_string(), num(theta), g.len().to_string(), num(err), (err <= tol).to_string()]);
        }
        Ok(table(
            Self::NAME,
            vec!["index", "theta", "terms", "max_coeff_error", "pass"],
            rows,
            worst <= tol,
            format!("max coefficient error {worst:e} over {} series", self.count.unwrap()),
        ))
    }
}
