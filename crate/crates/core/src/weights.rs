//! Beurling weights `ω : ℤ → [1, ∞)` and finite-window checks of their growth conditions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative slack used when comparing weight values that are computed independently.
const REL_TOL: f64 = 1e-12;

/// How a tabulated weight is extended beyond its table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailRule {
    /// No extension: querying outside the table is an error.
    Strict,
    /// `ω(n) = value` outside the table.
    Constant { value: f64 },
    /// `ω(n) = (1+n)^pos` for `n ≥ 0` and `(1+|n|)^neg` for `n < 0`.
    Power { pos: f64, neg: f64 },
    /// `ω(n) = e^{pos·n}` for `n ≥ 0` and `e^{neg·|n|}` for `n < 0`.
    Exponential { pos: f64, neg: f64 },
}

impl TailRule {
    fn ln_value(&self, n: i64) -> Option<f64> {
        let m = n.unsigned_abs() as f64;
        match *self {
            TailRule::Strict => None,
            TailRule::Constant { value } => Some(value.ln()),
            TailRule::Power { pos, neg } => Some(if n >= 0 { pos } else { neg } * (1.0 + m).ln()),
            TailRule::Exponential { pos, neg } => Some(if n >= 0 { pos } else { neg } * m),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            TailRule::Strict => true,
            TailRule::Constant { value } => value.is_finite() && value >= 1.0,
            TailRule::Power { pos, neg } | TailRule::Exponential { pos, neg } => {
                pos.is_finite() && neg.is_finite() && pos >= 0.0 && neg >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param("tail", format!("tail rule {self:?} would give values below 1")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    SymmetricPower { s: f64 },
    AsymmetricPower { s: f64, t: f64 },
    Tabulated { table: BTreeMap<i64, f64>, tail: TailRule },
}

/// A weight on ℤ. Values are computed lazily from the defining rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightSpec", into = "WeightSpec")]
pub struct Weight {
    kind: Kind,
}

/// `(1+|n|)^s`.
pub fn power_weight(s: f64) -> Result<Weight> {
    check_exponent("s", s)?;
    Ok(Weight { kind: Kind::SymmetricPower { s } })
}

/// `(1+n)^s` for `n ≥ 0`, `(1+|n|)^t` for `n < 0`; requires `t ≥ s`.
pub fn asym_weight(s: f64, t: f64) -> Result<Weight> {
    check_exponent("s", s)?;
    check_exponent("t", t)?;
    if t < s {
        return Err(Error::param("t", format!("need t >= s, got s = {s}, t = {t}")));
    }
    Ok(Weight { kind: Kind::AsymmetricPower { s, t } })
}

/// A weight given by a finite table and an explicit rule for the remaining indices.
pub fn tabulated_weight(table: impl IntoIterator<Item = (i64, f64)>, tail: TailRule) -> Result<Weight> {
    tail.validate()?;
    let mut map = BTreeMap::new();
    for (n, v) in table {
        if !(v.is_finite() && v >= 1.0) {
            return Err(Error::param("table", format!("value {v} at n = {n} is not a finite number >= 1")));
        }
        if map.insert(n, v).is_some() {
            return Err(Error::param("table", format!("index {n} listed twice")));
        }
    }
    Ok(Weight { kind: Kind::Tabulated { table: map, tail } })
}

fn check_exponent(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("exponent must be finite and >= 0, got {v}")))
    }
}

impl Weight {
    /// `ω(n)`.
    pub fn value(&self, n: i64) -> Result<f64> {
        let m = n.unsigned_abs() as f64;
        match &self.kind {
            Kind::SymmetricPower { s } => Ok((1.0 + m).powf(*s)),
            Kind::AsymmetricPower { s, t } => Ok((1.0 + m).powf(if n >= 0 { *s } else { *t })),
            Kind::Tabulated { table, tail } => match table.get(&n) {
                Some(v) => Ok(*v),
                None => tail.ln_value(n).map(f64::exp).ok_or(Error::WeightUndefined(n)),
            },
        }
    }

    /// `ln ω(n)`, which stays finite where `ω(n)` itself would overflow.
    pub fn ln_value(&self, n: i64) -> Result<f64> {
        let m = n.unsigned_abs() as f64;
        match &self.kind {
            Kind::SymmetricPower { s } => Ok(s * (1.0 + m).ln()),
            Kind::AsymmetricPower { s, t } => Ok(if n >= 0 { *s } else { *t } * (1.0 + m).ln()),
            Kind::Tabulated { table, tail } => match table.get(&n) {
                Some(v) => Ok(v.ln()),
                None => tail.ln_value(n).ok_or(Error::WeightUndefined(n)),
            },
        }
    }

    /// Exponent `β` with `ω(n) = (1+n)^β` for `n ≥ 0`, when the weight is of power type.
    pub fn positive_exponent(&self) -> Option<f64> {
        match &self.kind {
            Kind::SymmetricPower { s } | Kind::AsymmetricPower { s, .. } => Some(*s),
            Kind::Tabulated { .. } => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::SymmetricPower { .. } => "symmetric_power",
            Kind::AsymmetricPower { .. } => "asymmetric_power",
            Kind::Tabulated { .. } => "tabulated",
        }
    }

    /// The weight `n ↦ ω(n)/(1+|n|)`, used for derivative norms.
    pub fn divided_by_linear(&self) -> LinearQuotient<'_> {
        LinearQuotient(self)
    }
}

/// `ω(n)/(1+|n|)`; not itself a [`Weight`] because it can drop below 1.
#[derive(Debug, Clone, Copy)]
pub struct LinearQuotient<'a>(&'a Weight);

impl LinearQuotient<'_> {
    pub fn value(&self, n: i64) -> Result<f64> {
        Ok(self.0.value(n)? / (1.0 + n.unsigned_abs() as f64))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum KindTag {
    SymmetricPower,
    AsymmetricPower,
    Tabulated,
}

/// Wire form `{kind, s, t, table?, tail?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightSpec {
    kind: KindTag,
    #[serde(default)]
    s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    table: Option<Vec<(i64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<TailRule>,
}

impl TryFrom<WeightSpec> for Weight {
    type Error = Error;

    fn try_from(spec: WeightSpec) -> Result<Weight> {
        match spec.kind {
            KindTag::SymmetricPower => power_weight(spec.s),
            KindTag::AsymmetricPower => {
                let t = spec.t.ok_or_else(|| Error::param("t", "asymmetric_power needs `t`"))?;
                asym_weight(spec.s, t)
            }
            KindTag::Tabulated => {
                let table = spec.table.ok_or_else(|| Error::param("table", "tabulated needs `table`"))?;
                let tail = spec.tail.ok_or_else(|| Error::param("tail", "tabulated needs an explicit `tail` rule"))?;
                tabulated_weight(table, tail)
            }
        }
    }
}

impl From<Weight> for WeightSpec {
    fn from(w: Weight) -> Self {
        match w.kind {
            Kind::SymmetricPower { s } => {
                WeightSpec { kind: KindTag::SymmetricPower, s, t: None, table: None, tail: None }
            }
            Kind::AsymmetricPower { s, t } => {
                WeightSpec { kind: KindTag::AsymmetricPower, s, t: Some(t), table: None, tail: None }
            }
            Kind::Tabulated { table, tail } => WeightSpec {
                kind: KindTag::Tabulated,
                s: 0.0,
                t: None,
                table: Some(table.into_iter().collect()),
                tail: Some(tail),
            },
        }
    }
}

/// Outcome of a finite-window condition check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: &'static str,
    pub window: u64,
    pub pass: bool,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Evidence {
    PowerProfile {
        max_rel_deviation: f64,
        ratio_monotone: bool,
        first_violation: Option<i64>,
    },
    Subexponential {
        /// Always `"finite-window"`: the condition is asymptotic and only trends are observed.
        verdict_kind: &'static str,
        per_eps: Vec<SubexpEvidence>,
    },
    Submultiplicative {
        worst_ratio: f64,
        argmax: (i64, i64),
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubexpEvidence {
    pub eps: f64,
    /// `sup_{1≤n≤N} ω(−n) e^{−ε√n}`; may be `inf` for runaway weights.
    pub sup: f64,
    pub argmax: u64,
    pub tail_decreasing: bool,
    pub consistent: bool,
}

fn need_window(name: &'static str, n: u64, min: u64) -> Result<()> {
    if n < min {
        Err(Error::param(name, format!("window must be >= {min}, got {n}")))
    } else {
        Ok(())
    }
}

/// Checks `ω(n) = (1+n)^s` for `0 ≤ n ≤ N` and that `ω(−n)/(1+n)^s` is nondecreasing.
pub fn check_condition_ws(w: &Weight, s: f64, window: u64) -> Result<ConditionReport> {
    need_window("N", window, 2)?;
    check_exponent("s", s)?;
    let mut max_dev = 0.0f64;
    let mut monotone = true;
    let mut first = None;
    let mut prev_ratio = f64::NEG_INFINITY;
    for n in 0..=window as i64 {
        let base = (1.0 + n as f64).powf(s);
        let dev = (w.value(n)? - base).abs() / base;
        max_dev = max_dev.max(dev);
        let ratio = w.value(-n)? / base;
        let dropped = ratio < prev_ratio * (1.0 - REL_TOL);
        if dropped {
            monotone = false;
        }
        if first.is_none() && (dev > REL_TOL || dropped) {
            first = Some(n);
        }
        prev_ratio = ratio;
    }
    Ok(ConditionReport {
        condition: "W_s",
        window,
        pass: first.is_none(),
        evidence: Evidence::PowerProfile {
            max_rel_deviation: max_dev,
            ratio_monotone: monotone,
            first_violation: first,
        },
    })
}

/// Finite-window evidence for `ω(−n) = O(e^{ε√n})`.
///
/// An `ε` is called consistent when the sup of `ω(−n)e^{−ε√n}` over the window is attained before
/// its last tenth and the sequence is nonincreasing over that last tenth.
pub fn check_condition_a(w: &Weight, eps_list: &[f64], window: u64) -> Result<ConditionReport> {
    need_window("N", window, 2)?;
    if eps_list.is_empty() {
        return Err(Error::param("eps", "need at least one epsilon"));
    }
    if let Some(e) = eps_list.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::param("eps", format!("epsilon must be positive, got {e}")));
    }
    let ln_w: Vec<f64> = (1..=window as i64).map(|n| w.ln_value(-n)).collect::<Result<_>>()?;
    let tail_start = window - window / 10;
    let per_eps = eps_list
        .iter()
        .map(|&eps| {
            let g: Vec<f64> = ln_w.iter().enumerate().map(|(i, l)| l - eps * ((i + 1) as f64).sqrt()).collect();
            let (mut best, mut arg) = (f64::NEG_INFINITY, 1u64);
            for (i, &v) in g.iter().enumerate() {
                if v > best {
                    best = v;
                    arg = i as u64 + 1;
                }
            }
            let tail = &g[(tail_start - 1) as usize..];
            let tail_decreasing = tail.windows(2).all(|p| p[1] <= p[0] + REL_TOL);
            SubexpEvidence {
                eps,
                sup: best.exp(),
                argmax: arg,
                tail_decreasing,
                consistent: tail_decreasing && arg < tail_start,
            }
        })
        .collect::<Vec<_>>();
    Ok(ConditionReport {
        condition: "A",
        window,
        pass: per_eps.iter().all(|e| e.consistent),
        evidence: Evidence::Subexponential { verdict_kind: "finite-window", per_eps },
    })
}

/// `Σ_{|n|≤N} ln ω(n)/(1+n²)`.
pub fn regularity_partial_sum(w: &Weight, window: u64) -> Result<f64> {
    need_window("N", window, 1)?;
    let mut sum = w.ln_value(0)?;
    for n in 1..=window as i64 {
        let d = 1.0 + (n as f64) * (n as f64);
        sum += (w.ln_value(n)? + w.ln_value(-n)?) / d;
    }
    Ok(sum)
}

/// Exhaustive check of `ω(m+n) ≤ ω(m)ω(n)` over `|m|, |n| ≤ N`.
pub fn check_submultiplicative(w: &Weight, window: u64) -> Result<ConditionReport> {
    need_window("N", window, 1)?;
    let n = window as i64;
    let ln: Vec<f64> = (-2 * n..=2 * n).map(|k| w.ln_value(k)).collect::<Result<_>>()?;
    let at = |k: i64| ln[(k + 2 * n) as usize];
    let mut worst = f64::NEG_INFINITY;
    let mut argmax = (0, 0);
    for a in -n..=n {
        for b in -n..=n {
            let r = at(a + b) - at(a) - at(b);
            if r > worst {
                worst = r;
                argmax = (a, b);
            }
        }
    }
    let worst_ratio = worst.exp();
    Ok(ConditionReport {
        condition: "submultiplicative",
        window,
        pass: worst_ratio <= 1.0 + REL_TOL,
        evidence: Evidence::Submultiplicative { worst_ratio, argmax },
    })
}
