//! Arc averages `(1/|L|) ∫_L log⁺(1/d(t,E)) dt` and the fit `C₁ ln(1/|L|) + C₂`.

use std::f64::consts::TAU;

use serde::Serialize;

use super::{gap_contribution, half_gap_integral, normalize, CircleSet};
use crate::{Error, Result};

/// Largest arc average observed at one scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopePoint {
    pub scale: u32,
    pub length: f64,
    pub log_inv_length: f64,
    pub sup_average: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ATWReport {
    pub arc_family: String,
    pub c1: f64,
    pub c2: f64,
    /// Largest `|sup_average − (C₁ ln(1/|L|) + C₂)|` over the scales.
    pub max_residual: f64,
    /// Smallest `C₂` for which `C₁ ln(1/|L|) + C₂` dominates the whole envelope.
    pub dominating_c2: f64,
    /// Finite-depth heuristic: false when the envelope steepens at the finest scales.
    pub consistent: bool,
    pub envelope: Vec<EnvelopePoint>,
}

/// Cumulative integral of `log⁺(1/d)` from the first point, on the unrolled circle.
struct Cumulative {
    /// Points followed by `points[0] + 2π`.
    knots: Vec<f64>,
    prefix: Vec<f64>,
}

impl Cumulative {
    fn new(set: &CircleSet) -> Self {
        let mut knots = set.points().to_vec();
        knots.push(knots[0] + TAU);
        let mut prefix = vec![0.0];
        for w in knots.windows(2) {
            prefix.push(prefix.last().unwrap() + gap_contribution(w[1] - w[0]));
        }
        Self { knots, prefix }
    }

    /// `∫_{knots[0]}^{x} log⁺(1/d)` for `x ∈ [knots[0], knots[0] + 2π]`.
    fn at(&self, x: f64) -> f64 {
        let i = self.knots.partition_point(|&k| k <= x).clamp(1, self.knots.len() - 1) - 1;
        let (a, b) = (self.knots[i], self.knots[i + 1]);
        let h = 0.5 * (b - a);
        let within = if x - a <= h {
            half_gap_integral((x - a).max(0.0))
        } else {
            2.0 * half_gap_integral(h) - half_gap_integral((b - x).max(0.0))
        };
        self.prefix[i] + within
    }

    fn arc(&self, start: f64, len: f64) -> f64 {
        let base = self.knots[0];
        let s = base + normalize(start - base);
        let end = s + len;
        let top = base + TAU;
        if end <= top {
            self.at(end) - self.at(s)
        } else {
            (self.at(top) - self.at(s)) + self.at(base + (end - top))
        }
    }
}

/// `(1/ℓ) ∫_{start}^{start+ℓ} log⁺(1/d(t,E)) dt`.
pub fn arc_average(set: &CircleSet, start: f64, len: f64) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(len > 0.0 && len <= TAU) {
        return Err(Error::param("length", format!("arc length must be in (0, 2π], got {len}")));
    }
    Ok(Cumulative::new(set).arc(start, len) / len)
}

/// Evaluates arc averages on lengths `2π·2^{−m}`, `m = 1..=scales`, using `arcs_per_scale`
/// uniformly rotated arcs plus one arc centred at each point, and fits the per-scale maxima by
/// least squares in `ln(1/|L|)` with `C₁, C₂ ≥ 0`.
pub fn atw_check(set: &CircleSet, scales: u32, arcs_per_scale: u32) -> Result<ATWReport> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if scales < 3 {
        return Err(Error::param("scales", format!("need at least 3 scales, got {scales}")));
    }
    let cum = Cumulative::new(set);
    let mut envelope: Vec<EnvelopePoint> = (1..=scales)
        .map(|m| {
            let len = TAU * 0.5f64.powi(m as i32);
            let rotated = (0..arcs_per_scale).map(|k| TAU * k as f64 / arcs_per_scale as f64);
            let centred = set.points().iter().map(|&p| p - 0.5 * len);
            let sup = rotated.chain(centred).map(|s| cum.arc(s, len) / len).fold(0.0, f64::max);
            EnvelopePoint { scale: m, length: len, log_inv_length: -len.ln(), sup_average: sup, residual: 0.0 }
        })
        .collect();

    let k = envelope.len() as f64;
    let mx = envelope.iter().map(|p| p.log_inv_length).sum::<f64>() / k;
    let my = envelope.iter().map(|p| p.sup_average).sum::<f64>() / k;
    let sxx: f64 = envelope.iter().map(|p| (p.log_inv_length - mx).powi(2)).sum();
    let sxy: f64 = envelope.iter().map(|p| (p.log_inv_length - mx) * (p.sup_average - my)).sum();
    let c1 = (sxy / sxx).max(0.0);
    let c2 = (my - c1 * mx).max(0.0);

    let mut max_residual = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    for p in envelope.iter_mut() {
        p.residual = p.sup_average - (c1 * p.log_inv_length + c2);
        max_residual = max_residual.max(p.residual.abs());
        worst_excess = worst_excess.max(p.residual);
    }
    let n = envelope.len();
    let (a, b) = (&envelope[n - 3], &envelope[n - 1]);
    let local_slope = (b.sup_average - a.sup_average) / (b.log_inv_length - a.log_inv_length);
    let consistent = local_slope <= 1.25 * c1 + 0.25;

    Ok(ATWReport {
        arc_family: format!(
            "lengths 2π·2^-m for m = 1..={scales}; {arcs_per_scale} rotated arcs per scale plus arcs centred at each of {} points",
            set.len()
        ),
        c1,
        c2,
        max_residual,
        dominating_c2: c2 + worst_excess.max(0.0),
        consistent,
        envelope,
    })
}
