//! Growth-regime fits for sequences of norms.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Fewest points accepted in the fitted window.
pub const MIN_FIT_POINTS: usize = 10;

/// A regime wins only if its residual is smaller by this factor.
const MARGIN: f64 = 2.0;

/// Residuals below this are indistinguishable.
const RESIDUAL_FLOOR: f64 = 1e-12;

/// `ln‖·‖ ≈ intercept + coef·φ(n)` by least squares; `residual` is the root mean square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub coef: f64,
    pub intercept: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Polynomial,
    SubexpSqrt,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Polynomial => "polynomial",
            Verdict::SubexpSqrt => "subexp_sqrt",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    /// Fraction of the sequence (taken from the tail) that was fitted.
    pub window: f64,
    pub fitted_from: usize,
    pub fitted_points: usize,
    pub norms: Vec<(usize, f64)>,
    /// Against `√n`.
    pub sqrt_fit: Fit,
    /// Against `ln n`.
    pub poly_fit: Fit,
    /// Against `n`.
    pub exp_fit: Fit,
    pub verdict: Verdict,
}

impl GrowthReport {
    /// True when a linear exponent fits clearly better than both slower regimes.
    pub fn is_exponential(&self) -> bool {
        self.exp_fit.coef > 0.0
            && self.exp_fit.residual * MARGIN < self.sqrt_fit.residual.min(self.poly_fit.residual)
            && self.sqrt_fit.residual.min(self.poly_fit.residual) > RESIDUAL_FLOOR
    }
}

fn fit(xs: &[f64], ys: &[f64]) -> Fit {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let coef = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - coef * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - coef * x).powi(2)).sum();
    Fit { coef, intercept, residual: (ss / k).sqrt() }
}

/// Fits `ln‖T^{-n}‖` on the last `window` fraction of `norms` against `√n`, `ln n` and `n`.
///
/// The verdict goes to the `√n` or `ln n` fit when its residual is smaller than the other's by
/// a factor of two, and is inconclusive otherwise.
pub fn growth_fit(norms: &[(usize, f64)], window: f64) -> Result<GrowthReport> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::param("window", format!("tail fraction must be in (0, 1], got {window}")));
    }
    if let Some(&(n, v)) = norms.iter().find(|&&(n, v)| n == 0 || !(v > 0.0 && v.is_finite())) {
        return Err(Error::param("norms", format!("need n >= 1 and a positive finite norm, got ({n}, {v})")));
    }
    let take = ((norms.len() as f64) * window).ceil() as usize;
    if take < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints { got: take, need: MIN_FIT_POINTS });
    }
    let start = norms.len() - take;
    let tail = &norms[start..];
    let ys: Vec<f64> = tail.iter().map(|p| p.1.ln()).collect();
    let against = |phi: fn(f64) -> f64| {
        let xs: Vec<f64> = tail.iter().map(|p| phi(p.0 as f64)).collect();
        fit(&xs, &ys)
    };
    let sqrt_fit = against(f64::sqrt);
    let poly_fit = against(f64::ln);
    let exp_fit = against(|n| n);
    let (rs, rp) = (sqrt_fit.residual, poly_fit.residual);
    let verdict = if rs * MARGIN <= rp && rp > RESIDUAL_FLOOR {
        Verdict::SubexpSqrt
    } else if rp * MARGIN <= rs && rs > RESIDUAL_FLOOR {
        Verdict::Polynomial
    } else {
        Verdict::Inconclusive
    };
    Ok(GrowthReport {
        window,
        fitted_from: tail[0].0,
        fitted_points: take,
        norms: norms.to_vec(),
        sqrt_fit,
        poly_fit,
        exp_fit,
        verdict,
    })
}
