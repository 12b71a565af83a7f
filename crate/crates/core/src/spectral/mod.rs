//! Singular inner functions of atomic measures, finite sections of the compressed shift on their
//! model spaces, power-norm growth, and dual linear programs for quotient norms.

mod duality;
mod growth;
mod section;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use duality::{
    dual_program, interpolation_constant, quotient_inverse_norms, InterpolationReport, QuotientEstimates, QuotientRow,
    DEFAULT_MIN_DEPTH, PHASES,
};
pub use growth::{growth_fit, Fit, GrowthReport, Verdict, MIN_FIT_POINTS};
pub use section::{model_section, power_norms, FiniteSectionOperator, PowerNorms, OVERFLOW_LIMIT, RANK_THRESHOLD};

/// Finitely many point masses `Σ m_j δ_{e^{iθ_j}}` with `m_j > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureSpec", into = "MeasureSpec")]
pub struct AtomicMeasure {
    atoms: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureSpec {
    /// `[angle, mass]` pairs.
    atoms: Vec<(f64, f64)>,
}

impl TryFrom<MeasureSpec> for AtomicMeasure {
    type Error = Error;
    fn try_from(s: MeasureSpec) -> Result<Self> {
        AtomicMeasure::new(s.atoms)
    }
}

impl From<AtomicMeasure> for MeasureSpec {
    fn from(m: AtomicMeasure) -> Self {
        MeasureSpec { atoms: m.atoms }
    }
}

impl AtomicMeasure {
    /// Atoms as `(angle, mass)`; angles are reduced mod 2π and must be distinct.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = atoms
            .into_iter()
            .map(|(t, m)| {
                if !(t.is_finite() && m.is_finite() && m > 0.0) {
                    return Err(Error::param(
                        "atoms",
                        format!("atom ({t}, {m}) needs a finite angle and positive mass"),
                    ));
                }
                Ok((t.rem_euclid(TAU), m))
            })
            .collect::<Result<_>>()?;
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = atoms.len();
        for i in 0..n.saturating_sub(1) {
            if atoms[i + 1].0 - atoms[i].0 <= 1e-12 {
                return Err(Error::DuplicatePoint(atoms[i].0));
            }
        }
        if n > 1 && atoms[0].0 + TAU - atoms[n - 1].0 <= 1e-12 {
            return Err(Error::DuplicatePoint(atoms[0].0));
        }
        Ok(Self { atoms })
    }

    /// `mass · δ_{e^{iθ}}`.
    pub fn dirac(theta: f64, mass: f64) -> Result<Self> {
        Self::new(vec![(theta, mass)])
    }

    pub fn zero() -> Self {
        Self { atoms: Vec::new() }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Angular distance from `theta` to the nearest atom (`∞` without atoms).
    pub fn distance_to_atoms(&self, theta: f64) -> f64 {
        self.atoms
            .iter()
            .map(|&(t, _)| {
                let d = (theta - t).rem_euclid(TAU);
                d.min(TAU - d)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Taylor coefficients `a_0..=a_N` of `−(1/2π) ∫ (e^{it}+z)/(e^{it}−z) dμ(t)`:
/// `a_0 = −μ(𝕋)/(2π)` and `a_k = −(1/π) Σ_j m_j e^{−ikθ_j}`.
pub fn herglotz_taylor(mu: &AtomicMeasure, degree: usize) -> Vec<Complex64> {
    let mut a = vec![Complex64::new(0.0, 0.0); degree + 1];
    a[0] = Complex64::new(-mu.total_mass() / TAU, 0.0);
    for &(theta, m) in mu.atoms() {
        for (k, ak) in a.iter_mut().enumerate().skip(1) {
            *ak -= Complex64::from_polar(m / PI, -(k as f64) * theta);
        }
    }
    a
}

/// `J_μ(z) = exp(−(1/2π) ∫ (e^{it}+z)/(e^{it}−z) dμ(t))` with its Taylor coefficients at 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerFunction {
    measure: AtomicMeasure,
    taylor: Vec<Complex64>,
}

/// Radius of the interior sample points used by the construction-time checks.
const CHECK_RADIUS: f64 = 0.8;

/// Singular inner function of `mu` with Taylor coefficients up to `degree`.
///
/// Uses `n·c_n = Σ_{k=1}^{n} k·a_k·c_{n−k}` with `c_0 = e^{a_0}`, then checks `|J(0)|` and
/// `|J| ≤ 1` on interior samples.
pub fn inner_taylor(mu: &AtomicMeasure, degree: usize) -> Result<InnerFunction> {
    let a = herglotz_taylor(mu, degree);
    let mut c = vec![Complex64::new(0.0, 0.0); degree + 1];
    c[0] = a[0].exp();
    for n in 1..=degree {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=n {
            acc += a[k] * c[n - k] * k as f64;
        }
        c[n] = acc / n as f64;
    }
    let f = InnerFunction { measure: mu.clone(), taylor: c };
    let at0 = f.eval_direct(Complex64::new(0.0, 0.0));
    let want = (-mu.total_mass() / TAU).exp();
    if (f.taylor[0].norm() - want).abs() > 1e-10 || (at0.norm() - want).abs() > 1e-10 {
        return Err(Error::param("mu", "inner function fails |J(0)| = exp(-mu(T)/2pi)"));
    }
    for k in 0..64 {
        let z = Complex64::from_polar(CHECK_RADIUS, TAU * k as f64 / 64.0);
        if f.eval_taylor(z).norm() > 1.0 + 1e-9 {
            return Err(Error::param("mu", format!("|J| exceeds 1 at {z}; increase the degree")));
        }
    }
    Ok(f)
}

impl InnerFunction {
    pub fn measure(&self) -> &AtomicMeasure {
        &self.measure
    }

    pub fn taylor(&self) -> &[Complex64] {
        &self.taylor
    }

    /// Truncated Taylor sum.
    pub fn eval_taylor(&self, z: Complex64) -> Complex64 {
        self.taylor.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Closed form `exp(−(1/2π) Σ m_j (ζ_j+z)/(ζ_j−z))`, valid on the closed disc away from atoms.
    pub fn eval_direct(&self, z: Complex64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for &(theta, m) in self.measure.atoms() {
            let zeta = Complex64::from_polar(1.0, theta);
            s += (zeta + z) / (zeta - z) * m;
        }
        (-s / TAU).exp()
    }
}
