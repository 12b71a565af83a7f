//! Jet conditions on finite sets and numerical hulls of finitely generated ideals.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::circle_sets::CircleSet;
use crate::series::LaurentSeries;
use crate::{Error, Result};

/// Default absolute tolerance on derivative values in [`jet_membership`].
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-8;

/// Default number of grid angles scanned by [`hull`].
pub const DEFAULT_GRID: usize = 4096;

/// Default angular tolerance of [`hull`].
pub const DEFAULT_HULL_TOL: f64 = 1e-8;

/// Allowed angular mismatch when checking `E_{j+1} ⊆ E_j`.
pub const NESTING_TOL: f64 = 1e-8;

/// Nested sets `E_0 ⊇ E_1 ⊇ … ⊇ E_{[s]}` on which `f^{(j)}` must vanish.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JetSpec {
    levels: Vec<CircleSet>,
    s: f64,
}

impl JetSpec {
    pub fn new(levels: Vec<CircleSet>, s: f64) -> Result<Self> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::param("s", format!("must be finite and >= 0, got {s}")));
        }
        let need = s.floor() as usize + 1;
        if levels.len() != need {
            return Err(Error::param("levels", format!("s = {s} needs {need} levels, got {}", levels.len())));
        }
        for (j, w) in levels.windows(2).enumerate() {
            if !w[1].is_subset_of(&w[0], NESTING_TOL) {
                return Err(Error::param("levels", format!("level {} is not contained in level {j}", j + 1)));
            }
        }
        Ok(Self { levels, s })
    }

    pub fn levels(&self) -> &[CircleSet] {
        &self.levels
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelReport {
    pub j: usize,
    pub max_abs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub levels: Vec<LevelReport>,
    pub pass: bool,
}

/// `max_{z ∈ E_j} |f^{(j)}(z)|` for each level, compared with `tol`.
pub fn jet_membership(f: &LaurentSeries, jets: &JetSpec, tol: f64) -> Result<MembershipReport> {
    let levels = jets
        .levels
        .iter()
        .enumerate()
        .map(|(j, set)| {
            let d = f.derivative(j as u32);
            let max_abs = set
                .points()
                .iter()
                .map(|&t| d.eval(Complex64::from_polar(1.0, t)).map(|v| v.norm()))
                .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
            Ok(LevelReport { j, max_abs, pass: max_abs <= tol })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = levels.iter().all(|l| l.pass);
    Ok(MembershipReport { levels, pass })
}

/// Derivatives `g^{(j)}`, `j = 0..=k_max`, of every generator.
struct Objective {
    derivs: Vec<Vec<LaurentSeries>>,
}

impl Objective {
    fn new(generators: &[LaurentSeries], k_max: usize) -> Self {
        Self { derivs: generators.iter().map(|g| (0..=k_max as u32).map(|j| g.derivative(j)).collect()).collect() }
    }

    /// `Σ_gen Σ_{j ∈ orders} |g^{(j)}(e^{iθ})|²`.
    fn eval(&self, theta: f64, orders: std::ops::RangeInclusive<usize>) -> f64 {
        let z = Complex64::from_polar(1.0, theta);
        self.derivs.iter().map(|ds| orders.clone().map(|j| ds[j].eval_formal(z).norm_sqr()).sum::<f64>()).sum()
    }
}

/// Golden-section minimisation of `f` on `[a, b]` down to width `tol`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Extra derivative orders the refinement may use to sharpen zeros of high multiplicity.
const EXTRA_ORDERS: usize = 6;

/// Common zeros on the circle of the generators and their derivatives up to order `k`.
///
/// Local minima of `Σ_gen Σ_{j≤k} |g^{(j)}|²` on a grid of `grid_size` angles are refined by
/// golden-section search and kept when the objective falls below `tol²`. A zero of multiplicity
/// `m > k` is flat to order `2(m−k)` in that objective, so the location is polished with the
/// highest derivative order that still vanishes there. Zeros closer than `2π/grid_size` may merge.
pub fn hull(generators: &[LaurentSeries], k: usize, grid_size: usize, tol: f64) -> Result<CircleSet> {
    if generators.is_empty() {
        return Err(Error::param("generators", "need at least one generator"));
    }
    if grid_size < 16 {
        return Err(Error::param("grid_size", format!("need at least 16, got {grid_size}")));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    let obj = Objective::new(generators, k + EXTRA_ORDERS);
    let step = TAU / grid_size as f64;
    let vals: Vec<f64> = (0..grid_size).map(|i| obj.eval(i as f64 * step, 0..=k)).collect();
    let accept = tol * tol;
    let refine_width = (tol * 1e-3).max(1e-15);

    let mut found = Vec::new();
    for i in 0..grid_size {
        let (prev, next) = (vals[(i + grid_size - 1) % grid_size], vals[(i + 1) % grid_size]);
        if !(vals[i] <= prev && vals[i] <= next) {
            continue;
        }
        let centre = i as f64 * step;
        let (lo, hi) = (centre - step, centre + step);
        let mut theta = golden_min(|t| obj.eval(t, 0..=k), lo, hi, refine_width);
        if obj.eval(theta, 0..=k) >= accept {
            continue;
        }
        let mut order = k;
        while order < k + EXTRA_ORDERS && obj.eval(theta, order + 1..=order + 1) < tol {
            order += 1;
            let polished = golden_min(|t| obj.eval(t, order..=order), lo, hi, refine_width);
            if obj.eval(polished, 0..=k) >= accept {
                break;
            }
            theta = polished;
        }
        found.push(theta);
    }
    Ok(CircleSet::from_angles_merged(found, step))
}
