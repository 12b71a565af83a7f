//! Dual linear programs over the point-evaluation functionals `f ↦ Σ c_j f(z_j)` of a finite set.
//!
//! The modulus constraints `|Σ_j c_j z_j^m| ≤ (1+m)^s` are relaxed to circumscribed regular
//! polygons with [`PHASES`] sides, and the objective `|Σ_j c_j z_j^{−n}|` is replaced by its real
//! part. The polygon set is invariant under rotation by `2π/PHASES`, so the linear value `L`
//! satisfies `V ≤ L ≤ V / cos(π/PHASES)` where `V` is the complex value at the same depth.

use std::f64::consts::{PI, TAU};

use microlp::{ComparisonOp, OptimizationDirection, Problem, Solution, SolveOutcome, Variable};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circle_sets::CircleSet;
use crate::{Error, Result};

/// Sides of the polygon replacing each modulus constraint.
pub const PHASES: usize = 16;

/// Smallest constraint depth used when none is given.
pub const DEFAULT_MIN_DEPTH: usize = 1000;

/// Relative violation accepted when the cutting-plane loop stops.
const FEASIBILITY_TOL: f64 = 1e-11;

/// Cuts added per round.
const CUTS_PER_ROUND: usize = 8;

/// Relative gap between depths below which an interpolation constant is called stable.
const STABILITY_TOL: f64 = 1e-6;

fn solver_error(e: microlp::Error) -> Error {
    Error::Solver(e.to_string())
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::param("s", format!("only 0 <= s < 1 is supported, got {s}")));
    }
    Ok(())
}

/// Powers `z_j^m` for `m = 0..=depth` and the weights `(1+m)^s`, shared by every objective.
struct Program {
    angles: Vec<f64>,
    depth: usize,
    powers: Vec<Vec<Complex64>>,
    rhs: Vec<f64>,
    phases: Vec<(f64, f64)>,
}

impl Program {
    fn new(set: &CircleSet, s: f64, depth: usize) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        check_s(s)?;
        let angles = set.points().to_vec();
        if depth + 1 < angles.len() {
            return Err(Error::param(
                "depth",
                format!("need depth >= {} for {} points", angles.len() - 1, angles.len()),
            ));
        }
        let powers =
            (0..=depth).map(|m| angles.iter().map(|&t| Complex64::from_polar(1.0, (m as f64) * t)).collect()).collect();
        let rhs = (0..=depth).map(|m| (1.0 + m as f64).powf(s)).collect();
        let phases = (0..PHASES).map(|k| (TAU * k as f64 / PHASES as f64).sin_cos()).map(|(s, c)| (c, s)).collect();
        Ok(Self { angles, depth, powers, rhs, phases })
    }

    /// Coefficients of `Re(e^{−iφ} Σ c_j ζ_j)` on `(x_j, y_j)` where `c_j = x_j + i y_j`.
    fn row(vars: &[(Variable, Variable)], zeta: &[Complex64], (cos, sin): (f64, f64)) -> Vec<(Variable, f64)> {
        let mut row = Vec::with_capacity(2 * vars.len());
        for (&(x, y), z) in vars.iter().zip(zeta) {
            row.push((x, cos * z.re + sin * z.im));
            row.push((y, sin * z.re - cos * z.im));
        }
        row
    }

    /// Largest polygon violations `(excess / rhs, m, phase)` at the current point, worst first.
    fn violations(&self, c: &[Complex64]) -> Vec<(f64, usize, usize)> {
        let mut worst: Vec<(f64, usize, usize)> = Vec::new();
        for m in 0..=self.depth {
            let w: Complex64 = self.powers[m].iter().zip(c).map(|(z, c)| z * c).sum();
            let (k, v) = self
                .phases
                .iter()
                .map(|&(cos, sin)| cos * w.re + sin * w.im)
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            let excess = (v - self.rhs[m]) / self.rhs[m];
            if excess > FEASIBILITY_TOL {
                worst.push((excess, m, k));
            }
        }
        worst.sort_by(|a, b| b.0.total_cmp(&a.0));
        worst.truncate(CUTS_PER_ROUND);
        worst
    }

    /// Maximises `Re(e^{−iψ} Σ_j c_j z_j^{−n})` over the polygon-relaxed constraints.
    fn solve(&self, n: i64, psi: f64) -> Result<f64> {
        let mut p = Problem::new(OptimizationDirection::Maximize);
        let (sin, cos) = psi.sin_cos();
        let target: Vec<Complex64> = self.angles.iter().map(|&t| Complex64::from_polar(1.0, -(n as f64) * t)).collect();
        let vars: Vec<(Variable, Variable)> = target
            .iter()
            .map(|z| {
                let x = p.add_var(cos * z.re + sin * z.im, (f64::NEG_INFINITY, f64::INFINITY));
                let y = p.add_var(sin * z.re - cos * z.im, (f64::NEG_INFINITY, f64::INFINITY));
                (x, y)
            })
            .collect();
        // The first |E| powers form an invertible Vandermonde system, so these keep the program bounded.
        for m in 0..self.angles.len() {
            for &ph in &self.phases {
                p.add_constraint(Self::row(&vars, &self.powers[m], ph), ComparisonOp::Le, self.rhs[m]);
            }
        }
        let mut sol = into_solution(p.solve().map_err(solver_error)?)?;
        loop {
            let c: Vec<Complex64> =
                vars.iter().map(|&(x, y)| Complex64::new(sol.var_value(x), sol.var_value(y))).collect();
            let cuts = self.violations(&c);
            if cuts.is_empty() {
                return Ok(sol.objective());
            }
            for (_, m, k) in cuts {
                let row = Self::row(&vars, &self.powers[m], self.phases[k]);
                sol = into_solution(sol.add_constraint(row, ComparisonOp::Le, self.rhs[m]).map_err(solver_error)?)?;
            }
        }
    }
}

fn into_solution(out: SolveOutcome) -> Result<Solution> {
    out.into_solution().map_err(|_| Error::Solver("solve interrupted".into()))
}

/// Polygon-relaxed value of `max Re(e^{−iψ} Σ_j c_j z_j^{−n})` subject to
/// `|Σ_j c_j z_j^m| ≤ (1+m)^s` for `0 ≤ m ≤ depth`.
pub fn dual_program(set: &CircleSet, s: f64, n: i64, depth: usize, psi: f64) -> Result<f64> {
    Program::new(set, s, depth)?.solve(n, psi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuotientRow {
    pub n: usize,
    /// Upper estimate at the full constraint depth.
    pub estimate: f64,
    /// Same at half the depth.
    pub estimate_half: f64,
    /// `estimate_half − estimate`; nonnegative up to solver tolerance.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientEstimates {
    pub s: f64,
    pub depth: usize,
    pub phases: usize,
    /// `1 / cos(π/PHASES)`: the estimates exceed the complex program's value by at most this factor.
    pub polygon_factor: f64,
    pub rows: Vec<QuotientRow>,
}

impl QuotientEstimates {
    pub fn norms(&self) -> Vec<(usize, f64)> {
        self.rows.iter().map(|r| (r.n, r.estimate)).collect()
    }
}

fn resolve_depth(depth: Option<usize>, n_max: usize) -> Result<usize> {
    let floor = 10 * n_max;
    match depth {
        None => Ok(floor.max(DEFAULT_MIN_DEPTH)),
        Some(d) if d >= floor => Ok(d),
        Some(d) => Err(Error::param("depth", format!("constraint depth {d} is below 10 * n_max = {floor}"))),
    }
}

/// Upper estimates of the quotient norms of `α^{−n}`, `n = 1..=n_max`, at constraint depth
/// `depth` (default `max(10·n_max, 1000)`) and at half that depth.
pub fn quotient_inverse_norms(
    set: &CircleSet,
    s: f64,
    n_max: usize,
    depth: Option<usize>,
) -> Result<QuotientEstimates> {
    if n_max == 0 {
        return Err(Error::param("n_max", "must be >= 1"));
    }
    let depth = resolve_depth(depth, n_max)?;
    let full = Program::new(set, s, depth)?;
    let half = Program::new(set, s, depth / 2)?;
    let rows = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let estimate = full.solve(n as i64, 0.0)?;
            let estimate_half = half.solve(n as i64, 0.0)?;
            Ok(QuotientRow { n, estimate, estimate_half, gap: estimate_half - estimate })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuotientEstimates { s, depth, phases: PHASES, polygon_factor: 1.0 / (PI / PHASES as f64).cos(), rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationReport {
    pub s: f64,
    pub t: f64,
    pub depth: usize,
    /// `max_{0<n≤depth} estimate(n) / (1+n)^t`.
    pub c_star: f64,
    /// Same with depth halved, both in the constraints and in the range of `n`.
    pub c_star_half: f64,
    pub argmax_n: usize,
    pub polygon_factor: f64,
    /// Relative gap between the two depths below `1e-6`.
    pub stable: bool,
    /// Not stable, larger at full depth, with the maximum in the newly added range of `n`.
    pub diverging: bool,
}

fn weighted_sup(program: &Program, t: f64) -> Result<(f64, usize)> {
    (1..=program.depth)
        .into_par_iter()
        .map(|n| Ok((program.solve(n as i64, 0.0)? / (1.0 + n as f64).powf(t), n)))
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a }))
}

/// Largest `sup_{n>0} |T̂(n)|/(1+n)^t` over annihilating functionals with
/// `sup_{0≤m≤depth} |T̂(−m)|/(1+m)^s ≤ 1`, where `T̂(n) = Σ_j c_j z_j^{−n}`.
pub fn interpolation_constant(set: &CircleSet, s: f64, t: f64, depth: Option<usize>) -> Result<InterpolationReport> {
    check_s(s)?;
    if !(t >= s && t.is_finite()) {
        return Err(Error::param("t", format!("need finite t >= s, got {t}")));
    }
    let depth = depth.unwrap_or(DEFAULT_MIN_DEPTH);
    if depth < 2 {
        return Err(Error::param("depth", "need depth >= 2"));
    }
    let (c_star, argmax_n) = weighted_sup(&Program::new(set, s, depth)?, t)?;
    let (c_star_half, _) = weighted_sup(&Program::new(set, s, depth / 2)?, t)?;
    let rel = (c_star - c_star_half).abs() / c_star.abs().max(f64::MIN_POSITIVE);
    let stable = rel <= STABILITY_TOL;
    Ok(InterpolationReport {
        s,
        t,
        depth,
        c_star,
        c_star_half,
        argmax_n,
        polygon_factor: 1.0 / (PI / PHASES as f64).cos(),
        stable,
        diverging: !stable && c_star > c_star_half && argmax_n > depth / 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(points: &[f64]) -> CircleSet {
        CircleSet::from_angles(points.iter().copied()).unwrap()
    }

    fn equispaced(k: usize) -> CircleSet {
        CircleSet::from_angles((0..k).map(|j| TAU * j as f64 / k as f64)).unwrap()
    }

    #[test]
    fn single_point_is_exactly_one() {
        let q = quotient_inverse_norms(&set(&[0.0]), 0.0, 100, None).unwrap();
        assert_eq!(q.depth, 1000);
        assert!(q.rows.iter().all(|r| (r.estimate - 1.0).abs() < 1e-9 && (r.estimate_half - 1.0).abs() < 1e-9));
    }

    #[test]
    fn two_points_are_periodic() {
        let e = set(&[0.0, PI]);
        let p = Program::new(&e, 0.3, 200).unwrap();
        let v: Vec<f64> = (1..=8).map(|n| p.solve(n, 0.0).unwrap()).collect();
        for n in 0..6 {
            assert!((v[n] - v[n + 2]).abs() < 1e-9, "{v:?}");
        }
        // For even n the objective is the m = 0 functional.
        assert!((v[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rotation_by_a_polygon_step_is_invariant() {
        let e = set(&[0.2, 1.9, 4.0]);
        let p = Program::new(&e, 0.5, 300).unwrap();
        let base = p.solve(7, 0.0).unwrap();
        for k in 1..PHASES {
            let v = p.solve(7, TAU * k as f64 / PHASES as f64).unwrap();
            assert!((v - base).abs() < 1e-8 * base.max(1.0), "k = {k}: {v} vs {base}");
        }
    }

    #[test]
    fn nonincreasing_in_depth() {
        let e = set(&[0.0, 0.5, 2.5, 4.4]);
        for n in [1, 5, 20] {
            let vals: Vec<f64> =
                [10, 40, 160, 640].iter().map(|&d| dual_program(&e, 0.25, n, d, 0.0).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{vals:?}");
        }
    }

    #[test]
    fn brackets_the_complex_value() {
        // Any c scaled onto the true constraint set gives a lower bound for the program.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let e = set(&[0.1, 1.0, 3.0, 5.0]);
        let depth = 400;
        let p = Program::new(&e, 0.4, depth).unwrap();
        for n in [1i64, 3, 11] {
            let value = p.solve(n, 0.0).unwrap();
            for _ in 0..50 {
                let c: Vec<Complex64> =
                    (0..4).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                let scale = (0..=depth)
                    .map(|m| p.powers[m].iter().zip(&c).map(|(z, c)| z * c).sum::<Complex64>().norm() / p.rhs[m])
                    .fold(0.0, f64::max);
                let obj: Complex64 =
                    p.angles.iter().zip(&c).map(|(&t, c)| c * Complex64::from_polar(1.0, -(n as f64) * t)).sum();
                assert!(obj.norm() / scale <= value + 1e-9);
            }
        }
    }

    #[test]
    fn eight_points_are_not_exponential() {
        let q = quotient_inverse_norms(&equispaced(8), 0.0, 100, None).unwrap();
        assert!(q.rows.iter().all(|r| r.gap >= -1e-9));
        let r = super::super::growth_fit(&q.norms(), 0.5).unwrap();
        assert!(!r.is_exponential());
    }

    #[test]
    fn interpolation_constants() {
        let one = interpolation_constant(&set(&[0.0]), 0.0, 0.0, Some(50)).unwrap();
        assert!((one.c_star - 1.0).abs() < 1e-9 && one.stable && !one.diverging);
        let tilted = interpolation_constant(&set(&[0.0]), 0.0, 1.0, Some(50)).unwrap();
        assert!((tilted.c_star - 0.5).abs() < 1e-9 && tilted.argmax_n == 1);
        let two = interpolation_constant(&set(&[0.0, PI]), 0.0, 0.0, Some(100)).unwrap();
        assert!(two.stable && two.c_star.is_finite());
    }

    #[test]
    fn argument_checks() {
        assert!(matches!(Program::new(&CircleSet::from_angles([]).unwrap(), 0.0, 10), Err(Error::EmptySet)));
        assert!(quotient_inverse_norms(&set(&[0.0]), 1.0, 10, None).is_err());
        assert!(quotient_inverse_norms(&set(&[0.0]), 0.0, 10, Some(50)).is_err());
        assert!(interpolation_constant(&set(&[0.0]), 0.5, 0.2, Some(10)).is_err());
    }
}
