//! The approximate identity `e_n = 1 − (1/(n+1)) Σ_{k≥0} (n/(n+1))^k α^k`, its powers
//! `u_n = e_n^{[s]+1}`, and the norms that control Ditkin-type convergence.

use num_complex::Complex64;
use serde::Serialize;

use crate::series::{geometric_tail, tail_bound, CertifiedValue, LaurentSeries};
use crate::weights::Weight;
use crate::{Error, Result};

/// Largest truncation degree any routine here will use.
pub const DEGREE_CAP: usize = 1_000_000;

/// Absolute tolerance for the jet conditions `f^{(k)}(1) = 0`.
pub const JET_TOL: f64 = 1e-10;

/// A truncated approximate-identity element and its certified weighted norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxUnitTruncation {
    pub n: u64,
    pub degree: usize,
    pub series: LaurentSeries,
    /// `value` is the weighted norm of `series`; `tail_bound` bounds the weighted norm of the
    /// discarded part of the infinite series.
    pub norm: CertifiedValue,
}

/// How far to expand an infinite series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Truncation {
    Degree(usize),
    /// Smallest convenient degree whose certified tail is at most this.
    Tolerance(f64),
}

fn check_n(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    Ok(n as f64 / (n as f64 + 1.0))
}

fn power_exponent(w: &Weight) -> Result<f64> {
    w.positive_exponent()
        .ok_or_else(|| Error::param("w", format!("{} weight has no power-law positive side", w.kind_name())))
}

/// `e_n` truncated after degree `N`.
pub fn make_en(n: u64, degree: usize, w: &Weight) -> Result<ApproxUnitTruncation> {
    let x = check_n(n)?;
    if degree == 0 || degree > DEGREE_CAP {
        return Err(Error::param("N", format!("degree must be in 1..={DEGREE_CAP}, got {degree}")));
    }
    let beta = power_exponent(w)?;
    let inv = 1.0 / (n as f64 + 1.0);
    let series = LaurentSeries::from_coeffs(
        std::iter::once((0, Complex64::new(x, 0.0)))
            .chain((1..=degree).map(|k| (k as i64, Complex64::new(-x.powi(k as i32) * inv, 0.0)))),
    );
    let tail = geometric_tail(beta, degree as u64 + 1, x)
        .ok_or_else(|| Error::param("N", format!("degree {degree} too small to certify the tail for beta = {beta}")))?
        * inv;
    Ok(ApproxUnitTruncation {
        n,
        degree,
        norm: CertifiedValue { value: series.weighted_norm(w)?, tail_bound: tail },
        series,
    })
}

/// Smallest power-of-two-ish degree `N` whose `e_n` tail under `(1+k)^β` is at most `tol`.
pub fn degree_for_tolerance(n: u64, beta: f64, tol: f64) -> Result<usize> {
    let x = check_n(n)?;
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    let inv = 1.0 / (n as f64 + 1.0);
    let ok = |d: usize| geometric_tail(beta, d as u64 + 1, x).is_some_and(|t| t * inv <= tol);
    let mut hi = 16usize;
    while !ok(hi) {
        if hi >= DEGREE_CAP {
            return Err(Error::DegreeCap { cap: DEGREE_CAP, tol });
        }
        hi = (hi * 2).min(DEGREE_CAP);
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `u_n = e_n^{[s]+1}`, with the tail bounded through `‖a + r‖^p − ‖a‖^p`.
pub fn make_un(n: u64, s: f64, trunc: Truncation, w: &Weight) -> Result<ApproxUnitTruncation> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::param("s", format!("must be finite and >= 0, got {s}")));
    }
    let p = s.floor() as i32 + 1;
    let beta = power_exponent(w)?;
    let build = |degree: usize| -> Result<ApproxUnitTruncation> {
        let e = make_en(n, degree, w)?;
        let series = e.series.pow(p as u32);
        let a = e.norm.value;
        let tail = (a + e.norm.tail_bound).powi(p) - a.powi(p);
        Ok(ApproxUnitTruncation {
            n,
            degree,
            norm: CertifiedValue { value: series.weighted_norm(w)?, tail_bound: tail },
            series,
        })
    };
    match trunc {
        Truncation::Degree(d) => build(d),
        Truncation::Tolerance(tol) => {
            let mut target = tol;
            for _ in 0..8 {
                let u = build(degree_for_tolerance(n, beta, target)?)?;
                if u.norm.tail_bound <= tol {
                    return Ok(u);
                }
                target *= 0.5 * tol / u.norm.tail_bound;
            }
            Err(Error::DegreeCap { cap: DEGREE_CAP, tol })
        }
    }
}

/// Certified `‖(e_n − 1)(α^j − 1)‖_ω` with tail at most `tol`.
///
/// For `j ≥ 0` the coefficient moduli are `x^k/(n+1)` for `0 ≤ k < j` and
/// `x^{k−j}(1 − x^j)/(n+1)` for `k ≥ j`. For `j ≤ −1` they are `x^{k−j}/(n+1)` for `j ≤ k ≤ −1`
/// and `x^k(1 − x^{|j|})/(n+1)` for `k ≥ 0`. The infinite block is summed to a degree `K` and the
/// rest is bounded by [`tail_bound`].
pub fn en_monomial_norm(n: u64, j: i64, w: &Weight, tol: f64) -> Result<CertifiedValue> {
    let x = check_n(n)?;
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    let beta = power_exponent(w)?;
    if beta >= 1.0 {
        return Err(Error::param("w", format!("positive-side exponent must be < 1, got {beta}")));
    }
    if j == 0 {
        return Ok(CertifiedValue::exact(0.0));
    }
    let inv = 1.0 / (n as f64 + 1.0);
    let mut finite = 0.0;
    // The infinite block is `scale · Σ_{k≥start} x^{k−shift} ω(k)`.
    let (start, shift, scale) = if j > 0 {
        let mut xk = 1.0;
        for k in 0..j {
            finite += xk * w.value(k)?;
            xk *= x;
        }
        (j, j, (1.0 - x.powi(j as i32)) * inv)
    } else {
        for k in j..0 {
            finite += x.powi((k - j) as i32) * w.value(k)?;
        }
        (0, 0, (1.0 - x.powi(j.unsigned_abs() as i32)) * inv)
    };
    finite *= inv;

    let start_u = start as u64;
    let bound_from = |k: u64| -> f64 {
        tail_bound(beta, k, x).map(|t| scale * t * x.powi(-(shift as i32))).unwrap_or(f64::INFINITY)
    };
    let mut end = start_u + 16;
    while bound_from(end) > tol / 4.0 {
        if end as usize >= DEGREE_CAP {
            return Err(Error::DegreeCap { cap: DEGREE_CAP, tol });
        }
        end = (end * 2).min(DEGREE_CAP as u64);
    }
    let mut block = 0.0;
    let mut xk = 1.0;
    for k in start_u..end {
        block += xk * w.value(k as i64)?;
        xk *= x;
    }
    Ok(CertifiedValue { value: finite + scale * block, tail_bound: bound_from(end) })
}

/// One point of a Ditkin experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DitkinPoint {
    pub n: u64,
    pub degree: usize,
    /// `value = ‖(U_N − 1)f‖_ω` for the truncation `U_N` of `u_n`; the true `‖(u_n − 1)f‖_ω`
    /// differs from it by at most `tail_bound`.
    pub norm: CertifiedValue,
}

/// Checks `|f^{(k)}(1)| ≤ JET_TOL` for `0 ≤ k ≤ [s]`.
pub fn check_jets_at_one(f: &LaurentSeries, s: f64) -> Result<()> {
    let one = Complex64::new(1.0, 0.0);
    for order in 0..=s.floor() as u32 {
        let value = f.derivative(order).eval(one)?.norm();
        if value > JET_TOL {
            return Err(Error::JetViolation { order: order as usize, value });
        }
    }
    Ok(())
}

/// `u_n` for every `n` in `n_list`, computed in parallel.
pub fn make_units(n_list: &[u64], s: f64, trunc: Truncation, w: &Weight) -> Result<Vec<ApproxUnitTruncation>> {
    use rayon::prelude::*;
    n_list.par_iter().map(|&n| make_un(n, s, trunc, w)).collect()
}

/// `‖(u_n − 1)f‖_ω` for precomputed units.
pub fn ditkin_sequence_with(
    f: &LaurentSeries,
    w: &Weight,
    s: f64,
    units: &[ApproxUnitTruncation],
) -> Result<Vec<DitkinPoint>> {
    check_jets_at_one(f, s)?;
    let f_norm = f.weighted_norm(w)?;
    units
        .iter()
        .map(|u| {
            let h = &(&u.series - &LaurentSeries::one()) * f;
            let norm = CertifiedValue { value: h.weighted_norm(w)?, tail_bound: u.norm.tail_bound * f_norm };
            Ok(DitkinPoint { n: u.n, degree: u.degree, norm })
        })
        .collect()
}

/// `‖(u_n − 1)f‖_ω` for each `n` in `n_list`.
pub fn ditkin_sequence(
    f: &LaurentSeries,
    w: &Weight,
    s: f64,
    n_list: &[u64],
    trunc: Truncation,
) -> Result<Vec<DitkinPoint>> {
    check_jets_at_one(f, s)?;
    ditkin_sequence_with(f, w, s, &make_units(n_list, s, trunc, w)?)
}
