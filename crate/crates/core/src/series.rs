//! Finitely supported Laurent series `f = Σ f̂(n) αⁿ` on the circle.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::weights::Weight;
use crate::{Error, Result};

/// Allowed deviation of `|z|` from 1 in [`LaurentSeries::eval`].
pub const CIRCLE_TOL: f64 = 1e-12;

/// Default tolerance for the residual `|f(z0)|` in [`LaurentSeries::divide_by_root`].
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Sparse two-sided coefficient map. Exact zeros are never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LaurentSeries {
    coeffs: BTreeMap<i64, Complex64>,
}

impl LaurentSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_coeffs([(0, c)])
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    /// `αⁿ`.
    pub fn monomial(n: i64) -> Self {
        Self::from_coeffs([(n, ONE)])
    }

    /// `α − z0`.
    pub fn alpha_minus(z0: Complex64) -> Self {
        Self::from_coeffs([(1, ONE), (0, -z0)])
    }

    /// Coefficients of `c₀ + c₁α + c₂α² + …`.
    pub fn polynomial(coeffs: &[Complex64]) -> Self {
        Self::from_coeffs(coeffs.iter().enumerate().map(|(k, &c)| (k as i64, c)))
    }

    /// Builds a series from `(n, f̂(n))` pairs; repeated indices are summed.
    pub fn from_coeffs(pairs: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (n, c) in pairs {
            *coeffs.entry(n).or_insert(ZERO) += c;
        }
        coeffs.retain(|_, c| *c != ZERO);
        Self { coeffs }
    }

    fn from_dense(offset: i64, dense: Vec<Complex64>) -> Self {
        let coeffs =
            dense.into_iter().enumerate().filter(|(_, c)| *c != ZERO).map(|(i, c)| (offset + i as i64, c)).collect();
        Self { coeffs }
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or(ZERO)
    }

    /// Nonzero coefficients in increasing order of frequency.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(n, c)| (*n, *c))
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(lowest, highest)` frequency with a nonzero coefficient.
    pub fn support(&self) -> Option<(i64, i64)> {
        Some((*self.coeffs.keys().next()?, *self.coeffs.keys().next_back()?))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_coeffs(self.iter().map(|(n, a)| (n, a * c)))
    }

    /// Cauchy product, computed densely over the product support.
    pub fn multiply(&self, other: &Self) -> Self {
        let (Some((a0, a1)), Some((b0, b1))) = (self.support(), other.support()) else {
            return Self::zero();
        };
        let mut out = vec![ZERO; (a1 - a0 + b1 - b0 + 1) as usize];
        let rhs: Vec<(usize, Complex64)> = other.iter().map(|(n, c)| ((n - b0) as usize, c)).collect();
        for (n, a) in self.iter() {
            let base = (n - a0) as usize;
            for &(k, b) in &rhs {
                out[base + k] += a * b;
            }
        }
        Self::from_dense(a0 + b0, out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.multiply(self);
        }
        acc
    }

    /// `k`-th complex derivative in `z`: each step maps `f̂(n+1)` to `(n+1)f̂(n+1)` at slot `n`.
    pub fn derivative(&self, k: u32) -> Self {
        let mut f = self.clone();
        for _ in 0..k {
            f = Self::from_coeffs(f.iter().map(|(n, c)| (n - 1, c * n as f64)));
        }
        f
    }

    /// `Σ f̂(n) zⁿ` for `|z| = 1`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let dev = (z.norm() - 1.0).abs();
        if dev > CIRCLE_TOL {
            return Err(Error::OffCircle { z, dev });
        }
        Ok(self.eval_formal(z))
    }

    /// `Σ f̂(n) zⁿ` for any nonzero `z` (or any `z` when no negative powers are present).
    pub fn eval_formal(&self, z: Complex64) -> Complex64 {
        let Some((lo, _)) = self.support() else { return ZERO };
        let mut pw = z.powi(lo as i32);
        let mut at = lo;
        let mut acc = ZERO;
        for (n, c) in self.iter() {
            if n != at {
                pw *= z.powi((n - at) as i32);
                at = n;
            }
            acc += c * pw;
        }
        acc
    }

    /// `Σ |f̂(n)| ω(n)`.
    pub fn weighted_norm(&self, w: &Weight) -> Result<f64> {
        self.iter().map(|(n, c)| Ok(c.norm() * w.value(n)?)).sum()
    }

    /// `Σ |f̂(n)| ω(n)/(1+|n|)`.
    pub fn weighted_norm_over_linear(&self, w: &Weight) -> Result<f64> {
        let q = w.divided_by_linear();
        self.iter().map(|(n, c)| Ok(c.norm() * q.value(n)?)).sum()
    }

    /// `g` with `g·(α − z0) = f − f(z0)`, for unimodular `z0` where `|f(z0)| ≤ tol`.
    ///
    /// After the rotation `ĝ(n) = f̂(n) z0ⁿ` the quotient by `α − 1` has coefficients
    /// `Σ_{n>m} ĝ(n)` for `m ≥ 0` and `−Σ_{n≤m} ĝ(n)` for `m ≤ −1`.
    pub fn divide_by_root(&self, z0: Complex64, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::param("tol", format!("must be positive, got {tol}")));
        }
        let residual = self.eval(z0)?;
        if residual.norm() > tol {
            return Err(Error::NonVanishing { residual: residual.norm(), tol });
        }
        let Some((lo, hi)) = self.support() else { return Ok(Self::zero()) };
        let rotated: Vec<(i64, Complex64)> = self.iter().map(|(n, c)| (n, c * z0.powi(n as i32))).collect();
        let inv = z0.inv();
        let mut out = Vec::new();

        let mut acc = ZERO;
        let mut it = rotated.iter().peekable();
        for m in lo.min(0)..0 {
            while let Some(&&(n, c)) = it.peek() {
                if n > m {
                    break;
                }
                acc += c;
                it.next();
            }
            out.push((m, -acc * inv.powi((m + 1) as i32)));
        }

        let mut acc = ZERO;
        let mut it = rotated.iter().rev().peekable();
        for m in (0..hi.max(0)).rev() {
            while let Some(&&(n, c)) = it.peek() {
                if n <= m {
                    break;
                }
                acc += c;
                it.next();
            }
            out.push((m, acc * inv.powi((m + 1) as i32)));
        }
        Ok(Self::from_coeffs(out))
    }

    /// Largest coefficient-wise modulus of `self − other`.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        (self - other).iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        LaurentSeries::from_coeffs(self.iter().chain(rhs.iter()))
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        LaurentSeries::from_coeffs(self.iter().chain(rhs.iter().map(|(n, c)| (n, -c))))
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.multiply(rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.scale(-ONE)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentSeries {
            type Output = LaurentSeries;
            fn $m(self, rhs: LaurentSeries) -> LaurentSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Serialize for LaurentSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter().map(|(n, c)| (n, c.re, c.im)))
    }
}

impl<'de> Deserialize<'de> for LaurentSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let triples = Vec::<(i64, f64, f64)>::deserialize(d)?;
        let mut seen = std::collections::BTreeSet::new();
        for &(n, re, im) in &triples {
            if !seen.insert(n) {
                return Err(serde::de::Error::custom(format!("frequency {n} listed twice")));
            }
            if !(re.is_finite() && im.is_finite()) {
                return Err(serde::de::Error::custom(format!("non-finite coefficient at {n}")));
            }
        }
        Ok(Self::from_coeffs(triples.into_iter().map(|(n, re, im)| (n, Complex64::new(re, im)))))
    }
}

/// A computed quantity together with a rigorous bound on what truncation discarded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedValue {
    pub value: f64,
    pub tail_bound: f64,
}

impl CertifiedValue {
    pub fn exact(value: f64) -> Self {
        Self { value, tail_bound: 0.0 }
    }

    /// `value + tail_bound`.
    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }
}

/// Upper bound for `Σ_{k≥j} (1+k)^β x^k`, valid for `0 ≤ β < 1`, `0 ≤ x < 1`:
/// `(j+1)^β x^j/(1−x) + x^{j+1}/(1−x)^{β+1}`.
pub fn tail_bound(beta: f64, j: u64, x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::param("beta", format!("need 0 <= beta < 1, got {beta}")));
    }
    if !(0.0..1.0).contains(&x) {
        return Err(Error::param("x", format!("need 0 <= x < 1, got {x}")));
    }
    let j1 = j as f64 + 1.0;
    let xj = x.powf(j as f64);
    Ok(j1.powf(beta) * xj / (1.0 - x) + xj * x / (1.0 - x).powf(beta + 1.0))
}

/// Upper bound for `Σ_{k≥j} (1+k)^β x^k` for any `β ≥ 0`.
///
/// Uses [`tail_bound`] when `β < 1`. Otherwise the term ratio is at most
/// `ρ = x((j+2)/(j+1))^β` from `j` on; when `ρ < 1` the tail is at most `term_j/(1−ρ)`, and
/// `None` is returned when `j` is too small for that.
pub fn geometric_tail(beta: f64, j: u64, x: f64) -> Option<f64> {
    if beta < 1.0 {
        return tail_bound(beta, j, x).ok();
    }
    if !(0.0..1.0).contains(&x) {
        return None;
    }
    let j1 = j as f64 + 1.0;
    let rho = x * ((j1 + 1.0) / j1).powf(beta);
    (rho < 1.0).then(|| j1.powf(beta) * x.powf(j as f64) / (1.0 - rho))
}

/// The two sides of the derivative-norm comparison for one series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormComparison {
    /// `inf ω(n+1)/ω(n)` over the window.
    pub a: f64,
    /// `sup ω(n+1)/ω(n)` over the window.
    pub b: f64,
    /// `A·‖f'‖_{ω₁}` with `ω₁(n) = ω(n)/(1+|n|)`.
    pub lower: f64,
    /// `‖f‖_ω`.
    pub norm: f64,
    /// `|f̂(0)|ω(0) + 3B‖f'‖_{ω₁}`.
    pub upper: f64,
    pub holds: bool,
}

/// Margin around the support used to estimate the ratio constants.
pub const RATIO_WINDOW_MARGIN: i64 = 10;

/// `inf` and `sup` of `ω(n+1)/ω(n)` for `lo ≤ n ≤ hi`.
pub fn ratio_bounds(w: &Weight, lo: i64, hi: i64) -> Result<(f64, f64)> {
    let mut a = f64::INFINITY;
    let mut b = 0.0f64;
    for n in lo..=hi {
        let r = (w.ln_value(n + 1)? - w.ln_value(n)?).exp();
        a = a.min(r);
        b = b.max(r);
    }
    Ok((a, b))
}

/// Checks `A‖f'‖_{ω₁} ≤ ‖f‖_ω ≤ |f̂(0)|ω(0) + 3B‖f'‖_{ω₁}` with window constants `A`, `B`.
pub fn compare_derivative_norms(f: &LaurentSeries, w: &Weight) -> Result<NormComparison> {
    let (lo, hi) = f.support().unwrap_or((0, 0));
    let (a, b) = ratio_bounds(w, lo - RATIO_WINDOW_MARGIN, hi + RATIO_WINDOW_MARGIN)?;
    let d = f.derivative(1).weighted_norm_over_linear(w)?;
    let norm = f.weighted_norm(w)?;
    let lower = a * d;
    let upper = f.coeff(0).norm() * w.value(0)? + 3.0 * b * d;
    let slack = 1e-12 * norm.max(1.0);
    Ok(NormComparison { a, b, lower, norm, upper, holds: lower <= norm + slack && norm <= upper + slack })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{asym_weight, power_weight};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn series(pairs: &[(i64, f64)]) -> LaurentSeries {
        LaurentSeries::from_coeffs(pairs.iter().map(|&(n, v)| (n, c(v))))
    }

    fn random_series(rng: &mut ChaCha8Rng, lo: i64, hi: i64, terms: usize) -> LaurentSeries {
        LaurentSeries::from_coeffs(
            (0..terms)
                .map(|_| (rng.gen_range(lo..=hi), Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))),
        )
    }

    #[test]
    fn norms() {
        let w1 = power_weight(1.0).unwrap();
        assert_eq!(series(&[(1, 1.0), (-1, 1.0)]).weighted_norm(&w1).unwrap(), 4.0);
        assert_eq!(LaurentSeries::zero().weighted_norm(&w1).unwrap(), 0.0);
        let w = asym_weight(0.0, 2.0).unwrap();
        assert_eq!(series(&[(0, 1.0), (-2, 1.0)]).weighted_norm(&w).unwrap(), 10.0);
    }

    #[test]
    fn zeros_are_not_stored() {
        let f = series(&[(0, 1.0), (0, -1.0), (3, 2.0)]);
        assert_eq!(f.len(), 1);
        assert_eq!(f.support(), Some((3, 3)));
        assert!((&f - &f).is_zero());
    }

    #[test]
    fn products() {
        let p = &series(&[(1, 1.0), (0, -1.0)]) * &series(&[(1, 1.0), (0, 1.0)]);
        assert_eq!(p, series(&[(2, 1.0), (0, -1.0)]));
        let f = series(&[(-2, 3.0), (5, -1.5)]);
        assert_eq!(&f * &LaurentSeries::one(), f);
        assert!((&f * &LaurentSeries::zero()).is_zero());
    }

    #[test]
    fn derivatives() {
        assert_eq!(LaurentSeries::monomial(2).derivative(1), series(&[(1, 2.0)]));
        assert_eq!(LaurentSeries::monomial(-1).derivative(1), series(&[(-2, -1.0)]));
        assert_eq!(LaurentSeries::monomial(3).derivative(2), series(&[(1, 6.0)]));
        assert!(LaurentSeries::one().derivative(1).is_zero());
    }

    #[test]
    fn evaluation() {
        let z1 = c(1.0);
        assert_eq!(series(&[(1, 1.0), (0, -1.0)]).eval(z1).unwrap(), c(0.0));
        let v = LaurentSeries::monomial(2).eval(Complex64::i()).unwrap();
        assert!((v - c(-1.0)).norm() < 1e-15);
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        assert!(series(&[(0, 1.0), (1, 1.0), (2, 1.0)]).eval(w).unwrap().norm() < 1e-15);
        assert!(matches!(LaurentSeries::one().eval(c(0.5)), Err(Error::OffCircle { .. })));
        let v = series(&[(-3, 1.0), (2, 1.0)]).eval(Complex64::from_polar(1.0, 0.7)).unwrap();
        let want = Complex64::from_polar(1.0, -2.1) + Complex64::from_polar(1.0, 1.4);
        assert!((v - want).norm() < 1e-14);
    }

    #[test]
    fn division_examples() {
        let one = c(1.0);
        let g = series(&[(2, 1.0), (0, -1.0)]).divide_by_root(one, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(g, series(&[(1, 1.0), (0, 1.0)]));
        let g = series(&[(-1, 1.0), (0, -1.0)]).divide_by_root(one, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(g, series(&[(-1, -1.0)]));
        let err = series(&[(1, 1.0)]).divide_by_root(one, DEFAULT_ROOT_TOL);
        assert!(matches!(err, Err(Error::NonVanishing { .. })));
    }

    #[test]
    fn division_subtracts_small_residual() {
        let f = series(&[(3, 1.0), (0, -1.0 + 1e-12)]);
        let g = f.divide_by_root(c(1.0), DEFAULT_ROOT_TOL).unwrap();
        let back = &g * &LaurentSeries::alpha_minus(c(1.0));
        let want = &f - &LaurentSeries::constant(f.eval(c(1.0)).unwrap());
        assert!(back.max_coeff_diff(&want) < 1e-15);
    }

    #[test]
    fn division_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let z0 = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            let f = random_series(&mut rng, -12, 12, 10);
            let f = &f - &LaurentSeries::constant(f.eval(z0).unwrap());
            let g = f.divide_by_root(z0, DEFAULT_ROOT_TOL).unwrap();
            let back = &g * &LaurentSeries::alpha_minus(z0);
            assert!(back.max_coeff_diff(&f) <= 1e-12);
        }
    }

    #[test]
    fn tail_bound_examples() {
        assert_eq!(tail_bound(0.0, 0, 0.5).unwrap(), 3.0);
        assert_eq!(tail_bound(0.3, 0, 0.0).unwrap(), 1.0);
        let oracle: f64 = (2..100_002).map(|k| (1.0 + k as f64).sqrt() * 0.9f64.powi(k)).sum();
        assert!(tail_bound(0.5, 2, 0.9).unwrap() >= oracle);
        assert!(tail_bound(1.0, 0, 0.5).is_err());
        assert!(tail_bound(0.5, 0, 1.0).is_err());
    }

    #[test]
    fn geometric_tail_covers_large_beta() {
        for beta in [1.0f64, 1.5, 2.0] {
            for j in [0u64, 5, 50, 500] {
                for x in [0.3f64, 0.9, 0.99] {
                    let oracle: f64 = (j..j + 200_000).map(|k| (1.0 + k as f64).powf(beta) * x.powf(k as f64)).sum();
                    if let Some(b) = geometric_tail(beta, j, x) {
                        assert!(b >= oracle * (1.0 - 1e-12), "beta={beta} j={j} x={x}");
                    }
                }
            }
        }
        assert!(geometric_tail(2.0, 0, 0.9).is_none());
    }

    #[test]
    fn derivative_norm_comparison_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = asym_weight(0.5, 2.0).unwrap();
        for _ in 0..200 {
            let f = random_series(&mut rng, -30, 30, 8);
            let r = compare_derivative_norms(&f, &w).unwrap();
            assert!(r.holds, "{r:?}");
        }
    }

    #[test]
    fn json_form() {
        let f = LaurentSeries::from_coeffs([(2, Complex64::new(1.0, -1.0)), (-1, c(0.5))]);
        let j = serde_json::to_string(&f).unwrap();
        assert_eq!(j, "[[-1,0.5,0.0],[2,1.0,-1.0]]");
        assert_eq!(serde_json::from_str::<LaurentSeries>(&j).unwrap(), f);
        assert!(serde_json::from_str::<LaurentSeries>("[[1,1,0],[1,2,0]]").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_series() -> impl Strategy<Value = LaurentSeries> {
            proptest::collection::vec((-15i64..=15, -1.0f64..1.0, -1.0f64..1.0), 0..10)
                .prop_map(|v| LaurentSeries::from_coeffs(v.into_iter().map(|(n, a, b)| (n, Complex64::new(a, b)))))
        }

        proptest! {
            #[test]
            fn product_commutes_and_associates(f in arb_series(), g in arb_series(), h in arb_series()) {
                prop_assert!((&f * &g).max_coeff_diff(&(&g * &f)) <= 1e-12);
                prop_assert!((&(&f * &g) * &h).max_coeff_diff(&(&f * &(&g * &h))) <= 1e-12);
            }

            #[test]
            fn leibniz(f in arb_series(), g in arb_series()) {
                let lhs = (&f * &g).derivative(1);
                let rhs = &(&f.derivative(1) * &g) + &(&f * &g.derivative(1));
                prop_assert!(lhs.max_coeff_diff(&rhs) <= 1e-11);
            }

            #[test]
            fn norm_is_submultiplicative(f in arb_series(), g in arb_series()) {
                let w = power_weight(1.0).unwrap();
                let lhs = (&f * &g).weighted_norm(&w).unwrap();
                let rhs = f.weighted_norm(&w).unwrap() * g.weighted_norm(&w).unwrap();
                prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-15);
            }

            #[test]
            fn division_round_trip(f in arb_series(), theta in 0.0f64..std::f64::consts::TAU) {
                let z0 = Complex64::from_polar(1.0, theta);
                let f = &f - &LaurentSeries::constant(f.eval(z0).unwrap());
                let g = f.divide_by_root(z0, DEFAULT_ROOT_TOL).unwrap();
                prop_assert!((&g * &LaurentSeries::alpha_minus(z0)).max_coeff_diff(&f) <= 1e-12);
            }

            #[test]
            fn tail_bound_dominates(beta in 0.0f64..0.999, j in 0u64..60, x in 0.01f64..0.99) {
                let mut sum = 0.0;
                let mut k = j;
                loop {
                    let term = (1.0 + k as f64).powf(beta) * x.powf(k as f64);
                    sum += term;
                    if term < 1e-17 * sum { break; }
                    k += 1;
                }
                prop_assert!(tail_bound(beta, j, x).unwrap() - sum >= -1e-12);
            }
        }
    }
}
