//! Finite sections of the compressed shift and norms of their powers.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{inner_taylor, AtomicMeasure};
use crate::{Error, Result};

/// Eigenvalues of the Gram matrix at or below this are treated as zero.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// Power norms above this stop the computation.
pub const OVERFLOW_LIMIT: f64 = 1e12;

/// Inverses are refused beyond this condition estimate.
const MAX_CONDITION: f64 = 1e14;

/// Running products are compared against binary powers this often.
const RESYNC_PERIOD: usize = 32;

/// A dense square matrix together with a description of how it was built.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSectionOperator {
    matrix: DMatrix<Complex64>,
    basis_tag: String,
    condition_estimate: f64,
}

impl FiniteSectionOperator {
    pub fn from_matrix(matrix: DMatrix<Complex64>, basis_tag: impl Into<String>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.nrows() != matrix.ncols() {
            return Err(Error::param(
                "matrix",
                format!("need a nonempty square matrix, got {}x{}", matrix.nrows(), matrix.ncols()),
            ));
        }
        if matrix.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::param("matrix", "entries must be finite"));
        }
        let sv = matrix.singular_values();
        let (max, min) = (sv.max(), sv.min());
        let condition_estimate = if min > 0.0 { max / min } else { f64::INFINITY };
        Ok(Self { matrix, basis_tag: basis_tag.into(), condition_estimate })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn basis_tag(&self) -> &str {
        &self.basis_tag
    }

    /// Largest over smallest singular value.
    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    /// Spectral norm.
    pub fn norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let (_, t) = self.matrix.clone().schur().unpack();
        t.diagonal().iter().copied().collect()
    }

    /// Inverse from an LU factorisation, improved by two steps of iterative refinement.
    pub fn inverse(&self) -> Result<DMatrix<Complex64>> {
        if !(self.condition_estimate <= MAX_CONDITION) {
            return Err(Error::Singular(self.condition_estimate));
        }
        let n = self.dim();
        let id = DMatrix::<Complex64>::identity(n, n);
        let lu = self.matrix.clone().lu();
        let mut x = lu.solve(&id).ok_or(Error::Singular(self.condition_estimate))?;
        for _ in 0..2 {
            let r = &id - &self.matrix * &x;
            x += lu.solve(&r).ok_or(Error::Singular(self.condition_estimate))?;
        }
        Ok(x)
    }
}

impl Serialize for FiniteSectionOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<(f64, f64)>> =
            self.matrix.row_iter().map(|r| r.iter().map(|c| (c.re, c.im)).collect()).collect();
        let mut st = s.serialize_struct("FiniteSectionOperator", 4)?;
        st.serialize_field("dim", &self.dim())?;
        st.serialize_field("basis_tag", &self.basis_tag)?;
        st.serialize_field("condition_estimate", &self.condition_estimate)?;
        st.serialize_field("entries", &rows)?;
        st.end()
    }
}

fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    m.singular_values().max()
}

/// Section of the compressed shift `T = P_K S|_K` on the model space `K = H² ⊖ J_μH²`.
///
/// The vectors `P_K e_j`, `j < N`, span the trial space. Their Gram matrix is the leading block
/// of `Q = I − M Mᴴ`, where `M` is the lower-triangular Toeplitz matrix of the Taylor
/// coefficients of `J_μ`, and since `P_K S P_K = P_K S` the matrix of `T` against them is
/// `Q_{i,j+1}`. Both only need `Q` of size `N+1`. The Gram matrix is diagonalised, eigenvalues
/// at or below [`RANK_THRESHOLD`] are dropped, and the compression is expressed in the resulting
/// orthonormal basis.
pub fn model_section(mu: &AtomicMeasure, n: usize) -> Result<FiniteSectionOperator> {
    if n < 2 {
        return Err(Error::param("N", format!("need N >= 2, got {n}")));
    }
    let inner = inner_taylor(mu, n)?;
    let c = inner.taylor();
    let size = n + 1;
    let m = DMatrix::from_fn(size, size, |i, j| if i >= j { c[i - j] } else { Complex64::new(0.0, 0.0) });
    let q = DMatrix::<Complex64>::identity(size, size) - &m * m.adjoint();
    let gram = q.view((0, 0), (n, n)).into_owned();
    let shifted = q.view((0, 1), (n, n)).into_owned();

    let eig = gram.symmetric_eigen();
    let keep: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > RANK_THRESHOLD).collect();
    if keep.is_empty() {
        return Err(Error::RankZero);
    }
    let r = keep.len();
    let basis = DMatrix::from_fn(n, r, |i, k| eig.eigenvectors[(i, keep[k])] / eig.eigenvalues[keep[k]].sqrt());
    let a = basis.adjoint() * shifted * &basis;
    let tag = format!(
        "model space section: N = {n}, rank = {r}, atoms = {:?}, gram threshold = {RANK_THRESHOLD:e}",
        mu.atoms()
    );
    FiniteSectionOperator::from_matrix(a, tag)
}

/// Norms of `T^{±n}` for `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerNorms {
    pub inverse: bool,
    pub norms: Vec<(usize, f64)>,
    /// First power whose norm exceeded [`OVERFLOW_LIMIT`]; computation stops there.
    pub overflow_at: Option<usize>,
}

fn binary_power(base: &DMatrix<Complex64>, mut e: usize) -> DMatrix<Complex64> {
    let n = base.nrows();
    let mut acc = DMatrix::<Complex64>::identity(n, n);
    let mut sq = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// Spectral norms of successive powers of `T` (or of its inverse).
///
/// The running product is checked against an independent binary power every
/// few steps and replaced by it if the two drift apart.
pub fn power_norms(t: &FiniteSectionOperator, n_max: usize, inverse: bool) -> Result<PowerNorms> {
    if n_max == 0 {
        return Err(Error::param("n_max", "must be >= 1"));
    }
    let base = if inverse { t.inverse()? } else { t.matrix().clone() };
    let mut p = base.clone();
    let mut norms = Vec::with_capacity(n_max);
    let mut overflow_at = None;
    for n in 1..=n_max {
        if n % RESYNC_PERIOD == 0 {
            let fresh = binary_power(&base, n);
            let drift = (&fresh - &p).norm() / fresh.norm().max(f64::MIN_POSITIVE);
            if drift > 1e-8 {
                p = fresh;
            }
        }
        let v = spectral_norm(&p);
        norms.push((n, v));
        if !(v <= OVERFLOW_LIMIT) {
            overflow_at = Some(n);
            break;
        }
        p = &p * &base;
    }
    Ok(PowerNorms { inverse, norms, overflow_at })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    /// `T = (I − aV)(I + aV)^{-1}` with `V` the Volterra operator on `L²(0,1)`, written in the
    /// orthonormal shifted Legendre basis; unitarily equivalent to the compressed shift on the
    /// model space of `exp(−a(1+z)/(1−z))`.
    fn volterra_model(a: f64, dim: usize) -> DMatrix<f64> {
        let mut v = DMatrix::<f64>::zeros(dim, dim);
        v[(0, 0)] = 0.5;
        if dim > 1 {
            v[(1, 0)] = 0.5 / 3f64.sqrt();
        }
        for k in 1..dim {
            let s = |j: usize| ((2 * k + 1) as f64).sqrt() / ((2 * j + 1) as f64).sqrt() / (2.0 * (2 * k + 1) as f64);
            if k + 1 < dim {
                v[(k + 1, k)] = s(k + 1);
            }
            v[(k - 1, k)] = -s(k - 1);
        }
        let id = DMatrix::<f64>::identity(dim, dim);
        (&id - &v * a) * (&id + &v * a).try_inverse().unwrap()
    }

    fn inverse_norm(m: &DMatrix<f64>, n: usize) -> f64 {
        let inv = m.clone().try_inverse().unwrap();
        let mut p = inv.clone();
        for _ in 1..n {
            p = &p * &inv;
        }
        p.singular_values().max()
    }

    #[test]
    fn trivial_operators() {
        let id = FiniteSectionOperator::from_matrix(DMatrix::identity(5, 5), "identity").unwrap();
        for inverse in [false, true] {
            let p = power_norms(&id, 20, inverse).unwrap();
            assert!(p.norms.iter().all(|&(_, v)| (v - 1.0).abs() < 1e-12));
        }
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            4,
            [0.3, 1.1, 2.0, 5.0].map(|t| Complex64::from_polar(1.0, t)),
        ));
        let d = FiniteSectionOperator::from_matrix(d, "diagonal").unwrap();
        for inverse in [false, true] {
            let p = power_norms(&d, 100, inverse).unwrap();
            assert!(p.norms.iter().all(|&(_, v)| (v - 1.0).abs() < 1e-10));
        }
    }

    #[test]
    fn singular_inverse_is_rejected() {
        let mut m = DMatrix::<Complex64>::identity(3, 3);
        m[(2, 2)] = Complex64::new(0.0, 0.0);
        let t = FiniteSectionOperator::from_matrix(m, "singular").unwrap();
        assert!(matches!(power_norms(&t, 3, true), Err(Error::Singular(_))));
        assert!(power_norms(&t, 3, false).is_ok());
    }

    #[test]
    fn overflow_guard_stops() {
        let m = DMatrix::from_element(1, 1, Complex64::new(10.0, 0.0));
        let t = FiniteSectionOperator::from_matrix(m, "scalar").unwrap();
        let p = power_norms(&t, 50, false).unwrap();
        assert_eq!(p.overflow_at, Some(13));
        assert_eq!(p.norms.len(), 13);
    }

    #[test]
    fn zero_measure_has_rank_zero() {
        assert_eq!(model_section(&AtomicMeasure::zero(), 16), Err(Error::RankZero));
    }

    #[test]
    fn small_mass_section_is_a_contraction() {
        let mu = AtomicMeasure::dirac(1.0, 1e-3).unwrap();
        let t = model_section(&mu, 64).unwrap();
        assert!(t.dim() >= 1 && t.dim() <= 64);
        assert!(t.norm() <= 1.0 + 1e-8, "{}", t.norm());
    }

    #[test]
    fn section_matches_volterra_model() {
        let eps: f64 = 0.1;
        let a = eps * eps;
        let t = model_section(&AtomicMeasure::dirac(0.0, TAU * a).unwrap(), 128).unwrap();
        let norms = power_norms(&t, 100, true).unwrap();
        let model = volterra_model(a, 200);
        for n in [1usize, 10, 50, 100] {
            let want = inverse_norm(&model, n);
            let got = norms.norms[n - 1].1;
            assert!((got - want).abs() < 1e-4 * want, "n = {n}: {got} vs {want}");
        }
    }

    #[test]
    fn eigenvalues_approach_the_atom() {
        let mu = AtomicMeasure::dirac(0.5, 0.3).unwrap();
        let target = Complex64::from_polar(1.0, 0.5);
        let spread = |n: usize| {
            let t = model_section(&mu, n).unwrap();
            t.eigenvalues().iter().map(|e| (e - target).norm()).fold(0.0, f64::max)
        };
        let (s64, s128) = (spread(64), spread(128));
        assert!(s128 <= s64 + 1e-9, "{s64} {s128}");
    }
}
