//! Closed subsets of the circle described by finitely many angles, and the logarithmic
//! integrals that measure how thin they are.
//!
//! Distances are arc lengths, `d(t, E) = min_θ min(|t−θ|, 2π−|t−θ|)`, and `log⁺ x = max(ln x, 0)`.
//! With that choice a gap of length `ℓ` contributes `2·G(ℓ/2)` to `∫ log⁺(1/d(t,E)) dt`, where
//! `G(a) = ∫₀^a log⁺(1/u) du`.

mod atw;
mod perfect;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::series::CertifiedValue;
use crate::{Error, Result};

pub use atw::{arc_average, atw_check, ATWReport, EnvelopePoint};
pub use perfect::{
    build_carleson_perfect_subset, carleson_gap_sum, classify_one_sided, perfect_subset_gap_bound,
    perfect_subset_gap_total, CantorScheme, GapLevels, IntervalSet, MiddleThirdsCantor, OneSidedPartition, PerfectSet,
    PointClass,
};

/// Two angles closer than this are the same point.
pub const POINT_RESOLUTION: f64 = 1e-12;

/// `G(a) = ∫₀^a log⁺(1/u) du`: `a(1 − ln a)` for `a ≤ 1`, and `1` beyond.
pub fn half_gap_integral(a: f64) -> f64 {
    if a <= 0.0 {
        0.0
    } else if a < 1.0 {
        a * (1.0 - a.ln())
    } else {
        1.0
    }
}

/// `∫ log⁺(1/d) dt` over a single gap of length `ℓ`.
pub fn gap_contribution(len: f64) -> f64 {
    2.0 * half_gap_integral(0.5 * len)
}

/// An arc `[start, start + length]` of the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub length: f64,
}

impl Arc {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        if !(length > 0.0 && length <= TAU) {
            return Err(Error::param("length", format!("arc length must be in (0, 2π], got {length}")));
        }
        Ok(Self { start: normalize(start), length })
    }
}

fn normalize(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Sorted distinct angles in `[0, 2π)` together with the indices of declared accumulation points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircleSetSpec", into = "CircleSetSpec")]
pub struct CircleSet {
    points: Vec<f64>,
    limits: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircleSetSpec {
    points: Vec<f64>,
    #[serde(default)]
    limits: Vec<usize>,
}

impl TryFrom<CircleSetSpec> for CircleSet {
    type Error = Error;
    fn try_from(s: CircleSetSpec) -> Result<Self> {
        CircleSet::new(s.points, s.limits)
    }
}

impl From<CircleSet> for CircleSetSpec {
    fn from(s: CircleSet) -> Self {
        CircleSetSpec { points: s.points, limits: s.limits }
    }
}

impl CircleSet {
    /// Angles are reduced mod 2π. `limits` index into `points` as given.
    pub fn new(points: Vec<f64>, limits: Vec<usize>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::param("points", format!("non-finite angle {p}")));
        }
        if let Some(&i) = limits.iter().find(|&&i| i >= points.len()) {
            return Err(Error::param("limits", format!("index {i} out of range for {} points", points.len())));
        }
        let mut order: Vec<(f64, usize)> = points.iter().enumerate().map(|(i, &p)| (normalize(p), i)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in order.windows(2) {
            if w[1].0 - w[0].0 <= POINT_RESOLUTION {
                return Err(Error::DuplicatePoint(w[1].0));
            }
        }
        if order.len() > 1 && order[0].0 + TAU - order[order.len() - 1].0 <= POINT_RESOLUTION {
            return Err(Error::DuplicatePoint(order[0].0));
        }
        let mut rank = vec![0; points.len()];
        for (pos, &(_, orig)) in order.iter().enumerate() {
            rank[orig] = pos;
        }
        let mut limits: Vec<usize> = limits.iter().map(|&i| rank[i]).collect();
        limits.sort_unstable();
        limits.dedup();
        Ok(Self { points: order.into_iter().map(|p| p.0).collect(), limits })
    }

    pub fn from_angles(points: impl IntoIterator<Item = f64>) -> Result<Self> {
        Self::new(points.into_iter().collect(), Vec::new())
    }

    /// Builds a set from possibly clustered angles, keeping one representative per cluster of
    /// points within `merge` of each other (the first in angular order).
    pub fn from_angles_merged(points: impl IntoIterator<Item = f64>, merge: f64) -> Self {
        let mut pts: Vec<f64> = points.into_iter().filter(|p| p.is_finite()).map(normalize).collect();
        pts.sort_by(f64::total_cmp);
        let gap = merge.max(POINT_RESOLUTION);
        let mut kept: Vec<f64> = Vec::new();
        for p in pts {
            if kept.last().is_none_or(|&q| p - q > gap) {
                kept.push(p);
            }
        }
        if kept.len() > 1 && kept[0] + TAU - kept[kept.len() - 1] <= gap {
            kept.pop();
        }
        Self { points: kept, limits: Vec::new() }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Positions (in sorted order) of declared accumulation points.
    pub fn limits(&self) -> &[usize] {
        &self.limits
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Complementary arcs; gap `i` runs from point `i` to point `i+1` (cyclically).
    pub fn gaps(&self) -> Vec<Arc> {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let a = self.points[i];
                let b = if i + 1 < n { self.points[i + 1] } else { self.points[0] + TAU };
                Arc { start: a, length: b - a }
            })
            .collect()
    }

    /// Arc-length distance from angle `t` to the set.
    pub fn distance(&self, t: f64) -> Result<f64> {
        if self.points.is_empty() {
            return Err(Error::EmptySet);
        }
        let t = normalize(t);
        let i = self.points.partition_point(|&p| p <= t);
        let n = self.points.len();
        let d = |p: f64| {
            let r = (t - p).abs();
            r.min(TAU - r)
        };
        Ok(d(self.points[(i + n - 1) % n]).min(d(self.points[i % n])))
    }

    /// True if every point of `self` lies within `tol` of a point of `other`.
    pub fn is_subset_of(&self, other: &CircleSet, tol: f64) -> bool {
        self.points.iter().all(|&p| other.distance(p).is_ok_and(|d| d <= tol))
    }
}

/// `∫₀^{2π} log⁺(1/d(t,E)) dt` in closed form.
///
/// `tail_bound` accounts for the gaps a truncated description leaves out next to each declared
/// accumulation point. Near such a point the two nearest gaps `ℓ₁ ≤ ℓ₂` on the accumulating side
/// fix a ratio `ρ = ℓ₁/(ℓ₁+ℓ₂)`; the arc `ℓ₁` is then treated as the union of gaps `ℓ₁(1−ρ)ρ^i`.
/// Extrapolated terms are summed until they fall below `tol`.
pub fn carleson_integral(set: &CircleSet, tol: f64) -> Result<CertifiedValue> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    let gaps = set.gaps();
    let value = gaps.iter().map(|g| gap_contribution(g.length)).sum();
    let n = gaps.len();
    let mut tail = 0.0;
    for &i in set.limits() {
        if n < 3 {
            break;
        }
        // Gap i starts at point i; gap i-1 ends there.
        let right = (gaps[i].length, gaps[(i + 1) % n].length);
        let left = (gaps[(i + n - 1) % n].length, gaps[(i + n - 2) % n].length);
        let (l1, l2) = if right.0 <= left.0 { right } else { left };
        if l1 > l2 {
            continue;
        }
        let rho = l1 / (l1 + l2);
        let mut sub = 0.0;
        let mut len = l1 * (1.0 - rho);
        for _ in 0..100_000 {
            let c = gap_contribution(len);
            sub += c;
            if c < tol {
                break;
            }
            len *= rho;
        }
        tail += (sub - gap_contribution(l1)).max(0.0);
    }
    Ok(CertifiedValue { value, tail_bound: tail })
}


#[cfg(test)]
mod tests {
    use super::quad::from_singular_end;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// Quadrature of `log⁺(1/d(t,E))` split at the points and gap midpoints.
    fn oracle(set: &CircleSet) -> f64 {
        let f = |t: f64| {
            let d = set.distance(t).unwrap();
            if d >= 1.0 || d <= 0.0 {
                0.0
            } else {
                -d.ln()
            }
        };
        set.gaps()
            .iter()
            .map(|g| {
                let m = g.start + 0.5 * g.length;
                from_singular_end(&f, g.start, m, 1e-13) + from_singular_end(&|t| f(2.0 * m - t), g.start, m, 1e-13)
            })
            .sum()
    }

    #[test]
    fn distances() {
        let e = CircleSet::from_angles([PI]).unwrap();
        assert!((e.distance(0.0).unwrap() - PI).abs() < 1e-15);
        assert_eq!(e.distance(PI).unwrap(), 0.0);
        let e = CircleSet::from_angles([0.0, PI]).unwrap();
        assert!((e.distance(0.1).unwrap() - 0.1).abs() < 1e-15);
        assert!((e.distance(TAU - 0.1).unwrap() - 0.1).abs() < 1e-14);
        assert_eq!(CircleSet::from_angles([]).unwrap().distance(1.0), Err(Error::EmptySet));
    }

    #[test]
    fn construction_rules() {
        assert!(matches!(CircleSet::from_angles([1.0, 1.0 + 1e-13]), Err(Error::DuplicatePoint(_))));
        assert!(matches!(CircleSet::from_angles([0.0, TAU]), Err(Error::DuplicatePoint(_))));
        let e = CircleSet::new(vec![3.0, -1.0, 1.0], vec![0]).unwrap();
        assert_eq!(e.points()[0], 1.0);
        assert_eq!(e.limits(), &[1]);
        let total: f64 = e.gaps().iter().map(|g| g.length).sum();
        assert!((total - TAU).abs() < 1e-14);
        let m = CircleSet::from_angles_merged([1e-5, 1.1e-4, 2.0, TAU - 1e-5], 1e-3);
        assert_eq!(m.points(), &[1e-5, 2.0]);
    }

    #[test]
    fn half_gap_matches_quadrature() {
        for a in [1e-6, 1e-3, 0.05, 0.3, 0.77, 1.0] {
            let q = from_singular_end(&|u: f64| -u.ln(), 0.0, a, 1e-15);
            assert!((q - half_gap_integral(a)).abs() < 1e-10, "a = {a}");
        }
        assert_eq!(half_gap_integral(2.5), 1.0);
    }

    #[test]
    fn carleson_examples() {
        let one = CircleSet::from_angles([0.0]).unwrap();
        let v = carleson_integral(&one, 1e-12).unwrap();
        assert!((v.value - 2.0).abs() < 1e-12);
        assert!((oracle(&one) - 2.0).abs() < 1e-8);
        // Both gaps have half-length π/2 > 1, so each contributes 2.
        let two = CircleSet::from_angles([0.0, PI]).unwrap();
        let v = carleson_integral(&two, 1e-12).unwrap().value;
        assert!((v - 4.0).abs() < 1e-12);
        assert!((oracle(&two) - v).abs() < 1e-8);
    }

    #[test]
    fn carleson_truncation_depths_agree() {
        let set = |depth: i32| {
            let mut pts: Vec<f64> = (0..=depth).map(|k| 0.5f64.powi(k)).collect();
            pts.push(0.0);
            let last = pts.len() - 1;
            CircleSet::new(pts, vec![last]).unwrap()
        };
        let a = carleson_integral(&set(20), 1e-14).unwrap();
        let b = carleson_integral(&set(25), 1e-14).unwrap();
        assert!((a.value - b.value).abs() < 1e-3);
        // The extrapolated tail accounts for what the shallow truncation misses.
        assert!(a.tail_bound > 0.0);
        assert!((a.upper() - b.upper()).abs() < (a.value - b.value).abs());
    }

    #[test]
    fn carleson_matches_quadrature_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let k = rng.gen_range(1..12);
            let set = CircleSet::from_angles((0..k).map(|_| rng.gen_range(0.0..TAU))).unwrap();
            let v = carleson_integral(&set, 1e-10).unwrap().value;
            assert!((v - oracle(&set)).abs() <= 1e-8);
        }
    }

    #[test]
    fn carleson_is_antitone_in_the_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let small: Vec<f64> = (0..rng.gen_range(1..6)).map(|_| rng.gen_range(0.0..TAU)).collect();
            let mut big = small.clone();
            big.extend((0..rng.gen_range(1..6)).map(|_| rng.gen_range(0.0..TAU)));
            let e = CircleSet::from_angles(small).unwrap();
            let f = CircleSet::from_angles(big).unwrap();
            assert!(carleson_integral(&f, 1e-9).unwrap().value >= carleson_integral(&e, 1e-9).unwrap().value - 1e-12);
        }
    }

    #[test]
    fn json_form() {
        let e: CircleSet = serde_json::from_str(r#"{"points":[0.5,0.1],"limits":[0]}"#).unwrap();
        assert_eq!(e.points(), &[0.1, 0.5]);
        assert_eq!(e.limits(), &[1]);
        assert!(serde_json::from_str::<CircleSet>(r#"{"points":[0.5],"extra":1}"#).is_err());
        assert!(serde_json::from_str::<CircleSet>(r#"{"points":[0.5,0.5]}"#).is_err());
    }
}
