//! Perfect sets given by oracles, nested middle-third schemes inside them, and gap sums.

use serde::{Deserialize, Serialize};

use super::CircleSet;
use crate::{Error, Result};

/// Default resolution of the perfect-set oracles.
pub const ORACLE_RESOLUTION: f64 = 1e-12;

/// Maximum refinement depth of [`build_carleson_perfect_subset`].
pub const MAX_DEPTH: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    Outside,
    /// A limit point from one side only (or isolated), at the oracle's resolution.
    OneSided,
    TwoSided,
}

/// Membership and accumulation queries for a perfect subset of a real interval of angles.
pub trait PerfectSet {
    /// Smallest interval containing the set.
    fn support(&self) -> (f64, f64);

    fn resolution(&self) -> f64;

    fn classify(&self, x: f64) -> PointClass;

    fn contains(&self, x: f64) -> bool {
        self.classify(x) != PointClass::Outside
    }

    /// A two-sided point of the set lying at or below `x` and as close to it as the oracle can
    /// resolve, or `None` if the set has no such point below `x`.
    fn two_sided_at_or_below(&self, x: f64) -> Option<f64>;

    /// Mirror image of [`PerfectSet::two_sided_at_or_below`].
    fn two_sided_at_or_above(&self, x: f64) -> Option<f64>;
}

/// A closed interval `[a, b]`; every interior point is two-sided.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalSet {
    a: f64,
    b: f64,
    res: f64,
}

impl IntervalSet {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b - a > 4.0 * ORACLE_RESOLUTION) {
            return Err(Error::param("interval", format!("need a < b, got [{a}, {b}]")));
        }
        Ok(Self { a, b, res: ORACLE_RESOLUTION })
    }
}

impl PerfectSet for IntervalSet {
    fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    fn resolution(&self) -> f64 {
        self.res
    }

    fn classify(&self, x: f64) -> PointClass {
        if x < self.a - self.res || x > self.b + self.res {
            PointClass::Outside
        } else if (x - self.a).abs() <= self.res || (x - self.b).abs() <= self.res {
            PointClass::OneSided
        } else {
            PointClass::TwoSided
        }
    }

    fn two_sided_at_or_below(&self, x: f64) -> Option<f64> {
        let r = x.min(self.b - 2.0 * self.res);
        (r > self.a + self.res).then_some(r)
    }

    fn two_sided_at_or_above(&self, x: f64) -> Option<f64> {
        let r = x.max(self.a + 2.0 * self.res);
        (r < self.b - self.res).then_some(r)
    }
}

/// The middle-thirds Cantor set scaled to `[a, b]`.
///
/// Queries descend the ternary tree to the depth where intervals are still about nine
/// resolution units wide. Endpoints of intervals up to that depth are one-sided; two-sided points
/// are produced with the non-terminating ternary tails `0.0202…` and `0.2020…`, which sit a quarter
/// of an interval away from both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiddleThirdsCantor {
    a: f64,
    width: f64,
    res: f64,
    depth: u32,
}

impl MiddleThirdsCantor {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let width = b - a;
        if !(a.is_finite() && b.is_finite() && width > 100.0 * ORACLE_RESOLUTION) {
            return Err(Error::param("interval", format!("need a < b with room to resolve, got [{a}, {b}]")));
        }
        let depth = ((width / (9.0 * ORACLE_RESOLUTION)).ln() / 3f64.ln()).floor() as u32;
        Ok(Self { a, width, res: ORACLE_RESOLUTION, depth })
    }

    /// Number of ternary levels the oracle resolves.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    fn unit_coord(self, x: f64) -> f64 {
        (x - self.a) / self.width
    }

    fn unit_inverse(self, u: f64) -> f64 {
        self.a + self.width * u
    }

    /// Two-sided point of the unit Cantor set at or below `u`, on the unit scale.
    fn below_unit(&self, u: f64) -> Option<f64> {
        if u < 0.0 {
            return None;
        }
        let u = u.min(1.0);
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..self.depth {
            let third = (hi - lo) / 3.0;
            if u >= hi - third {
                lo = hi - third;
            } else if u >= lo + third {
                // In a removed gap: the answer hugs the right end of the left child.
                hi = lo + third;
                let w = 3f64.powi(-(self.depth as i32));
                return Some(hi - 0.25 * w);
            } else {
                hi = lo + third;
            }
        }
        let w = hi - lo;
        Some(if lo + 0.75 * w <= u { lo + 0.75 * w } else { lo + 0.25 * w })
    }
}

impl PerfectSet for MiddleThirdsCantor {
    fn support(&self) -> (f64, f64) {
        (self.a, self.a + self.width)
    }

    fn resolution(&self) -> f64 {
        self.res
    }

    fn classify(&self, x: f64) -> PointClass {
        let u = self.unit_coord(x);
        let tol = self.res / self.width;
        if u < -tol || u > 1.0 + tol {
            return PointClass::Outside;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut one_sided = false;
        for _ in 0..self.depth {
            if (u - lo).abs() <= tol || (u - hi).abs() <= tol {
                one_sided = true;
            }
            let third = (hi - lo) / 3.0;
            if u <= lo + third + tol {
                hi = lo + third;
            } else if u >= hi - third - tol {
                lo = hi - third;
            } else {
                return PointClass::Outside;
            }
        }
        if one_sided || (u - lo).abs() <= tol || (u - hi).abs() <= tol {
            PointClass::OneSided
        } else {
            PointClass::TwoSided
        }
    }

    fn two_sided_at_or_below(&self, x: f64) -> Option<f64> {
        self.below_unit(self.unit_coord(x)).map(|u| self.unit_inverse(u))
    }

    fn two_sided_at_or_above(&self, x: f64) -> Option<f64> {
        // The set is symmetric under u ↦ 1 − u.
        self.below_unit(1.0 - self.unit_coord(x)).map(|u| self.unit_inverse(1.0 - u))
    }
}

/// Nested closed intervals `F_0 ⊃ F_1 ⊃ …` with the open gaps removed at each step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorScheme {
    pub base: [f64; 2],
    /// `levels[n]` holds the `2^n` intervals of `F_n`, left to right.
    pub levels: Vec<Vec<[f64; 2]>>,
    /// `removed[n-1]` holds the `2^{n-1}` gaps opened at step `n`.
    pub removed: Vec<Vec<[f64; 2]>>,
}

impl CantorScheme {
    /// The exact middle-thirds scheme on `[a, b]`.
    pub fn middle_thirds(a: f64, b: f64, depth: usize) -> Self {
        let mut levels = vec![vec![[a, b]]];
        let mut removed = Vec::new();
        for _ in 0..depth {
            let prev = levels.last().unwrap();
            let mut next = Vec::with_capacity(prev.len() * 2);
            let mut gaps = Vec::with_capacity(prev.len());
            for &[l, r] in prev {
                let w = (r - l) / 3.0;
                next.push([l, l + w]);
                next.push([r - w, r]);
                gaps.push([l + w, r - w]);
            }
            levels.push(next);
            removed.push(gaps);
        }
        Self { base: [a, b], levels, removed }
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Checks interval counts, the `3^{-n}(b₀−a₀)` length bound, nesting, and that each removed
    /// gap is exactly the space between two siblings.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let [a0, b0] = self.base;
        let w0 = b0 - a0;
        if self.levels.first() != Some(&vec![self.base]) {
            return Err("level 0 is not the base interval".into());
        }
        if self.removed.len() != self.depth() {
            return Err(format!("{} gap levels for depth {}", self.removed.len(), self.depth()));
        }
        for (n, level) in self.levels.iter().enumerate() {
            if level.len() != 1 << n {
                return Err(format!("level {n} has {} intervals, expected {}", level.len(), 1u64 << n));
            }
            let cap = w0 * 3f64.powi(-(n as i32)) * (1.0 + 1e-9);
            if let Some(iv) = level.iter().find(|[l, r]| !(r > l) || r - l > cap) {
                return Err(format!("level {n} interval {iv:?} is empty or longer than {cap:e}"));
            }
            if n == 0 {
                continue;
            }
            let parents = &self.levels[n - 1];
            let gaps = &self.removed[n - 1];
            if gaps.len() != parents.len() {
                return Err(format!("step {n} removed {} gaps, expected {}", gaps.len(), parents.len()));
            }
            for (i, &[pl, pr]) in parents.iter().enumerate() {
                let [ll, lr] = level[2 * i];
                let [rl, rr] = level[2 * i + 1];
                if !(pl <= ll && rr <= pr) {
                    return Err(format!("level {n} children of {i} escape their parent"));
                }
                if gaps[i] != [lr, rl] || !(lr < rl) {
                    return Err(format!("step {n} gap {i} does not separate the children"));
                }
            }
        }
        Ok(())
    }

    /// All endpoints of the deepest level, as angles.
    pub fn endpoints(&self) -> Vec<f64> {
        self.levels.last().unwrap().iter().flat_map(|&[l, r]| [l, r]).collect()
    }
}

/// Builds a nested scheme inside `set`: each interval loses its middle third, with the gap
/// endpoints moved outward to two-sided points of the set.
pub fn build_carleson_perfect_subset(set: &dyn PerfectSet, depth: usize) -> Result<CantorScheme> {
    if depth > MAX_DEPTH {
        return Err(Error::param("depth", format!("at most {MAX_DEPTH}, got {depth}")));
    }
    let (lo, hi) = set.support();
    let sparse = |level: usize, reason: String| Error::TooSparse { level, reason };
    let a0 = set.two_sided_at_or_above(lo).ok_or_else(|| sparse(0, "no two-sided point near the left end".into()))?;
    let b0 = set.two_sided_at_or_below(hi).ok_or_else(|| sparse(0, "no two-sided point near the right end".into()))?;
    if !(a0 < b0) {
        return Err(sparse(0, "support collapses at the oracle's resolution".into()));
    }
    let res = set.resolution();
    let mut levels = vec![vec![[a0, b0]]];
    let mut removed = Vec::new();
    for n in 1..=depth {
        let prev = levels.last().unwrap();
        let mut next = Vec::with_capacity(prev.len() * 2);
        let mut gaps = Vec::with_capacity(prev.len());
        for &[a, b] in prev {
            let w = (b - a) / 3.0;
            let gl = set.two_sided_at_or_below(a + w);
            let gr = set.two_sided_at_or_above(b - w);
            let (Some(gl), Some(gr)) = (gl, gr) else {
                return Err(sparse(n, format!("no two-sided endpoints inside [{a}, {b}]")));
            };
            if !(a + res < gl && gl < gr && gr < b - res) {
                return Err(sparse(n, format!("interval [{a}, {b}] cannot be split at resolution {res:e}")));
            }
            for e in [gl, gr] {
                if set.classify(e) != PointClass::TwoSided {
                    return Err(sparse(n, format!("endpoint {e} is not a two-sided point")));
                }
            }
            next.push([a, gl]);
            next.push([gr, b]);
            gaps.push([gl, gr]);
        }
        levels.push(next);
        removed.push(gaps);
    }
    Ok(CantorScheme { base: [a0, b0], levels, removed })
}

/// Gap lengths grouped by level, each with a multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapLevels(pub Vec<Vec<(f64, u64)>>);

impl GapLevels {
    pub fn from_scheme(scheme: &CantorScheme) -> Self {
        Self(scheme.removed.iter().map(|lv| lv.iter().map(|[l, r]| (r - l, 1)).collect()).collect())
    }

    /// One level per gap, largest first.
    pub fn from_set(set: &CircleSet) -> Self {
        let mut lens: Vec<f64> = set.gaps().iter().map(|g| g.length).collect();
        lens.sort_by(|a, b| b.total_cmp(a));
        Self(lens.into_iter().map(|l| vec![(l, 1)]).collect())
    }

    /// The middle-thirds profile on an interval of the given width: `2^{n−1}` gaps of length
    /// `3^{−n}·width` at step `n`.
    pub fn middle_thirds(width: f64, levels: usize) -> Self {
        Self((1..=levels).map(|n| vec![(width * 3f64.powi(-(n as i32)), 1u64 << (n - 1))]).collect())
    }
}

/// Cumulative `Σ |J| ln(1/|J|)` after each level.
pub fn carleson_gap_sum(gaps: &GapLevels) -> Vec<f64> {
    let mut acc = 0.0;
    gaps.0
        .iter()
        .map(|lv| {
            acc += lv.iter().map(|&(l, c)| if l > 0.0 { c as f64 * l * -l.ln() } else { 0.0 }).sum::<f64>();
            acc
        })
        .collect()
}

/// Per-level terms `(b₀−a₀)((n−1)ln 3 − ln(b₀−a₀))(2/3)^{n−1}` for `n = 1..=levels`.
pub fn perfect_subset_gap_bound(width: f64, levels: usize) -> Vec<f64> {
    let l3 = 3f64.ln();
    (1..=levels).map(|n| width * ((n - 1) as f64 * l3 - width.ln()) * (2.0f64 / 3.0).powi(n as i32 - 1)).collect()
}

/// Sum of the series in [`perfect_subset_gap_bound`]: `(b₀−a₀)(6 ln 3 − 3 ln(b₀−a₀))`.
pub fn perfect_subset_gap_total(width: f64) -> f64 {
    width * (6.0 * 3f64.ln() - 3.0 * width.ln())
}

/// Points of a finite description split by whether both neighbours lie within `resolution`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneSidedPartition {
    pub resolution: f64,
    /// Points with an empty neighbourhood on at least one side.
    pub one_sided: Vec<usize>,
    pub two_sided: Vec<usize>,
}

pub fn classify_one_sided(set: &CircleSet, resolution: f64) -> Result<OneSidedPartition> {
    if !(resolution > 0.0) {
        return Err(Error::param("resolution", format!("must be positive, got {resolution}")));
    }
    let gaps = set.gaps();
    let n = gaps.len();
    let (mut one_sided, mut two_sided) = (Vec::new(), Vec::new());
    for i in 0..n {
        let left = gaps[(i + n - 1) % n].length;
        let right = gaps[i].length;
        if left <= resolution && right <= resolution {
            two_sided.push(i);
        } else {
            one_sided.push(i);
        }
    }
    Ok(OneSidedPartition { resolution, one_sided, two_sided })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent membership test through base-3 digits.
    fn in_cantor_digits(u: f64, digits: u32) -> bool {
        let mut v = u;
        for _ in 0..digits {
            v *= 3.0;
            let d = v.floor();
            if d == 1.0 && v - d > 1e-9 && v - d < 1.0 - 1e-9 {
                return false;
            }
            v -= d;
        }
        true
    }

    #[test]
    fn cantor_oracle_membership() {
        let c = MiddleThirdsCantor::new(0.0, 1.0).unwrap();
        assert!(c.depth() >= 20);
        for x in [0.0, 1.0, 1.0 / 3.0, 2.0 / 3.0, 0.25, 0.75, 2.0 / 9.0] {
            assert!(c.contains(x), "{x}");
        }
        for x in [0.5, 0.4, 0.6, 0.15] {
            assert!(!c.contains(x), "{x}");
        }
        for k in 0..200 {
            let u = (k as f64 + 0.37) / 200.0;
            if !in_cantor_digits(u, 6) {
                assert!(!c.contains(u), "{u}");
            }
        }
        assert_eq!(c.classify(1.0 / 3.0), PointClass::OneSided);
        assert_eq!(c.classify(0.0), PointClass::OneSided);
        // 1/4 = 0.0202…₃ never terminates: a two-sided point.
        assert_eq!(c.classify(0.25), PointClass::TwoSided);
        assert_eq!(c.classify(0.5), PointClass::Outside);
    }

    #[test]
    fn cantor_two_sided_queries() {
        let c = MiddleThirdsCantor::new(0.0, 1.0).unwrap();
        for x in [0.2, 0.34, 0.5, 0.7, 0.99, 1.0 / 3.0, 0.0 + 1e-6] {
            let lo = c.two_sided_at_or_below(x).unwrap();
            let hi = c.two_sided_at_or_above(x).unwrap();
            assert!(lo <= x + 1e-11 && hi >= x - 1e-11);
            assert_eq!(c.classify(lo), PointClass::TwoSided);
            assert_eq!(c.classify(hi), PointClass::TwoSided);
        }
        // Inside the first gap the answers hug its endpoints.
        assert!((c.two_sided_at_or_below(0.5).unwrap() - 1.0 / 3.0).abs() < 1e-10);
        assert!((c.two_sided_at_or_above(0.5).unwrap() - 2.0 / 3.0).abs() < 1e-10);
        assert!(c.two_sided_at_or_below(-0.1).is_none());
    }

    #[test]
    fn interval_scheme() {
        let p = IntervalSet::new(0.5, 2.0).unwrap();
        let s = build_carleson_perfect_subset(&p, 10).unwrap();
        s.verify().unwrap();
        let w0 = s.base[1] - s.base[0];
        for (n, lv) in s.levels.iter().enumerate() {
            assert!(lv.iter().all(|[l, r]| r - l <= w0 * 3f64.powi(-(n as i32)) * (1.0 + 1e-12)));
        }
    }

    #[test]
    fn cantor_scheme_depth_12() {
        let p = MiddleThirdsCantor::new(0.0, 1.0).unwrap();
        let s = build_carleson_perfect_subset(&p, 12).unwrap();
        s.verify().unwrap();
        for lv in &s.removed {
            for &[l, r] in lv {
                assert_eq!(p.classify(l), PointClass::TwoSided);
                assert_eq!(p.classify(r), PointClass::TwoSided);
            }
        }
        let width = s.base[1] - s.base[0];
        let sums = carleson_gap_sum(&GapLevels::from_scheme(&s));
        assert!(sums.iter().all(|&v| v <= perfect_subset_gap_total(width)));
    }

    #[test]
    fn too_deep_reports_the_level() {
        let p = MiddleThirdsCantor::new(0.0, 1.0).unwrap();
        match build_carleson_perfect_subset(&p, 40) {
            Err(Error::TooSparse { level, .. }) => assert!(level > 12 && level <= 40),
            other => panic!("expected failure, got {other:?}"),
        }
        assert!(build_carleson_perfect_subset(&p, 41).is_err());
    }

    #[test]
    fn middle_thirds_gap_sum_limit() {
        let sums = carleson_gap_sum(&GapLevels::middle_thirds(1.0, 60));
        let limit = 3.0 * 3f64.ln();
        assert!((sums[59] - limit).abs() < 1e-6);
        assert!(sums.windows(2).all(|w| w[1] >= w[0]));
        // Exact scheme agrees with the analytic profile.
        let s = CantorScheme::middle_thirds(0.0, 1.0, 8);
        s.verify().unwrap();
        let a = carleson_gap_sum(&GapLevels::from_scheme(&s));
        let b = carleson_gap_sum(&GapLevels::middle_thirds(1.0, 8));
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn single_unit_gap_sums_to_zero() {
        assert_eq!(carleson_gap_sum(&GapLevels(vec![vec![(1.0, 1)]])), vec![0.0]);
    }

    #[test]
    fn bound_series_total() {
        for w in [0.3, 1.0, 2.5] {
            let s: f64 = perfect_subset_gap_bound(w, 400).iter().sum();
            assert!((s - perfect_subset_gap_total(w)).abs() < 1e-9);
        }
    }

    #[test]
    fn one_sided_examples() {
        let mut pts: Vec<f64> = (1..=30).map(|k| 0.5f64.powi(k)).collect();
        pts.push(0.0);
        pts.push(3.0);
        let set = CircleSet::from_angles(pts).unwrap();
        let part = classify_one_sided(&set, 1e-6).unwrap();
        // 0 sits at the end of the sequence; 3.0 and the coarse dyadic points are isolated.
        assert!(part.one_sided.contains(&0));
        assert!(part.one_sided.contains(&(set.len() - 1)));
        assert!(part.two_sided.contains(&5));

        let d = 5;
        let s = CantorScheme::middle_thirds(0.0, 1.0, d);
        let set = CircleSet::from_angles(s.endpoints()).unwrap();
        let part = classify_one_sided(&set, 3f64.powi(-(d as i32) - 1)).unwrap();
        assert!(part.two_sided.is_empty());

        let set = CircleSet::from_angles((0..=1000).map(|k| 1.0 + k as f64 * 1e-4)).unwrap();
        let part = classify_one_sided(&set, 2e-4).unwrap();
        assert_eq!(part.one_sided, vec![0, 1000]);
    }

    #[test]
    fn scheme_json_round_trip() {
        let s = CantorScheme::middle_thirds(0.0, 1.0, 2);
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.starts_with(r#"{"base":[0.0,1.0],"levels":[[[0.0,1.0]]"#));
        assert_eq!(serde_json::from_str::<CantorScheme>(&j).unwrap(), s);
    }
}
