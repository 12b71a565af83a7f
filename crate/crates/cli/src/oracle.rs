//! Independent reference computations used to check the library's closed forms.

use beurling::circle_sets::CircleSet;

/// `Σ_{k≥j} (1+k)^β x^k`, summed term by term until the next term drops below `1e-16` of the
/// running total.
pub fn tail_sum(beta: f64, j: u64, x: f64) -> f64 {
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    let mut k = j;
    loop {
        let term = (1.0 + k as f64).powf(beta) * x.powf(k as f64);
        if term == 0.0 || (acc > 0.0 && term < 1e-16 * acc) {
            return acc + comp;
        }
        // Neumaier summation keeps long sums accurate to a few ulps.
        let t = acc + term;
        comp += if acc.abs() >= term.abs() { (acc - t) + term } else { (term - t) + acc };
        acc = t;
        k += 1;
    }
}

/// Adaptive Simpson rule on `[a, b]`.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    struct Ctx<'a> {
        f: &'a dyn Fn(f64) -> f64,
    }
    impl Ctx<'_> {
        #[allow(clippy::too_many_arguments)]
        fn rec(&self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = ((self.f)(lm), (self.f)(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            let delta = left + right - whole;
            if depth == 0 || delta.abs() <= 15.0 * eps {
                return left + right + delta / 15.0;
            }
            self.rec(a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
                + self.rec(m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
        }
    }
    let ctx = Ctx { f };
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    ctx.rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, 48)
}

/// `∫₀^{2π} log⁺(1/d(t,E)) dt` by quadrature of the distance function, each gap split at its
/// midpoint and integrated from the point end with the substitution `t = a + h·u²`.
pub fn carleson_quadrature(set: &CircleSet, eps: f64) -> f64 {
    let f = |t: f64| {
        let d = set.distance(t).unwrap_or(0.0);
        if d <= 0.0 || d >= 1.0 {
            0.0
        } else {
            -d.ln()
        }
    };
    let half = |a: f64, h: f64, dir: f64| {
        simpson(&|u: f64| if u == 0.0 { 0.0 } else { f(a + dir * h * u * u) * 2.0 * h * u }, 0.0, 1.0, eps)
    };
    set.gaps()
        .iter()
        .map(|g| {
            let h = 0.5 * g.length;
            half(g.start, h, 1.0) + half(g.start + g.length, h, -1.0)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_case() {
        for x in [0.1, 0.5, 0.9] {
            assert!((tail_sum(0.0, 3, x) - x.powi(3) / (1.0 - x)).abs() < 1e-13);
        }
    }

    #[test]
    fn simpson_on_a_log() {
        let v = simpson(&|u: f64| if u == 0.0 { 0.0 } else { -(u * u).ln() * 2.0 * u }, 0.0, 1.0, 1e-14);
        assert!((v - 1.0).abs() < 1e-12);
    }
}
