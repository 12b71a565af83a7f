use std::f64::consts::{PI, TAU};

use beurling::approx_unit::{ditkin_sequence, Truncation};
use beurling::circle_sets::{atw_check, carleson_integral, CircleSet};
use beurling::ideals::{hull, jet_membership, JetSpec, DEFAULT_GRID, DEFAULT_HULL_TOL, DEFAULT_MEMBERSHIP_TOL};
use beurling::series::LaurentSeries;
use beurling::spectral::{growth_fit, model_section, power_norms, quotient_inverse_norms, AtomicMeasure, Verdict};
use beurling::weights::Weight;
use beurling::{Complex64, Error};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn weight_from_json_drives_a_ditkin_run() {
    let w: Weight = serde_json::from_str(r#"{"kind":"symmetric_power","s":0.5}"#).unwrap();
    let f = LaurentSeries::polynomial(&[c(1.0), c(-2.0), c(1.0)]);
    let pts = ditkin_sequence(&f, &w, 0.5, &[4, 16, 64], Truncation::Tolerance(1e-10)).unwrap();
    assert!(pts.windows(2).all(|p| p[1].norm.value < p[0].norm.value));
    assert!(pts.iter().all(|p| p.norm.tail_bound <= 1e-8));
}

#[test]
fn hull_of_generators_satisfies_its_own_jets() {
    let z = |t: f64| Complex64::from_polar(1.0, t);
    let g = &(&LaurentSeries::alpha_minus(z(0.4)) * &LaurentSeries::alpha_minus(z(0.4)))
        * &LaurentSeries::alpha_minus(z(2.0));
    let h0 = hull(std::slice::from_ref(&g), 0, DEFAULT_GRID, DEFAULT_HULL_TOL).unwrap();
    let h1 = hull(std::slice::from_ref(&g), 1, DEFAULT_GRID, DEFAULT_HULL_TOL).unwrap();
    assert_eq!(h0.len(), 2);
    assert_eq!(h1.len(), 1);
    let jets = JetSpec::new(vec![h0, h1], 1.5).unwrap();
    assert!(jet_membership(&g, &jets, DEFAULT_MEMBERSHIP_TOL).unwrap().pass);
}

#[test]
fn finite_sets_are_carleson_and_atw() {
    let e = CircleSet::from_angles([0.0, 0.5 * PI, 2.0]).unwrap();
    let v = carleson_integral(&e, 1e-12).unwrap();
    assert!(v.value.is_finite() && v.tail_bound == 0.0);
    let r = atw_check(&e, 10, 32).unwrap();
    assert!(r.consistent && r.dominating_c2 >= r.c2);
    let back: CircleSet = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
    assert_eq!(back, e);
}

#[test]
fn model_operator_grows_like_sqrt() {
    let mu = AtomicMeasure::dirac(0.0, TAU * 0.01).unwrap();
    let t = model_section(&mu, 96).unwrap();
    let p = power_norms(&t, 120, true).unwrap();
    assert!(p.overflow_at.is_none());
    assert!(p.norms.windows(2).all(|w| w[1].1 > w[0].1));
    let r = growth_fit(&p.norms, 0.5).unwrap();
    assert_eq!(r.verdict, Verdict::SubexpSqrt);
}

#[test]
fn power_norms_are_submultiplicative() {
    let mu = AtomicMeasure::new(vec![(0.0, 0.05), (2.5, 0.03)]).unwrap();
    let t = model_section(&mu, 48).unwrap();
    for inverse in [false, true] {
        let v: Vec<f64> = power_norms(&t, 60, inverse).unwrap().norms.iter().map(|p| p.1).collect();
        for m in 1..=30 {
            for n in 1..=30 {
                let scale = v[m - 1] * v[n - 1];
                assert!(v[m + n - 1] <= scale + 1e-8 * scale.max(1.0), "m={m} n={n}");
            }
        }
    }
}

#[test]
fn quotient_programs_reject_bad_sets() {
    let empty = CircleSet::from_angles([]).unwrap();
    assert_eq!(quotient_inverse_norms(&empty, 0.0, 5, None), Err(Error::EmptySet));
    assert!(matches!(CircleSet::from_angles([1.0, 1.0]), Err(Error::DuplicatePoint(_))));
}
